"""Numerical tolerances shared by the library and its test-suite."""

#: absolute tolerance for unitarity and elementwise equality checks
ATOL = 1e-12
#: eigen-reconstruction, closed-form and generator comparisons
RECON_TOL = 1e-10
#: eigenvalues of Theta in [-PSD_TOL, 0) are clamped to zero
PSD_TOL = 1e-10
#: density-matrix invariants
TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-8
