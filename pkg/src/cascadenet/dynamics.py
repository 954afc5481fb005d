"""Master-equation dynamics on truncated Fock spaces.

Density matrices are vectorised by stacking columns, so that
``vec(A rho B) = (B^T kron A) vec(rho)``. Site 1 is the leftmost tensor
factor. Generators are stored as sparse matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .amplitudes import CouplingMatrix, coupling_matrix
from .errors import PhysicalityError, ResourceCapError, ValidationError
from .gksl import GkslForm
from .network import NetworkSpec, RegularSpec, as_network
from .tolerances import HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL

#: default cap on the superoperator dimension d^(2M)
MAX_SUPEROP_DIM = 2**24


@dataclass(frozen=True)
class TruncatedState:
    M: int
    d: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        D = self.d**self.M
        if rho.shape != (D, D):
            raise ValidationError(f"rho must be {D}x{D} for M={self.M}, d={self.d}")
        object.__setattr__(self, "rho", rho)

    def violations(self) -> list[str]:
        out = []
        tr = np.trace(self.rho)
        if abs(tr - 1.0) > TRACE_TOL:
            out.append(f"trace {tr.real:.3e}{tr.imag:+.3e}j")
        herm = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        if herm > HERMITIAN_TOL:
            out.append(f"non-Hermitian by {herm:.3e}")
        lo = float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])
        if lo < -POSITIVITY_TOL:
            out.append(f"min eigenvalue {lo:.3e}")
        return out


@dataclass(frozen=True)
class Superoperator:
    M: int
    d: int
    matrix: sp.csr_matrix

    def trace_defect(self) -> float:
        """Largest entry of ``vec(I)^T S``; zero for trace-preserving maps."""
        D = self.d**self.M
        vid = np.eye(D).reshape(-1, order="F")
        return float(np.max(np.abs(self.matrix.T @ vid), initial=0.0))

    def __sub__(self, other):
        return Superoperator(self.M, self.d, (self.matrix - other.matrix).tocsr())

    def frobenius(self) -> float:
        return float(sp.linalg.norm(self.matrix, "fro"))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        D = rho.shape[0]
        v = self.matrix @ rho.reshape(-1, order="F")
        return v.reshape((D, D), order="F")


@dataclass
class Trajectory:
    times: np.ndarray
    states: list = field(default_factory=list)
    #: max |rho_dt - rho_dt/2| at t_final; None when not estimated
    step_error: float | None = None


def lowering_operator(d: int) -> np.ndarray:
    if d < 2:
        raise ValidationError("local dimension d must be >= 2")
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def site_operators(M: int, d: int) -> list:
    """Sparse ``a_m`` for m=1..M on the d^M dimensional space."""
    a = sp.csr_matrix(lowering_operator(d))
    ops = []
    for m in range(M):
        left = sp.identity(d**m, format="csr")
        right = sp.identity(d ** (M - m - 1), format="csr")
        ops.append(sp.kron(sp.kron(left, a), right, format="csr"))
    return ops


def _check_cap(M, d, max_dim):
    dim = d ** (2 * M)
    if dim > max_dim:
        raise ResourceCapError(
            f"superoperator dimension d^(2M) = {dim} exceeds cap {max_dim}"
        )


def _left(A, eye):
    return sp.kron(eye, A, format="csr")


def _right(B, eye):
    return sp.kron(B.T, eye, format="csr")


def _sandwich(A, B):
    """Superoperator of ``rho -> A rho B``."""
    return sp.kron(B.T, A, format="csr")


def _dissipator(L, Ldag, eye):
    LdL = Ldag @ L
    return _sandwich(L, Ldag) - 0.5 * _left(LdL, eye) - 0.5 * _right(LdL, eye)


def cascade_generator(
    net: NetworkSpec | RegularSpec, d: int = 2, max_dim: int = MAX_SUPEROP_DIM
) -> Superoperator:
    """Local damping plus the pairwise cascade terms, with couplings from the network."""
    net = as_network(net)
    zeta = coupling_matrix(net)
    return cascade_generator_from_zeta(zeta, net.gamma, d, max_dim)


def cascade_generator_from_zeta(
    zeta: CouplingMatrix, gamma: float, d: int = 2, max_dim: int = MAX_SUPEROP_DIM
) -> Superoperator:
    M = zeta.M
    _check_cap(M, d, max_dim)
    a = site_operators(M, d)
    ad = [op.conj().T.tocsr() for op in a]
    eye = sp.identity(d**M, format="csr")
    S = sp.csr_matrix((d ** (2 * M), d ** (2 * M)), dtype=complex)
    for m in range(M):
        S = S + gamma * _dissipator(a[m], ad[m], eye)
    for m in range(M):
        for mp in range(m + 1, M):
            z = zeta.zeta[m, mp]
            if z == 0:
                continue
            # z a_m [rho, a_mp^dag] + z* [a_mp, rho] a_m^dag
            S = S + gamma * z * (_sandwich(a[m], ad[mp]) - _left(a[m] @ ad[mp], eye))
            S = S + gamma * np.conj(z) * (
                _sandwich(a[mp], ad[m]) - _right(a[mp] @ ad[m], eye)
            )
    return Superoperator(M, d, S.tocsr())


def gksl_generator(
    form: GkslForm, d: int = 2, max_dim: int = MAX_SUPEROP_DIM
) -> Superoperator:
    M = form.M
    _check_cap(M, d, max_dim)
    a = site_operators(M, d)
    ad = [op.conj().T.tocsr() for op in a]
    eye = sp.identity(d**M, format="csr")
    H = sp.csr_matrix((d**M, d**M), dtype=complex)
    for m in range(M):
        for mp in range(M):
            h = form.heff_coeffs[m, mp]
            if h != 0:
                H = H + h * (a[m] @ ad[mp])
    S = -1j * (_left(H, eye) - _right(H, eye))
    w = form.lindblad_coeffs
    for i, rate in enumerate(form.rates):
        if rate == 0:
            continue
        L = sum(w[m, i] * a[m] for m in range(M))
        L = sp.csr_matrix(L)
        S = S + rate * _dissipator(L, L.conj().T.tocsr(), eye)
    return Superoperator(M, d, sp.csr_matrix(S))


def product_state(M: int, d: int, kets) -> TruncatedState:
    """Pure product state; ``kets[m]`` is the normalised local state of site m+1."""
    psi = np.ones(1, dtype=complex)
    for ket in kets:
        ket = np.asarray(ket, dtype=complex)
        if ket.shape != (d,):
            raise ValidationError(f"local state must have length d={d}")
        psi = np.kron(psi, ket / np.linalg.norm(ket))
    return TruncatedState(M, d, np.outer(psi, psi.conj()))


def fock_state(M: int, d: int, excited=(), superposed=False) -> TruncatedState:
    """Sites listed in ``excited`` (1-based) hold one quantum, the rest vacuum.

    With ``superposed`` the excited sites are prepared in (|0> + |1>)/sqrt 2.
    """
    kets = []
    for m in range(1, M + 1):
        ket = np.zeros(d)
        if m in excited:
            if superposed:
                ket[0] = ket[1] = 1.0
            else:
                ket[1] = 1.0
        else:
            ket[0] = 1.0
        kets.append(ket)
    for m in excited:
        if not (1 <= m <= M):
            raise ValidationError(f"site {m} outside 1..{M}")
    return product_state(M, d, kets)


def _rk4(S, v, h, steps, every=0):
    """Integrate ``steps`` steps; with ``every > 0`` keep (index, v) at every
    ``every``-th step and at the last one."""
    out = [(0, v.copy())] if every else None
    for i in range(1, steps + 1):
        k1 = S @ v
        k2 = S @ (v + 0.5 * h * k1)
        k3 = S @ (v + 0.5 * h * k2)
        k4 = S @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if every and (i % every == 0 or i == steps):
            out.append((i, v.copy()))
    return v, out


def evolve(
    gen: Superoperator,
    rho0: TruncatedState,
    t_final: float,
    dt: float,
    estimate_error: bool = True,
    check: bool = True,
    every: int = 1,
) -> Trajectory:
    """Fixed-step RK4 from 0 to ``t_final``; every emitted state is checked.

    The step is shrunk to ``t_final / ceil(t_final / dt)`` so the grid ends
    exactly at ``t_final``. Only every ``every``-th state (and the final one)
    is kept.
    """
    if not dt > 0:
        raise ValidationError("dt must be positive")
    if every < 1:
        raise ValidationError("every must be >= 1")
    if t_final < 0:
        raise ValidationError("t_final must be non-negative")
    if (gen.M, gen.d) != (rho0.M, rho0.d):
        raise ValidationError("state and generator act on different spaces")
    steps = max(int(math.ceil(t_final / dt - 1e-9)), 0)
    h = t_final / steps if steps else 0.0
    D = rho0.rho.shape[0]
    v0 = rho0.rho.reshape(-1, order="F")
    last, kept = _rk4(gen.matrix, v0, h, steps, every)
    idx = np.array([i for i, _ in kept])
    states = [TruncatedState(gen.M, gen.d, v.reshape((D, D), order="F")) for _, v in kept]
    if check:
        for i, st in zip(idx, states):
            bad = st.violations()
            if bad:
                raise PhysicalityError(
                    f"state at t={i * h:.6g} violates invariants ({'; '.join(bad)}); "
                    "reduce dt"
                )
    err = None
    if estimate_error and steps:
        fine, _ = _rk4(gen.matrix, v0, h / 2, 2 * steps)
        err = float(np.max(np.abs(fine - last)))
    return Trajectory(idx * h, states, err)


def populations(state: TruncatedState) -> np.ndarray:
    """<n_m> for every site."""
    diag = np.real(np.diag(state.rho)).reshape((state.d,) * state.M)
    n = np.arange(state.d)
    out = []
    for m in range(state.M):
        axes = tuple(i for i in range(state.M) if i != m)
        out.append(float(diag.sum(axis=axes) @ n))
    return np.array(out)


def moments(state: TruncatedState) -> np.ndarray:
    """<a_m> for every site."""
    return np.array([(op.multiply(state.rho.T)).sum() for op in site_operators(state.M, state.d)])


def first_moment_drift(zeta: CouplingMatrix, gamma: float) -> np.ndarray:
    """Drift ``G`` of ``d<a>/dt = G <a>``: ``G[m', m] = -gamma zeta[m, m']`` below
    the diagonal and ``-gamma/2`` on it. Exact in the at-most-one-excitation sector."""
    G = -gamma * np.asarray(zeta.zeta).T.astype(complex)
    np.fill_diagonal(G, -0.5 * gamma)
    return G
