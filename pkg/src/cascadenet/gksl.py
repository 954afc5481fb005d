"""Standard (GKSL) form of the cascade master equation.

The dissipative part of the cascade generator is a Kossakowski form whose
coefficient matrix ``Theta`` has ``gamma`` on the diagonal and
``gamma * zeta[m, m']`` above it. Diagonalising ``Theta = w diag(rates) w^H``
gives the collective jump operators ``L_i = sum_m w[m, i] a_m``; the
remainder of the cascade generator is the Hamiltonian

    H_eff = sum_{m, m'} h[m, m'] a_m a_{m'}^dag,
    h[m, m'] = -(i gamma / 2) zeta[m, m']  (m < m'),   h = h^H.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .amplitudes import CouplingMatrix
from .errors import PhysicalityError, ValidationError
from .tolerances import ATOL, PSD_TOL, RECON_TOL


@dataclass(frozen=True)
class ThetaMatrix:
    matrix: np.ndarray
    gamma: float

    def __post_init__(self):
        T = np.asarray(self.matrix, dtype=complex)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ValidationError("Theta must be square")
        if np.max(np.abs(T - T.conj().T), initial=0.0) > ATOL:
            raise ValidationError("Theta is not Hermitian")
        if np.max(np.abs(np.diag(T) - self.gamma), initial=0.0) > ATOL:
            raise ValidationError("Theta must have gamma on its diagonal")
        object.__setattr__(self, "matrix", T)

    @property
    def M(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class GkslForm:
    """Rates (descending), jump-operator coefficients and Hamiltonian coefficients.

    Column ``i`` of ``lindblad_coeffs`` holds the weights of
    ``L_i = sum_m lindblad_coeffs[m, i] a_m``.
    """

    rates: np.ndarray
    lindblad_coeffs: np.ndarray
    heff_coeffs: np.ndarray

    @property
    def M(self):
        return len(self.rates)

    def kossakowski(self) -> np.ndarray:
        w = self.lindblad_coeffs
        return (w * self.rates) @ w.conj().T

    def projector(self, rtol: float = 1e-8) -> np.ndarray:
        """Projector onto the span of jump operators with nonzero rate."""
        keep = self.rates > rtol * max(float(np.max(self.rates)), 1.0)
        w = self.lindblad_coeffs[:, keep]
        return w @ w.conj().T


def build_theta(zeta: CouplingMatrix, gamma: float) -> ThetaMatrix:
    upper = gamma * np.asarray(zeta.zeta)
    T = upper + upper.conj().T + gamma * np.eye(zeta.M)
    return ThetaMatrix(T, float(gamma))


def heff_coeffs(zeta: CouplingMatrix, gamma: float) -> np.ndarray:
    upper = -0.5j * gamma * np.asarray(zeta.zeta)
    return upper + upper.conj().T


def _fix_phases(w):
    """Make the first non-negligible entry of every column real positive."""
    w = w.copy()
    for i in range(w.shape[1]):
        col = w[:, i]
        j = int(np.argmax(np.abs(col) > 1e-8))
        if abs(col[j]) > 0:
            w[:, i] = col * (abs(col[j]) / col[j])
    return w


def gksl_decompose(theta: ThetaMatrix, zeta: CouplingMatrix) -> GkslForm:
    rates, w = np.linalg.eigh(theta.matrix)
    if rates[0] < -PSD_TOL:
        raise PhysicalityError(
            f"Theta has eigenvalue {rates[0]:.3e} < 0: coupling matrix is unphysical"
        )
    rates = np.clip(rates, 0.0, None)
    order = np.argsort(-rates, kind="stable")
    rates = rates[order]
    w = _fix_phases(w[:, order])
    return GkslForm(rates, w, heff_coeffs(zeta, theta.gamma))


def reconstruction_error(theta: ThetaMatrix, form: GkslForm) -> float:
    return float(np.linalg.norm(form.kossakowski() - theta.matrix))


def evenodd_zeta(M: int, tau1: float, phi1: float = -math.pi / 2) -> CouplingMatrix:
    """Couplings of the regular network with tau_2 = 0, phi_2 = phi_1 + pi/2:
    ``xi_k = exp(-ik(phi1 + pi/2))`` times ``sqrt(1 - tau1)`` for odd k, 1 for even k."""
    s = math.sqrt(1.0 - tau1)
    z = np.zeros((M, M), dtype=complex)
    for m in range(M):
        for mp in range(m + 1, M):
            k = mp - m
            z[m, mp] = np.exp(-1j * k * (phi1 + math.pi / 2)) * (s if k % 2 else 1.0)
    return CouplingMatrix(M, z)


def lindblad_closed_form_evenodd(
    M: int, tau1: float, gamma: float, phi1: float = -math.pi / 2
) -> GkslForm:
    """Analytic two-operator GKSL form of the even/odd network.

    The default ``phi1 = -pi/2`` makes all couplings real; other values only
    dress site m with the gauge phase ``exp(i m (phi1 + pi/2))``.
    """
    if M < 2:
        raise ValidationError("closed form needs M >= 2")
    if not (0.0 <= tau1 <= 1.0):
        raise ValidationError(f"tau1 = {tau1!r} outside [0, 1]")
    sites = np.arange(1, M + 1)
    odd = (sites % 2 == 1).astype(float)
    even = 1.0 - odd
    if tau1 == 1.0:
        # odd and even sublattices decouple
        n_odd, n_even = odd.sum(), even.sum()
        cols = [odd / math.sqrt(n_odd), even / math.sqrt(n_even)]
        rates2 = [gamma * n_odd, gamma * n_even]
    elif M % 2 == 0:
        s = math.sqrt(1.0 - tau1)
        cols, rates2 = [], []
        for i in (1, 2):
            cols.append((-1.0) ** (sites * i) / math.sqrt(M))
            rates2.append(M * gamma * (1 + (-1) ** i * s) / 2)
    else:
        s = math.sqrt(1.0 - tau1)
        root = math.sqrt(M * M - (M * M - 1) * tau1)
        cols, rates2 = [], []
        for i in (1, 2):
            beta = (-1 + (-1) ** i * root) / ((M - 1) * s)
            norm = (M + 1) / 2 + beta * beta * (M - 1) / 2
            cols.append((odd + beta * even) / math.sqrt(norm))
            rates2.append(
                gamma * M * (1 + (-1) ** i * math.sqrt(1 - (1 - 1 / M**2) * tau1)) / 2
            )
    gauge = np.exp(1j * sites * (phi1 + math.pi / 2))
    w2 = np.column_stack(cols) * gauge[:, None]
    rest = null_space(w2.conj().T) if M > 2 else np.zeros((M, 0))
    w = np.column_stack([w2, rest])
    rates = np.concatenate([rates2, np.zeros(M - 2)])
    order = np.argsort(-rates, kind="stable")
    zeta = evenodd_zeta(M, tau1, phi1)
    return GkslForm(rates[order], w[:, order], heff_coeffs(zeta, gamma))


def compare_forms(a: GkslForm, b: GkslForm) -> dict:
    """Basis-independent comparison of two GKSL forms."""
    return {
        "rates": float(np.max(np.abs(np.sort(a.rates) - np.sort(b.rates)))),
        "projector": float(np.max(np.abs(a.projector() - b.projector()))),
        "kossakowski": float(np.max(np.abs(a.kossakowski() - b.kossakowski()))),
        "heff": float(np.max(np.abs(a.heff_coeffs - b.heff_coeffs))),
    }


def within(deviations: dict, tol: float = RECON_TOL) -> bool:
    return all(v < tol for v in deviations.values())
