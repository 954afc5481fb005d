"""Translation-invariant networks.

``xi[k]`` is the coupling between k-th neighbours. Three independent routes
compute it:

* the general engine (:func:`xi_profile`), via the coupling matrix of the
  expanded network;
* the K-channel transfer matrix (:func:`transfer_matrix`), valid once
  ``tau_K = 0`` cuts the network into an active block of K channels;
* the closed K=2 expression (:func:`xi_k2_analytic`).

The second half of the module builds pruned designs that keep a single
neighbour order and scans the threshold below which the pruning recursion
leaves [0, 1].
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .amplitudes import coupling_matrix
from .errors import ThresholdError, ValidationError
from .network import RegularSpec, expand_regular
from .tolerances import ATOL, RECON_TOL


@dataclass(frozen=True)
class TransferMatrix:
    K: int
    matrix: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.matrix, dtype=complex)
        if T.shape != (self.K, self.K):
            raise ValidationError(f"transfer matrix must be {self.K}x{self.K}")
        if np.max(np.abs(T @ T.conj().T - np.eye(self.K))) > ATOL:
            raise ValidationError("transfer matrix is not unitary")
        if np.any(np.triu(T, 2) != 0):
            raise ValidationError("transfer matrix has entries with j > i + 1")
        object.__setattr__(self, "matrix", T)


@dataclass(frozen=True)
class XiProfile:
    """``xi[k-1]`` is the k-th neighbour coupling. ``method`` records the route."""

    xi: np.ndarray
    loss: float = 0.0
    method: str = "engine"

    @property
    def kmax(self):
        return len(self.xi)

    def __getitem__(self, k):
        return self.xi[k - 1]


@dataclass(frozen=True)
class DesignSchedule:
    """``refls`` holds ``1 - tau_k`` to full relative precision; near
    tau_1 = 1 the higher transmissivities round to 1 in floating point."""

    n: int
    taus: tuple
    phis: tuple
    xi1_modulus: float
    refls: tuple | None = None

    def to_regular_spec(self, gamma: float = 1.0, loss: float = 0.0) -> RegularSpec:
        return RegularSpec(len(self.taus) + 1, self.taus, self.phis, loss, gamma, self.refls)


# -- transfer matrix -------------------------------------------------------

def transfer_matrix(taus, phis) -> TransferMatrix:
    """Level-to-level propagator of the active block.

    ``taus`` holds tau_1..tau_{K-1} (tau_K = 0 is implicit) and ``phis``
    holds phi_1..phi_K. Row and column i address the i-th entry of a level.
    """
    phis = [float(p) for p in phis]
    K = len(phis)
    if K == 0:
        raise ValidationError("transfer matrix needs at least one phase")
    taus = [float(t) for t in taus]
    if len(taus) != K - 1:
        raise ValidationError(f"need K-1={K - 1} transmissivities, got {len(taus)}")
    if any(not (0.0 <= t <= 1.0) for t in taus):
        raise ValidationError("transmissivities must lie in [0, 1]")
    tau = [None] + taus + [0.0]  # 1-based, tau_K = 0

    def refl(i):
        # -i sqrt(1 - tau_i), with the boundary term at i = 0 replaced by 1
        return 1.0 if i == 0 else -1j * math.sqrt(1.0 - tau[i])

    T = np.zeros((K, K), dtype=complex)
    for i in range(1, K + 1):
        ph = cmath.exp(-1j * phis[i - 1])
        for j in range(1, K + 1):
            if j == i + 1:
                T[i - 1, j - 1] = ph * math.sqrt(tau[i])
            elif j == i:
                T[i - 1, j - 1] = ph * refl(i) * refl(i - 1)
            elif j < i:
                through = math.prod(math.sqrt(tau[l]) for l in range(j, i))
                T[i - 1, j - 1] = ph * refl(j - 1) * through * refl(i)
    return TransferMatrix(K, T)


def xi_profile_closed(T: TransferMatrix, kmax: int) -> XiProfile:
    """``xi_k = [U D^k U^-1]_{11}`` from the eigendecomposition of ``T``."""
    if kmax < 1:
        raise ValidationError("kmax must be >= 1")
    ks = np.arange(1, kmax + 1)
    D, U = np.linalg.eig(T.matrix)
    method = "closed"
    if np.linalg.cond(U) < 1e6:
        left = U[0, :]
        right = np.linalg.solve(U, np.eye(T.K)[:, 0])
        xi = (left * right * D[None, :] ** ks[:, None]).sum(axis=1)
    else:
        # eigenbasis numerically defective: power the matrix directly
        method = "closed-power"
        xi = np.empty(kmax, dtype=complex)
        P = np.eye(T.K, dtype=complex)
        for k in range(kmax):
            P = T.matrix @ P
            xi[k] = P[0, 0]
    return XiProfile(np.asarray(xi), 0.0, method)


def xi_profile(spec: RegularSpec, kmax: int | None = None) -> XiProfile:
    """``xi_k = zeta[1, k+1]`` from the general engine, loss included."""
    kmax = spec.M - 1 if kmax is None else kmax
    if not (1 <= kmax <= spec.M - 1):
        raise ValidationError(f"kmax must lie in 1..M-1={spec.M - 1}, got {kmax}")
    zeta = coupling_matrix(expand_regular(spec)).zeta
    return XiProfile(zeta[0, 1 : kmax + 1].copy(), spec.loss, "engine")


def k2_eigensystem(tau1: float, phi1: float, phi2: float):
    """``(e^{i theta+}, e^{i theta-}, u+, u-)`` of the K=2 transfer matrix.

    The two square roots are taken on a common branch so that ``u+`` is the
    eigenvector component belonging to ``e^{i theta+}``.
    """
    if not (0.0 <= tau1 <= 1.0):
        raise ValidationError(f"tau1 = {tau1!r} outside [0, 1]")
    s = math.sqrt(1.0 - tau1)
    e1, e2 = cmath.exp(-1j * phi1), cmath.exp(-1j * phi2)
    disc = cmath.sqrt((e2 - 1j * e1) ** 2 - tau1 * (1j * e1 + e2) ** 2)
    lam_p = 0.5 * (-s * (1j * e1 + e2) + disc)
    lam_m = 0.5 * (-s * (1j * e1 + e2) - disc)
    d = phi1 - phi2
    inner = cmath.sqrt(
        (1 - tau1) * (1 - cmath.exp(-2j * d)) - 2j * cmath.exp(-1j * d) * (1 + tau1)
    )
    base = s * (cmath.exp(-1j * d) + 1j)
    # inner = +- e^{i phi2} disc; align it with the eigenvalue branch
    if abs(inner - cmath.exp(1j * phi2) * disc) > abs(inner + cmath.exp(1j * phi2) * disc):
        inner = -inner
    return lam_p, lam_m, base + 1j * inner, base - 1j * inner


def xi_k2_analytic(tau1: float, phi1: float, phi2: float, kmax: int) -> XiProfile:
    """Closed K=2 profile; falls back to the transfer matrix when ``u+ = u-``."""
    if kmax < 1:
        raise ValidationError("kmax must be >= 1")
    lam_p, lam_m, u_p, u_m = k2_eigensystem(tau1, phi1, phi2)
    if abs(u_p - u_m) < 1e-12:
        T = transfer_matrix([tau1], [phi1, phi2])
        prof = xi_profile_closed(T, kmax)
        return XiProfile(prof.xi, 0.0, "analytic-fallback")
    ks = np.arange(1, kmax + 1)
    xi = (u_p * lam_p**ks - u_m * lam_m**ks) / (u_p - u_m)
    return XiProfile(np.asarray(xi, dtype=complex), 0.0, "analytic")


# -- pruning ---------------------------------------------------------------

def pruning_reflectivities(tau1, kmax: int) -> np.ndarray:
    """``1 - tau_k`` for k = 1..kmax from the pruning recursion

        1 - tau_{k+1} = (1 - P_k) / P_k * (1 - tau_k) / tau_k,   P_k = tau_1 ... tau_k.

    Working with reflectivities keeps full relative precision as tau_k -> 1.
    ``tau1`` may be an array; the result then has shape ``(kmax,) + shape``.
    Entries become NaN once the recursion has left [0, 1].
    """
    tau1 = np.asarray(tau1, dtype=float)
    out = np.empty((kmax,) + tau1.shape)
    out[0] = 1.0 - tau1
    with np.errstate(divide="ignore", invalid="ignore"):
        log_p = np.log(tau1)
        for k in range(1, kmax):
            r = out[k - 1]
            out[k] = -np.expm1(log_p) / np.exp(log_p) * r / (1.0 - r)
            log_p = log_p + np.log1p(-out[k])
    return out


def pruning_recursion(tau1, kmax: int) -> np.ndarray:
    """Transmissivities tau_1..tau_kmax that cancel every coupling beyond the first."""
    return 1.0 - pruning_reflectivities(tau1, kmax)


def _valid_orders(taus):
    """Count of leading transmissivities inside [0, 1] along axis 0."""
    ok = (taus >= 0.0) & (taus <= 1.0)
    return np.cumprod(ok, axis=0).sum(axis=0)


def _null_phase(taus, refls, phis, k):
    """Phase phi_k that cancels xi_k, given every other parameter up to order k.

    xi_k is affine in exp(-i phi_k): only the k-th diagonal element at the
    first level can route the signal into channel k+1 with that phase.
    """
    spec_phis = list(phis)
    vals = []
    for trial in (0.0, math.pi):
        spec_phis[k - 1] = trial
        spec = RegularSpec(k + 1, taus[:k], spec_phis[:k], refls=refls[:k])
        vals.append(xi_profile(spec, k).xi[k - 1])
    direct = 0.5 * (vals[0] + vals[1])  # paths avoiding the phi_k element
    routed = 0.5 * (vals[0] - vals[1])  # coefficient of exp(-i phi_k)
    if abs(routed) < 1e-14:
        return None
    return (-cmath.phase(-direct / routed)) % (2 * math.pi)


def design_pruned(
    n: int, tau_base: float, phi_base: float = 0.0, count: int = 10
) -> DesignSchedule:
    """Regular-network schedule retaining only n-th neighbour couplings.

    Orders that are not multiples of n are made fully transmitting, which
    splits the network into n interleaved sublattices; on each the first-
    neighbour recursion runs on ``tau_n, tau_2n, ...``. Phases follow from
    the interference condition, solved numerically order by order.
    """
    if n < 1:
        raise ValidationError("neighbour order n must be >= 1")
    if count < n:
        raise ValidationError(f"count={count} must be >= n={n}")
    if not (0.0 <= tau_base <= 1.0):
        raise ValidationError(f"tau_base = {tau_base!r} outside [0, 1]")
    sub = pruning_reflectivities(tau_base, count // n)
    for j, r in enumerate(sub, start=1):
        if not (0.0 <= r <= 1.0):
            raise ThresholdError(j * n, float(1.0 - r))
    taus = [1.0] * count
    refls = [0.0] * count
    phis = [0.0] * count
    for j, r in enumerate(sub, start=1):
        taus[j * n - 1] = float(1.0 - r)
        refls[j * n - 1] = float(r)
    phis[n - 1] = float(phi_base) % (2 * math.pi)
    for k in range(2 * n, count + 1, n):
        phase = _null_phase(taus, refls, phis, k)
        phis[k - 1] = phis[n - 1] if phase is None else phase

    schedule = DesignSchedule(
        n, tuple(taus), tuple(phis), math.sqrt(1.0 - tau_base), tuple(refls)
    )
    report = verify_design(schedule)
    if report["max_pruned"] >= RECON_TOL or report["retained_error"] >= RECON_TOL:
        raise ValidationError(f"pruned design failed its self-check: {report}")
    return schedule


def verify_design(schedule: DesignSchedule) -> dict:
    xi = np.abs(xi_profile(schedule.to_regular_spec()).xi)
    pruned = np.delete(xi, schedule.n - 1)
    return {
        "xi": xi,
        "retained": float(xi[schedule.n - 1]),
        "retained_error": float(abs(xi[schedule.n - 1] - schedule.xi1_modulus)),
        "max_pruned": float(pruned.max(initial=0.0)),
    }


def threshold_scan(k: int, grid: float = 1e-4, refine: bool = False) -> float:
    """Smallest tau_1 on the grid for which tau_1..tau_k all lie in [0, 1].

    With ``refine`` the grid edge is bisected down to 1e-8.
    """
    if k < 2:
        raise ValidationError("threshold_scan needs k >= 2")
    steps = int(round(1.0 / grid))
    tau1 = np.arange(steps + 1) / steps
    ok = _valid_orders(pruning_recursion(tau1, k)) == k
    idx = int(np.argmax(ok))
    best = float(tau1[idx])
    if refine and idx > 0:
        lo, hi = float(tau1[idx - 1]), best
        while hi - lo > 1e-8:
            mid = 0.5 * (lo + hi)
            if _valid_orders(pruning_recursion(mid, k)) == k:
                hi = mid
            else:
                lo = mid
        best = hi
    return best


# -- sweeps ----------------------------------------------------------------

def sweep(tau1s, phi2s, phi1: float = 0.0, kmax: int = 4, workers: int | None = None):
    """``|xi_1..xi_kmax|`` over a (tau_1, phi_2) grid with tau_2 = 0.

    Returns rows ``(tau1, phi2, k, abs_xi)`` ordered by tau1, phi2, k.
    """
    points = [(float(t), float(p)) for t in tau1s for p in phi2s]

    def one(point):
        t, p = point
        xi = xi_profile_closed(transfer_matrix([t], [phi1, p]), kmax).xi
        return [(t, p, k, float(abs(x))) for k, x in enumerate(xi, start=1)]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(one, points))
    return [row for chunk in chunks for row in chunk]
