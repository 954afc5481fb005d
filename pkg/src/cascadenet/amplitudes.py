"""Propagation amplitudes and coupling constants of a cascade network.

Everything here lives in the single-excitation sector: a network level is an
M x M matrix whose entry ``[j, i]`` is the amplitude for a signal in channel
``i`` to leave the level in channel ``j``. Because the environment enters in
the vacuum, the coupling between sites ``m < m'`` is the amplitude for a
signal injected in channel ``m`` at level ``m`` to reach channel ``m'`` at
level ``m'``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .network import NetworkSpec, RegularSpec, as_network, bs_unitary
from .tolerances import ATOL

#: path enumeration is exponential in M
ORACLE_MAX_M = 12


@dataclass(frozen=True)
class AmplitudeVector:
    """Amplitudes ``entries[k-1]`` of a signal occupying channel k at ``level``."""

    level: int
    entries: np.ndarray

    def __post_init__(self):
        norm = float(np.linalg.norm(self.entries))
        if norm > 1.0 + ATOL:
            raise ValidationError(f"amplitude vector has norm {norm} > 1")


@dataclass(frozen=True)
class CouplingMatrix:
    """Strictly upper triangular ``zeta[m-1, m'-1]`` for ``m < m'``."""

    M: int
    zeta: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.zeta, dtype=complex)
        if z.shape != (self.M, self.M):
            raise ValidationError(f"zeta must be {self.M}x{self.M}, got {z.shape}")
        if np.any(np.tril(z) != 0):
            raise ValidationError("zeta must be strictly upper triangular")
        if np.any(np.abs(z) > 1.0 + ATOL):
            raise ValidationError("coupling constants must satisfy |zeta| <= 1")
        z.setflags(write=False)
        object.__setattr__(self, "zeta", z)

    def __getitem__(self, pair):
        m, mp = pair
        return self.zeta[m - 1, mp - 1]


def _embed(M, m, mp, block):
    u = np.eye(M, dtype=complex)
    idx = np.ix_([m - 1, mp - 1], [m - 1, mp - 1])
    u[idx] = block
    return u


def level_unitary(net: NetworkSpec, m: int) -> np.ndarray:
    """``V_m = ... U_{m,m+2} U_{m,m+1}`` in the single-excitation sector."""
    if not (1 <= m <= net.M - 1):
        raise ValidationError(f"level {m} outside 1..{net.M - 1}")
    V = np.eye(net.M, dtype=complex)
    for mp in range(m + 1, net.M + 1):
        bs = net.element(m, mp)
        if bs.transmissivity == 1.0 and bs.reflectivity == 0.0 and bs.phase == 0.0:
            continue
        block = bs_unitary(bs)
        i, j = m - 1, mp - 1
        # left-multiplication by an embedded 2x2 block only touches two rows
        rows = V[[i, j], :]
        V[[i, j], :] = block @ rows
    return V


def propagate(net: NetworkSpec, from_level: int, to_level: int) -> np.ndarray:
    """Ordered product ``V_{to-1} ... V_{from}``; identity when the levels coincide."""
    if not (1 <= from_level <= to_level <= net.M):
        raise ValidationError(
            f"need 1 <= from_level <= to_level <= M, got {from_level}, {to_level}"
        )
    Q = np.eye(net.M, dtype=complex)
    for level in range(from_level, to_level):
        Q = level_unitary(net, level) @ Q
    return Q


def signal_amplitudes(net: NetworkSpec, source: int, level: int) -> AmplitudeVector:
    """Amplitudes at ``level`` of a signal injected in channel ``source`` at level ``source``."""
    Q = propagate(net, source, level)
    return AmplitudeVector(level, Q[:, source - 1].copy())


def _loss_factors(M, loss):
    dist = np.subtract.outer(np.arange(M), np.arange(M)).T  # m' - m
    fac = np.where(dist > 0, (1.0 - loss) ** np.maximum(dist, 0), 0.0)
    return fac


def coupling_matrix(net: NetworkSpec | RegularSpec) -> CouplingMatrix:
    net = as_network(net)
    M = net.M
    levels = [level_unitary(net, m) for m in range(1, M)]
    zeta = np.zeros((M, M), dtype=complex)
    for m in range(1, M):
        v = np.zeros(M, dtype=complex)
        v[m - 1] = 1.0
        for level in range(m, M):
            v = levels[level - 1] @ v
            zeta[m - 1, level] = v[level]
    return CouplingMatrix(M, zeta * _loss_factors(M, net.loss))


def _hop_factor(bs, frm, to, low):
    """Amplitude for a signal moving ``frm -> to`` through a splitter whose
    lower channel is ``low``; written out from the mode map entry by entry."""
    t, r, phi = bs.transmissivity, bs.reflectivity, bs.phase
    phase = np.exp(-1j * phi)
    if frm == low and to == low:
        return np.sqrt(t)
    if frm == low:
        return -1j * phase * np.sqrt(r)
    if to == low:
        return -1j * np.sqrt(r)
    return phase * np.sqrt(t)


def _enumerate_paths(net, m, mp):
    """Sum over every channel history from (channel m, level m) to
    (channel mp, end of level mp-1). Returns (amplitude, path count)."""
    # splitters in the order a signal meets them
    sequence = [
        (level, other)
        for level in range(m, mp)
        for other in range(level + 1, net.M + 1)
    ]
    total = 0.0 + 0.0j
    count = 0
    stack = [(0, m, 1.0 + 0.0j)]
    while stack:
        pos, channel, amp = stack.pop()
        # skip splitters that do not touch the current channel
        while pos < len(sequence):
            level, other = sequence[pos]
            if channel < level:
                # channels below the current level are never touched again
                pos = len(sequence)
                break
            if channel == level or channel == other:
                break
            pos += 1
        if pos == len(sequence):
            if channel == mp:
                total += amp
                count += 1
            continue
        level, other = sequence[pos]
        bs = net.element(level, other)
        for nxt in (level, other):
            f = _hop_factor(bs, channel, nxt, level)
            if f != 0:
                stack.append((pos + 1, nxt, amp * f))
    return total, count


def coupling_matrix_oracle(net: NetworkSpec | RegularSpec) -> CouplingMatrix:
    """Brute-force path enumeration; independent of the matrix-product route."""
    net = as_network(net)
    if net.M > ORACLE_MAX_M:
        raise ValidationError(
            f"path enumeration limited to M <= {ORACLE_MAX_M}, got M={net.M}"
        )
    zeta = np.zeros((net.M, net.M), dtype=complex)
    for m in range(1, net.M):
        for mp in range(m + 1, net.M + 1):
            amp, _ = _enumerate_paths(net, m, mp)
            zeta[m - 1, mp - 1] = amp * (1.0 - net.loss) ** (mp - m)
    return CouplingMatrix(net.M, zeta)


def count_paths(net: NetworkSpec, m: int, mp: int) -> int:
    """Number of nonvanishing paths joining site m to site mp."""
    return _enumerate_paths(as_network(net), m, mp)[1]
