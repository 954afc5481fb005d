"""Cascade network description: channels, beam splitters, per-hop loss.

Channels and sites are labelled 1..M in every public interface. The element
coupling channels ``m < mp`` is addressed by the ordered pair ``(m, mp)``;
pairs left out of a :class:`NetworkSpec` behave as fully transmitting
splitters (t=1, phi=0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi


def _reflectivity(t, r):
    if r is None:
        return 1.0 - t
    r = float(r)
    if not (0.0 <= r <= 1.0):
        raise ValidationError(f"reflectivity {r!r} outside [0, 1]")
    if abs(t + r - 1.0) > 1e-12:
        raise ValidationError(f"transmissivity {t!r} and reflectivity {r!r} do not sum to 1")
    return r


@dataclass(frozen=True)
class BeamSplitter:
    """Two-channel splitter. ``reflectivity`` defaults to ``1 - transmissivity``;
    pass it explicitly when t is so close to 1 that ``1 - t`` loses digits."""

    transmissivity: float = 1.0
    phase: float = 0.0
    reflectivity: float | None = None

    def __post_init__(self):
        t = float(self.transmissivity)
        if not (0.0 <= t <= 1.0) or math.isnan(t):
            raise ValidationError(f"transmissivity {t!r} outside [0, 1]")
        r = _reflectivity(t, self.reflectivity)
        object.__setattr__(self, "reflectivity", r)
        phi = float(self.phase)
        if not math.isfinite(phi):
            raise ValidationError(f"phase {phi!r} is not finite")
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "transmissivity", t)
        object.__setattr__(self, "phase", phi)


IDENTITY_SPLITTER = BeamSplitter(1.0, 0.0)


def _check_rate(gamma, loss):
    gamma = float(gamma)
    loss = float(loss)
    if not (gamma > 0.0) or not math.isfinite(gamma):
        raise ValidationError(f"gamma must be positive, got {gamma!r}")
    if not (0.0 <= loss <= 1.0):
        raise ValidationError(f"loss must lie in [0, 1], got {loss!r}")
    return gamma, loss


@dataclass(frozen=True)
class NetworkSpec:
    """An M-channel cascade network.

    ``elements`` maps ``(m, mp)`` with ``1 <= m < mp <= M`` to a
    :class:`BeamSplitter`; ``loss`` is the per-hop loss probability and
    ``gamma`` the local dissipation rate.
    """

    M: int
    elements: Mapping[tuple[int, int], BeamSplitter] = field(default_factory=dict)
    loss: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValidationError(f"M must be a positive integer, got {self.M!r}")
        gamma, loss = _check_rate(self.gamma, self.loss)
        elements = {}
        for pair, bs in dict(self.elements).items():
            m, mp = (int(i) for i in pair)
            if not (1 <= m < mp <= self.M):
                raise ValidationError(
                    f"element ({m}, {mp}) is not a pair 1 <= m < m' <= M={self.M}"
                )
            if not isinstance(bs, BeamSplitter):
                bs = BeamSplitter(*bs)
            elements[(m, mp)] = bs
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "loss", loss)
        object.__setattr__(self, "elements", MappingProxyType(elements))

    def element(self, m: int, mp: int) -> BeamSplitter:
        if not (1 <= m < mp <= self.M):
            raise ValidationError(f"no element ({m}, {mp}) in an M={self.M} network")
        return self.elements.get((m, mp), IDENTITY_SPLITTER)

    def with_loss(self, loss: float) -> "NetworkSpec":
        return NetworkSpec(self.M, dict(self.elements), loss, self.gamma)


@dataclass(frozen=True)
class RegularSpec:
    """Translation-invariant network: ``t[m, m+k] = taus[k-1]``, ``phi[m, m+k] = phis[k-1]``."""

    M: int
    taus: Sequence[float]
    phis: Sequence[float]
    loss: float = 0.0
    gamma: float = 1.0
    #: optional exact ``1 - tau_k``; see :class:`BeamSplitter`
    refls: Sequence[float] | None = None

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValidationError(f"M must be a positive integer, got {self.M!r}")
        taus = tuple(float(t) for t in self.taus)
        phis = tuple(float(p) for p in self.phis)
        if len(taus) != self.M - 1 or len(phis) != self.M - 1:
            raise ValidationError(
                f"taus and phis need M-1={self.M - 1} entries, "
                f"got {len(taus)} and {len(phis)}"
            )
        for k, t in enumerate(taus, start=1):
            if not (0.0 <= t <= 1.0):
                raise ValidationError(f"tau_{k} = {t!r} outside [0, 1]")
        if self.refls is not None:
            if len(self.refls) != len(taus):
                raise ValidationError(f"refls needs M-1={self.M - 1} entries")
            refls = tuple(_reflectivity(t, r) for t, r in zip(taus, self.refls))
            object.__setattr__(self, "refls", refls)
        gamma, loss = _check_rate(self.gamma, self.loss)
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "loss", loss)


def bs_unitary(bs: BeamSplitter) -> np.ndarray:
    """Heisenberg mode map of a splitter acting on the column ``(b_m, b_m')``.

    Row ``j`` holds the coefficients of the transformed ``b_j``; entry
    ``[j, i]`` is therefore the amplitude for a signal to move from
    channel ``i`` into channel ``j``.
    """
    s = math.sqrt(bs.transmissivity)
    r = math.sqrt(bs.reflectivity)
    e = np.exp(-1j * bs.phase)
    return np.array([[s, -1j * r], [e * (-1j * r), e * s]], dtype=complex)


def expand_regular(spec: RegularSpec) -> NetworkSpec:
    elements = {}
    for k in range(1, spec.M):
        r = None if spec.refls is None else spec.refls[k - 1]
        bs = BeamSplitter(spec.taus[k - 1], spec.phis[k - 1], r)
        for m in range(1, spec.M - k + 1):
            elements[(m, m + k)] = bs
    return NetworkSpec(spec.M, elements, spec.loss, spec.gamma)


def as_network(spec: NetworkSpec | RegularSpec) -> NetworkSpec:
    if isinstance(spec, RegularSpec):
        return expand_regular(spec)
    return spec
