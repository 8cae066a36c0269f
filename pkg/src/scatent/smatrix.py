"""Transmission and reflection amplitudes for 1D relative-coordinate scattering.

Amplitudes t(q), r(q) solve the single-channel Schrodinger equation
(hbar = 1) at relative momentum q > 0 with the reduced mass m:

    -(1/2m) psi'' + V(x) psi = (q^2 / 2m) psi

for a wave incident from the left, psi -> exp(iqx) + r exp(-iqx) on the
left and t exp(iqx) on the right. All potentials are centered at the
origin, which fixes the reflection phase (hard wall: r = -1). Unitarity
|t|^2 + |r|^2 = 1 holds identically for every variant.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParameterError, NumericError

#: Unitarity must hold to this absolute tolerance at every momentum.
UNITARITY_TOL = 1e-10


def _sinc(z: np.ndarray) -> np.ndarray:
    """sin(z)/z for complex z, stable at z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-6
    safe = np.where(small, 1.0, z)
    z2 = z * z
    series = 1.0 - z2 / 6.0 + z2 * z2 / 120.0
    return np.where(small, series, np.sin(safe) / safe)


@dataclass(frozen=True)
class HardWall:
    """Impenetrable barrier at the origin: total reflection, t = 0, r = -1."""

    def transmission_reflection(self, q, m):
        q = np.asarray(q, dtype=float)
        return np.zeros(q.shape, dtype=complex), np.full(q.shape, -1.0 + 0.0j)


@dataclass(frozen=True)
class DeltaBarrier:
    """Point interaction V(x) = strength * delta(x); negative strength is a well.

    With alpha = m*strength/q:  t = 1/(1 + i alpha),  r = -i alpha t.
    """

    strength: float

    def __post_init__(self):
        if not math.isfinite(self.strength):
            raise InvalidParameterError("delta strength must be finite")

    def transmission_reflection(self, q, m):
        q = np.asarray(q, dtype=float)
        alpha = m * self.strength / q
        t = 1.0 / (1.0 + 1j * alpha)
        return t, -1j * alpha * t


@dataclass(frozen=True)
class SquareBarrier:
    """Rectangular barrier of the given height on [-width/2, width/2].

    Negative height gives a well. With kappa = sqrt(q^2 - 2 m height)
    (complex under the barrier) and L the width,

        D = cos(kappa L) - i (q^2 + kappa^2) L sinc(kappa L) / (2q)
        t = exp(-iqL) / D
        r = -i (q^2 - kappa^2) L sinc(kappa L) / (2q) * exp(-iqL) / D

    written through sinc(z) = sin(z)/z so the removable singularity at
    E = height (kappa = 0) is evaluated by its analytic limit.
    """

    height: float
    width: float

    def __post_init__(self):
        if not math.isfinite(self.height):
            raise InvalidParameterError("barrier height must be finite")
        if not (math.isfinite(self.width) and self.width > 0):
            raise InvalidParameterError("barrier width must be positive")

    def transmission_reflection(self, q, m):
        q = np.asarray(q, dtype=float)
        L = self.width
        kappa_sq = q * q - 2.0 * m * self.height + 0.0j
        kappa = np.sqrt(kappa_sq)
        z = kappa * L
        sinc_z = _sinc(z)
        g_sin = (q * q + kappa_sq) * L / (2.0 * q) * sinc_z
        h_sin = (q * q - kappa_sq) * L / (2.0 * q) * sinc_z
        denom = np.cos(z) - 1j * g_sin
        phase = np.exp(-1j * q * L)
        t = phase / denom
        r = -1j * h_sin * phase / denom
        return t, r


@dataclass(frozen=True)
class DoubleDelta:
    """Two equal delta barriers at x = -separation/2 and x = +separation/2.

    Composing the exact single-delta transfer matrices gives, with
    alpha = m*strength/q and d the separation,

        t = 1 / [ (1 + i alpha)^2 + alpha^2 exp(2iqd) ]
        r = -2 i alpha (cos(qd) + alpha sin(qd)) * t

    Transmission resonances |t| = 1 occur where tan(qd) = -1/alpha.
    """

    strength: float
    separation: float

    def __post_init__(self):
        if not math.isfinite(self.strength):
            raise InvalidParameterError("delta strength must be finite")
        if not (math.isfinite(self.separation) and self.separation > 0):
            raise InvalidParameterError("separation must be positive")

    def transmission_reflection(self, q, m):
        q = np.asarray(q, dtype=float)
        d = self.separation
        alpha = m * self.strength / q
        m22 = (1.0 + 1j * alpha) ** 2 + alpha**2 * np.exp(2j * q * d)
        m21 = 2j * alpha * (np.cos(q * d) + alpha * np.sin(q * d))
        t = 1.0 / m22
        return t, -m21 * t


PotentialModel = Union[HardWall, DeltaBarrier, SquareBarrier, DoubleDelta]


@dataclass(frozen=True)
class AmplitudePair:
    """Transmission and reflection amplitudes at a single momentum."""

    t: complex
    r: complex

    @property
    def transmission(self) -> float:
        return abs(self.t) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.r) ** 2

    @property
    def unitarity_defect(self) -> float:
        return abs(self.transmission + self.reflection - 1.0)


@dataclass(frozen=True, eq=False)
class AmplitudeTable:
    """Amplitudes sampled on a momentum grid, with derivative estimates.

    Derivatives use centered differences at interior nodes and one-sided
    differences at the ends.
    """

    q: np.ndarray
    t: np.ndarray
    r: np.ndarray
    dt_dq: np.ndarray
    dr_dq: np.ndarray
    reduced_mass: float


def _validate_q_m(q, m):
    if not (math.isfinite(m) and m > 0):
        raise InvalidParameterError(f"reduced mass must be positive, got {m}")
    q_arr = np.asarray(q, dtype=float)
    if not np.all(np.isfinite(q_arr)) or np.any(q_arr <= 0):
        raise InvalidParameterError("momenta must be finite and positive")
    return q_arr


def amplitudes(model: PotentialModel, q: float, m: float) -> AmplitudePair:
    """Closed-form t(q), r(q) for the given potential at one momentum.

    Raises
    ------
    InvalidParameterError
        If q <= 0 or m <= 0.
    NumericError
        If |t|^2 + |r|^2 deviates from 1 beyond 1e-10.
    """
    _validate_q_m(q, m)
    t, r = model.transmission_reflection(float(q), m)
    pair = AmplitudePair(t=complex(t), r=complex(r))
    if pair.unitarity_defect > UNITARITY_TOL:
        raise NumericError(
            f"unitarity defect {pair.unitarity_defect:.3e} at q={q} for {model}"
        )
    return pair


def tabulate_amplitudes(model: PotentialModel, q_grid, m: float) -> AmplitudeTable:
    """Sample t(q), r(q) on an ascending positive grid with derivatives.

    Unitarity is verified at every node to 1e-10.
    """
    q = _validate_q_m(q_grid, m)
    if q.ndim != 1 or q.size < 2:
        raise InvalidParameterError("q_grid must be a 1D array with >= 2 points")
    if np.any(np.diff(q) <= 0):
        raise InvalidParameterError("q_grid must be strictly ascending")
    t, r = model.transmission_reflection(q, m)
    defect = np.abs(np.abs(t) ** 2 + np.abs(r) ** 2 - 1.0)
    worst = float(defect.max())
    if worst > UNITARITY_TOL:
        raise NumericError(f"unitarity defect up to {worst:.3e} on the grid")
    return AmplitudeTable(q=q, t=t, r=r,
                          dt_dq=np.gradient(t, q), dr_dq=np.gradient(r, q),
                          reduced_mass=m)
