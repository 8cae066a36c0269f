"""Two-particle Gaussian states in momentum space and sampled wavefunctions.

Units use hbar = 1 throughout; momenta, positions and masses are
dimensionless user units.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import (
    CoverageError,
    DegenerateStateError,
    InvalidParameterError,
)

#: Default number of momentum standard deviations covered on each side
#: of a packet center when building grids.
DEFAULT_WINDOW = 8.0

#: Default number of grid points per axis.
DEFAULT_N = 512

#: A grid is considered too narrow when more than this much probability
#: mass lies outside it.
COVERAGE_TAIL_TOL = 1e-8

_BASIS_TAGS = ("momentum", "position", "transformed")


def _fsum(values: np.ndarray) -> float:
    """Compensated sum with a fixed (C-contiguous) reduction order."""
    return math.fsum(np.ascontiguousarray(values, dtype=float).ravel())


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D grid with inclusive endpoints.

    Attributes
    ----------
    min, max : float
        Coordinate bounds, ``max > min``.
    n : int
        Number of points, at least 2. Spacing is ``(max - min)/(n - 1)``.
    """

    min: float
    max: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise InvalidParameterError("grid bounds must be finite")
        if self.max <= self.min:
            raise InvalidParameterError(
                f"grid needs max > min, got [{self.min}, {self.max}]"
            )
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameterError(f"grid needs n >= 2 points, got {self.n}")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.min, self.max, self.n)
        pts.setflags(write=False)
        return pts

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        """Trapezoid-rule quadrature weights on the grid points."""
        w = np.full(self.n, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.setflags(write=False)
        return w

    def shifted(self, offset: float) -> "Grid1D":
        return Grid1D(self.min + offset, self.max + offset, self.n)


@dataclass(frozen=True)
class GaussianProductState:
    """Separable product of two Gaussian momentum distributions.

    The momentum-space wave function is

        phi(p1, p2) = N1 N2 exp(i p1 a1) exp(-(p1 - k1)^2 / (4 sigma1^2))
                            exp(i p2 a2) exp(-(p2 - k2)^2 / (4 sigma2^2))

    with N_i = (2 pi sigma_i^2)^(-1/4), so the state is normalized by
    construction. ``k_i`` are central momenta, ``sigma_i`` momentum standard
    deviations, ``a_i`` phase-slope parameters fixing the packet positions,
    and ``m_i`` the particle masses (used by coordinate transforms and
    scattering, not by the wave function itself).
    """

    k1: float
    k2: float
    sigma1: float
    sigma2: float
    m1: float = 1.0
    m2: float = 1.0
    a1: float = 0.0
    a2: float = 0.0

    def __post_init__(self):
        for name in ("k1", "k2", "sigma1", "sigma2", "m1", "m2", "a1", "a2"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise InvalidParameterError(
                f"momentum widths must be positive, got sigma1={self.sigma1}, "
                f"sigma2={self.sigma2}"
            )
        if self.m1 <= 0 or self.m2 <= 0:
            raise InvalidParameterError(
                f"masses must be positive, got m1={self.m1}, m2={self.m2}"
            )

    @classmethod
    def scattering(cls, k, sigma1, sigma2, m1=1.0, m2=1.0, a=0.0):
        """In-state in the center-of-momentum frame: k1 = -k2 = k.

        The packets approach each other for k > 0; ``a`` sets their initial
        separation (a1 = a, a2 = -a, i.e. phase exp(i (p1 - p2) a)).
        """
        return cls(k1=k, k2=-k, sigma1=sigma1, sigma2=sigma2,
                   m1=m1, m2=m2, a1=a, a2=-a)

    # Mass accessors used by the center-of-mass / relative coordinates.
    @property
    def mu1(self) -> float:
        return self.m1 / (self.m1 + self.m2)

    @property
    def mu2(self) -> float:
        return self.m2 / (self.m1 + self.m2)

    @property
    def total_mass(self) -> float:
        return self.m1 + self.m2

    @property
    def reduced_mass(self) -> float:
        return self.m1 * self.m2 / (self.m1 + self.m2)

    def evaluate(self, p1, p2) -> np.ndarray:
        """Closed-form wave function on arbitrary (broadcastable) momenta."""
        p1 = np.asarray(p1, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        norm = (2.0 * np.pi * self.sigma1**2) ** -0.25 * (
            2.0 * np.pi * self.sigma2**2
        ) ** -0.25
        expo = (
            1j * (self.a1 * p1 + self.a2 * p2)
            - (p1 - self.k1) ** 2 / (4.0 * self.sigma1**2)
            - (p2 - self.k2) ** 2 / (4.0 * self.sigma2**2)
        )
        return norm * np.exp(expo)

    def boosted(self, delta1: float, delta2: float) -> "GaussianProductState":
        """State with each packet's central momentum shifted."""
        return GaussianProductState(
            k1=self.k1 + delta1, k2=self.k2 + delta2,
            sigma1=self.sigma1, sigma2=self.sigma2,
            m1=self.m1, m2=self.m2, a1=self.a1, a2=self.a2,
        )


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    """Complex amplitudes of a two-particle wave function on a tensor grid.

    ``values[i, j]`` is the amplitude at ``(grid1.points[i],
    grid2.points[j])``. ``basis`` tags the coordinates: "momentum",
    "position", or "transformed" (image of a linear coordinate map).

    ``evaluator``, when present, is the exact closed-form function the
    samples came from; transforms use it to avoid interpolation.
    ``conjugate_grids`` remembers the source grids across a Fourier
    transform so that the inverse lands on them exactly.
    """

    grid1: Grid1D
    grid2: Grid1D
    values: np.ndarray
    basis: str = "momentum"
    evaluator: Optional[Callable] = field(default=None, repr=False)
    conjugate_grids: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid1.n, self.grid2.n):
            raise InvalidParameterError(
                f"value array shape {vals.shape} does not match grids "
                f"({self.grid1.n}, {self.grid2.n})"
            )
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise InvalidParameterError("wave function values must be finite")
        if self.basis not in _BASIS_TAGS:
            raise InvalidParameterError(
                f"basis must be one of {_BASIS_TAGS}, got {self.basis!r}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def weight_grid(self) -> np.ndarray:
        """Outer product of the per-axis trapezoid weights."""
        return np.outer(self.grid1.trapezoid_weights, self.grid2.trapezoid_weights)

    def norm_squared(self) -> float:
        dens = self.values.real**2 + self.values.imag**2
        return _fsum(self.weight_grid * dens)

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def inner(self, other: "SampledWavefunction") -> complex:
        """Quadrature inner product <self|other> on shared grids."""
        if self.grid1 != other.grid1 or self.grid2 != other.grid2:
            raise InvalidParameterError("inner product requires identical grids")
        prod = self.weight_grid * np.conj(self.values) * other.values
        return complex(_fsum(prod.real), _fsum(prod.imag))


@dataclass(frozen=True)
class StateStatistics:
    """Per-axis first and second moments plus the state norm."""

    mean1: float
    mean2: float
    std1: float
    std2: float
    norm: float


def make_gaussian(k1, k2, sigma1, sigma2, m1=1.0, m2=1.0, a1=0.0, a2=0.0):
    """Construct a validated :class:`GaussianProductState`."""
    return GaussianProductState(k1=k1, k2=k2, sigma1=sigma1, sigma2=sigma2,
                                m1=m1, m2=m2, a1=a1, a2=a2)


def default_grid(center: float, sigma: float, n: int = DEFAULT_N,
                 window: float = DEFAULT_WINDOW) -> Grid1D:
    """Grid covering ``center +- window*sigma`` with n points."""
    if sigma <= 0 or window <= 0:
        raise InvalidParameterError("sigma and window must be positive")
    return Grid1D(center - window * sigma, center + window * sigma, n)


def default_grids(state: GaussianProductState, n: int = DEFAULT_N,
                  window: float = DEFAULT_WINDOW):
    """Per-axis default grids for a Gaussian product state."""
    return (default_grid(state.k1, state.sigma1, n, window),
            default_grid(state.k2, state.sigma2, n, window))


def gaussian_tail_mass(center: float, sigma: float, grid: Grid1D) -> float:
    """Probability mass of N(center, sigma^2) outside the grid bounds."""
    hi = (grid.max - center) / (sigma * math.sqrt(2.0))
    lo = (center - grid.min) / (sigma * math.sqrt(2.0))
    return 0.5 * math.erfc(hi) + 0.5 * math.erfc(lo)


def sample_on_grid(state: GaussianProductState, grid1: Grid1D = None,
                   grid2: Grid1D = None, n: int = DEFAULT_N,
                   window: float = DEFAULT_WINDOW,
                   on_narrow: str = "error") -> SampledWavefunction:
    """Sample a Gaussian product state on a rectangular momentum grid.

    Parameters
    ----------
    grid1, grid2 : Grid1D, optional
        Explicit per-axis grids; defaults cover ``k_i +- window*sigma_i``.
    on_narrow : {"error", "warn"}
        What to do when the analytic tail mass outside the grids exceeds
        ``COVERAGE_TAIL_TOL``.
    """
    if on_narrow not in ("error", "warn"):
        raise InvalidParameterError("on_narrow must be 'error' or 'warn'")
    if grid1 is None:
        grid1 = default_grid(state.k1, state.sigma1, n, window)
    if grid2 is None:
        grid2 = default_grid(state.k2, state.sigma2, n, window)

    tail = (gaussian_tail_mass(state.k1, state.sigma1, grid1)
            + gaussian_tail_mass(state.k2, state.sigma2, grid2))
    if tail > COVERAGE_TAIL_TOL:
        msg = (f"grids leave tail mass {tail:.3e} outside "
               f"(threshold {COVERAGE_TAIL_TOL:.0e})")
        if on_narrow == "error":
            raise CoverageError(msg)
        warnings.warn(msg)

    p1 = grid1.points[:, None]
    p2 = grid2.points[None, :]
    return SampledWavefunction(grid1, grid2, state.evaluate(p1, p2),
                               basis="momentum", evaluator=state.evaluate)


def state_statistics(psi: SampledWavefunction) -> StateStatistics:
    """Marginal mean and standard deviation per axis, and the norm.

    Raises
    ------
    DegenerateStateError
        If the sampled state has zero norm.
    """
    w1 = psi.grid1.trapezoid_weights
    w2 = psi.grid2.trapezoid_weights
    dens = psi.values.real**2 + psi.values.imag**2
    marg1 = dens @ w2
    marg2 = w1 @ dens
    nrm2 = _fsum(w1 * marg1)
    if not (nrm2 > 0.0) or not math.isfinite(nrm2):
        raise DegenerateStateError("state has zero norm on this grid")

    def _moments(points, weights, marg):
        mean = _fsum(weights * points * marg) / nrm2
        var = _fsum(weights * (points - mean) ** 2 * marg) / nrm2
        return mean, math.sqrt(max(var, 0.0))

    mean1, std1 = _moments(psi.grid1.points, w1, marg1)
    mean2, std2 = _moments(psi.grid2.points, w2, marg2)
    return StateStatistics(mean1, mean2, std1, std2, math.sqrt(nrm2))


def overlap_integral(state: GaussianProductState) -> float:
    """|integral of phi_1(p) phi_2(p) dp| for the two single-particle factors.

    Vanishing overlap certifies the scattering boundary condition that the
    packets occupy disjoint momentum half-lines. Closed form for Gaussians:
    the integrand is itself Gaussian, so

        A = 1/(4 s1^2) + 1/(4 s2^2)
        B = k1/(2 s1^2) + k2/(2 s2^2) + i (a1 + a2)
        C = k1^2/(4 s1^2) + k2^2/(4 s2^2)
        |I| = N1 N2 sqrt(pi/A) exp((Re(B)^2 - Im(B)^2)/(4A) - C)
    """
    s1, s2 = state.sigma1, state.sigma2
    A = 0.25 / s1**2 + 0.25 / s2**2
    br = state.k1 / (2 * s1**2) + state.k2 / (2 * s2**2)
    bi = state.a1 + state.a2
    C = state.k1**2 / (4 * s1**2) + state.k2**2 / (4 * s2**2)
    n1n2 = (2 * math.pi * s1**2) ** -0.25 * (2 * math.pi * s2**2) ** -0.25
    arg = (br * br - bi * bi) / (4 * A) - C
    return n1n2 * math.sqrt(math.pi / A) * math.exp(arg)


# ---------------------------------------------------------------------------
# Local unitaries: global translation, global boost, Fourier transform.
# ---------------------------------------------------------------------------

def _ft_axis(values: np.ndarray, grid_in: Grid1D, axis: int, forward: bool,
             target: Grid1D = None):
    """Unitary continuous-Fourier approximation along one axis.

    forward: f(x) = (1/sqrt(2 pi)) * integral f(p) exp(+i p x) dp
    inverse: f(p) = (1/sqrt(2 pi)) * integral f(x) exp(-i p x) dx

    The discrete pair is exactly mutually inverse when the conjugate grid
    satisfies ``spacing_out * spacing_in * n = 2 pi`` and the round trip
    targets the original grid.
    """
    n = grid_in.n
    d_in = grid_in.spacing
    if target is None:
        d_out = 2.0 * np.pi / (n * d_in)
        start = -d_out * (n // 2)
        target = Grid1D(start, start + d_out * (n - 1), n)
    else:
        if target.n != n:
            raise InvalidParameterError("conjugate grid must have the same n")
        if abs(target.spacing * d_in * n - 2.0 * np.pi) > 1e-9 * target.spacing * d_in * n:
            raise InvalidParameterError(
                "conjugate grid spacing must satisfy d_out*d_in*n = 2*pi"
            )
    c_in = grid_in.min
    c_out = target.min
    j = np.arange(n)
    sign = 1.0 if forward else -1.0

    twiddle_in = np.exp(sign * 1j * j * d_in * c_out)
    twiddle_out = np.exp(sign * 1j * c_in * target.points)

    shape_in = [1, 1]
    shape_in[axis] = n
    vals = values * twiddle_in.reshape(shape_in)
    if forward:
        transformed = n * np.fft.ifft(vals, axis=axis)
    else:
        transformed = np.fft.fft(vals, axis=axis)
    transformed *= (d_in / math.sqrt(2.0 * math.pi)) * twiddle_out.reshape(shape_in)
    return transformed, target


def _fourier(psi: SampledWavefunction) -> SampledWavefunction:
    if psi.basis == "momentum":
        forward, new_basis = True, "position"
    elif psi.basis == "position":
        forward, new_basis = False, "momentum"
    else:
        raise InvalidParameterError(
            "fourier is defined between the momentum and position bases"
        )
    t1 = t2 = None
    if psi.conjugate_grids is not None:
        t1, t2 = psi.conjugate_grids
    vals, g1 = _ft_axis(psi.values, psi.grid1, axis=0, forward=forward, target=t1)
    vals, g2 = _ft_axis(vals, psi.grid2, axis=1, forward=forward, target=t2)
    return SampledWavefunction(g1, g2, vals, basis=new_basis,
                               conjugate_grids=(psi.grid1, psi.grid2))


def _translate(psi: SampledWavefunction, a: float) -> SampledWavefunction:
    if psi.basis == "momentum":
        phase1 = np.exp(1j * a * psi.grid1.points)[:, None]
        phase2 = np.exp(1j * a * psi.grid2.points)[None, :]
        vals = psi.values * phase1 * phase2
        ev = psi.evaluator
        new_ev = None
        if ev is not None:
            new_ev = lambda p1, p2: ev(p1, p2) * np.exp(1j * a * (np.asarray(p1) + np.asarray(p2)))
        return SampledWavefunction(psi.grid1, psi.grid2, vals,
                                   basis="momentum", evaluator=new_ev)
    if psi.basis == "position":
        ev = psi.evaluator
        new_ev = None if ev is None else (lambda x1, x2: ev(np.asarray(x1) - a, np.asarray(x2) - a))
        return SampledWavefunction(psi.grid1.shifted(a), psi.grid2.shifted(a),
                                   psi.values, basis="position", evaluator=new_ev)
    raise InvalidParameterError("translate needs a momentum- or position-basis state")


def _boost(psi: SampledWavefunction, b: float) -> SampledWavefunction:
    if psi.basis == "momentum":
        ev = psi.evaluator
        new_ev = None if ev is None else (lambda p1, p2: ev(np.asarray(p1) - b, np.asarray(p2) - b))
        return SampledWavefunction(psi.grid1.shifted(b), psi.grid2.shifted(b),
                                   psi.values, basis="momentum", evaluator=new_ev)
    if psi.basis == "position":
        phase1 = np.exp(1j * b * psi.grid1.points)[:, None]
        phase2 = np.exp(1j * b * psi.grid2.points)[None, :]
        ev = psi.evaluator
        new_ev = None
        if ev is not None:
            new_ev = lambda x1, x2: ev(x1, x2) * np.exp(1j * b * (np.asarray(x1) + np.asarray(x2)))
        return SampledWavefunction(psi.grid1, psi.grid2, psi.values * phase1 * phase2,
                                   basis="position", evaluator=new_ev)
    raise InvalidParameterError("boost needs a momentum- or position-basis state")


def apply_local_unitary(psi: SampledWavefunction, op: str,
                        value: float = None) -> SampledWavefunction:
    """Apply a purity-preserving local unitary to a sampled state.

    Parameters
    ----------
    op : {"translate", "boost", "fourier"}
        "translate": global spatial translation by ``value`` (momentum-basis
        phase exp(i a (p1 + p2)), position-basis grid shift).
        "boost": global momentum shift by ``value`` on both particles.
        "fourier": unitary transform between momentum and position bases;
        toggles the basis tag.
    value : float
        Required for "translate" and "boost".

    All three factor into single-particle unitaries, so the interparticle
    purity of the state is unchanged.
    """
    if op == "fourier":
        return _fourier(psi)
    if value is None or not math.isfinite(value):
        raise InvalidParameterError(f"op {op!r} requires a finite value")
    if op == "translate":
        return _translate(psi, float(value))
    if op == "boost":
        return _boost(psi, float(value))
    raise InvalidParameterError(f"unknown local unitary {op!r}")
