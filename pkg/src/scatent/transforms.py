"""Unimodular linear maps of two-particle momenta and Gaussian purities.

A real 2x2 map T with |det T| = 1 relabels the momentum pair
z = T p and induces a new tensor-product split of the two-particle
Hilbert space; the purity of a Gaussian product state with respect to the
new split has a closed form implemented here.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import CoverageError, InvalidParameterError, NumericError
from .wavepacket import GaussianProductState, Grid1D, SampledWavefunction

#: Maximum allowed deviation of |det T| from 1.
DET_TOL = 1e-12


@dataclass(frozen=True)
class LinearMap2:
    """Real 2x2 matrix [[r, s], [t, u]] with |ru - st| = 1."""

    r: float
    s: float
    t: float
    u: float

    def __post_init__(self):
        for name in ("r", "s", "t", "u"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"map entry {name} must be finite")
        if abs(abs(self.det) - 1.0) > DET_TOL:
            raise InvalidParameterError(
                f"map must have |det| = 1 within {DET_TOL:g}, got det = {self.det!r}"
            )

    @property
    def det(self) -> float:
        return self.r * self.u - self.s * self.t

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.r, self.s], [self.t, self.u]])

    def apply(self, p1, p2):
        """Map a momentum pair (vectorized)."""
        p1 = np.asarray(p1, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        return self.r * p1 + self.s * p2, self.t * p1 + self.u * p2

    def inverse(self) -> "LinearMap2":
        d = self.det
        if abs(abs(d) - 1.0) > 1e-9:
            raise NumericError(f"map is numerically singular, det = {d!r}")
        return LinearMap2(self.u / d, -self.s / d, -self.t / d, self.r / d)

    def compose(self, other: "LinearMap2") -> "LinearMap2":
        """Matrix product self @ other (other acts first)."""
        a, b = self.matrix, other.matrix
        m = a @ b
        d = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(abs(d) - 1.0) > 1e-9:
            raise NumericError(f"composition lost unimodularity, det = {d!r}")
        return LinearMap2(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def isclose(self, other: "LinearMap2", tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, rtol=0.0, atol=tol))


def compose(*maps: LinearMap2) -> LinearMap2:
    """Left-to-right matrix product: compose(A, B, C) = A @ B @ C."""
    if not maps:
        return identity_map()
    result = maps[0]
    for m in maps[1:]:
        result = result.compose(m)
    return result


def invert(m: LinearMap2) -> LinearMap2:
    return m.inverse()


def identity_map() -> LinearMap2:
    return LinearMap2(1.0, 0.0, 0.0, 1.0)


def flip_map() -> LinearMap2:
    """F = diag(1, -1): flips the second (relative-momentum) coordinate."""
    return LinearMap2(1.0, 0.0, 0.0, -1.0)


def com_map(m1: float, m2: float) -> LinearMap2:
    """T_cm = [[1, 1], [mu2, -mu1]]: (p1, p2) -> (p, q).

    p = p1 + p2 is the total momentum and q = mu2 p1 - mu1 p2 the relative
    momentum, with mu_i = m_i / (m1 + m2).
    """
    if m1 <= 0 or m2 <= 0:
        raise InvalidParameterError("masses must be positive")
    mu1 = m1 / (m1 + m2)
    mu2 = m2 / (m1 + m2)
    return LinearMap2(1.0, 1.0, mu2, -mu1)


def reflection_map(m1: float, m2: float) -> LinearMap2:
    """M = T_cm^-1 F T_cm: reverses q at fixed p.

    M = [[mu1 - mu2, 2 mu1], [2 mu2, mu2 - mu1]] is involutive with
    det = -1 and sends (k, -k) to (-k, k).
    """
    if m1 <= 0 or m2 <= 0:
        raise InvalidParameterError("masses must be positive")
    mu1 = m1 / (m1 + m2)
    mu2 = m2 / (m1 + m2)
    return LinearMap2(mu1 - mu2, 2.0 * mu1, 2.0 * mu2, mu2 - mu1)


# ---------------------------------------------------------------------------
# Closed-form purities of Gaussian product states.
# ---------------------------------------------------------------------------

def gaussian_purity_under_map(state: GaussianProductState, T: LinearMap2) -> float:
    """Purity of a Gaussian product state relabeled by z = T p.

    For T = [[r, s], [t, u]] with |det T| = 1,

        p = sigma1 sigma2 / sqrt((r^2 s1^2 + s^2 s2^2)(t^2 s1^2 + u^2 s2^2)).

    Independent of the central momenta, the positions, and the masses; it is
    1 exactly when T is diagonal or anti-diagonal and lies in (0, 1] always.
    """
    s1sq = state.sigma1**2
    s2sq = state.sigma2**2
    row1 = T.r**2 * s1sq + T.s**2 * s2sq
    row2 = T.t**2 * s1sq + T.u**2 * s2sq
    return state.sigma1 * state.sigma2 / math.sqrt(row1 * row2)


def ie_purity(state: GaussianProductState) -> float:
    """Purity with respect to the center-of-mass/relative (internal-external)
    split:

        p_IE = s1 s2 / sqrt((s1^2 + s2^2)(mu2^2 s1^2 + mu1^2 s2^2)).

    Equals 1 exactly when mu1/s1^2 = mu2/s2^2 (see
    :func:`schulman_residual`). Because any Galilean-invariant interaction
    acts locally on this split, this value is a dynamical invariant of
    scattering.
    """
    return gaussian_purity_under_map(state, com_map(state.m1, state.m2))


def reflection_purity(state: GaussianProductState) -> float:
    """Purity of the state after reversal of the relative momentum.

        p = s1 s2 / sqrt(((mu1-mu2)^2 s1^2 + 4 mu1^2 s2^2)
                         (4 mu2^2 s1^2 + (mu2-mu1)^2 s2^2))

    Depends only on the ratios m2/m1 and sigma2/sigma1; equals 1 for equal
    masses or when the Schulman condition holds. This is the purity an
    all-reflecting (hard-core) collision leaves behind.
    """
    return gaussian_purity_under_map(state, reflection_map(state.m1, state.m2))


def schulman_residual(state: GaussianProductState) -> float:
    """Normalized residual of the condition m1/sigma1^2 = m2/sigma2^2.

    Returns (mu1/s1^2 - mu2/s2^2) / (mu1/s1^2 + mu2/s2^2), a dimensionless
    number in [-1, 1] that vanishes exactly when the condition holds.
    Positive sign means particle 1 has the larger mass-to-variance ratio.
    """
    g1 = state.mu1 / state.sigma1**2
    g2 = state.mu2 / state.sigma2**2
    return (g1 - g2) / (g1 + g2)


# ---------------------------------------------------------------------------
# Applying a map to sampled wave functions.
# ---------------------------------------------------------------------------

def _auto_grids(psi: SampledWavefunction, T: LinearMap2):
    """Axis-aligned bounding box of the mapped grid rectangle."""
    corners1 = np.array([psi.grid1.min, psi.grid1.min, psi.grid1.max, psi.grid1.max])
    corners2 = np.array([psi.grid2.min, psi.grid2.max, psi.grid2.min, psi.grid2.max])
    z1, z2 = T.apply(corners1, corners2)
    return (Grid1D(z1.min(), z1.max(), psi.grid1.n),
            Grid1D(z2.min(), z2.max(), psi.grid2.n))


def apply_map_to_sampled(psi: SampledWavefunction, T: LinearMap2,
                         grid1: Grid1D = None, grid2: Grid1D = None,
                         norm_tol: float = 1e-6) -> SampledWavefunction:
    """Relabel a sampled wave function by z = T p: returns phi(T^-1 z).

    When the input carries a closed-form evaluator the new samples are exact;
    otherwise the input is resampled with bicubic interpolation (zero outside
    the source grid). The result keeps the input's point counts on an
    axis-aligned bounding box of the mapped domain unless explicit target
    grids are given.

    Raises
    ------
    CoverageError
        If the norm changes by more than ``norm_tol`` (mapped support not
        covered, or interpolation off the resolved regime).
    """
    if grid1 is None or grid2 is None:
        g1, g2 = _auto_grids(psi, T)
        grid1 = grid1 or g1
        grid2 = grid2 or g2

    tinv = T.inverse()
    z1 = grid1.points[:, None]
    z2 = grid2.points[None, :]
    p1, p2 = tinv.apply(z1, z2)

    if psi.evaluator is not None:
        ev = psi.evaluator
        vals = ev(p1, p2)
        new_ev = lambda a, b: ev(*tinv.apply(a, b))
    else:
        re = RectBivariateSpline(psi.grid1.points, psi.grid2.points,
                                 psi.values.real, kx=3, ky=3)
        im = RectBivariateSpline(psi.grid1.points, psi.grid2.points,
                                 psi.values.imag, kx=3, ky=3)
        p1b, p2b = np.broadcast_arrays(p1, p2)
        inside = ((p1b >= psi.grid1.min) & (p1b <= psi.grid1.max)
                  & (p2b >= psi.grid2.min) & (p2b <= psi.grid2.max))
        vals = np.zeros(p1b.shape, dtype=complex)
        vals[inside] = re.ev(p1b[inside], p2b[inside]) + 1j * im.ev(
            p1b[inside], p2b[inside])
        new_ev = None

    out = SampledWavefunction(grid1, grid2, vals, basis="transformed",
                              evaluator=new_ev)
    n_in, n_out = psi.norm(), out.norm()
    if abs(n_out - n_in) > norm_tol * max(1.0, n_in):
        raise CoverageError(
            f"norm changed from {n_in:.12g} to {n_out:.12g} under the map; "
            "target grids do not cover the mapped support"
        )
    return out
