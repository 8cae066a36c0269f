"""Out-state construction and entanglement of the scattered two-particle state.

The scattering operator acts on the center-of-mass/relative coordinates as
multiplication by t(q) plus reflection q -> -q weighted by r(q). In the
particle momenta this reads

    phi_tra(p1, p2) = t(q12) phi_in(p1, p2),      q12 = mu2 p1 - mu1 p2
    phi_ref(p1, p2) = r(q12) phi_in(M p),         M = reflection map

so the transmitted and reflected parts occupy disjoint momentum lobes
around (k, -k) and (-k, k) and behave as orthogonal modes.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import (
    BoundaryConditionError,
    CoverageError,
    InvalidParameterError,
    ModeOverlapError,
)
from .purity import purity_functional, purity_numeric
from .smatrix import PotentialModel
from .transforms import (
    apply_map_to_sampled,
    com_map,
    reflection_map,
    reflection_purity,
)
from .wavepacket import (
    DEFAULT_N,
    DEFAULT_WINDOW,
    GaussianProductState,
    Grid1D,
    SampledWavefunction,
    overlap_integral,
    sample_on_grid,
    state_statistics,
)

#: Maximum tolerated single-particle momentum overlap of the in-state.
OVERLAP_TOL = 1e-6

#: Maximum tolerated in-state probability mass at relative momentum q <= 0.
Q_SUPPORT_TOL = 1e-12

#: Orthogonality threshold for the transmitted/reflected mode overlap.
MODE_ORTH_TOL = 1e-6

#: |T + R - 1| beyond this indicates the grid missed part of the out-state.
UNITARITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OutState:
    """Scattered state split into its transmitted and reflected parts.

    ``phi_tra`` and ``phi_ref`` share one momentum grid;
    ``transmission = ||phi_tra||^2`` and ``reflection = ||phi_ref||^2`` sum
    to 1, and ``mode_overlap = |<phi_tra|phi_ref>|`` is negligible for valid
    scattering boundary conditions.
    """

    phi_tra: SampledWavefunction
    phi_ref: SampledWavefunction
    transmission: float
    reflection: float
    mode_overlap: float
    model: PotentialModel
    m1: float
    m2: float

    @property
    def phi_out(self) -> SampledWavefunction:
        ev_t, ev_r = self.phi_tra.evaluator, self.phi_ref.evaluator
        ev = None
        if ev_t is not None and ev_r is not None:
            ev = lambda p1, p2: ev_t(p1, p2) + ev_r(p1, p2)
        return SampledWavefunction(self.phi_tra.grid1, self.phi_tra.grid2,
                                   self.phi_tra.values + self.phi_ref.values,
                                   basis="momentum", evaluator=ev)


@dataclass(frozen=True)
class SplitPurity:
    """Exact purity of the out-state and of its two modes."""

    p_tra: float
    p_ref: float
    p_total: float
    residual: float


@dataclass(frozen=True)
class VariationDiagnostic:
    """How strongly the amplitudes vary across the packet's momentum spread.

    ``ratio_t = delta_q |dt/dq| / |t|`` at the central relative momentum,
    and likewise ``ratio_r``; small values certify the constant-amplitude
    approximation. ``ratio_t`` is None when |t| vanishes (hard wall).
    ``value`` is the largest defined ratio.
    """

    ratio_t: Optional[float]
    ratio_r: Optional[float]
    value: float
    delta_q: float
    q_center: float
    t_magnitude: float
    r_magnitude: float


@dataclass(frozen=True)
class IEInvariance:
    """Purity of the center-of-mass/relative split before and after scattering."""

    p_ie_in: float
    p_ie_out: float

    @property
    def difference(self) -> float:
        return abs(self.p_ie_in - self.p_ie_out)


def _com_boosted(state: GaussianProductState) -> GaussianProductState:
    """Boost to the frame where the mean total momentum vanishes.

    Uses the physical (mass-weighted) boost, which preserves the relative
    momentum and the interparticle purity.
    """
    p_total = state.k1 + state.k2
    if p_total == 0.0:
        return state
    return state.boosted(-state.mu1 * p_total, -state.mu2 * p_total)


def _q_stats(state: GaussianProductState):
    """Mean and standard deviation of q = mu2 p1 - mu1 p2."""
    q_mean = state.mu2 * state.k1 - state.mu1 * state.k2
    q_std = math.hypot(state.mu2 * state.sigma1, state.mu1 * state.sigma2)
    return q_mean, q_std


def _check_gaussian_boundary(state: GaussianProductState):
    ov = overlap_integral(state)
    if ov >= OVERLAP_TOL:
        raise BoundaryConditionError(
            f"single-particle momentum overlap {ov:.3e} >= {OVERLAP_TOL:g}; "
            "packets are not on disjoint momentum half-lines"
        )
    q_mean, q_std = _q_stats(state)
    if q_mean <= 0:
        raise BoundaryConditionError(
            f"mean relative momentum {q_mean:.3g} is not positive; "
            "particles are not moving toward each other"
        )
    q_neg_mass = 0.5 * math.erfc(q_mean / (q_std * math.sqrt(2.0)))
    if q_neg_mass > Q_SUPPORT_TOL:
        raise BoundaryConditionError(
            f"in-state mass {q_neg_mass:.3e} at q <= 0 exceeds {Q_SUPPORT_TOL:g}"
        )


def _default_out_grids(k_scale: float, widths, n: int, window: float):
    """Symmetric grid covering both the (k,-k) and (-k,k) lobes."""
    half = abs(k_scale) + window * max(widths)
    g = Grid1D(-half, half, n)
    return g, g


def _lobe_widths(state: GaussianProductState):
    """Per-axis widths of the incoming and reflected lobes."""
    m = reflection_map(state.m1, state.m2)
    s1, s2 = state.sigma1, state.sigma2
    return (s1, s2,
            abs(m.r) * s1 + abs(m.s) * s2,
            abs(m.t) * s1 + abs(m.u) * s2)


def _amplitude_fields(model, q12, m_red):
    """Amplitudes evaluated at |q12|, with q = 0 nodes nudged off zero.

    The potentials here are symmetric, so t(-q) = t(q) and r(-q) = r(q);
    nodes with q12 <= 0 carry in-state mass below Q_SUPPORT_TOL by the
    boundary-condition check, making the nudge at exact zeros harmless.
    """
    qa = np.abs(q12)
    tiny = 1e-12 * max(1.0, float(np.max(qa)))
    qa = np.maximum(qa, tiny)
    return model.transmission_reflection(qa, m_red)


def out_state(in_state: Union[GaussianProductState, SampledWavefunction],
              model: PotentialModel, m1: float = None, m2: float = None,
              n: int = DEFAULT_N, window: float = DEFAULT_WINDOW,
              grid1: Grid1D = None, grid2: Grid1D = None) -> OutState:
    """Apply the scattering operator to an in-state.

    For a :class:`GaussianProductState` the transmitted and reflected parts
    are evaluated in closed form (no interpolation and no discretized delta
    functions); a :class:`SampledWavefunction` input additionally needs the
    particle masses and is resampled onto the out grid by interpolation.
    If the mean total momentum is nonzero the state is boosted to the
    center-of-momentum frame first (a local unitary, purity-neutral).

    Raises
    ------
    BoundaryConditionError
        If the in-state violates the scattering boundary conditions.
    CoverageError
        If the grid misses part of either lobe (detected via T + R != 1).
    """
    if isinstance(in_state, GaussianProductState):
        return _out_state_gaussian(in_state, model, n, window, grid1, grid2)
    if not isinstance(in_state, SampledWavefunction):
        raise InvalidParameterError(
            "in_state must be a GaussianProductState or SampledWavefunction"
        )
    if m1 is None or m2 is None:
        raise InvalidParameterError("sampled in-states require masses m1 and m2")
    if m1 <= 0 or m2 <= 0:
        raise InvalidParameterError("masses must be positive")
    return _out_state_sampled(in_state, model, m1, m2, n, window, grid1, grid2)


def _finish_out_state(phi_tra, phi_ref, model, m1, m2):
    T = phi_tra.norm_squared()
    R = phi_ref.norm_squared()
    if abs(T + R - 1.0) > UNITARITY_TOL:
        raise CoverageError(
            f"T + R = {T + R:.12g} deviates from 1 beyond {UNITARITY_TOL:g}; "
            "the out grid does not cover both momentum lobes"
        )
    overlap = abs(phi_tra.inner(phi_ref))
    if overlap >= MODE_ORTH_TOL:
        raise ModeOverlapError(
            f"transmitted/reflected overlap {overlap:.3e} >= {MODE_ORTH_TOL:g}"
        )
    return OutState(phi_tra=phi_tra, phi_ref=phi_ref, transmission=T,
                    reflection=R, mode_overlap=overlap, model=model,
                    m1=m1, m2=m2)


def _out_state_gaussian(state, model, n, window, grid1, grid2):
    state = _com_boosted(state)
    _check_gaussian_boundary(state)
    if grid1 is None or grid2 is None:
        k_scale = max(abs(state.k1), abs(state.k2))
        g1, g2 = _default_out_grids(k_scale, _lobe_widths(state), n, window)
        grid1 = grid1 or g1
        grid2 = grid2 or g2

    mu1, mu2 = state.mu1, state.mu2
    m_red = state.reduced_mass
    refl = reflection_map(state.m1, state.m2)

    p1 = grid1.points[:, None]
    p2 = grid2.points[None, :]
    q12 = mu2 * p1 - mu1 * p2
    t_field, r_field = _amplitude_fields(model, q12, m_red)

    in_vals = state.evaluate(p1, p2)
    ref_vals = state.evaluate(*refl.apply(p1, p2))

    def ev_tra(a, b, _s=state, _m=model):
        q = _s.mu2 * np.asarray(a, dtype=float) - _s.mu1 * np.asarray(b, dtype=float)
        t, _ = _amplitude_fields(_m, q, _s.reduced_mass)
        return t * _s.evaluate(a, b)

    def ev_ref(a, b, _s=state, _m=model, _r=refl):
        q = _s.mu2 * np.asarray(a, dtype=float) - _s.mu1 * np.asarray(b, dtype=float)
        _, r = _amplitude_fields(_m, q, _s.reduced_mass)
        return r * _s.evaluate(*_r.apply(a, b))

    phi_tra = SampledWavefunction(grid1, grid2, t_field * in_vals,
                                  basis="momentum", evaluator=ev_tra)
    phi_ref = SampledWavefunction(grid1, grid2, r_field * ref_vals,
                                  basis="momentum", evaluator=ev_ref)
    return _finish_out_state(phi_tra, phi_ref, model, state.m1, state.m2)


def _resample(psi: SampledWavefunction, grid1: Grid1D, grid2: Grid1D):
    """Bicubic resampling onto new grids, zero outside the source domain."""
    re = RectBivariateSpline(psi.grid1.points, psi.grid2.points,
                             psi.values.real, kx=3, ky=3)
    im = RectBivariateSpline(psi.grid1.points, psi.grid2.points,
                             psi.values.imag, kx=3, ky=3)
    P1, P2 = np.meshgrid(grid1.points, grid2.points, indexing="ij")
    inside = ((P1 >= psi.grid1.min) & (P1 <= psi.grid1.max)
              & (P2 >= psi.grid2.min) & (P2 <= psi.grid2.max))
    vals = np.zeros(P1.shape, dtype=complex)
    vals[inside] = re.ev(P1[inside], P2[inside]) + 1j * im.ev(P1[inside], P2[inside])
    return SampledWavefunction(grid1, grid2, vals, basis=psi.basis)


def _out_state_sampled(psi, model, m1, m2, n, window, grid1, grid2):
    if psi.basis != "momentum":
        raise InvalidParameterError("sampled in-states must be in the momentum basis")
    mu1 = m1 / (m1 + m2)
    mu2 = m2 / (m1 + m2)
    stats = state_statistics(psi)
    p_total = stats.mean1 + stats.mean2
    if abs(p_total) > 1e-12 * max(1.0, abs(stats.mean1), abs(stats.mean2)):
        psi = SampledWavefunction(psi.grid1.shifted(-mu1 * p_total),
                                  psi.grid2.shifted(-mu2 * p_total),
                                  psi.values, basis="momentum")
        stats = state_statistics(psi)

    # Boundary condition on the sampled data: negligible mass at q <= 0.
    w = psi.weight_grid
    dens = psi.values.real**2 + psi.values.imag**2
    P1, P2 = np.meshgrid(psi.grid1.points, psi.grid2.points, indexing="ij")
    q_in = mu2 * P1 - mu1 * P2
    nrm2 = float(np.sum(w * dens))
    neg_mass = float(np.sum((w * dens)[q_in <= 0])) / nrm2
    if neg_mass > Q_SUPPORT_TOL:
        raise BoundaryConditionError(
            f"in-state mass {neg_mass:.3e} at q <= 0 exceeds {Q_SUPPORT_TOL:g}"
        )
    q_mean = mu2 * stats.mean1 - mu1 * stats.mean2
    if q_mean <= 0:
        raise BoundaryConditionError(
            f"mean relative momentum {q_mean:.3g} is not positive"
        )

    if grid1 is None or grid2 is None:
        refl = reflection_map(m1, m2)
        widths = (stats.std1, stats.std2,
                  abs(refl.r) * stats.std1 + abs(refl.s) * stats.std2,
                  abs(refl.t) * stats.std1 + abs(refl.u) * stats.std2)
        k_scale = max(abs(stats.mean1), abs(stats.mean2))
        g1, g2 = _default_out_grids(k_scale, widths, n, window)
        grid1 = grid1 or g1
        grid2 = grid2 or g2

    in_on_out = _resample(psi, grid1, grid2)
    ref_base = apply_map_to_sampled(psi, reflection_map(m1, m2),
                                    grid1=grid1, grid2=grid2)

    p1 = grid1.points[:, None]
    p2 = grid2.points[None, :]
    q12 = mu2 * p1 - mu1 * p2
    m_red = m1 * m2 / (m1 + m2)
    t_field, r_field = _amplitude_fields(model, q12, m_red)

    phi_tra = SampledWavefunction(grid1, grid2, t_field * in_on_out.values,
                                  basis="momentum")
    phi_ref = SampledWavefunction(grid1, grid2, r_field * ref_base.values,
                                  basis="momentum")
    return _finish_out_state(phi_tra, phi_ref, model, m1, m2)


def split_purity(out: OutState, eps_orth: float = MODE_ORTH_TOL,
                 split_tol: float = 1e-7) -> SplitPurity:
    """Purity of the out-state and its additive transmitted/reflected parts.

    ``p_total`` is the purity functional of phi_tra + phi_ref and agrees
    with ``p_tra + p_ref`` within ``split_tol`` when the modes are
    orthogonal; ``p_tra <= T^2`` and ``p_ref <= R^2``, so the total is
    bounded by one.
    """
    if out.mode_overlap >= eps_orth:
        raise ModeOverlapError(
            f"mode overlap {out.mode_overlap:.3e} >= {eps_orth:g}"
        )
    p_tra = purity_functional(out.phi_tra)
    p_ref = purity_functional(out.phi_ref)
    p_total = purity_functional(out.phi_out)
    residual = abs(p_total - p_tra - p_ref)
    return SplitPurity(p_tra=p_tra, p_ref=p_ref, p_total=p_total,
                       residual=residual)


def constant_amplitude_purity(in_state: GaussianProductState, T: float,
                              R: float) -> float:
    """Out-state purity when t and r are taken constant across the packet:

        p = T^2 + R^2 * reflection_purity(in_state).

    The transmitted part keeps the (separable) in-state's shape and
    contributes T^2; the reflected part contributes R^2 times the purity of
    the reflection-distorted Gaussian.
    """
    _validate_probabilities(T, R)
    return T * T + R * R * reflection_purity(in_state)


def qubit_model_purity(T: float, R: float) -> float:
    """Purity when each particle is coarse-grained to its momentum sign.

    The out-state then lives on two two-level systems with reduced density
    matrix diag(T, R), so p = T^2 + R^2, minimized at 1/2 for T = R = 1/2.
    """
    _validate_probabilities(T, R)
    return T * T + R * R


def _validate_probabilities(T, R):
    # Slack of 1e-9 admits quadrature-measured probabilities that graze the
    # interval ends by rounding.
    if not (math.isfinite(T) and math.isfinite(R)):
        raise InvalidParameterError("T and R must be finite")
    if T < -1e-9 or T > 1 + 1e-9 or R < -1e-9 or R > 1 + 1e-9:
        raise InvalidParameterError(f"T={T} and R={R} must lie in [0, 1]")
    if abs(T + R - 1.0) > 1e-8:
        raise InvalidParameterError(f"T + R = {T + R!r} must equal 1")


def amplitude_variation_diagnostic(model: PotentialModel,
                                   in_state: GaussianProductState,
                                   dq_step: float = None) -> VariationDiagnostic:
    """Dimensionless amplitude-variation measure across the packet.

    Computes delta_q |dt/dq| / |t| and delta_q |dr/dq| / |r| at the mean
    relative momentum, with delta_q the packet's relative-momentum spread.
    Values much below 1 certify the constant-amplitude approximation; a
    value above 1 (e.g. a resonance narrower than the packet) invalidates
    it. Amplitudes with vanishing magnitude are skipped (hard wall: only
    the reflection ratio, which is 0, is reported).
    """
    state = _com_boosted(in_state)
    q_mean, q_std = _q_stats(state)
    if q_mean <= 0:
        raise BoundaryConditionError("mean relative momentum must be positive")
    m_red = state.reduced_mass
    h = dq_step if dq_step is not None else max(1e-6 * q_mean, 1e-9)
    t0, r0 = model.transmission_reflection(q_mean, m_red)
    tp, rp = model.transmission_reflection(q_mean + h, m_red)
    tm, rm = model.transmission_reflection(q_mean - h, m_red)
    dt = (complex(tp) - complex(tm)) / (2.0 * h)
    dr = (complex(rp) - complex(rm)) / (2.0 * h)

    mag_t, mag_r = abs(complex(t0)), abs(complex(r0))
    ratio_t = q_std * abs(dt) / mag_t if mag_t > 1e-12 else None
    ratio_r = q_std * abs(dr) / mag_r if mag_r > 1e-12 else None
    defined = [x for x in (ratio_t, ratio_r) if x is not None]
    if not defined:
        raise InvalidParameterError("both amplitudes vanish; no diagnostic")
    return VariationDiagnostic(ratio_t=ratio_t, ratio_r=ratio_r,
                               value=max(defined), delta_q=q_std,
                               q_center=q_mean, t_magnitude=mag_t,
                               r_magnitude=mag_r)


def ie_purity_invariance_check(in_state: GaussianProductState,
                               model: PotentialModel, n: int = DEFAULT_N,
                               window: float = DEFAULT_WINDOW) -> IEInvariance:
    """Numeric purity of the center-of-mass/relative split, in vs out.

    Both states are mapped to (p, q) coordinates with the closed-form
    transform path and fed to the numeric purity engine. Scattering acts
    locally on this split, so the two values agree (the analytic common
    value is :func:`transforms.ie_purity`).
    """
    state = _com_boosted(in_state)
    out = out_state(state, model, n=n, window=window)
    tcm = com_map(state.m1, state.m2)

    psi_in = sample_on_grid(state, n=n, window=window)
    mapped_in = apply_map_to_sampled(psi_in, tcm)
    mapped_out = apply_map_to_sampled(out.phi_out, tcm)
    p_in = purity_numeric(mapped_in).purity
    p_out = purity_numeric(mapped_out).purity
    return IEInvariance(p_ie_in=p_in, p_ie_out=p_out)
