"""Tests for Gaussian states, sampling, statistics, and local unitaries."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import scatent as sc
from scatent.errors import (
    CoverageError,
    DegenerateStateError,
    InvalidParameterError,
)
from oracles import quadrature_overlap


def test_gaussian_sampled_norm_is_one():
    state = sc.make_gaussian(k1=5, k2=-5, sigma1=1, sigma2=1, a1=10, a2=-10)
    psi = sc.sample_on_grid(state)
    assert abs(psi.norm_squared() - 1.0) < 1e-10


@pytest.mark.parametrize("bad", [
    dict(sigma1=0.0), dict(sigma1=-1.0), dict(sigma2=0.0),
    dict(m1=0.0), dict(m2=-2.0), dict(k1=float("nan")),
])
def test_invalid_parameters_rejected(bad):
    params = dict(k1=5, k2=-5, sigma1=1, sigma2=1, m1=1, m2=1)
    params.update(bad)
    with pytest.raises(InvalidParameterError):
        sc.make_gaussian(**params)


def test_scattering_constructor_is_com_frame():
    state = sc.GaussianProductState.scattering(k=5, sigma1=5 / 6, sigma2=5 / 6)
    assert state.k1 + state.k2 == 0.0
    assert state.k1 == 5.0


def test_mass_accessors():
    state = sc.make_gaussian(k1=1, k2=-1, sigma1=1, sigma2=1, m1=1, m2=2)
    assert math.isclose(state.mu1, 1 / 3)
    assert math.isclose(state.mu2, 2 / 3)
    assert math.isclose(state.total_mass, 3.0)
    assert math.isclose(state.reduced_mass, 2 / 3)


def test_narrow_grid_raises_coverage_error():
    state = sc.make_gaussian(k1=5, k2=-5, sigma1=1, sigma2=1)
    g1 = sc.Grid1D(5 - 2, 5 + 2, 128)
    g2 = sc.Grid1D(-5 - 2, -5 + 2, 128)
    with pytest.raises(CoverageError):
        sc.sample_on_grid(state, g1, g2)


def test_narrow_grid_warn_mode():
    state = sc.make_gaussian(k1=5, k2=-5, sigma1=1, sigma2=1)
    g1 = sc.Grid1D(5 - 2, 5 + 2, 128)
    g2 = sc.Grid1D(-5 - 2, -5 + 2, 128)
    with pytest.warns(UserWarning):
        psi = sc.sample_on_grid(state, g1, g2, on_narrow="warn")
    assert psi.norm_squared() < 1.0


def test_grid_refinement_purity_consistency():
    # Purity of an entangled (mapped) Gaussian is grid-converged at n=256.
    state = sc.make_gaussian(k1=5, k2=-5, sigma1=1, sigma2=1, m1=1, m2=2)
    tcm = sc.com_map(1, 2)
    values = []
    for n in (256, 512):
        psi = sc.sample_on_grid(state, n=n)
        values.append(sc.purity_numeric(sc.apply_map_to_sampled(psi, tcm)).purity)
    assert abs(values[0] - values[1]) < 1e-8


def test_statistics_of_sampled_gaussian():
    state = sc.make_gaussian(k1=5, k2=-5, sigma1=1, sigma2=1)
    stats = sc.state_statistics(sc.sample_on_grid(state))
    assert abs(stats.mean1 - 5.0) < 1e-8
    assert abs(stats.mean2 + 5.0) < 1e-8
    assert abs(stats.std1 - 1.0) < 1e-6
    assert abs(stats.std2 - 1.0) < 1e-6
    assert abs(stats.norm - 1.0) < 1e-10


def test_statistics_unequal_widths():
    state = sc.make_gaussian(k1=3, k2=-3, sigma1=1, sigma2=2)
    stats = sc.state_statistics(sc.sample_on_grid(state))
    assert abs(stats.std1 - 1.0) < 1e-6
    assert abs(stats.std2 - 2.0) < 1e-6


def test_statistics_zero_state_raises():
    g = sc.Grid1D(-1, 1, 16)
    psi = sc.SampledWavefunction(g, g, np.zeros((16, 16), dtype=complex))
    with pytest.raises(DegenerateStateError):
        sc.state_statistics(psi)


class TestOverlapIntegral:
    def test_boundary_condition_scale(self):
        # k/sigma = 6 puts the single-particle overlap below one millionth.
        state = sc.GaussianProductState.scattering(k=6, sigma1=1, sigma2=1)
        ov = sc.overlap_integral(state)
        assert ov < 1e-6
        assert math.isclose(ov, math.exp(-18.0), rel_tol=1e-12)

    def test_against_quadrature_oracle(self):
        state = sc.GaussianProductState.scattering(k=6, sigma1=1, sigma2=1)
        ov = sc.overlap_integral(state)
        oracle = quadrature_overlap(state)
        assert abs(ov - oracle) / oracle < 1e-10

    def test_oracle_general_parameters(self):
        state = sc.make_gaussian(k1=2.5, k2=-1.0, sigma1=0.7, sigma2=1.3,
                                 a1=0.4, a2=0.3)
        ov = sc.overlap_integral(state)
        oracle = quadrature_overlap(state)
        assert abs(ov - oracle) < 1e-10 * max(1.0, oracle)

    def test_identical_distributions_overlap_one(self):
        state = sc.make_gaussian(k1=0, k2=0, sigma1=1, sigma2=1)
        assert math.isclose(sc.overlap_integral(state), 1.0, rel_tol=1e-12)

    def test_monotone_decreasing_in_k_over_sigma(self):
        values = [sc.overlap_integral(
            sc.GaussianProductState.scattering(k=k, sigma1=1, sigma2=1))
            for k in np.linspace(0.5, 8.0, 16)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestLocalUnitaries:
    def setup_method(self):
        self.state = sc.make_gaussian(k1=5, k2=-5, sigma1=1, sigma2=0.5)
        self.psi = sc.sample_on_grid(self.state)

    def test_translate_leaves_density_pointwise(self):
        moved = sc.apply_local_unitary(self.psi, "translate", 2.5)
        np.testing.assert_allclose(np.abs(moved.values) ** 2,
                                   np.abs(self.psi.values) ** 2, atol=1e-14)
        assert abs(moved.norm_squared() - 1.0) < 1e-10

    def test_boost_shifts_means_and_keeps_purity(self):
        boosted = sc.apply_local_unitary(self.psi, "boost", 1.3)
        stats = sc.state_statistics(boosted)
        assert abs(stats.mean1 - 6.3) < 1e-8
        assert abs(stats.mean2 + 3.7) < 1e-8
        p0 = sc.purity_numeric(self.psi).purity
        p1 = sc.purity_numeric(boosted).purity
        assert abs(p0 - p1) < 1e-8

    def test_fourier_matches_closed_form(self):
        # Wide window so the truncated momentum tails sit below 1e-10.
        psi = sc.sample_on_grid(self.state, n=512, window=12.0)
        pos = sc.apply_local_unitary(psi, "fourier")
        assert pos.basis == "position"
        x1 = pos.grid1.points[:, None]
        x2 = pos.grid2.points[None, :]
        s1, s2 = 1.0, 0.5
        expected = ((2 * s1**2 / np.pi) ** 0.25 * np.exp(1j * 5 * x1 - s1**2 * x1**2)
                    * (2 * s2**2 / np.pi) ** 0.25 * np.exp(-1j * 5 * x2 - s2**2 * x2**2))
        assert np.abs(pos.values - expected).max() < 1e-10

    def test_fourier_width_is_reciprocal(self):
        pos = sc.apply_local_unitary(self.psi, "fourier")
        stats = sc.state_statistics(pos)
        assert abs(stats.std1 - 1 / (2 * 1.0)) < 1e-6
        assert abs(stats.std2 - 1 / (2 * 0.5)) < 1e-6

    def test_fourier_round_trip_identity(self):
        pos = sc.apply_local_unitary(self.psi, "fourier")
        back = sc.apply_local_unitary(pos, "fourier")
        assert back.basis == "momentum"
        assert back.grid1 == self.psi.grid1 and back.grid2 == self.psi.grid2
        assert np.abs(back.values - self.psi.values).max() < 1e-10

    def test_fourier_preserves_norm_and_purity(self):
        pos = sc.apply_local_unitary(self.psi, "fourier")
        assert abs(pos.norm_squared() - 1.0) < 1e-10
        p_mom = sc.purity_numeric(self.psi).purity
        p_pos = sc.purity_numeric(pos).purity
        assert abs(p_mom - p_pos) < 1e-8

    def test_purity_invariance_for_entangled_state(self):
        # The invariance must hold beyond the trivially separable case.
        mapped = sc.apply_map_to_sampled(self.psi, sc.com_map(1.0, 3.0))
        renamed = sc.SampledWavefunction(mapped.grid1, mapped.grid2,
                                         mapped.values, basis="momentum",
                                         evaluator=mapped.evaluator)
        p0 = sc.purity_numeric(renamed).purity
        for op, val in (("translate", 1.7), ("boost", -0.9), ("fourier", None)):
            moved = sc.apply_local_unitary(renamed, op, val)
            assert abs(sc.purity_numeric(moved).purity - p0) < 1e-8

    def test_unknown_op_rejected(self):
        with pytest.raises(InvalidParameterError):
            sc.apply_local_unitary(self.psi, "squeeze", 1.0)
        with pytest.raises(InvalidParameterError):
            sc.apply_local_unitary(self.psi, "boost")


@given(st.floats(min_value=0.1, max_value=6.0),
       st.floats(min_value=0.2, max_value=2.0))
@settings(max_examples=40, deadline=None)
def test_overlap_closed_form_stays_in_unit_interval(k, sigma):
    state = sc.GaussianProductState.scattering(k=k, sigma1=sigma, sigma2=sigma)
    ov = sc.overlap_integral(state)
    assert 0.0 <= ov <= 1.0 + 1e-12


def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        sc.Grid1D(1.0, 1.0, 8)
    with pytest.raises(InvalidParameterError):
        sc.Grid1D(0.0, 1.0, 1)
    g = sc.Grid1D(0.0, 1.0, 11)
    assert math.isclose(g.spacing, 0.1)
    assert math.isclose(g.trapezoid_weights.sum(), 1.0)
