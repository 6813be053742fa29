import dataclasses
import types

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dftr import (
    FeedbackLaw,
    ParameterError,
    ContractError,
    Profile,
    ReactorParams,
    SpatialGrid,
    clamped_power,
    d_ax_from_peclet,
    default_saturation_bound,
    initial_profile,
    lambda_theoretical,
    reaction_rate,
    saturate,
)
from conftest import make_params


class TestReactorParams:
    def test_valid_construction(self):
        p = make_params()
        assert p.d_ax == 0.0025
        assert p.peclet == pytest.approx(4.0, rel=1e-15)

    def test_frozen(self):
        p = make_params()
        with pytest.raises(dataclasses.FrozenInstanceError):
            p.v = 0.02

    @pytest.mark.parametrize("field,value", [
        ("d_ax", 0.0), ("d_ax", -1.0), ("v", 0.0), ("v", -0.01),
        ("k", -0.001), ("n", 0.0), ("n", -1.0), ("l", 0.0),
        ("t_final", -1.0), ("sat_m", 0.0), ("sat_m", float("inf")),
    ])
    def test_rejects_bad_field(self, field, value):
        kwargs = dict(d_ax=0.0025, v=0.01, k=0.001, n=1.0, l=1.0,
                      t_final=400.0, sat_m=7.5)
        kwargs[field] = value
        with pytest.raises(ParameterError):
            ReactorParams(**kwargs)

    def test_zero_reaction_allowed(self):
        p = make_params(k=0.0)
        assert p.k == 0.0


class TestFeedbackLaw:
    def test_gain_range(self):
        assert FeedbackLaw(alpha=0.0).alpha == 0.0
        assert FeedbackLaw(alpha=0.5).alpha == 0.5
        with pytest.raises(ParameterError):
            FeedbackLaw(alpha=0.6)
        with pytest.raises(ParameterError):
            FeedbackLaw(alpha=-0.1)

    def test_setpoint_positive(self):
        with pytest.raises(ParameterError):
            FeedbackLaw(alpha=0.0, u_bar=0.0)


class TestSpatialGrid:
    def test_nodes_and_spacing(self):
        g = SpatialGrid(l=1.0, num_nodes=5)
        assert g.h == pytest.approx(0.25, rel=1e-15)
        assert g.nodes[0] == 0.0
        assert g.nodes[-1] == 1.0
        assert np.allclose(np.diff(g.nodes), 0.25, rtol=1e-14)

    def test_quadrature_weights_sum_to_length(self):
        g = SpatialGrid(l=2.0, num_nodes=17)
        assert np.sum(g.quad_weights) == pytest.approx(2.0, rel=1e-14)
        assert g.quad_weights[0] == pytest.approx(g.h / 2, rel=1e-15)

    def test_too_few_nodes(self):
        with pytest.raises(ParameterError):
            SpatialGrid(l=1.0, num_nodes=2)

    def test_nodes_read_only(self):
        g = SpatialGrid(l=1.0, num_nodes=5)
        with pytest.raises(ValueError):
            g.nodes[0] = 3.0


class TestProfile:
    def test_length_mismatch(self, grid201):
        with pytest.raises(ContractError):
            Profile(grid=grid201, values=np.zeros(7))

    def test_non_finite_rejected(self, grid201):
        vals = np.zeros(201)
        vals[3] = np.nan
        with pytest.raises(ContractError):
            Profile(grid=grid201, values=vals)

    def test_values_copied_and_locked(self, grid201):
        src = np.ones(201)
        prof = Profile(grid=grid201, values=src)
        src[0] = 99.0
        assert prof.values[0] == 1.0
        with pytest.raises(ValueError):
            prof.values[0] = 2.0

    def test_with_values(self, grid201):
        prof = Profile(grid=grid201, values=np.ones(201))
        other = prof.with_values(np.full(201, 2.0))
        assert other.grid is prof.grid
        assert other.values[0] == 2.0


class TestDispersionFromPeclet:
    def test_reference_case(self):
        assert d_ax_from_peclet(0.01, 1.0, 4.0) == pytest.approx(0.0025, rel=1e-15)

    def test_unit_case(self):
        assert d_ax_from_peclet(1.0, 1.0, 1.0) == 1.0

    def test_scaled_case(self):
        assert d_ax_from_peclet(0.02, 2.0, 8.0) == pytest.approx(0.005, rel=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            d_ax_from_peclet(0.01, 1.0, 0.0)
        with pytest.raises(ParameterError):
            d_ax_from_peclet(-0.01, 1.0, 4.0)


class TestSaturate:
    def test_examples(self):
        assert saturate(3.0, 5.0) == 3.0
        assert saturate(7.0, 5.0) == 5.0
        assert saturate(-7.0, 5.0) == -5.0

    def test_array_input(self):
        out = saturate(np.array([-10.0, 0.0, 10.0]), 2.0)
        assert np.array_equal(out, [-2.0, 0.0, 2.0])

    def test_bound_must_be_positive(self):
        with pytest.raises(ParameterError):
            saturate(1.0, 0.0)

    @given(st.floats(-1e6, 1e6), st.floats(1e-6, 1e6))
    def test_idempotent_and_bounded(self, w, m):
        s = saturate(w, m)
        assert abs(s) <= m
        assert saturate(s, m) == s

    @given(st.floats(-1e6, 1e6), st.floats(1e-6, 1e6))
    def test_identity_inside_band(self, w, m):
        if abs(w) <= m:
            assert saturate(w, m) == w


class TestClampedPower:
    def test_negative_base_fractional_exponent(self):
        # clamp keeps fractional powers real on transient negative values
        assert clamped_power(-0.5, 0.5) == 0.0
        assert clamped_power(np.array([-1.0, 4.0]), 0.5)[1] == 2.0

    def test_integer_like_exponent(self):
        assert clamped_power(3.0, 2.0) == 9.0
        assert clamped_power(-3.0, 2.0) == 0.0


class TestReactionRate:
    def test_zero_deviation_gives_zero_rate(self, params):
        r = reaction_rate(np.zeros(3), np.full(3, 0.9), params)
        assert np.array_equal(r, np.zeros(3))

    def test_sign_opposes_deviation(self, params):
        c_bar = np.full(1, 0.9)
        assert reaction_rate(np.array([0.1]), c_bar, params)[0] < 0.0
        assert reaction_rate(np.array([-0.1]), c_bar, params)[0] > 0.0

    def test_saturation_freezes_large_deviations(self, params):
        c_bar = np.full(1, 0.9)
        m = params.sat_m
        r_at_bound = reaction_rate(np.array([m]), c_bar, params)
        r_beyond = reaction_rate(np.array([2 * m]), c_bar, params)
        assert np.array_equal(r_at_bound, r_beyond)

    def test_no_reaction_when_k_zero(self):
        p = make_params(k=0.0)
        r = reaction_rate(np.array([0.3]), np.array([0.9]), p)
        assert r[0] == 0.0


class TestInitialProfile:
    def test_reference_endpoint_values(self, params, grid201, law0):
        w0 = initial_profile(grid201, params, law0)
        # w(0,0) = l*d_ax/(v*(1-alpha)) and w(l,0) = w(0,0) + l^2/2
        assert w0.values[0] == pytest.approx(0.25, rel=1e-14)
        assert w0.values[-1] == pytest.approx(0.75, rel=1e-14)

    def test_inlet_robin_identity(self, params, grid201):
        # derivative at the inlet is exactly l, so the mixed condition
        # (1-alpha) w(0) = (d_ax/v) w_x(0) must close to rounding error
        for alpha in (0.0, 0.25, 0.5):
            law = FeedbackLaw(alpha=alpha)
            w0 = initial_profile(grid201, params, law)
            lhs = (1.0 - alpha) * w0.values[0]
            rhs = (params.d_ax / params.v) * params.l
            assert lhs == pytest.approx(rhs, rel=1e-14)

    def test_outlet_slope_vanishes(self, params, law0):
        # w(x,0) is quadratic with vertex at x=l; check the exact formula
        g = SpatialGrid(l=1.0, num_nodes=1001)
        w0 = initial_profile(g, params, law0)
        x = g.nodes
        expected = -0.5 * (x - 1.0) ** 2 + w0.values[-1]
        assert np.allclose(w0.values, expected, rtol=0, atol=1e-14)

    def test_gain_one_rejected(self, params, grid201):
        fake_law = types.SimpleNamespace(alpha=1.0, u_bar=1.0)
        with pytest.raises(ParameterError):
            initial_profile(grid201, params, fake_law)


class TestDefaultSaturationBound:
    def test_reference_value(self):
        # ten times the peak of the startup deviation profile
        assert default_saturation_bound(0.0025, 0.01, 1.0, 0.0) == pytest.approx(
            7.5, rel=1e-14)

    def test_grows_with_gain(self):
        m0 = default_saturation_bound(0.0025, 0.01, 1.0, 0.0)
        m5 = default_saturation_bound(0.0025, 0.01, 1.0, 0.5)
        assert m5 > m0

    def test_gain_one_rejected(self):
        with pytest.raises(ParameterError):
            default_saturation_bound(0.0025, 0.01, 1.0, 1.0)


class TestLambdaTheoretical:
    def test_reference_value(self, params):
        assert lambda_theoretical(params) == pytest.approx(0.0025, abs=1e-15)

    def test_unit_case(self):
        p = ReactorParams(d_ax=1.0, v=4.0, k=0.0, n=1.0, l=1.0,
                          t_final=1.0, sat_m=1.0)
        assert lambda_theoretical(p) == 1.0

    def test_slow_flow_case(self):
        p = ReactorParams(d_ax=0.0025, v=0.02, k=0.0, n=1.0, l=1.0,
                          t_final=1.0, sat_m=1.0)
        assert lambda_theoretical(p) == pytest.approx(0.01, rel=1e-15)

    @given(st.floats(0.1, 10.0))
    def test_quadratic_velocity_scaling(self, c):
        base = ReactorParams(d_ax=0.0025, v=0.01, k=0.0, n=1.0, l=1.0,
                             t_final=1.0, sat_m=1.0)
        scaled = ReactorParams(d_ax=0.0025, v=c * 0.01, k=0.0, n=1.0, l=1.0,
                               t_final=1.0, sat_m=1.0)
        assert lambda_theoretical(scaled) == pytest.approx(
            c * c * lambda_theoretical(base), rel=1e-12)
