"""Closed-form analytics: frequencies, ages, heuristic, fixed-point residual."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agenet import (
    Network,
    Policy,
    activation_frequency,
    closed_form_age,
    fixed_point_residual,
    heuristic_sqrt_policy,
    is_single_collision_domain,
)
from conftest import complete_net, iso, pair, path_net


class TestActivationFrequency:
    def test_mutual_pair(self, two_link_symmetric):
        f = activation_frequency(two_link_symmetric, Policy((0.5, 0.5)))
        assert f.tolist() == [0.25, 0.25]

    def test_isolated_link_empty_product(self):
        f = activation_frequency(iso(), Policy((0.7,)))
        assert f.tolist() == [0.7]

    def test_certain_collision(self, two_link_symmetric):
        f = activation_frequency(two_link_symmetric, Policy((1.0, 1.0)))
        assert f.tolist() == [0.0, 0.0]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            activation_frequency(iso(), Policy((0.5, 0.5)))


class TestClosedFormAge:
    def test_link_age_formula(self):
        net = pair((0.5, 0.5))
        profile = closed_form_age(net, Policy((0.5, 0.5)))
        assert profile.link_age.tolist() == [8.0, 8.0]  # 1/(0.5 * 0.25)

    def test_single_perfect_link_is_weight(self):
        net = Network.from_pairs(gamma=[1.0], weight=[3.0])
        profile = closed_form_age(net, Policy((1.0,)))
        assert profile.network_age == 3.0

    def test_two_link_optimum_value(self, two_link_symmetric):
        # grid-certified optimum for this instance (see test_oracle)
        profile = closed_form_age(two_link_symmetric, Policy((0.5, 0.5)))
        assert profile.network_age == 8.0

    def test_divergent_flagged(self, two_link_symmetric):
        profile = closed_form_age(two_link_symmetric, Policy((1.0, 1.0)))
        assert profile.divergent == (True, True)
        assert np.isinf(profile.network_age)

    def test_network_age_at_least_weight_sum(self, suite_case):
        name, net = suite_case
        rng = np.random.default_rng(1)
        p = Policy.from_array(rng.uniform(0.05, 0.95, net.num_links))
        profile = closed_form_age(net, p)
        assert profile.network_age >= sum(net.weight)


class TestHeuristic:
    def test_two_link_quarter_gamma(self):
        net = pair((1.0, 0.25))
        p = heuristic_sqrt_policy(net)
        assert p.arr == pytest.approx([1 / 3, 2 / 3], abs=1e-15)

    def test_equal_gamma_uniform(self):
        net = complete_net((0.36, 0.36, 0.36, 0.36))
        p = heuristic_sqrt_policy(net)
        assert p.arr == pytest.approx([0.25] * 4, abs=1e-15)

    def test_three_link_arithmetic(self):
        net = complete_net((1.0, 1.0, 0.25))
        p = heuristic_sqrt_policy(net)
        assert p.arr == pytest.approx([0.25, 0.25, 0.5], abs=1e-15)

    def test_refuses_non_collision_domain(self):
        net = path_net((1.0, 1.0, 1.0))
        assert not is_single_collision_domain(net)
        with pytest.raises(ValueError, match="single-collision-domain"):
            heuristic_sqrt_policy(net)
        forced = heuristic_sqrt_policy(net, force=True)
        assert forced.arr == pytest.approx([1 / 3] * 3)

    def test_collision_domain_detection(self):
        assert is_single_collision_domain(complete_net((1.0, 1.0, 1.0)))
        assert is_single_collision_domain(iso())  # trivially complete


class TestFixedPointResidual:
    def test_symmetric_pair_optimum(self, two_link_symmetric):
        r = fixed_point_residual(two_link_symmetric, Policy((0.5, 0.5)))
        assert r.tolist() == [0.0, 0.0]  # ages (4,4): 4/(4+4) = 1/2

    def test_isolated_link(self):
        assert fixed_point_residual(iso(), Policy((1.0,))).tolist() == [0.0]
        assert fixed_point_residual(iso(), Policy((0.6,)))[0] == pytest.approx(-0.4)

    def test_heuristic_point_off_fixed_point(self):
        # ages at the sqrt heuristic are (9, 9), so the ratio is 1/2 for both
        net = pair((1.0, 0.25))
        r = fixed_point_residual(net, heuristic_sqrt_policy(net))
        assert r == pytest.approx([1 / 3 - 0.5, 2 / 3 - 0.5], abs=1e-12)

    def test_divergent_age_rejected(self, two_link_symmetric):
        with pytest.raises(ValueError, match="diverges"):
            fixed_point_residual(two_link_symmetric, Policy((1.0, 0.5)))

    def test_residual_bounded(self, suite_case):
        name, net = suite_case
        rng = np.random.default_rng(2)
        for _ in range(5):
            p = Policy.from_array(rng.uniform(0.05, 0.95, net.num_links))
            r = fixed_point_residual(net, p)
            assert np.all(np.abs(r) <= 1.0)


class TestMonotonicity:
    @settings(max_examples=40, deadline=None)
    @given(
        base=st.floats(0.1, 0.8),
        bump=st.floats(0.01, 0.15),
        other=st.floats(0.1, 0.9),
    )
    def test_raising_p_helps_self_hurts_neighbor(self, base, bump, other):
        net = pair((0.9, 0.7))
        lo = closed_form_age(net, Policy((base, other)))
        hi = closed_form_age(net, Policy((base + bump, other)))
        assert hi.link_age[0] < lo.link_age[0]
        assert hi.link_age[1] > lo.link_age[1]
