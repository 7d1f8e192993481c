"""Grid-search oracle and coordinate refinement."""

import numpy as np
import pytest

from agenet import (
    Network,
    Policy,
    closed_form_age,
    fixed_point_residual,
    grid_search,
    heuristic_sqrt_policy,
    refine,
)
from agenet.oracle import closed_form_objective
from conftest import complete_net, iso, pair


class TestGridSearch:
    def test_symmetric_pair(self, two_link_symmetric):
        # hand calculus: min of 2/(p(1-p)) at p = 1/2, objective 8
        result = grid_search(two_link_symmetric, 0.01)
        assert result.policy.p == (0.5, 0.5)
        assert result.objective == 8.0
        assert result.ties == ()

    def test_single_link_pinned(self):
        result = grid_search(iso(0.8, 2.0))
        assert result.policy.p == (1.0,)
        assert result.objective == 2.0 / 0.8

    def test_complete_triangle(self):
        result = grid_search(complete_net((1.0, 1.0, 1.0)), 0.01)
        assert result.policy.arr == pytest.approx([1 / 3] * 3, abs=0.01)
        assert result.objective == pytest.approx(20.25, rel=1e-3)

    def test_isolated_component_pinned(self):
        net = Network.from_pairs(gamma=[1.0, 1.0, 0.5], pairs=[(0, 1)])
        result = grid_search(net, 0.05)
        assert result.policy.p[2] == 1.0
        assert result.policy.p[:2] == (0.5, 0.5)

    def test_size_guard(self):
        net = complete_net((1.0,) * 5)
        with pytest.raises(ValueError, match="size guard|exceeds"):
            grid_search(net, 0.2)
        forced = grid_search(net, 0.2, force=True)
        assert forced.policy.arr == pytest.approx([0.2] * 5)

    def test_resolution_validation(self, two_link_symmetric):
        with pytest.raises(ValueError, match="resolution"):
            grid_search(two_link_symmetric, 0.6)
        with pytest.raises(ValueError, match="resolution"):
            grid_search(two_link_symmetric, 0.0)

    def test_deterministic(self, two_link_symmetric):
        a = grid_search(two_link_symmetric, 0.03)
        b = grid_search(two_link_symmetric, 0.03)
        assert a.policy == b.policy and a.objective == b.objective

    def test_invalid_network_rejected(self):
        with pytest.raises(ValueError, match="invalid network"):
            grid_search(Network.from_pairs(gamma=[0.0]))


class TestRefine:
    def test_polishes_grid_optimum(self, two_link_symmetric):
        grid = grid_search(two_link_symmetric, 0.07)  # grid misses 0.5
        result = refine(two_link_symmetric, grid.policy)
        assert result.policy.arr == pytest.approx([0.5, 0.5], abs=1e-6)
        assert result.objective == pytest.approx(8.0, rel=1e-12)

    def test_fixed_point_stays(self, two_link_symmetric):
        result = refine(two_link_symmetric, Policy((0.5, 0.5)), iters=5)
        assert result.policy.arr == pytest.approx([0.5, 0.5], abs=1e-6)

    def test_residual_certificate(self):
        net = pair((1.0, 0.25))
        grid = grid_search(net, 0.01)
        result = refine(net, grid.policy)
        residual = fixed_point_residual(net, result.policy)
        assert np.max(np.abs(residual)) <= 1e-6

    def test_never_increases_objective(self, suite_case):
        name, net = suite_case
        rng = np.random.default_rng(3)
        for _ in range(3):
            start = Policy.from_array(rng.uniform(0.1, 0.9, net.num_links))
            before = closed_form_objective(net, start.arr)
            result = refine(net, start, iters=10)
            assert result.objective <= before + 1e-12

    def test_agrees_with_closed_form(self, two_link_symmetric):
        result = refine(two_link_symmetric, Policy((0.3, 0.7)))
        profile = closed_form_age(two_link_symmetric, result.policy)
        assert result.objective == profile.network_age


class TestOracleVsHeuristic:
    @pytest.mark.parametrize(
        "gammas",
        [(1.0, 0.25), (0.9, 0.4), (1.0, 0.5, 0.25), (0.8, 0.3, 0.6, 0.9)],
    )
    def test_oracle_beats_heuristic_on_heterogeneous(self, gammas):
        net = complete_net(gammas)
        heur = closed_form_age(net, heuristic_sqrt_policy(net)).network_age
        best = refine(net, grid_search(net, 0.02).policy).objective
        assert best <= heur
        if max(gammas) / min(gammas) >= 2.0:
            assert heur - best > 1e-6

    def test_equal_gamma_ties_heuristic(self):
        net = complete_net((0.7, 0.7, 0.7))
        heur = closed_form_age(net, heuristic_sqrt_policy(net)).network_age
        best = refine(net, grid_search(net, 0.02).policy).objective
        assert best == pytest.approx(heur, abs=1e-9)
