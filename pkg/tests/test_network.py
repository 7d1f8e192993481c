"""Network construction, config parsing/serialization, validation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agenet import ConfigError, Network, parse_network, serialize_network, validate


PAIR_CONFIG = """
{
  "links": [{"id": 1, "gamma": 1.0, "weight": 1.0},
            {"id": 2, "gamma": 1.0}],
  "pairs": [[1, 2]]
}
"""


class TestParse:
    def test_two_link_pair(self):
        net = parse_network(PAIR_CONFIG)
        assert net.ids == (1, 2)
        assert net.neighbors == ((1,), (0,))
        assert net.gamma == (1.0, 1.0)
        assert net.weight == (1.0, 1.0)  # weight defaults to 1

    def test_isolated_link(self):
        net = parse_network('{"links": [{"id": 1, "gamma": 0.5}]}')
        assert net.neighbors == ((),)

    def test_unknown_neighbor_id(self):
        text = '{"links": [{"id": 1, "gamma": 1}, {"id": 2, "gamma": 1}], "neighbors": {"1": [9]}}'
        with pytest.raises(ConfigError, match="unknown link 9"):
            parse_network(text)

    def test_unknown_pair_id(self):
        text = '{"links": [{"id": 1, "gamma": 1}], "pairs": [[1, 3]]}'
        with pytest.raises(ConfigError, match="unknown link 3"):
            parse_network(text)

    def test_duplicate_id(self):
        text = '{"links": [{"id": 1, "gamma": 1}, {"id": 1, "gamma": 0.5}]}'
        with pytest.raises(ConfigError, match="duplicate"):
            parse_network(text)

    def test_malformed_json(self):
        with pytest.raises(ConfigError, match="malformed"):
            parse_network("{links: nope")

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_network('{"links": [{"id": 1, "gamma": 1}], "extra": 1}')

    def test_boolean_values_rejected(self):
        with pytest.raises(ConfigError, match="integer"):
            parse_network('{"links": [{"id": true, "gamma": 1}]}')
        with pytest.raises(ConfigError, match="number"):
            parse_network('{"links": [{"id": 1, "gamma": true}]}')

    def test_pairs_and_neighbors_union(self):
        text = """
        {"links": [{"id": 1, "gamma": 1}, {"id": 2, "gamma": 1}, {"id": 3, "gamma": 1}],
         "pairs": [[1, 2]],
         "neighbors": {"1": [3]}}
        """
        net = parse_network(text)
        assert net.neighbors[0] == (1, 2)  # pair partner + directed extra
        assert net.neighbors[1] == (0,)
        assert net.neighbors[2] == ()


class TestNetwork:
    def test_from_pairs_mutual(self):
        net = Network.from_pairs(gamma=[1.0, 1.0], pairs=[(0, 1)])
        assert net.neighbors == ((1,), (0,))
        assert net.victims == ((1,), (0,))
        assert net.is_symmetric

    def test_victims_reverse_direction(self):
        # 0 kills 1 (1 suffers from 0), nothing else
        net = Network.from_pairs(gamma=[1.0, 1.0], neighbors={1: [0]})
        assert net.neighbors == ((), (0,))
        assert net.victims == ((1,), ())
        assert not net.is_symmetric

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ConfigError):
            Network(ids=(1, 1), gamma=(1.0, 1.0), weight=(1.0, 1.0), neighbors=((), ()))

    def test_csr(self):
        net = Network.from_pairs(gamma=[1, 1, 1], pairs=[(0, 1), (1, 2)])
        indptr, indices = net.neighbor_csr
        assert indptr.tolist() == [0, 1, 3, 4]
        assert indices.tolist() == [1, 0, 2, 1]

    def test_index_of(self):
        net = Network.from_pairs(gamma=[1.0, 1.0], ids=[10, 20])
        assert net.index_of(20) == 1
        with pytest.raises(KeyError):
            net.index_of(30)


class TestValidate:
    def test_symmetric_pair_ok(self):
        net = Network.from_pairs(gamma=[1.0, 1.0], pairs=[(0, 1)])
        assert validate(net).ok

    def test_asymmetry_warning_vs_error(self):
        net = Network.from_pairs(gamma=[1.0, 1.0], neighbors={0: [1]})
        report = validate(net)
        assert report.ok and len(report.warnings) == 1
        strict = validate(net, for_distributed=True)
        assert not strict.ok
        assert "asymmetric" in strict.errors[0].message

    def test_gamma_zero_is_error(self):
        net = Network.from_pairs(gamma=[0.0])
        report = validate(net)
        assert not report.ok
        assert "positive" in report.errors[0].message

    def test_gamma_above_one_is_error(self):
        assert not validate(Network.from_pairs(gamma=[1.5])).ok

    def test_gamma_one_allowed(self):
        assert validate(Network.from_pairs(gamma=[1.0])).ok

    def test_nonpositive_weight_is_error(self):
        assert not validate(Network.from_pairs(gamma=[1.0], weight=[0.0])).ok

    def test_self_interference_is_error(self):
        net = Network.from_pairs(gamma=[1.0], neighbors={0: [0]})
        report = validate(net)
        assert not report.ok
        assert "itself" in report.errors[0].message

    def test_ok_implies_invariants(self, suite_case):
        name, net = suite_case
        report = validate(net)
        assert report.ok
        assert all(0.0 < g <= 1.0 for g in net.gamma)
        assert all(w > 0.0 for w in net.weight)
        assert all(e not in net.neighbors[e] for e in range(net.num_links))


ids_strategy = st.lists(st.integers(-10_000, 10_000), min_size=1, max_size=5, unique=True)


@st.composite
def networks(draw, directed=False):
    ids = draw(ids_strategy)
    n = len(ids)
    gammas = [draw(st.floats(0.05, 1.0)) for _ in range(n)]
    weights = [draw(st.floats(0.1, 5.0)) for _ in range(n)]
    pairs = [
        (ids[i], ids[j])
        for i in range(n)
        for j in range(i + 1, n)
        if draw(st.booleans())
    ]
    neighbors = {}
    if directed and n > 1:
        for i in range(n):
            extra = [ids[j] for j in range(n) if j != i and draw(st.booleans())]
            if extra:
                neighbors[ids[i]] = extra
    return Network.from_pairs(
        gamma=gammas, weight=weights, pairs=pairs, neighbors=neighbors, ids=ids
    )


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(networks(directed=True))
    def test_round_trip(self, net):
        assert parse_network(serialize_network(net)) == net

    @settings(max_examples=60, deadline=None)
    @given(networks())
    def test_pairs_are_mutual(self, net):
        for e in range(net.num_links):
            for e2 in net.neighbors[e]:
                assert e in net.neighbors[e2]
