"""Shared instance builders and the certification suite."""

import pytest

from agenet import Network


def iso(gamma=1.0, weight=1.0):
    return Network.from_pairs(gamma=[gamma], weight=[weight])


def pair(gammas=(1.0, 1.0), weights=(1.0, 1.0)):
    return Network.from_pairs(gamma=list(gammas), weight=list(weights), pairs=[(0, 1)])


def path_net(gammas, weights=None):
    n = len(gammas)
    return Network.from_pairs(
        gamma=list(gammas),
        weight=list(weights) if weights else [1.0] * n,
        pairs=[(i, i + 1) for i in range(n - 1)],
    )


def complete_net(gammas, weights=None):
    n = len(gammas)
    return Network.from_pairs(
        gamma=list(gammas),
        weight=list(weights) if weights else [1.0] * n,
        pairs=[(i, j) for i in range(n) for j in range(i + 1, n)],
    )


def certification_suite():
    """Twelve symmetric instances spanning 1-4 links, gamma in {.25,.5,1}, w in {1,2}."""
    return [
        ("iso_g1", iso(1.0, 1.0)),
        ("iso_g025_w2", iso(0.25, 2.0)),
        ("pair_g1", pair()),
        ("pair_g05_w2", pair((0.5, 0.5), (2.0, 2.0))),
        ("pair_mixed", pair((1.0, 0.25), (1.0, 2.0))),
        ("pair_plus_iso", Network.from_pairs(
            gamma=[1.0, 0.5, 0.25], weight=[1.0, 1.0, 2.0], pairs=[(0, 1)])),
        ("path3", path_net((0.25, 0.5, 1.0), (1.0, 2.0, 1.0))),
        ("complete3_g1", complete_net((1.0, 1.0, 1.0))),
        ("complete3_mixed", complete_net((0.5, 1.0, 0.25), (2.0, 1.0, 1.0))),
        ("path4", path_net((1.0, 0.25, 0.5, 1.0), (1.0, 1.0, 2.0, 1.0))),
        ("complete4_g1", complete_net((1.0, 1.0, 1.0, 1.0))),
        ("complete4_mixed", complete_net((0.25, 0.5, 1.0, 0.5), (2.0, 1.0, 1.0, 2.0))),
    ]


@pytest.fixture
def two_link_symmetric():
    return pair()


@pytest.fixture(params=certification_suite(), ids=lambda case: case[0])
def suite_case(request):
    return request.param
