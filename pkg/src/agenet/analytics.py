"""Closed-form analytics for attempt policies.

For a stationary policy, link e delivers in a slot with probability
gamma_e * f_e where f_e = p_e * prod_{e' in N_e}(1 - p_{e'}) is its
activation frequency, so its steady-state average and peak age both equal
1 / (gamma_e * f_e). These formulas drive the optimizers, certify simulation
output, and express the stationarity condition the optimal policy satisfies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agenet.network import Network
from agenet.sim import Policy

__all__ = [
    "ActivationProfile",
    "activation_frequency",
    "closed_form_age",
    "fixed_point_residual",
    "heuristic_sqrt_policy",
    "is_single_collision_domain",
]


def _as_policy(policy) -> Policy:
    return policy if isinstance(policy, Policy) else Policy.from_array(policy)


def activation_frequency(net: Network, policy: Policy) -> np.ndarray:
    """f_e = p_e * prod over interferers of (1 - p_{e'}), exactly."""
    policy = _as_policy(policy)
    p = policy.arr
    if len(policy) != net.num_links:
        raise ValueError(f"policy has {len(policy)} entries for {net.num_links} links")
    f = np.empty(net.num_links)
    for e in range(net.num_links):
        f[e] = p[e] * np.prod(1.0 - p[list(net.neighbors[e])])
    return f


@dataclass(frozen=True)
class ActivationProfile:
    """Activation frequencies and the ages they imply.

    link_age[e] = 1/(gamma_e f_e), +inf where gamma_e f_e = 0 (flagged in
    ``divergent``); network_age is the weight-sum of link ages.
    """

    f: np.ndarray
    link_age: np.ndarray
    network_age: float
    divergent: tuple[bool, ...]


def closed_form_age(net: Network, policy: Policy) -> ActivationProfile:
    """Steady-state average (= peak) ages for a policy."""
    f = activation_frequency(net, policy)
    rate = net.gamma_arr * f
    divergent = rate == 0.0
    link_age = np.full(net.num_links, np.inf)
    link_age[~divergent] = 1.0 / rate[~divergent]
    network_age = float(np.dot(net.weight_arr, link_age))
    return ActivationProfile(
        f=f,
        link_age=link_age,
        network_age=network_age,
        divergent=tuple(bool(d) for d in divergent),
    )


def is_single_collision_domain(net: Network) -> bool:
    """True when every link mutually interferes with every other link."""
    n = net.num_links
    full = tuple(range(n))
    return all(
        net.neighbors[e] == tuple(x for x in full if x != e) for e in range(n)
    )


def heuristic_sqrt_policy(net: Network, *, force: bool = False) -> Policy:
    """Attempt probabilities proportional to 1/sqrt(gamma_e).

    A proposed rule of thumb for networks where at most one link can deliver
    per slot; it ignores interference structure, so by default it refuses
    networks that are not a single collision domain.
    """
    if not is_single_collision_domain(net) and not force:
        raise ValueError(
            "sqrt-heuristic is intended for single-collision-domain networks; "
            "pass force=True to apply it anyway"
        )
    inv = 1.0 / np.sqrt(net.gamma_arr)
    return Policy.from_array(inv / inv.sum())


def fixed_point_residual(net: Network, policy: Policy) -> np.ndarray:
    """Distance of a policy from the optimality fixed point, per link.

    With A_e = 1/(gamma_e f_e) the weighted ages w_e A_e of an optimal
    policy satisfy p_e = w_e A_e / (w_e A_e + sum of w A over the links e
    interferes with); the residual is p_e minus that ratio, bounded in
    [-1, 1], and ~0 exactly at stationary policies. For a link that
    interferes with nobody the ratio is 1, so the residual is p_e - 1.
    """
    policy = _as_policy(policy)
    profile = closed_form_age(net, policy)
    if any(profile.divergent):
        bad = [net.ids[e] for e, d in enumerate(profile.divergent) if d]
        raise ValueError(f"age diverges for links {bad}; residual undefined")
    wa = net.weight_arr * profile.link_age
    r = np.empty(net.num_links)
    for e in range(net.num_links):
        denom = wa[e] + sum(wa[v] for v in net.victims[e])
        r[e] = policy.arr[e] - wa[e] / denom
    return r
