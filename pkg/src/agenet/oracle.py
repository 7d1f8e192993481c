"""Independent ground-truth solvers for small instances.

Exhaustive grid search over attempt probabilities plus cyclic coordinate
descent with golden-section line searches. Deliberately brute-force: these
certify the dual optimizer on desk-scale instances and share no code path
with it beyond the closed-form objective.

Links that interfere with nobody are pinned to p=1 (raising their attempt
probability is free); every other link's objective slice diverges at both
interval ends, so its optimum is interior and the grid excludes 0 and 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from agenet.network import Network, validate
from agenet.sim import Policy

__all__ = ["OracleResult", "grid_search", "refine"]

MAX_GRID_LINKS = 4
_INTERIOR = 1e-9  # line-search bounds: [eps, 1-eps]
_TIE_REL = 1e-9
_MAX_TIES = 16


@dataclass(frozen=True)
class OracleResult:
    """Best policy found, with the settings that certify it.

    tolerance is the final line-search bracket width (grid_search reports
    its resolution instead); ties lists further grid points whose objective
    matches the best within a 1e-9 relative band (capped, best-effort).
    """

    policy: Policy
    objective: float
    resolution: float | None
    refine_iterations: int
    tolerance: float
    ties: tuple[Policy, ...] = ()


def _check(net: Network):
    report = validate(net)
    if not report.ok:
        raise ValueError("invalid network:\n" + report.render())


def _free_links(net: Network) -> list[int]:
    return [e for e in range(net.num_links) if net.victims[e]]


def _objective_grid(net: Network, columns: dict[int, np.ndarray]):
    """Weighted age sum on broadcastable per-link probability arrays.

    Pinned links are absent from ``columns`` (their p is 1), but any link
    appearing in a neighbor list has a victim and is therefore free, so the
    q factors below always index into ``columns``.
    """
    total = 0.0
    for e in range(net.num_links):
        f = columns[e] if e in columns else 1.0
        for e2 in net.neighbors[e]:
            f = f * (1.0 - columns[e2])
        total = total + net.weight[e] / (net.gamma[e] * f)
    return total


def closed_form_objective(net: Network, p: np.ndarray) -> float:
    """Scalar weighted age sum at a concrete policy vector."""
    total = 0.0
    for e in range(net.num_links):
        f = p[e]
        for e2 in net.neighbors[e]:
            f *= 1.0 - p[e2]
        total += net.weight[e] / (net.gamma[e] * f)
    return total


def grid_search(net: Network, resolution: float = 0.01, *, force: bool = False) -> OracleResult:
    """Exhaustive search of the primal objective on a uniform grid.

    Free coordinates range over {resolution, 2*resolution, ...} < 1; links
    without victims are pinned to 1. Ties are broken toward the
    lexicographically smallest grid point. Cost grows as grid^|free links|,
    so instances beyond 4 links are refused unless force=True.
    """
    _check(net)
    if not 0.0 < resolution < 0.5:
        raise ValueError("resolution must lie in (0, 0.5)")
    n = net.num_links
    if n > MAX_GRID_LINKS and not force:
        raise ValueError(
            f"{n} links exceeds the grid oracle guard ({MAX_GRID_LINKS}); "
            "pass force=True to override"
        )
    free = _free_links(net)
    axis = np.arange(1, math.ceil(1.0 / resolution - 1e-12), dtype=np.float64) * resolution
    best_p = np.ones(n)
    if not free:
        obj = closed_form_objective(net, best_p)
        return OracleResult(
            policy=Policy.from_array(best_p),
            objective=obj,
            resolution=resolution,
            refine_iterations=0,
            tolerance=resolution,
        )

    best_obj = math.inf
    tie_values: list[np.ndarray] = []
    inner = free[1:]
    if inner:
        mesh = np.meshgrid(*[axis] * len(inner), indexing="ij")
    else:
        mesh = []
    for x0 in axis:
        columns: dict[int, np.ndarray] = {free[0]: np.asarray(x0)}
        for e, grid in zip(inner, mesh):
            columns[e] = grid
        obj = np.asarray(_objective_grid(net, columns))
        flat = obj.reshape(-1)
        k = int(np.argmin(flat))  # first minimum in C order = lexicographic
        val = float(flat[k])
        if val < best_obj:
            best_obj = val
            coords = np.unravel_index(k, obj.shape) if inner else ()
            best = np.ones(n)
            best[free[0]] = x0
            for e, c in zip(inner, coords):
                best[e] = axis[c]
            best_p = best
        # collect near-ties against the running best (superset of final ties)
        if len(tie_values) < _MAX_TIES:
            close = np.flatnonzero(np.abs(flat - best_obj) <= _TIE_REL * best_obj)
            for k2 in close[: _MAX_TIES - len(tie_values)]:
                coords = np.unravel_index(int(k2), obj.shape) if inner else ()
                cand = np.ones(n)
                cand[free[0]] = x0
                for e, c in zip(inner, coords):
                    cand[e] = axis[c]
                tie_values.append(cand)

    ties = tuple(
        Policy.from_array(c)
        for c in tie_values
        if abs(closed_form_objective(net, c) - best_obj) <= _TIE_REL * best_obj
        and not np.array_equal(c, best_p)
    )
    return OracleResult(
        policy=Policy.from_array(best_p),
        objective=best_obj,
        resolution=resolution,
        refine_iterations=0,
        tolerance=resolution,
        ties=ties,
    )


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def _golden_min(fn, lo: float, hi: float, xtol: float) -> tuple[float, float]:
    """Golden-section minimum of a unimodal fn on [lo, hi]."""
    a, b = lo, hi
    h = b - a
    c, d = a + _INVPHI2 * h, a + _INVPHI * h
    fc, fd = fn(c), fn(d)
    while h > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = fn(d)
    x = c if fc < fd else d
    return x, min(fc, fd)


def refine(net: Network, start: Policy, iters: int = 60, *, xtol: float = 1e-12) -> OracleResult:
    """Polish a policy by cyclic coordinate descent.

    Each free coordinate is minimized by golden-section on [eps, 1-eps]
    holding the others fixed (every slice is unimodal: a/x + b/(1-x) + c).
    The objective never increases; iteration stops early once a full cycle
    moves no coordinate by more than xtol.
    """
    _check(net)
    if iters < 1:
        raise ValueError("iters must be at least 1")
    p = np.asarray(start.arr, dtype=np.float64).copy()
    if p.shape != (net.num_links,):
        raise ValueError("policy length mismatch")
    free = _free_links(net)
    for e in range(net.num_links):
        if e not in free:
            p[e] = 1.0
        else:
            p[e] = min(max(p[e], _INTERIOR), 1.0 - _INTERIOR)

    best = closed_form_objective(net, p)
    used = 0
    for _ in range(iters):
        used += 1
        moved = 0.0
        for e in free:
            def slice_obj(x, e=e):
                old = p[e]
                p[e] = x
                val = closed_form_objective(net, p)
                p[e] = old
                return val

            x, val = _golden_min(slice_obj, _INTERIOR, 1.0 - _INTERIOR, xtol)
            if val < best:  # golden probe can only improve; guard roundoff
                moved = max(moved, abs(x - p[e]))
                p[e] = x
                best = val
        if moved <= xtol:
            break

    return OracleResult(
        policy=Policy.from_array(p),
        objective=best,
        resolution=None,
        refine_iterations=used,
        tolerance=xtol,
    )
