"""Slot-level Monte Carlo simulation of update ages under attempt policies.

Every link holds an age counter: the number of slots since its last
successful delivery. A slot delivers for link e iff e attempts, its channel
is ON, and no interferer attempts; delivery resets the age to 1, otherwise
it grows by one. The simulator accumulates, per link, the time-average age,
the average of the age values at delivery instants (the "peak" age, equal to
the average inter-delivery gap), and the gap second moment.

Randomness
----------
Attempts and channel states are Bernoulli draws from Philox counter-based
streams. Each (seed, link id, purpose) triple gets its own substream whose
128-bit key is derived with splitmix64 from the triple, so adding links to a
network never perturbs the draws of existing links, and the draw sequence is
independent of internal block sizes. purpose 0 = attempts, purpose 1 =
channel; a draw u < p yields an attempt, u < gamma an ON channel.

All statistics accumulate in int64, so a simulation is bit-reproducible from
(network, policy, horizon, seed) regardless of the kernel backend.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Sequence

import numpy as np

from agenet import _backend
from agenet.network import Network, validate

__all__ = [
    "DivergenceWarning",
    "Policy",
    "SimState",
    "TraceStats",
    "bernoulli_draws",
    "simulate",
    "step",
    "transmission_success",
]

PURPOSE_ATTEMPT = 0
PURPOSE_CHANNEL = 1

TRACE_COLUMNS = ("t", "link", "age", "attempted", "channel", "success")

_BLOCK_SLOTS = 1 << 16
_MASK64 = (1 << 64) - 1


class DivergenceWarning(UserWarning):
    """Some link can never deliver (p=0 or a certainly-colliding policy)."""


@dataclass(frozen=True)
class Policy:
    """Per-link attempt probabilities, in dense link order."""

    p: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        for x in p:
            if not (0.0 <= x <= 1.0):
                raise ValueError(f"attempt probability {x} outside [0, 1]")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_array(cls, arr) -> "Policy":
        return cls(tuple(np.asarray(arr, dtype=np.float64).tolist()))

    @classmethod
    def uniform(cls, n: int, value: float) -> "Policy":
        return cls((float(value),) * n)

    @cached_property
    def arr(self) -> np.ndarray:
        a = np.asarray(self.p, dtype=np.float64)
        a.flags.writeable = False
        return a

    @property
    def zero_links(self) -> tuple[int, ...]:
        """Indices with p=0; their age grows without bound."""
        return tuple(e for e, x in enumerate(self.p) if x == 0.0)

    def __len__(self) -> int:
        return len(self.p)


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _substream(seed: int, link_id: int, purpose: int) -> np.random.Generator:
    """Philox generator keyed by (seed, link id, purpose)."""
    a = _splitmix64(int(seed) & _MASK64)
    b = _splitmix64(a ^ _splitmix64(((int(link_id) & _MASK64) << 1 | purpose) & _MASK64))
    key = np.array([a, b], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def bernoulli_draws(net: Network, policy: Policy, horizon: int, seed: int):
    """Full (horizon, n) uint8 attempt and channel arrays.

    Materializes exactly the draws simulate() consumes; intended for tests
    and diagnostics at small horizons (memory is O(horizon * n)).
    """
    n = net.num_links
    u = np.empty((horizon, n), dtype=np.uint8)
    s = np.empty((horizon, n), dtype=np.uint8)
    p = policy.arr
    g = net.gamma_arr
    for e in range(n):
        u[:, e] = _substream(seed, net.ids[e], PURPOSE_ATTEMPT).random(horizon) < p[e]
        s[:, e] = _substream(seed, net.ids[e], PURPOSE_CHANNEL).random(horizon) < g[e]
    return u, s


def transmission_success(attempt, channel, net: Network) -> np.ndarray:
    """Per-link delivery indicators for one slot.

    attempt/channel are 0/1 vectors of length n; link e delivers iff it
    attempts on an ON channel while all its interferers stay silent.
    """
    u = np.asarray(attempt, dtype=np.uint8)
    s = np.asarray(channel, dtype=np.uint8)
    n = net.num_links
    if u.shape != (n,) or s.shape != (n,):
        raise ValueError(f"attempt/channel must have shape ({n},)")
    out = (u & s).astype(bool)
    for e in range(n):
        if out[e] and any(u[e2] for e2 in net.neighbors[e]):
            out[e] = False
    return out.astype(np.uint8)


@dataclass
class SimState:
    """Mutable per-run counters; ages are pre-step (age during slot t)."""

    t: int
    age: np.ndarray
    success_count: np.ndarray
    peak_sum: np.ndarray
    gap_sq_sum: np.ndarray
    age_sum: np.ndarray

    @classmethod
    def initial(cls, n: int) -> "SimState":
        return cls(
            t=1,
            age=np.ones(n, dtype=np.int64),
            success_count=np.zeros(n, dtype=np.int64),
            peak_sum=np.zeros(n, dtype=np.int64),
            gap_sq_sum=np.zeros(n, dtype=np.int64),
            age_sum=np.zeros(n, dtype=np.int64),
        )


def step(state: SimState, attempt, channel, net: Network) -> SimState:
    """One slot of the age recursion; reference implementation for the kernels.

    On delivery the pre-reset age is the recorded peak and the age returns
    to 1; otherwise the age grows by one. age_sum accumulates the
    post-transition age, so after T steps it holds the ages of slots 2..T+1.
    """
    succ = transmission_success(attempt, channel, net).astype(bool)
    age = state.age
    new_age = np.where(succ, np.int64(1), age + 1)
    return SimState(
        t=state.t + 1,
        age=new_age,
        success_count=state.success_count + succ,
        peak_sum=state.peak_sum + np.where(succ, age, np.int64(0)),
        gap_sq_sum=state.gap_sq_sum + np.where(succ, age * age, np.int64(0)),
        age_sum=state.age_sum + new_age,
    )


@dataclass(frozen=True)
class TraceStats:
    """Empirical age statistics for one simulation run.

    Peak ages (and gap moments) are NaN for links that never delivered.
    Second-half fields restrict the accumulation to slots horizon//2+1..T,
    which discards the initial transient. network_* are weight-sums of the
    per-link values; the network peak is NaN if any link's peak is undefined.
    """

    horizon: int
    seed: int
    avg_age: np.ndarray
    peak_age: np.ndarray
    gap_second_moment: np.ndarray
    success_count: np.ndarray
    avg_age_2nd: np.ndarray
    peak_age_2nd: np.ndarray
    success_count_2nd: np.ndarray
    network_avg_age: float
    network_peak_age: float
    divergent: tuple[bool, ...]

    @property
    def gap_mean(self) -> np.ndarray:
        """Mean inter-delivery gap; identical to peak_age by construction."""
        return self.peak_age

    @property
    def success_frequency(self) -> np.ndarray:
        return self.success_count / self.horizon


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.full(num.shape, np.nan)
    mask = den > 0
    out[mask] = num[mask] / den[mask]
    return out


def simulate(
    net: Network,
    policy: Policy | Sequence[float],
    horizon: int,
    seed: int,
    *,
    backend: str | None = None,
    trace_out: str | IO[str] | None = None,
) -> TraceStats:
    """Simulate `horizon` slots and return empirical age statistics.

    Attempts and channel states are drawn independently across links and
    slots from the per-(seed, link, purpose) substreams, so results are
    reproducible bit-for-bit. ``trace_out`` (path or text file) streams a
    per-slot CSV with columns t,link,age,attempted,channel,success, where
    age is the pre-step age A(t); expect large files for long horizons.
    """
    if not isinstance(policy, Policy):
        policy = Policy.from_array(policy)
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    n = net.num_links
    if len(policy) != n:
        raise ValueError(f"policy has {len(policy)} entries for {n} links")
    report = validate(net)
    if not report.ok:
        raise ValueError("invalid network:\n" + report.render())

    kern = _backend.get_backend(backend)
    indptr, indices = net.neighbor_csr
    p = policy.arr
    g = net.gamma_arr

    # f_e = p_e * prod(1-p_interferer); zero means the age diverges.
    f = np.array([p[e] * np.prod(1.0 - p[list(net.neighbors[e])]) for e in range(n)])
    divergent = tuple(bool(x) for x in (g * f == 0.0))
    if any(divergent):
        bad = [net.ids[e] for e, d in enumerate(divergent) if d]
        warnings.warn(
            f"links {bad} can never deliver; their age grows without bound",
            DivergenceWarning,
            stacklevel=2,
        )

    gen_u = [_substream(seed, net.ids[e], PURPOSE_ATTEMPT) for e in range(n)]
    gen_s = [_substream(seed, net.ids[e], PURPOSE_CHANNEL) for e in range(n)]

    age = np.ones(n, dtype=np.int64)
    acc = {
        phase: {
            name: np.zeros(n, dtype=np.int64)
            for name in ("success_count", "peak_sum", "gap_sq_sum", "age_sum")
        }
        for phase in ("first", "second")
    }
    half = horizon // 2

    close_trace = False
    writer = None
    if trace_out is not None:
        if isinstance(trace_out, (str, bytes)) or hasattr(trace_out, "__fspath__"):
            trace_file = open(trace_out, "w", newline="")
            close_trace = True
        else:
            trace_file = trace_out
        writer = csv.writer(trace_file, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)

    try:
        done = 0
        while done < horizon:
            limit = half if done < half else horizon
            length = min(_BLOCK_SLOTS, limit - done)
            u = np.empty((length, n), dtype=np.uint8)
            s = np.empty((length, n), dtype=np.uint8)
            for e in range(n):
                u[:, e] = gen_u[e].random(length) < p[e]
                s[:, e] = gen_s[e].random(length) < g[e]
            phase = acc["first"] if done < half else acc["second"]
            if writer is None:
                trace_age = trace_success = None
            else:
                trace_age = np.empty((length, n), dtype=np.int64)
                trace_success = np.empty((length, n), dtype=np.uint8)
            kern.sim_block(
                u, s, indptr, indices, age,
                phase["success_count"], phase["peak_sum"], phase["gap_sq_sum"],
                phase["age_sum"], trace_age, trace_success,
            )
            if writer is not None:
                ids = net.ids
                for j in range(length):
                    t = done + 1 + j
                    for e in range(n):
                        writer.writerow(
                            (t, ids[e], int(trace_age[j, e]), int(u[j, e]),
                             int(s[j, e]), int(trace_success[j, e]))
                        )
            done += length
    finally:
        if close_trace:
            trace_file.close()

    first, second = acc["first"], acc["second"]
    total = {k: first[k] + second[k] for k in first}
    w = net.weight_arr
    avg_age = total["age_sum"] / horizon
    peak_age = _ratio(total["peak_sum"], total["success_count"])
    gap_m2 = _ratio(total["gap_sq_sum"], total["success_count"])
    second_slots = horizon - half
    network_peak = float(np.dot(w, peak_age))  # NaN if any link never delivered
    return TraceStats(
        horizon=horizon,
        seed=seed,
        avg_age=avg_age,
        peak_age=peak_age,
        gap_second_moment=gap_m2,
        success_count=total["success_count"],
        avg_age_2nd=second["age_sum"] / second_slots,
        peak_age_2nd=_ratio(second["peak_sum"], second["success_count"]),
        success_count_2nd=second["success_count"],
        network_avg_age=float(np.dot(w, avg_age)),
        network_peak_age=network_peak,
        divergent=divergent,
    )
