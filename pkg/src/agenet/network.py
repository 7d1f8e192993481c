"""Conflict-graph network instances: construction, parsing, validation.

A network is a set of directed communication links. Link ``e`` delivers an
update in a slot only if it attempts, its own channel is ON, and none of the
links in its interferer set ``N_e`` attempt in the same slot. Interference
may be asymmetric: ``neighbors[e]`` lists the links that can kill ``e``'s
transmission, while ``victims[e]`` lists the links ``e`` can kill.

Config files are JSON with the following schema::

    {
      "links": [{"id": 1, "gamma": 1.0, "weight": 1.0},
                {"id": 2, "gamma": 0.25}],
      "pairs": [[1, 2]],
      "neighbors": {"1": [2]}
    }

``links`` is required; ``gamma`` is the per-link channel success probability
and ``weight`` defaults to 1.0. Interference can be given as undirected
``pairs`` (each endpoint is added to the other's interferer set), as a
directed ``neighbors`` map (JSON object keys are link ids as strings), or
both; the union is materialized. Link ids are arbitrary integers; internally
links are indexed densely 0..n-1 in declaration order and every vector-valued
quantity across the package uses that order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ConfigError",
    "Issue",
    "Network",
    "ValidationReport",
    "parse_network",
    "serialize_network",
    "validate",
]


class ConfigError(ValueError):
    """A network config cannot be parsed into a Network."""


@dataclass(frozen=True)
class Network:
    """Immutable network instance.

    ``ids`` keeps the user-visible link identifiers in declaration order;
    ``gamma``/``weight`` are the per-link channel success probabilities and
    age weights; ``neighbors[e]`` is the sorted tuple of dense link indices
    whose simultaneous attempt destroys link ``e``'s transmission.

    Construction normalizes field types and checks structural coherence
    (sizes, index ranges, unique ids). Semantic checks such as parameter
    ranges and interference symmetry live in :func:`validate` so that
    out-of-range instances remain representable and reportable.
    """

    ids: tuple[int, ...]
    gamma: tuple[float, ...]
    weight: tuple[float, ...]
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ids = tuple(int(i) for i in self.ids)
        gamma = tuple(float(g) for g in self.gamma)
        weight = tuple(float(w) for w in self.weight)
        n = len(ids)
        if not (len(gamma) == len(weight) == len(self.neighbors) == n):
            raise ValueError("ids, gamma, weight and neighbors must have equal length")
        if len(set(ids)) != n:
            raise ConfigError("duplicate link id")
        nbrs = []
        for row in self.neighbors:
            row = tuple(sorted({int(e) for e in row}))
            if row and not (0 <= row[0] and row[-1] < n):
                raise ValueError("neighbor index out of range")
            nbrs.append(row)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "neighbors", tuple(nbrs))

    @classmethod
    def from_pairs(
        cls,
        gamma: Sequence[float],
        weight: Sequence[float] | None = None,
        pairs: Iterable[tuple[int, int]] = (),
        neighbors: Mapping[int, Iterable[int]] | None = None,
        ids: Sequence[int] | None = None,
    ) -> "Network":
        """Build a network from per-link parameters and interference lists.

        ``pairs`` and ``neighbors`` use dense indices 0..n-1 (or ``ids`` if
        given); pairs are undirected, the neighbors map is directed.
        """
        n = len(gamma)
        if ids is None:
            ids = range(n)
        ids = [int(i) for i in ids]
        if weight is None:
            weight = [1.0] * n
        index = {i: k for k, i in enumerate(ids)}
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for a, b in pairs:
            nbrs[index[a]].add(index[b])
            nbrs[index[b]].add(index[a])
        for a, row in (neighbors or {}).items():
            nbrs[index[a]].update(index[b] for b in row)
        return cls(tuple(ids), tuple(gamma), tuple(weight), tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def num_links(self) -> int:
        return len(self.ids)

    @cached_property
    def gamma_arr(self) -> np.ndarray:
        a = np.asarray(self.gamma, dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def weight_arr(self) -> np.ndarray:
        a = np.asarray(self.weight, dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def victims(self) -> tuple[tuple[int, ...], ...]:
        """For each link, the sorted links it interferes with (reverse of neighbors)."""
        out: list[list[int]] = [[] for _ in range(self.num_links)]
        for e, row in enumerate(self.neighbors):
            for e2 in row:
                out[e2].append(e)
        return tuple(tuple(sorted(v)) for v in out)

    @cached_property
    def is_symmetric(self) -> bool:
        """True when interference is mutual: e' kills e iff e kills e'."""
        return all(self.neighbors[e] == self.victims[e] for e in range(self.num_links))

    @cached_property
    def neighbor_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Interferer sets in CSR form (indptr, indices), both int64 and read-only."""
        indptr = np.zeros(self.num_links + 1, dtype=np.int64)
        for e, row in enumerate(self.neighbors):
            indptr[e + 1] = indptr[e] + len(row)
        indices = np.fromiter(
            (e2 for row in self.neighbors for e2 in row), dtype=np.int64, count=int(indptr[-1])
        )
        indptr.flags.writeable = False
        indices.flags.writeable = False
        return indptr, indices

    @cached_property
    def _index(self) -> dict[int, int]:
        return {i: k for k, i in enumerate(self.ids)}

    def index_of(self, link_id: int) -> int:
        """Dense index of a user-visible link id."""
        try:
            return self._index[int(link_id)]
        except KeyError:
            raise KeyError(f"unknown link id {link_id}") from None

    def degree(self, e: int) -> int:
        return len(self.neighbors[e])


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    links: tuple[int, ...]  # user-visible ids
    message: str

    def render(self) -> str:
        who = ",".join(str(i) for i in self.links)
        return f"{self.severity.upper()} link {who}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]

    @property
    def ok(self) -> bool:
        return all(i.severity != "error" for i in self.issues)

    @property
    def errors(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity == "error")

    @property
    def warnings(self) -> tuple[Issue, ...]:
        return tuple(i for i in self.issues if i.severity == "warning")

    def render(self) -> str:
        if not self.issues:
            return "ok"
        return "\n".join(i.render() for i in self.issues)


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_network(config_text: str) -> Network:
    """Parse a JSON config (see module docstring for the schema).

    Raises ConfigError on malformed text, unknown or duplicate link ids,
    or references to undeclared links in pairs/neighbors.
    """
    try:
        doc = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    _require(isinstance(doc, dict), "config root must be an object")
    unknown = set(doc) - {"links", "pairs", "neighbors"}
    _require(not unknown, f"unknown top-level keys: {sorted(unknown)}")
    _require("links" in doc, "config must declare 'links'")
    _require(isinstance(doc["links"], list) and doc["links"], "'links' must be a non-empty list")

    ids: list[int] = []
    gamma: list[float] = []
    weight: list[float] = []
    for rec in doc["links"]:
        _require(isinstance(rec, dict), "each link must be an object")
        extra = set(rec) - {"id", "gamma", "weight"}
        _require(not extra, f"unknown link keys: {sorted(extra)}")
        _require("id" in rec and _is_int(rec["id"]), "link 'id' must be an integer")
        _require("gamma" in rec and _is_num(rec["gamma"]), "link 'gamma' must be a number")
        w = rec.get("weight", 1.0)
        _require(_is_num(w), "link 'weight' must be a number")
        _require(rec["id"] not in ids, f"duplicate link id {rec['id']}")
        ids.append(rec["id"])
        gamma.append(float(rec["gamma"]))
        weight.append(float(w))

    index = {i: k for k, i in enumerate(ids)}

    def dense(link_id, where: str) -> int:
        _require(_is_int(link_id), f"{where}: link id must be an integer")
        _require(link_id in index, f"{where}: unknown link {link_id}")
        return index[link_id]

    nbrs: list[set[int]] = [set() for _ in ids]
    for pair in doc.get("pairs", []):
        _require(isinstance(pair, list) and len(pair) == 2, "each pair must be [id, id]")
        a, b = dense(pair[0], "pairs"), dense(pair[1], "pairs")
        nbrs[a].add(b)
        nbrs[b].add(a)
    neighbors_doc = doc.get("neighbors", {})
    _require(isinstance(neighbors_doc, dict), "'neighbors' must be an object")
    for key, row in neighbors_doc.items():
        try:
            key_id = int(key)
        except (TypeError, ValueError):
            raise ConfigError(f"neighbors: bad link id {key!r}") from None
        e = dense(key_id, "neighbors")
        _require(isinstance(row, list), "neighbor lists must be arrays")
        for other in row:
            nbrs[e].add(dense(other, "neighbors"))

    return Network(tuple(ids), tuple(gamma), tuple(weight), tuple(tuple(sorted(s)) for s in nbrs))


def serialize_network(net: Network) -> str:
    """Canonical JSON for a Network; parse_network(serialize_network(n)) == n."""
    doc = {
        "links": [
            {"id": net.ids[e], "gamma": net.gamma[e], "weight": net.weight[e]}
            for e in range(net.num_links)
        ],
        "neighbors": {
            str(net.ids[e]): [net.ids[e2] for e2 in net.neighbors[e]]
            for e in range(net.num_links)
            if net.neighbors[e]
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def validate(net: Network, *, for_distributed: bool = False) -> ValidationReport:
    """Check semantic invariants and report findings without raising.

    ``for_distributed=True`` marks asymmetric interference as an error (the
    frame-synchronous optimizer requires mutual interference); otherwise it
    is a warning, since centralized paths handle asymmetric instances.
    """
    issues: list[Issue] = []
    for e in range(net.num_links):
        ident = (net.ids[e],)
        g, w = net.gamma[e], net.weight[e]
        if not np.isfinite(g) or g <= 0.0:
            issues.append(Issue("error", ident, "channel probability must be positive"))
        elif g > 1.0:
            issues.append(Issue("error", ident, "channel probability must be at most 1"))
        if not np.isfinite(w) or w <= 0.0:
            issues.append(Issue("error", ident, "weight must be positive"))
        if e in net.neighbors[e]:
            issues.append(Issue("error", ident, "link interferes with itself"))
    seen: set[tuple[int, int]] = set()
    for e in range(net.num_links):
        for e2 in net.neighbors[e]:
            if e2 == e:
                continue
            key = (min(e, e2), max(e, e2))
            if key in seen:
                continue
            if e not in net.neighbors[e2]:
                seen.add(key)
                severity = "error" if for_distributed else "warning"
                issues.append(
                    Issue(
                        severity,
                        (net.ids[e2], net.ids[e]),
                        f"asymmetric interference: {net.ids[e2]} kills {net.ids[e]} "
                        f"but not vice versa",
                    )
                )
    return ValidationReport(tuple(issues))
