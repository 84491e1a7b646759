"""Fully connected and uniform-degree random networks, plus their component structure."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

# Consecutive failed partner draws after which an agent abandons its remaining stubs.
DEFAULT_RETRIES = 12

_DRAW_BUFFER = 4096


@dataclass(frozen=True)
class DegreeSequence:
    assigned: np.ndarray
    k_max: int

    def __post_init__(self):
        a = self.assigned
        if a.ndim != 1 or len(a) < 2:
            raise ValueError("degree sequence needs at least two agents")
        if a.min() < 1 or a.max() > self.k_max:
            raise ValueError(f"degrees must lie in [1, {self.k_max}]")

    @property
    def n(self) -> int:
        return len(self.assigned)


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph.

    In fully connected mode no adjacency is stored; every agent neighbours
    the other ``n - 1``. In explicit mode the adjacency is kept in CSR form:
    the neighbours of ``i`` are ``indices[indptr[i]:indptr[i+1]]``, sorted.
    """

    n: int
    fully_connected: bool
    indptr: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def mode(self) -> str:
        return "fully-connected" if self.fully_connected else "explicit"

    def neighbors(self, i: int) -> np.ndarray:
        if self.fully_connected:
            return np.concatenate([np.arange(i), np.arange(i + 1, self.n)])
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        if self.fully_connected:
            return np.full(self.n, self.n - 1, dtype=np.int64)
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        if self.fully_connected:
            return self.n * (self.n - 1) // 2
        return len(self.indices) // 2

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.n_edges / self.n

    def edge_list(self) -> list[tuple[int, int]]:
        """Edges as sorted ``(i, j)`` pairs with ``i < j``."""
        if self.fully_connected:
            return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)]
        out = []
        for i in range(self.n):
            for j in self.neighbors(i):
                if i < j:
                    out.append((i, int(j)))
        return out

    def write_edge_list(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            for i, j in self.edge_list():
                fh.write(f"{i} {j}\n")

    @classmethod
    def from_neighbor_sets(cls, sets: list[set[int]]) -> "Topology":
        n = len(sets)
        indptr = np.zeros(n + 1, dtype=np.int64)
        for i, s in enumerate(sets):
            indptr[i + 1] = indptr[i] + len(s)
        indices = np.empty(indptr[-1], dtype=np.int64)
        for i, s in enumerate(sets):
            indices[indptr[i]:indptr[i + 1]] = sorted(s)
        return cls(n=n, fully_connected=False, indptr=indptr, indices=indices)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Topology":
        sets: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                raise ValueError("self-loop")
            sets[i].add(j)
            sets[j].add(i)
        return cls.from_neighbor_sets(sets)

    @classmethod
    def read_edge_list(cls, path, n: int) -> "Topology":
        edges = []
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    a, b = line.split()
                    edges.append((int(a), int(b)))
        return cls.from_edges(n, edges)


@dataclass(frozen=True)
class ComponentStats:
    sizes: list[int]

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def largest(self) -> int:
        return max(self.sizes)

    def size_counts(self) -> Counter:
        return Counter(self.sizes)

    @property
    def chi_emp(self) -> dict[int, float]:
        """Fraction of components (size >= 2) having each size."""
        return chi_from_counts(self.size_counts())


def chi_from_counts(counts: Counter) -> dict[int, float]:
    total = sum(v for s, v in counts.items() if s >= 2)
    if total == 0:
        return {}
    return {s: v / total for s, v in sorted(counts.items()) if s >= 2}


def sample_degree_sequence(n: int, k_max: int, rng: np.random.Generator) -> DegreeSequence:
    if n < 2:
        raise ValueError("need n >= 2")
    if k_max < 1:
        raise ValueError("need k_max >= 1")
    if k_max >= n:
        raise ValueError(f"k_max={k_max} cannot be wired without duplicates on {n} agents")
    return DegreeSequence(rng.integers(1, k_max + 1, size=n), k_max)


def wire_network(seq: DegreeSequence, rng: np.random.Generator,
                 retries: int = DEFAULT_RETRIES) -> Topology:
    """Link agents in index order until each meets its quota or gives up.

    Agent ``i`` draws partners uniformly; a draw is accepted when the partner
    is another agent, not yet linked to ``i``, with quota left. After
    ``retries`` consecutive rejected draws, ``i`` abandons its remaining
    stubs. Realized degrees therefore never exceed the assigned ones.
    """
    if retries < 1:
        raise ValueError("retries must be positive")
    n = seq.n
    quota = [int(k) for k in seq.assigned]
    nbrs: list[set[int]] = [set() for _ in range(n)]
    buf = rng.integers(0, n, size=_DRAW_BUFFER)
    pos = 0
    for i in range(n):
        mine = nbrs[i]
        failures = 0
        while len(mine) < quota[i] and failures < retries:
            if pos == _DRAW_BUFFER:
                buf = rng.integers(0, n, size=_DRAW_BUFFER)
                pos = 0
            j = int(buf[pos])
            pos += 1
            if j != i and j not in mine and len(nbrs[j]) < quota[j]:
                mine.add(j)
                nbrs[j].add(i)
                failures = 0
            else:
                failures += 1
    return Topology.from_neighbor_sets(nbrs)


def random_network(n: int, k_max: int, rng: np.random.Generator,
                   retries: int = DEFAULT_RETRIES) -> Topology:
    return wire_network(sample_degree_sequence(n, k_max, rng), rng, retries)


def fully_connected(n: int) -> Topology:
    if n < 2:
        raise ValueError("need n >= 2")
    return Topology(n=n, fully_connected=True)


def components(t: Topology) -> ComponentStats:
    if t.fully_connected:
        return ComponentStats([t.n])
    adj = csr_matrix((np.ones(len(t.indices), dtype=np.int8), t.indices, t.indptr),
                     shape=(t.n, t.n))
    _, labels = connected_components(adj, directed=False)
    return ComponentStats(sorted(np.bincount(labels).tolist(), reverse=True))
