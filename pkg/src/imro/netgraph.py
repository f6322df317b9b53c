"""Undirected social graphs: edge-list ingestion and seeded G(n, p) generation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

import numpy as np


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class SocialGraph:
    """Immutable undirected simple graph over dense node ids ``0..node_count-1``."""

    node_count: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.node_count < 1:
            raise GraphError("node_count must be positive")
        adj = [set() for _ in range(self.node_count)]
        for edge in self.edges:
            i, j = edge
            if i == j:
                raise GraphError(f"self-loop ({i}, {j})")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise GraphError(f"edge ({i}, {j}) outside 0..{self.node_count - 1}")
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_pairs(cls, node_count: int, pairs: Iterable[tuple[int, int]]) -> "SocialGraph":
        edges = set()
        for i, j in pairs:
            if i == j:
                raise GraphError(f"self-loop ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in edges:
                raise GraphError(f"duplicate edge {key}")
            edges.add(key)
        return cls(node_count, frozenset(edges))

    def neighbors(self, i: int) -> tuple:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    @property
    def degrees(self) -> list:
        return [len(a) for a in self._adj]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def neighbor_masks(self) -> list:
        """Bitmask of each node's neighbors (bit j set when j is a friend)."""
        masks = []
        for nbrs in self._adj:
            m = 0
            for j in nbrs:
                m |= 1 << j
            masks.append(m)
        return masks


def load_edge_list(path) -> SocialGraph:
    """Read a whitespace-separated edge list; ``#`` lines and blank lines are skipped."""
    pairs = []
    seen = set()
    max_id = -1
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected two node ids, got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer node id in {line!r}") from None
            if i < 0 or j < 0:
                raise GraphError(f"line {lineno}: negative node id in {line!r}")
            if i == j:
                raise GraphError(f"self-loop at line {lineno}: ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge at line {lineno}: {key}")
            seen.add(key)
            pairs.append(key)
            max_id = max(max_id, i, j)
    if max_id < 0:
        raise GraphError(f"{path}: no edges")
    return SocialGraph(max_id + 1, frozenset(pairs))


def save_edge_list(graph: SocialGraph, path) -> None:
    with open(path, "w") as fh:
        for i, j in graph.sorted_edges():
            fh.write(f"{i} {j}\n")


def generate_random_graph(n: int, p: float, seed: int) -> SocialGraph:
    """Erdos-Renyi G(n, p) drawn with numpy's MT19937 ``RandomState``.

    Pairs are visited row by row (i < j); one uniform draw per pair.
    """
    if n < 1:
        raise GraphError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = np.random.RandomState(seed % (2**32))
    edges = []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random_sample(n - i - 1) < p)
        edges.extend((i, i + 1 + int(k)) for k in hits)
    return SocialGraph(n, frozenset(edges))


# Stand-ins for the unpublished synthetic networks. Mean degree ~4.
STANDINS = {
    "synth2": {"n": 2000, "p": 4.0 / 1999, "seed": 2000},
    "synth3": {"n": 4500, "p": 4.0 / 4499, "seed": 4500},
}


def fixture_path(name: str) -> str:
    return str(resources.files("imro") / "fixtures" / f"{name}.edges")


def load_graph(ref: str) -> SocialGraph:
    """Resolve ``synth1``/``synth2``/``synth3`` or a path to an edge list."""
    key = ref.lower()
    if key in STANDINS:
        return generate_random_graph(**STANDINS[key])
    if key == "synth1":
        return load_edge_list(fixture_path("synth1"))
    if not os.path.exists(ref):
        raise FileNotFoundError(f"graph file not found: {ref}")
    return load_edge_list(ref)
