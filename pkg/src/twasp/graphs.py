"""Primal graph, positive dependency digraph and SCC parameters of a program."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .program import Program

__all__ = [
    "Graph",
    "DiGraph",
    "SccInfo",
    "primal_graph",
    "cnf_primal_graph",
    "dependency_digraph",
    "scc_info",
]


@dataclass
class Graph:
    """Undirected simple graph over ``range(n)``."""

    n: int
    adj: dict[int, set[int]]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj: dict[int, set[int]] = {v: set() for v in range(n)}
        for u, v in edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return cls(n, adj)

    def edges(self):
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield u, v

    def num_edges(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2


@dataclass
class DiGraph:
    """Directed graph; ``vertices`` are the atoms occurring in heads or positive bodies."""

    vertices: frozenset[int]
    succ: dict[int, set[int]]

    def edges(self):
        for u in sorted(self.succ):
            for v in sorted(self.succ[u]):
                yield u, v


@dataclass(frozen=True)
class SccInfo:
    scc_id: tuple[int, ...]
    scc_size: tuple[int, ...]
    ell_scc: tuple[int, ...]
    ell: int

    def component(self, a: int) -> frozenset[int]:
        c = self.scc_id[a]
        return frozenset(b for b, cb in enumerate(self.scc_id) if cb == c)


def primal_graph(p: Program) -> Graph:
    edges = set()
    for r in p.rules:
        edges.update(combinations(sorted(r.atoms), 2))
    return Graph.from_edges(p.num_atoms, edges)


def cnf_primal_graph(f) -> Graph:
    """Primal graph of a CNF over 0-based vertices (variable ``v`` is vertex ``v - 1``)."""
    edges = set()
    for c in f.clauses:
        edges.update(combinations(sorted({abs(x) - 1 for x in c}), 2))
    return Graph.from_edges(f.num_vars, edges)


def dependency_digraph(p: Program) -> DiGraph:
    vertices: set[int] = set()
    succ: dict[int, set[int]] = {}
    for r in p.rules:
        vertices |= r.head | r.pos
        for a in r.pos:
            succ.setdefault(a, set()).update(r.head)
    return DiGraph(frozenset(vertices), succ)


def scc_info(p: Program, d: DiGraph | None = None) -> SccInfo:
    if d is None:
        d = dependency_digraph(p)
    g = nx.DiGraph()
    g.add_nodes_from(range(p.num_atoms))
    g.add_edges_from(d.edges())
    scc_id = [0] * p.num_atoms
    sizes = []
    # order components by their smallest atom for reproducible ids
    comps = sorted((sorted(c) for c in nx.strongly_connected_components(g)), key=lambda c: c[0])
    for k, comp in enumerate(comps):
        sizes.append(len(comp))
        for a in comp:
            scc_id[a] = k
    ell_scc = tuple(sizes[scc_id[a]] if a in d.vertices else 1 for a in range(p.num_atoms))
    ell = max(ell_scc, default=1) + 1
    return SccInfo(tuple(scc_id), tuple(sizes), ell_scc, ell)
