"""Tree decompositions: heuristic construction, validation, nice form, PACE I/O."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .graphs import Graph
from .program import Program, Rule

__all__ = [
    "TreeDecomposition",
    "NiceTD",
    "Violation",
    "TDFormatError",
    "decompose",
    "validate_td",
    "make_nice",
    "bag_program",
    "bag_rule_indices",
    "check_nice",
    "read_td",
    "write_td",
    "LEAF",
    "INTRODUCE",
    "FORGET",
    "JOIN",
]

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "int", "forget", "join"


class TDFormatError(ValueError):
    pass


@dataclass
class TreeDecomposition:
    bags: list[frozenset[int]]
    parent: list[int | None]
    root: int
    children: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.children = [[] for _ in self.bags]
        for t, pa in enumerate(self.parent):
            if pa is not None:
                self.children[pa].append(t)

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def postorder(self) -> list[int]:
        order, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                order.append(t)
            else:
                stack.append((t, True))
                stack.extend((c, False) for c in reversed(self.children[t]))
        return order

    def vertices(self) -> frozenset[int]:
        return frozenset().union(*self.bags) if self.bags else frozenset()


@dataclass
class NiceTD(TreeDecomposition):
    kind: list[str] = field(default_factory=list)
    # introduced or forgotten atom, None for leaf/join nodes
    special: list[int | None] = field(default_factory=list)


@dataclass(frozen=True)
class Violation:
    condition: str  # "structure", "i", "ii" or "iii"
    witness: tuple
    message: str

    def __str__(self):
        return f"violation ({self.condition}): {self.message}"


def _elimination_order(g: Graph, heuristic: str, seed: int) -> list[int]:
    if heuristic not in ("min-fill", "min-degree"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    adj = {v: set(ns) for v, ns in g.adj.items()}
    rank = list(range(g.n))
    if seed:
        random.Random(seed).shuffle(rank)

    def fill(v):
        ns = list(adj[v])
        return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in adj[a])

    def score(v):
        if heuristic == "min-fill":
            return (fill(v), len(adj[v]), rank[v], v)
        return (len(adj[v]), rank[v], v)

    order = []
    while adj:
        v = min(adj, key=score)
        ns = adj.pop(v)
        for a in ns:
            adj[a].discard(v)
            adj[a] |= ns - {a}
        order.append(v)
    return order


def decompose(g: Graph, heuristic: str = "min-fill", seed: int = 0) -> TreeDecomposition:
    """TD from a greedy elimination ordering; one bag per vertex.

    Ties are broken by smallest vertex id, or by a seeded random priority
    when ``seed`` is non-zero.
    """
    if g.n == 0:
        return TreeDecomposition([frozenset()], [None], 0)
    order = _elimination_order(g, heuristic, seed)
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(ns) for v, ns in g.adj.items()}
    bags: list[frozenset[int]] = []
    for v in order:
        ns = adj[v]
        bags.append(frozenset(ns | {v}))
        for a in ns:
            adj[a].discard(v)
            adj[a] |= ns - {a}
        adj[v] = set()
    # recompute neighbourhoods at elimination time for parent links
    parent: list[int | None] = []
    for i, v in enumerate(order):
        later = [pos[u] for u in bags[i] if u != v]
        parent.append(min(later) if later else None)
    roots = [i for i, pa in enumerate(parent) if pa is None]
    # chain disconnected components together
    for a, b in zip(roots, roots[1:]):
        parent[a] = b
    return TreeDecomposition(bags, parent, roots[-1])


def _check_tree(td: TreeDecomposition) -> Violation | None:
    n = td.num_nodes
    if n == 0:
        return Violation("structure", (), "decomposition has no nodes")
    if not 0 <= td.root < n or td.parent[td.root] is not None:
        return Violation("structure", (td.root,), "root must exist and have no parent")
    seen = set(td.postorder())
    if len(seen) != n:
        missing = min(set(range(n)) - seen)
        return Violation("structure", (missing,), f"node {missing} unreachable from the root")
    return None


def validate_td(g: Graph, td: TreeDecomposition) -> Violation | None:
    """None when ``td`` is a tree decomposition of ``g``; else the first violation."""
    bad = _check_tree(td)
    if bad:
        return bad
    covered = td.vertices()
    for v in range(g.n):
        if v not in covered:
            return Violation("i", (v,), f"vertex {v} is in no bag")
    for u, v in g.edges():
        if not any(u in b and v in b for b in td.bags):
            return Violation("ii", (u, v), f"edge {{{u},{v}}} is in no bag")
    # connectedness: in each vertex's node set exactly one node has its parent outside
    tops: dict[int, list[int]] = {}
    for t, bag in enumerate(td.bags):
        pa = td.parent[t]
        for v in bag:
            if pa is None or v not in td.bags[pa]:
                tops.setdefault(v, []).append(t)
    for v in sorted(tops):
        if len(tops[v]) > 1:
            t1, t2 = tops[v][:2]
            gap = _gap_on_path(td, t1, t2, v)
            return Violation(
                "iii", (v, t1, t2, gap),
                f"vertex {v} occurs in nodes {t1} and {t2} but not in node {gap} between them",
            )
    return None


def _gap_on_path(td: TreeDecomposition, t1: int, t2: int, v: int) -> int:
    def ancestors(t):
        out = []
        while t is not None:
            out.append(t)
            t = td.parent[t]
        return out

    a1, a2 = ancestors(t1), ancestors(t2)
    s2 = set(a2)
    lca = next(t for t in a1 if t in s2)
    path = a1[: a1.index(lca) + 1] + a2[: a2.index(lca)][::-1]
    return next(t for t in path if v not in td.bags[t])


def make_nice(td: TreeDecomposition) -> NiceTD:
    """Nice TD with empty leaf and root bags and binary joins, same width."""
    bags: list[frozenset[int]] = []
    parent: list[int | None] = []
    kind: list[str] = []
    special: list[int | None] = []

    def new(bag, k, sp, kids):
        t = len(bags)
        bags.append(frozenset(bag))
        parent.append(None)
        kind.append(k)
        special.append(sp)
        for c in kids:
            parent[c] = t
        return t

    def morph(top: int, target: frozenset[int]) -> int:
        cur = set(bags[top])
        for a in sorted(cur - target):
            cur.discard(a)
            top = new(cur, FORGET, a, [top])
        for a in sorted(target - cur):
            cur.add(a)
            top = new(cur, INTRODUCE, a, [top])
        return top

    top_of: dict[int, int] = {}
    for t in td.postorder():
        bag = td.bags[t]
        kids = [morph(top_of.pop(c), bag) for c in td.children[t]]
        if not kids:
            kids = [morph(new((), LEAF, None, []), bag)]
        while len(kids) > 1:
            merged = []
            for i in range(0, len(kids) - 1, 2):
                merged.append(new(bag, JOIN, None, [kids[i], kids[i + 1]]))
            if len(kids) % 2:
                merged.append(kids[-1])
            kids = merged
        top_of[t] = kids[0]
    root = morph(top_of[td.root], frozenset())
    return NiceTD(bags, parent, root, kind, special)


def check_nice(ntd: NiceTD) -> str | None:
    """Description of the first violated nice-TD condition, or None."""
    if ntd.bags[ntd.root]:
        return "root bag is not empty"
    for t in range(ntd.num_nodes):
        kids = ntd.children[t]
        k, a, bag = ntd.kind[t], ntd.special[t], ntd.bags[t]
        if k == LEAF:
            ok = not kids and not bag
        elif k == INTRODUCE:
            ok = len(kids) == 1 and a in bag and ntd.bags[kids[0]] == bag - {a}
        elif k == FORGET:
            ok = len(kids) == 1 and a not in bag and ntd.bags[kids[0]] == bag | {a}
        elif k == JOIN:
            ok = len(kids) == 2 and all(ntd.bags[c] == bag for c in kids)
        else:
            ok = False
        if not ok:
            return f"node {t} is not a well-formed {k} node"
    return None


def bag_program(p: Program, bag: Iterable[int]) -> list[Rule]:
    bag = frozenset(bag)
    return [r for r in p.rules if r.atoms <= bag]


def bag_rule_indices(p: Program, td: TreeDecomposition) -> list[list[int]]:
    """For every node, indices of the rules entirely covered by its bag."""
    by_atom: dict[int, list[int]] = {}
    empty = []
    for i, r in enumerate(p.rules):
        if r.atoms:
            by_atom.setdefault(min(r.atoms), []).append(i)
        else:
            empty.append(i)
    out = []
    for bag in td.bags:
        idx = list(empty)
        for a in bag:
            idx.extend(i for i in by_atom.get(a, ()) if p.rules[i].atoms <= bag)
        out.append(sorted(idx))
    return out


def read_td(text: str) -> tuple[TreeDecomposition, int]:
    """Parse a PACE ``.td`` file; vertex ``v`` maps to atom ``v - 1``.

    Returns the decomposition rooted at bag 1 and the declared vertex count.
    """
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for ln, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                if parts[1] != "td" or len(parts) != 5:
                    raise TDFormatError(f"line {ln}: malformed header")
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "b":
                bags[int(parts[1])] = frozenset(int(v) - 1 for v in parts[2:])
            else:
                u, v = (int(x) for x in parts)
                edges.append((u, v))
        except ValueError as exc:
            raise TDFormatError(f"line {ln}: {exc}") from None
    if header is None:
        raise TDFormatError("missing 's td' header")
    nbags, _, nverts = header
    if sorted(bags) != list(range(1, nbags + 1)):
        raise TDFormatError("bag ids must be 1..#bags")
    if len(edges) != max(nbags - 1, 0):
        raise TDFormatError("a tree on n bags needs n-1 edges")
    adj: dict[int, list[int]] = {b: [] for b in bags}
    for u, v in edges:
        if u not in adj or v not in adj:
            raise TDFormatError(f"edge {u} {v} references an unknown bag")
        adj[u].append(v)
        adj[v].append(u)
    parent: dict[int, int | None] = {1: None}
    stack = [1]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                stack.append(v)
    if len(parent) != nbags:
        raise TDFormatError("tree edges do not connect all bags")
    td = TreeDecomposition(
        [bags[b] for b in range(1, nbags + 1)],
        [None if parent[b] is None else parent[b] - 1 for b in range(1, nbags + 1)],
        0,
    )
    return td, nverts


def write_td(td: TreeDecomposition, num_vertices: int) -> str:
    lines = [f"s td {td.num_nodes} {td.width + 1} {num_vertices}"]
    for t, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(t + 1)] + [str(v + 1) for v in sorted(bag)]))
    for t, pa in enumerate(td.parent):
        if pa is not None:
            lines.append(f"{pa + 1} {t + 1}")
    return "\n".join(lines) + "\n"
