"""CNF formulas over named variables, DIMACS output and exact model counting."""

from __future__ import annotations

from dataclasses import dataclass, field
import heapq
from typing import Hashable, Iterable

__all__ = ["CnfFormula", "parse_dimacs", "count_models"]


@dataclass
class CnfFormula:
    """Clauses over 1-based variable indices; ``names[i-1]`` renders variable ``i``."""

    names: list[str] = field(default_factory=list)
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    keys: dict[Hashable, int] = field(default_factory=dict, repr=False)

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def var(self, key: Hashable, name: str | None = None) -> int:
        v = self.keys.get(key)
        if v is None:
            self.names.append(name if name is not None else str(key))
            v = self.keys[key] = len(self.names)
        return v

    def add(self, lits: Iterable[int]) -> bool:
        """Append a clause; duplicate literals are merged, tautologies dropped."""
        seen = set(lits)
        if any(-x in seen for x in seen):
            return False
        self.clauses.append(tuple(sorted(seen, key=lambda x: (abs(x), x))))
        return True

    def to_dimacs(self) -> str:
        out = [f"c var {i} = {n}" for i, n in enumerate(self.names, 1)]
        out.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        out.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(out) + "\n"

    def satisfied_by(self, true_vars) -> bool:
        return all(any((x > 0) == (abs(x) in true_vars) for x in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    f = CnfFormula()
    nvars = None
    names: dict[int, str] = {}
    lits: list[int] = []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) >= 5 and parts[1] == "var" and parts[3] == "=":
                names[int(parts[2])] = " ".join(parts[4:])
            continue
        if parts[0] == "p":
            nvars = int(parts[2])
            continue
        for x in map(int, parts):
            if x == 0:
                f.clauses.append(tuple(lits))
                lits = []
            else:
                lits.append(x)
    if nvars is None:
        raise ValueError("missing 'p cnf' line")
    f.names = [names.get(i, str(i)) for i in range(1, nvars + 1)]
    f.keys = {n: i for i, n in enumerate(f.names, 1)}
    return f


def count_models(f: CnfFormula) -> int:
    """Exact model count: DPLL with unit propagation, component splitting and caching.

    Branching prefers variables eliminated late by a min-degree ordering of
    the primal graph; those tend to sit on separators.
    """
    return _Counter(f.num_vars, f.clauses).run()


def _min_degree_rank(n: int, clauses) -> list[int]:
    """Elimination position of each variable under greedy min-degree."""
    adj: list[set[int]] = [set() for _ in range(n + 1)]
    for c in clauses:
        vs = {abs(x) for x in c}
        for v in vs:
            adj[v] |= vs
    for v in range(n + 1):
        adj[v].discard(v)
    rank = [0] * (n + 1)
    heap = [(len(adj[v]), v) for v in range(1, n + 1)]
    heapq.heapify(heap)
    pos = 0
    while heap:
        d, v = heapq.heappop(heap)
        if rank[v] or d != len(adj[v]):
            continue
        pos += 1
        rank[v] = pos
        ns = adj[v]
        for a in ns:
            adj[a].discard(v)
            adj[a] |= ns
            adj[a].discard(a)
            heapq.heappush(heap, (len(adj[a]), a))
        adj[v] = set()
    return rank


class _Counter:
    CACHE_LIMIT = 4000

    def __init__(self, n: int, clauses):
        self.n = n
        self.clauses = [tuple(set(c)) for c in clauses]
        self.occ: list[list[int]] = [[] for _ in range(2 * n + 1)]
        for i, c in enumerate(self.clauses):
            for x in c:
                self.occ[x].append(i)
        # literal values indexed by the signed literal itself (negative
        # indices wrap around): 1 true, -1 false, 0 open
        self.lit = [0] * (2 * n + 1)
        self.sat = [0] * len(self.clauses)  # true literals per clause
        self.trail: list[int] = []
        self.cache: dict[frozenset, int] = {}
        self.rank = _min_degree_rank(n, self.clauses)

    def run(self) -> int:
        if any(not c for c in self.clauses):
            return 0
        units = [c[0] for c in self.clauses if len(c) == 1]
        if not self._assign_all(units):
            return 0
        sat = self.sat
        comps = self._components([i for i in range(len(self.clauses)) if not sat[i]])
        total = 1 << (self.n - len(self.trail) - sum(len(vs) for _, vs in comps))
        for cids, vs in comps:
            total *= self._count(cids, vs)
            if not total:
                return 0
        return total

    def _assign_all(self, lits) -> bool:
        """Assign literals and propagate; False on conflict (assignments stay on the trail)."""
        lit_val, sat, trail, clauses, occ = self.lit, self.sat, self.trail, self.clauses, self.occ
        queue = list(lits)
        while queue:
            x = queue.pop()
            cur = lit_val[x]
            if cur:
                if cur < 0:
                    return False
                continue
            lit_val[x] = 1
            lit_val[-x] = -1
            trail.append(x)
            for ci in occ[x]:
                sat[ci] += 1
            for ci in occ[-x]:
                if sat[ci]:
                    continue
                unit = None
                for y in clauses[ci]:
                    if not lit_val[y]:
                        if unit is not None:
                            break
                        unit = y
                else:
                    if unit is None:
                        return False
                    queue.append(unit)
        return True

    def _undo(self, mark: int):
        lit_val, sat, trail, occ = self.lit, self.sat, self.trail, self.occ
        while len(trail) > mark:
            x = trail.pop()
            lit_val[x] = lit_val[-x] = 0
            for ci in occ[x]:
                sat[ci] -= 1

    def _components(self, cids):
        """Split unsatisfied clauses into groups sharing no open variable.

        Returns (clause ids, open variables) per group.
        """
        lit_val, clauses, occ = self.lit, self.clauses, self.occ
        todo = set(cids)
        out = []
        while todo:
            seed = todo.pop()
            comp = [seed]
            seen = set()
            for ci in comp:
                for x in clauses[ci]:
                    v = x if x > 0 else -x
                    if lit_val[v] or v in seen:
                        continue
                    seen.add(v)
                    for cj in occ[v]:
                        if cj in todo:
                            todo.discard(cj)
                            comp.append(cj)
                    for cj in occ[-v]:
                        if cj in todo:
                            todo.discard(cj)
                            comp.append(cj)
            out.append((comp, seen))
        return out

    def _count(self, cids, comp_vars) -> int:
        """Models of the given unsatisfied clauses over their open variables."""
        lit_val, clauses, sat = self.lit, self.clauses, self.sat
        key = None
        if len(cids) <= self.CACHE_LIMIT:
            key = frozenset(tuple(sorted(x for x in clauses[i] if not lit_val[x])) for i in cids)
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        branch = max(comp_vars, key=self.rank.__getitem__)
        total = 0
        for x in (branch, -branch):
            mark = len(self.trail)
            if self._assign_all([x]):
                fixed = len(self.trail) - mark
                comps = self._components([i for i in cids if not sat[i]])
                sub = 1 << (len(comp_vars) - fixed - sum(len(vs) for _, vs in comps))
                for sub_cids, vs in comps:
                    sub *= self._count(sub_cids, vs)
                    if not sub:
                        break
                total += sub
            self._undo(mark)
        if key is not None:
            self.cache[key] = total
        return total
