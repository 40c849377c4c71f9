"""Dynamic programming over nice tree decompositions for head-cycle-free programs.

Rows of a node table are triples ``(I, P, sigma)``: the interpretation
restricted to the bag, the bag atoms already proven by some rule below the
node, and a level mapping on the bag. Atoms outside ``I`` are pinned to level
0, so every answer set corresponds to exactly one root row path, which makes
counting and enumeration exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

from .graphs import SccInfo, primal_graph, scc_info
from .program import Program, ProgramError, Rule, classify, proves
from .treedecomp import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    NiceTD,
    bag_rule_indices,
    check_nice,
    validate_td,
)

__all__ = [
    "DPRow",
    "DPTable",
    "gatherproof",
    "possord",
    "isminimal",
    "bndcyc_node",
    "solve_tables",
    "run",
    "count_answer_sets",
    "enumerate_answer_sets",
    "is_consistent",
]

# (interpretation, proven atoms, levels of atoms with a non-zero level)
Key = tuple[frozenset, frozenset, tuple]


def _freeze(sigma: Mapping[int, int]) -> tuple:
    return tuple(sorted((a, v) for a, v in sigma.items() if v))


@dataclass(frozen=True)
class DPRow:
    interp: frozenset[int]
    proven: frozenset[int]
    sigma: Mapping[int, int]
    count: int = 1


@dataclass
class DPTable:
    node: int
    bag: frozenset[int]
    rows: dict[Key, int] = field(default_factory=dict)
    # predecessor keys per row: child keys, or (left, right) pairs at joins
    preds: dict[Key, list] | None = None

    def __len__(self):
        return len(self.rows)

    def view(self) -> list[DPRow]:
        out = []
        for (i, p, s), c in self.rows.items():
            sigma = {a: 0 for a in self.bag}
            sigma.update(s)
            out.append(DPRow(i, p, sigma, c))
        return sorted(out, key=lambda r: (sorted(r.interp), sorted(r.proven), sorted(r.sigma.items())))


def gatherproof(interp, sigma: Mapping[int, int], bag_rules, scc: SccInfo) -> frozenset[int]:
    """Atoms of ``interp`` proven by some rule of ``bag_rules`` under ``sigma``."""
    out = set()
    for r in bag_rules:
        for a in r.head:
            if a in interp and a not in out and proves(r, a, interp, sigma, scc):
                out.add(a)
    return frozenset(out)


def possord(sigma: Mapping[int, int], new_atoms, scc: SccInfo) -> list[dict[int, int]]:
    """All extensions of ``sigma`` giving each new atom a level below its SCC size."""
    new_atoms = sorted(new_atoms)
    if set(new_atoms) & set(sigma):
        raise ValueError("new atoms must not be mapped already")
    out = []
    for levels in product(*(range(scc.ell_scc[a]) for a in new_atoms)):
        ext = dict(sigma)
        ext.update(zip(new_atoms, levels))
        out.append(ext)
    return out


def isminimal(sigma: Mapping[int, int], interp, bag_rules, scc: SccInfo) -> bool:
    """False iff some atom with a positive level is still proven one level lower."""
    for r in bag_rules:
        for a in r.head:
            if a in interp and sigma.get(a, 0) > 0:
                rho = dict(sigma)
                rho[a] -= 1
                if proves(r, a, interp, rho, scc):
                    return False
    return True


def _sat(interp, rules) -> bool:
    return all((r.head | r.neg) & interp or not r.pos <= interp for r in rules)


def bndcyc_node(
    kind: str,
    atom: int | None,
    bag: frozenset[int],
    bag_rules: list[Rule],
    children: list[DPTable],
    scc: SccInfo,
    node: int = -1,
    minimality: bool = True,
    track: bool = False,
) -> DPTable:
    """Table of one nice-TD node computed from its children's tables."""
    expected = {LEAF: 0, INTRODUCE: 1, FORGET: 1, JOIN: 2}
    if kind not in expected or len(children) != expected[kind]:
        raise ValueError(f"{kind} node needs {expected.get(kind)} child tables, got {len(children)}")
    out = DPTable(node, bag, {}, {} if track else None)
    rows = out.rows

    def emit(key, count, pred):
        rows[key] = rows.get(key, 0) + count
        if track:
            out.preds.setdefault(key, []).append(pred)

    if kind == LEAF:
        emit((frozenset(), frozenset(), ()), 1, None)
        return out

    if kind == INTRODUCE:
        # rules without the introduced atom were handled below
        fresh = [r for r in bag_rules if atom in r.atoms]
        for key, cnt in children[0].rows.items():
            interp, proven, s = key
            base = dict(s)
            for inside in (False, True):
                i2 = interp | {atom} if inside else interp
                if not _sat(i2, fresh):
                    continue
                levels = range(scc.ell_scc[atom]) if inside else (0,)
                for v in levels:
                    sigma = {a: base.get(a, 0) for a in bag}
                    sigma[atom] = v
                    if minimality and not isminimal(sigma, i2, fresh, scc):
                        continue
                    p2 = proven | gatherproof(i2, sigma, fresh, scc)
                    emit((i2, p2, _freeze(sigma)), cnt, key)
        return out

    if kind == FORGET:
        for key, cnt in children[0].rows.items():
            interp, proven, s = key
            if atom in interp and atom not in proven:
                continue
            s2 = tuple(x for x in s if x[0] != atom)
            emit((interp - {atom}, proven - {atom}, s2), cnt, key)
        return out

    left, right = children
    by_match: dict[tuple, list] = {}
    for key, cnt in right.rows.items():
        by_match.setdefault((key[0], key[2]), []).append((key, cnt))
    for k1, c1 in left.rows.items():
        for k2, c2 in by_match.get((k1[0], k1[2]), ()):
            emit((k1[0], k1[1] | k2[1], k1[2]), c1 * c2, (k1, k2))
    return out


def _check_inputs(p: Program, ntd: NiceTD, scc: SccInfo | None) -> SccInfo:
    if not classify(p).is_hcf:
        raise ProgramError("program is not head-cycle-free")
    bad = validate_td(primal_graph(p), ntd)
    if bad:
        raise ProgramError(f"invalid tree decomposition: {bad}")
    msg = check_nice(ntd)
    if msg:
        raise ProgramError(f"invalid nice tree decomposition: {msg}")
    return scc if scc is not None else scc_info(p)


def solve_tables(
    p: Program,
    ntd: NiceTD,
    scc: SccInfo | None = None,
    minimality: bool = True,
    track: bool = False,
    check_bound: bool = True,
) -> list[DPTable]:
    """Run the table algorithm bottom-up; returns the table of every node."""
    scc = _check_inputs(p, ntd, scc)
    rule_idx = bag_rule_indices(p, ntd)
    tables: list[DPTable | None] = [None] * ntd.num_nodes
    for t in ntd.postorder():
        bag = ntd.bags[t]
        kids = [tables[c] for c in ntd.children[t]]
        tab = bndcyc_node(
            ntd.kind[t], ntd.special[t], bag, [p.rules[i] for i in rule_idx[t]],
            kids, scc, node=t, minimality=minimality, track=track,
        )
        if check_bound:
            bound = 3 ** len(bag)
            for a in bag:
                bound *= scc.ell_scc[a]
            assert len(tab) <= bound, f"table of node {t} exceeds {bound} rows"
        tables[t] = tab
        # children are no longer needed unless we trace solutions back
        if not track:
            for c in ntd.children[t]:
                tables[c] = None
    return tables


def count_answer_sets(p: Program, ntd: NiceTD, scc: SccInfo | None = None) -> int:
    root = solve_tables(p, ntd, scc)[ntd.root]
    return sum(root.rows.values())


def is_consistent(p: Program, ntd: NiceTD, scc: SccInfo | None = None, minimality: bool = False) -> bool:
    return bool(solve_tables(p, ntd, scc, minimality=minimality)[ntd.root].rows)


def enumerate_answer_sets(p: Program, ntd: NiceTD, scc: SccInfo | None = None) -> Iterator[frozenset[int]]:
    """Yield every answer set once by following predecessor links from the root."""
    tables = solve_tables(p, ntd, scc, track=True)
    kind, special, children = ntd.kind, ntd.special, ntd.children
    # cons lists: pending (node, key) work and collected atoms
    stack = [(((ntd.root, key), None), None) for key in tables[ntd.root].rows]
    stack.reverse()
    while stack:
        pending, atoms = stack.pop()
        while pending is not None:
            (t, key), pending = pending
            if kind[t] == INTRODUCE and special[t] in key[0]:
                atoms = (special[t], atoms)
            preds = tables[t].preds[key]
            if kind[t] == LEAF:
                continue
            if kind[t] == JOIN:
                l, r = children[t]
                alts = [((l, k1), ((r, k2), pending)) for k1, k2 in preds]
            else:
                c = children[t][0]
                alts = [((c, k), pending) for k in preds]
            for alt in reversed(alts[1:]):
                stack.append((alt, atoms))
            pending = alts[0]
        out = set()
        while atoms is not None:
            a, atoms = atoms
            out.add(a)
        yield frozenset(out)


def run(p: Program, ntd: NiceTD, mode: str = "count", scc: SccInfo | None = None):
    if mode == "consistency":
        return is_consistent(p, ntd, scc)
    if mode == "count":
        return count_answer_sets(p, ntd, scc)
    if mode == "enumerate":
        return enumerate_answer_sets(p, ntd, scc)
    raise ValueError(f"unknown mode {mode!r}")
