"""Brute-force reference semantics, deliberately independent of the solvers.

Everything here enumerates subsets directly from the textbook definitions;
it is only meant for small instances.
"""

from __future__ import annotations

from graphlib import CycleError, TopologicalSorter

from .cnf import CnfFormula
from .program import Program

__all__ = ["SizeGuardError", "MAX_ATOMS", "brute_answer_sets", "brute_models", "tight_answer_sets"]

MAX_ATOMS = 24


class SizeGuardError(ValueError):
    pass


def _model_of_reduct(p: Program, interp: int, mask: int) -> bool:
    # ``mask`` is a bitset; the reduct w.r.t. ``interp`` keeps rules whose
    # negative body avoids ``interp`` and drops their negative literals
    for head, pos, neg in _bits(p):
        if neg & interp:
            continue
        if pos & ~mask == 0 and head & mask == 0:
            return False
    return True


_cache: dict[int, list] = {}


def _bits(p: Program):
    key = id(p)
    hit = _cache.get(key)
    if hit is not None and hit[0] is p:
        return hit[1]
    out = []
    for r in p.rules:
        out.append((_mask(r.head), _mask(r.pos), _mask(r.neg)))
    _cache.clear()
    _cache[key] = (p, out)
    return out


def _mask(atoms) -> int:
    m = 0
    for a in atoms:
        m |= 1 << a
    return m


def _submasks(m: int):
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m


def brute_answer_sets(p: Program, limit: int = MAX_ATOMS) -> set[frozenset[int]]:
    """All I such that I is a model of the reduct and no proper subset is."""
    n = p.num_atoms
    if n > limit:
        raise SizeGuardError(f"{n} atoms exceed the brute-force limit of {limit}")
    out = set()
    for interp in range(1 << n):
        if not _model_of_reduct(p, interp, interp):
            continue
        if any(j != interp and _model_of_reduct(p, interp, j) for j in _submasks(interp)):
            continue
        out.add(frozenset(a for a in range(n) if interp >> a & 1))
    return out


def brute_models(f: CnfFormula, limit: int = 1 << 16) -> set[frozenset[int]]:
    """All satisfying assignments, each given as its set of true variables.

    Exhaustive backtracking with unit propagation; variables left open once
    every clause is satisfied are expanded both ways. ``limit`` bounds the
    number of models listed.
    """
    out: set[frozenset[int]] = set()
    clauses = [frozenset(c) for c in f.clauses]
    if any(not c for c in clauses):
        return out
    stack = [(clauses, {})]
    while stack:
        cls, assign = stack.pop()
        cls = _unit_propagate(cls, assign)
        if cls is None:
            continue
        if cls:
            v = abs(next(iter(cls[0])))
            for val in (False, True):
                a2 = dict(assign)
                a2[v] = val
                stack.append((_assign(cls, v, val), a2))
            continue
        true = frozenset(v for v, val in assign.items() if val)
        open_vars = [v for v in range(1, f.num_vars + 1) if v not in assign]
        if len(out) + (1 << len(open_vars)) > limit:
            raise SizeGuardError(f"more than {limit} models")
        for m in range(1 << len(open_vars)):
            out.add(true | {v for k, v in enumerate(open_vars) if m >> k & 1})
    return out


def _assign(clauses, v, val):
    lit = v if val else -v
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.append(c)
    return out


def _unit_propagate(clauses, assign):
    while clauses is not None:
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is None:
            return clauses
        (lit,) = unit
        assign[abs(lit)] = lit > 0
        clauses = _assign(clauses, abs(lit), lit > 0)
    return None


def tight_answer_sets(p: Program, limit: int = 1 << 16) -> set[frozenset[int]]:
    """Answer sets of a tight program as the supported models of its completion.

    For programs without positive cycles, I is an answer set iff I satisfies
    every rule and each atom of I has a rule whose body holds in I and whose
    head meets I in that atom alone. Unlike ``brute_answer_sets`` this scales
    with the number of answer sets rather than with 2^atoms.
    """
    deps = {a: set() for a in range(p.num_atoms)}
    for r in p.rules:
        for h in r.head:
            deps[h] |= r.pos
    try:
        tuple(TopologicalSorter(deps).static_order())
    except CycleError as exc:
        raise ValueError(f"program is not tight: cycle through atoms {exc.args[1]}") from None

    f = CnfFormula()
    atom = [f.var(("atom", a)) for a in range(p.num_atoms)]
    support: dict[int, list[int]] = {a: [] for a in range(p.num_atoms)}
    for k, r in enumerate(p.rules):
        body = [atom[b] for b in r.pos] + [-atom[b] for b in r.neg]
        f.add([-x for x in body] + [atom[h] for h in r.head])
        for h in r.head:
            # s <-> body and no other head atom
            s = f.var(("support", k, h))
            lits = body + [-atom[o] for o in r.head if o != h]
            for x in lits:
                f.add([-s, x])
            f.add([s] + [-x for x in lits])
            support[h].append(s)
    for a in range(p.num_atoms):
        f.add([-atom[a]] + support[a])
    out = set()
    for model in brute_models(f, limit):
        out.add(frozenset(a for a in range(p.num_atoms) if atom[a] in model))
    return out
