"""Treewidth-aware compilers: head-cycle-free ASP to tight ASP, and tight ASP to CNF.

Both translations are guided by a tree decomposition of the input's primal
graph. The head-cycle-free step replaces positive cycles by a binary level
mapping per atom, checked along the decomposition; the tight step is a Clark
completion whose provability definitions are also spread over the
decomposition. Each has a matching witness decomposition of the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import CnfFormula
from .graphs import SccInfo, scc_info
from .program import Program, ProgramBuilder, ProgramError, classify, choice_copy
from .treedecomp import TreeDecomposition

__all__ = [
    "num_bits",
    "encode_bits",
    "prec_bodies",
    "binarize",
    "canonical_nodes",
    "hcf_to_tight",
    "witness_td_tight",
    "tight_to_cnf",
    "witness_td_cnf",
    "WitnessTD",
    "bit_name",
    "prec_name",
    "prov_name",
    "prov_below_name",
]


def bit_name(x: str, j: int) -> str:
    return f"__b({x},{j})"


def prec_name(t: int, x: str, i: int) -> str:
    return f"__lt({t},{x},{i})"


def prov_name(t: int, x: str) -> str:
    return f"__p({t},{x})"


def prov_below_name(t: int, x: str) -> str:
    return f"__pb({t},{x})"


# the CNF stage gets its own prefixes so that compiling an already compiled
# program never reuses a name of its input
def _cnf_prov(t: int, x: str) -> str:
    return f"__q({t},{x})"


def _cnf_prov_below(t: int, x: str) -> str:
    return f"__qb({t},{x})"


def _cnf_fire(t: int, r: int, x: str) -> str:
    return f"__f({t},{r},{x})"


def num_bits(ell_scc: int) -> int:
    """Bits needed for levels ``0 .. ell_scc - 1``."""
    return (ell_scc - 1).bit_length()


def encode_bits(x: int, i: int, scc: SccInfo) -> tuple[tuple[int, bool], ...]:
    """Signed level-bit literals ``(j, positive)`` spelling ``i``; ``j = 1`` is the lsb."""
    ell = scc.ell_scc[x]
    if not 0 <= i < ell:
        raise ValueError(f"level {i} out of range 0..{ell - 1}")
    return tuple((j, bool(i >> (j - 1) & 1)) for j in range(1, num_bits(ell) + 1))


def _encode(i: int, nbits: int):
    return tuple((j, bool(i >> (j - 1) & 1)) for j in range(1, nbits + 1))


def prec_bodies(i: int, nbits: int) -> list[tuple[int, ...]]:
    """Bodies (bit positions, all negated) deriving ``level < i``.

    One body per set bit ``j`` of ``i``: bit ``j`` of the level is 0, and so is
    every higher bit where ``i`` has a 0.
    """
    out = []
    for j in range(1, nbits + 1):
        if i >> (j - 1) & 1:
            higher = [k for k in range(j + 1, nbits + 1) if not i >> (k - 1) & 1]
            out.append((j, *higher))
    return out


def binarize(td: TreeDecomposition) -> TreeDecomposition:
    """Equivalent TD where every node has at most two children.

    A node with several children keeps its bag and gets a single child, the
    top of a chain of copies of its bag each holding one original child.
    Joins whose children already share their bag (as in nice TDs) are kept.
    """

    def plain_join(t):
        kids = td.children[t]
        return len(kids) == 2 and all(td.bags[c] == td.bags[t] for c in kids)

    todo = [t for t in range(td.num_nodes) if len(td.children[t]) > 1 and not plain_join(t)]
    if not todo:
        return td
    bags = list(td.bags)
    parent = list(td.parent)
    for t in todo:
        kids = td.children[t]
        hook = None
        for c in [None, *kids[:-2]]:
            if c is not None:
                parent[c] = hook
            bags.append(td.bags[t])
            parent.append(t if hook is None else hook)
            hook = len(bags) - 1
        for c in kids[-2:]:
            parent[c] = hook
    return TreeDecomposition(bags, parent, td.root)


def canonical_nodes(p: Program, td: TreeDecomposition) -> list[int]:
    """For each rule, the first node in post-order with at most one child covering it.

    In a nice or binarized decomposition the bag of a two-child node is also
    the bag of a node with one child, so such a node always exists.
    """
    todo = {i: r.atoms for i, r in enumerate(p.rules)}
    out = [-1] * len(p.rules)
    for t in td.postorder():
        if len(td.children[t]) > 1:
            continue
        bag = td.bags[t]
        done = [i for i, atoms in todo.items() if atoms <= bag]
        for i in done:
            out[i] = t
            del todo[i]
        if not todo:
            break
    if todo:
        raise ProgramError("tree decomposition does not cover every rule")
    return out


def _check_hcf_input(p: Program, scc: SccInfo | None) -> SccInfo:
    if not classify(p).is_hcf:
        raise ProgramError("program is not head-cycle-free")
    return scc if scc is not None else scc_info(p)


def hcf_to_tight(p: Program, ntd: TreeDecomposition, scc: SccInfo | None = None,
                 preserve: bool = True) -> Program:
    """Tight program whose answer sets, projected to ``p``'s atoms, are those of ``p``.

    With ``preserve`` the correspondence is one-to-one; without it only
    consistency is kept.
    """
    scc = _check_hcf_input(p, scc)
    names = p.names
    ell = scc.ell_scc
    comp = scc.scc_id
    nbits = [num_bits(e) for e in ell]
    ntd = binarize(ntd)
    canon = canonical_nodes(p, ntd)
    rules_at: dict[int, list[int]] = {}
    for ri, t in enumerate(canon):
        rules_at.setdefault(t, []).append(ri)

    b = ProgramBuilder(names)

    def bits_lits(x, i):
        pos = [bit_name(names[x], j) for j, on in _encode(i, nbits[x]) if on]
        neg = [bit_name(names[x], j) for j, on in _encode(i, nbits[x]) if not on]
        return pos, neg

    def add(head=(), pos=(), neg=(), dedup=False):
        # bodies with complementary literals never fire
        if set(pos) & set(neg):
            return
        b.add(head, pos, neg, dedup=dedup)

    declared_prec: set[tuple[int, int, int]] = set()

    def prec(t, y, i):
        if (t, y, i) not in declared_prec:
            declared_prec.add((t, y, i))
            for body in prec_bodies(i, nbits[y]):
                add([prec_name(t, names[y], i)], (), [bit_name(names[y], j) for j in body])
        return prec_name(t, names[y], i)

    for ri, r in enumerate(p.rules):
        add((), [names[a] for a in r.pos], [names[a] for a in r.neg | r.head], dedup=True)

    for t in ntd.postorder():
        bag = ntd.bags[t]
        for x in sorted(bag):
            b.choice(names[x], dedup=True)
            for j in range(1, nbits[x] + 1):
                b.choice(bit_name(names[x], j), dedup=True)
        proved_here = set()
        for ri in rules_at.get(t, ()):
            r = p.rules[ri]
            pos = [names[a] for a in r.pos]
            for x in sorted(r.head):
                neg = [names[a] for a in r.neg | (r.head - {x})]
                xs = names[x]
                inner = sorted(a for a in r.pos if comp[a] == comp[x])
                head = [prov_name(t, xs)]
                if inner:
                    for i in range(1, ell[x]):
                        bp, bn = bits_lits(x, i)
                        lts = [prec(t, y, i) for y in inner]
                        add(head, [xs, *bp, *lts, *pos], [*bn, *neg])
                        proved_here.add(x)
                        if preserve and i >= 2:
                            lts = [prec(t, y, i - 1) for y in inner]
                            add((), [xs, *bp, *lts, *pos], [*bn, *neg])
                else:
                    add(head, [xs, *pos], neg)
                    proved_here.add(x)
                    if preserve:
                        for i in range(1, ell[x]):
                            bp, bn = bits_lits(x, i)
                            add((), [xs, *bp, *pos], [*bn, *neg])
        for x in sorted(bag):
            xs = names[x]
            if x in proved_here:
                add([prov_below_name(t, xs)], [prov_name(t, xs)])
            for c in ntd.children[t]:
                if x in ntd.bags[c]:
                    add([prov_below_name(t, xs)], [prov_below_name(c, xs)])
        for c in ntd.children[t]:
            for x in sorted(ntd.bags[c] - bag):
                add((), [names[x]], [prov_below_name(c, names[x])])
        if t == ntd.root:
            for x in sorted(bag):
                add((), [names[x]], [prov_below_name(t, names[x])])
        if preserve:
            for x in sorted(bag):
                xs = names[x]
                for j in range(1, nbits[x] + 1):
                    add((), [bit_name(xs, j)], [xs], dedup=True)
                # bit patterns at or above the SCC size are not levels
                for i in range(ell[x], 1 << nbits[x]):
                    bp, bn = bits_lits(x, i)
                    add((), bp, bn, dedup=True)
    return b.build()


@dataclass
class WitnessTD(TreeDecomposition):
    # per witness node: the (binarized) input node it was derived from, and
    # that node's bag size, against which width bounds are stated
    host: list[int] = field(default_factory=list)
    host_size: list[int] = field(default_factory=list)


def _assemble(td: TreeDecomposition, main_bags, extra) -> WitnessTD:
    """Main nodes mirror ``td``; ``extra`` holds (host, bag) pairs hung below hosts."""
    bags = list(main_bags)
    par = list(td.parent)
    host = list(range(len(bags)))
    for h, bag in extra:
        bags.append(frozenset(bag))
        par.append(h)
        host.append(h)
    return WitnessTD(bags, par, td.root, host, [len(td.bags[h]) for h in host])


def witness_td_tight(p: Program, ntd: TreeDecomposition, tight: Program,
                     scc: SccInfo | None = None) -> WitnessTD:
    """Decomposition of ``tight = hcf_to_tight(p, ntd, ...)`` over its atom ids.

    Main bags hold the bag atoms with their level bits and provability atoms;
    each ``x < i`` comparison family and each choice copy lives in a small
    node hung below the node that uses it.
    """
    scc = scc if scc is not None else scc_info(p)
    names = p.names
    idx = tight.index
    nbits = [num_bits(e) for e in scc.ell_scc]
    ntd = binarize(ntd)

    def ids(ns):
        return {idx[n] for n in ns if n in idx}

    main = []
    extra = []
    first_host: dict[str, int] = {}
    for t in range(ntd.num_nodes):
        bag = ntd.bags[t]
        pa = ntd.parent[t]
        core = []
        for x in bag:
            xs = names[x]
            core.append(xs)
            core.extend(bit_name(xs, j) for j in range(1, nbits[x] + 1))
        provs = [prov_name(t, names[x]) for x in bag]
        below = [prov_below_name(t, names[x]) for x in bag]
        up = [prov_below_name(pa, names[x]) for x in bag if pa is not None and x in ntd.bags[pa]]
        main.append(frozenset(ids(core + provs + below + up)))
        for n in core:
            first_host.setdefault(n, t)
        by_level: dict[int, list[str]] = {}
        for x in bag:
            for i in range(1, scc.ell_scc[x]):
                n = prec_name(t, names[x], i)
                if n in idx:
                    by_level.setdefault(i, []).append(n)
        for i in sorted(by_level):
            extra.append((t, ids(core + provs + by_level[i])))
    for n, t in first_host.items():
        if choice_copy(n) in idx:
            extra.append((t, ids([n, choice_copy(n)])))
    known = set().union(*main, *(bag for _, bag in extra))
    # atoms of the output not tied to any node (e.g. atoms of rule-less input atoms)
    for a in range(tight.num_atoms):
        if a not in known:
            extra.append((ntd.root, {a}))
    return _assemble(ntd, main, extra)


def tight_to_cnf(p: Program, ntd: TreeDecomposition, weak: bool = False) -> CnfFormula:
    """CNF whose models correspond one-to-one to the answer sets of tight ``p``.

    With ``weak`` the provability definitions become one-directional, which
    keeps satisfiability but may admit several models per answer set.
    """
    if not classify(p).is_tight:
        raise ProgramError("program is not tight")
    ntd = binarize(ntd)
    names = p.names
    f = CnfFormula()
    atom = [f.var(("atom", a), names[a]) for a in range(p.num_atoms)]
    for r in p.rules:
        f.add([-atom[a] for a in r.pos] + [atom[a] for a in r.neg | r.head])
    canon = canonical_nodes(p, ntd)
    rules_at: dict[int, list[int]] = {}
    for ri, t in enumerate(canon):
        rules_at.setdefault(t, []).append(ri)
    below: dict[tuple[int, int], int] = {}
    for t in ntd.postorder():
        bag = ntd.bags[t]
        for x in sorted(bag):
            fires = []
            for ri in rules_at.get(t, ()):
                r = p.rules[ri]
                if x not in r.head:
                    continue
                fv = f.var(("fire", t, ri, x), _cnf_fire(t, ri, names[x]))
                lits = [atom[a] for a in r.pos | {x}] + [-atom[a] for a in r.neg | (r.head - {x})]
                for lit in lits:
                    f.add([-fv, lit])
                if not weak:
                    f.add([fv] + [-lit for lit in lits])
                fires.append(fv)
            alts = []
            if fires:
                pv = f.var(("prov", t, x), _cnf_prov(t, names[x]))
                f.add([-pv] + fires)
                if not weak:
                    for fv in fires:
                        f.add([pv, -fv])
                alts.append(pv)
            alts.extend(below[c, x] for c in ntd.children[t] if (c, x) in below)
            if alts:
                bv = below[t, x] = f.var(("below", t, x), _cnf_prov_below(t, names[x]))
                f.add([-bv] + alts)
                if not weak:
                    for v in alts:
                        f.add([bv, -v])
        for c in ntd.children[t]:
            for x in sorted(ntd.bags[c] - bag):
                f.add([-atom[x]] + ([below[c, x]] if (c, x) in below else []))
        if t == ntd.root:
            for x in sorted(bag):
                f.add([-atom[x]] + ([below[t, x]] if (t, x) in below else []))
    return f


def witness_td_cnf(ntd: TreeDecomposition, p: Program, cnf: CnfFormula) -> WitnessTD:
    """Decomposition of ``cnf = tight_to_cnf(p, ntd)`` over its variable indices (0-based)."""
    ntd = binarize(ntd)
    keys = cnf.keys
    fires_at: dict[int, list[int]] = {}
    for key, v in keys.items():
        if key[0] == "fire":
            fires_at.setdefault(key[1], []).append(v - 1)
    main = []
    for t in range(ntd.num_nodes):
        bag = set()
        for x in ntd.bags[t]:
            bag.add(keys["atom", x] - 1)
            for key in (("prov", t, x), ("below", t, x)):
                if key in keys:
                    bag.add(keys[key] - 1)
            for c in ntd.children[t]:
                if ("below", c, x) in keys:
                    bag.add(keys["below", c, x] - 1)
        bag.update(fires_at.get(t, ()))
        main.append(frozenset(bag))
    known = set().union(*main)
    extra = [(ntd.root, {v}) for v in range(cnf.num_vars) if v not in known]
    return _assemble(ntd, main, extra)
