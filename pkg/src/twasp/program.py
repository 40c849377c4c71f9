"""Ground logic programs: data model, parser, reduct and level-mapping semantics."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = [
    "ParseError",
    "ProgramError",
    "Rule",
    "Program",
    "Classification",
    "parse_program",
    "format_program",
    "classify",
    "gl_reduct",
    "satisfies",
    "proves",
    "is_answer_set",
    "choice_copy",
    "is_reserved",
]


class ProgramError(ValueError):
    """Raised when a program violates a precondition of an operation."""


class ParseError(ProgramError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


CHOICE_SUFFIX = "'__c"


def choice_copy(name: str) -> str:
    """Name of the fresh atom used when lowering the choice rule ``{name}.``"""
    return name + CHOICE_SUFFIX


def is_reserved(name: str) -> bool:
    return name.startswith("__") or "'" in name


@dataclass(frozen=True)
class Rule:
    head: frozenset[int]
    pos: frozenset[int] = frozenset()
    neg: frozenset[int] = frozenset()

    @property
    def atoms(self) -> frozenset[int]:
        return self.head | self.pos | self.neg

    def __post_init__(self):
        if self.pos & self.neg:
            raise ProgramError("atom occurs both positively and negatively in a body")


@dataclass(frozen=True)
class Program:
    names: tuple[str, ...] = ()
    rules: tuple[Rule, ...] = ()
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {n: i for i, n in enumerate(self.names)})
        if len(self.index) != len(self.names):
            raise ProgramError("duplicate atom names")
        n = len(self.names)
        for r in self.rules:
            if any(a < 0 or a >= n for a in r.atoms):
                raise ProgramError("rule references an unknown atom")

    @property
    def num_atoms(self) -> int:
        return len(self.names)

    def atom(self, name: str) -> int:
        return self.index[name]

    def interp(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index[n] for n in names)

    def to_names(self, interp: Iterable[int]) -> frozenset[str]:
        return frozenset(self.names[a] for a in interp)

    def rule_str(self, r: Rule) -> str:
        return format_rule(self.names, r)

    def __str__(self):
        return format_program(self)


class ProgramBuilder:
    """Incremental construction with names interned in first-occurrence order."""

    def __init__(self, names: Iterable[str] = ()):
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.rules: list[Rule] = []
        self._seen: set[Rule] = set()
        for n in names:
            self.intern(n)

    def intern(self, name: str) -> int:
        i = self.index.get(name)
        if i is None:
            i = self.index[name] = len(self.names)
            self.names.append(name)
        return i

    def add(self, head=(), pos=(), neg=(), dedup: bool = False) -> Rule:
        r = Rule(
            frozenset(self.intern(a) for a in head),
            frozenset(self.intern(a) for a in pos),
            frozenset(self.intern(a) for a in neg),
        )
        if dedup:
            if r in self._seen:
                return r
            self._seen.add(r)
        self.rules.append(r)
        return r

    def choice(self, name: str, dedup: bool = False) -> Rule:
        return self.add((name, choice_copy(name)), dedup=dedup)

    def build(self) -> Program:
        return Program(tuple(self.names), tuple(self.rules))


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<punct>[.,|{}])
  | (?P<aux>__[A-Za-z]+\([A-Za-z0-9_',()]*?\)(?:'__c)*(?=[\s.,|}:%]|$))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:'__c)*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            value = m.group()
            if kind in ("aux", "ident"):
                kind = "atom"
            yield kind, value, line, pos - line_start + 1
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


def parse_program(text: str, allow_reserved: bool = False) -> Program:
    """Parse the ground fragment ``h1 | h2 :- b, not c.``, ``:- body.`` and ``{a}.``.

    Choice rules ``{a}.`` are lowered to ``a | a'__c.``. Names with a ``__``
    prefix or a ``'`` are reserved for generated atoms and only accepted when
    ``allow_reserved`` is set (e.g. when re-reading compiler output).
    """
    toks = list(_tokenize(text))
    b = ProgramBuilder()
    i = 0

    def peek():
        return toks[i]

    def take(kind, value=None):
        nonlocal i
        k, v, ln, col = toks[i]
        if k != kind or (value is not None and v != value):
            want = value if value is not None else kind
            got = v if v else "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", ln, col)
        i += 1
        return v, ln, col

    def atom():
        name, ln, col = take("atom")
        if name == "not":
            raise ParseError("'not' is not an atom", ln, col)
        if is_reserved(name) and not allow_reserved:
            raise ParseError(f"reserved atom name {name!r}", ln, col)
        return name

    def body():
        pos, neg = [], []
        while True:
            k, v, _, _ = peek()
            if k == "atom" and v == "not" and toks[i + 1][0] == "atom":
                take("atom")
                neg.append(atom())
            else:
                pos.append(atom())
            if peek()[:2] == ("punct", ","):
                take("punct", ",")
                continue
            return pos, neg

    while peek()[0] != "eof":
        k, v, ln, col = peek()
        head: list[str] = []
        pos: list[str] = []
        neg: list[str] = []
        if (k, v) == ("punct", "{"):
            take("punct", "{")
            name = atom()
            take("punct", "}")
            take("punct", ".")
            b.choice(name)
            continue
        if k == "atom":
            head.append(atom())
            while peek()[:2] == ("punct", "|"):
                take("punct", "|")
                head.append(atom())
        if peek()[0] == "if":
            take("if")
            if peek()[:2] != ("punct", "."):
                pos, neg = body()
        elif not head:
            raise ParseError(f"unexpected {v!r}", ln, col)
        take("punct", ".")
        if set(pos) & set(neg):
            raise ParseError("rule body has an atom both positive and negated", ln, col)
        b.add(head, pos, neg)
    return b.build()


def format_rule(names, r: Rule) -> str:
    head = " | ".join(names[a] for a in sorted(r.head))
    lits = [names[a] for a in sorted(r.pos)] + ["not " + names[a] for a in sorted(r.neg)]
    if not lits:
        return head + "." if head else ":- ."
    return (head + " :- " if head else ":- ") + ", ".join(lits) + "."


def format_program(p: Program) -> str:
    return "".join(format_rule(p.names, r) + "\n" for r in p.rules)


@dataclass(frozen=True)
class Classification:
    is_tight: bool
    is_normal: bool
    is_hcf: bool


def classify(p: Program, d=None) -> Classification:
    from .graphs import dependency_digraph, scc_info

    if d is None:
        d = dependency_digraph(p)
    info = scc_info(p, d)
    is_normal = all(len(r.head) <= 1 for r in p.rules)
    # tight: every SCC is a singleton and there are no self-loops
    is_tight = all(info.ell_scc[a] == 1 for a in range(p.num_atoms)) and not any(
        a in d.succ.get(a, ()) for a in d.succ
    )
    is_hcf = True
    for r in p.rules:
        if len(r.head) >= 2:
            comps = [info.scc_id[a] for a in r.head]
            if len(set(comps)) < len(comps):
                is_hcf = False
                break
    return Classification(is_tight, is_normal, is_hcf)


def gl_reduct(p: Program, interp: frozenset[int]) -> Program:
    rules = tuple(Rule(r.head, r.pos) for r in p.rules if not (r.neg & interp))
    return Program(p.names, rules)


def satisfies(interp: frozenset[int], obj: Rule | Program) -> bool:
    """Classical satisfaction of a rule, or of every rule of a program."""
    if isinstance(obj, Program):
        return all(satisfies(interp, r) for r in obj.rules)
    return bool((obj.head | obj.neg) & interp) or not obj.pos <= interp


def proves(r: Rule, a: int, interp: frozenset[int], sigma: Mapping[int, int], scc) -> bool:
    """Whether ``r`` proves ``a`` in ``interp`` under level mapping ``sigma``.

    Level comparisons are restricted to positive body atoms in the SCC of ``a``.
    """
    if a not in r.head:
        raise ProgramError("atom is not in the head of the rule")
    if not r.pos <= interp or r.neg & interp:
        return False
    if any(h in interp for h in r.head if h != a):
        return False
    comp = scc.scc_id[a]
    for b in r.pos:
        if scc.scc_id[b] == comp:
            try:
                if sigma[b] >= sigma[a]:
                    return False
            except KeyError:
                raise ProgramError("level mapping undefined on a queried atom") from None
    return True


def minimal_levels(p: Program, interp: frozenset[int], scc) -> dict[int, int] | None:
    """Least level mapping proving every atom of ``interp``, or None if none exists.

    Levels are assigned bottom-up: an atom gets level ``v`` as soon as some rule
    proves it with all its same-SCC positive body atoms at levels below ``v``.
    """
    by_head: dict[int, list[Rule]] = {}
    for r in p.rules:
        if not r.pos <= interp or r.neg & interp:
            continue
        others = r.head & interp
        for a in r.head:
            if a in interp and others <= {a}:
                by_head.setdefault(a, []).append(r)
    level: dict[int, int] = {}
    todo = set(interp)
    changed = True
    while todo and changed:
        changed = False
        newly = {}
        for a in todo:
            comp = scc.scc_id[a]
            best = None
            for r in by_head.get(a, ()):
                inner = [b for b in r.pos if scc.scc_id[b] == comp]
                if any(b not in level for b in inner):
                    continue
                v = 1 + max((level[b] for b in inner), default=-1)
                best = v if best is None else min(best, v)
            if best is not None:
                newly[a] = best
        if newly:
            changed = True
            level.update(newly)
            todo -= newly.keys()
    if todo:
        return None
    return level


def is_answer_set(p: Program, interp: frozenset[int], scc=None) -> bool:
    """Answer-set check for head-cycle-free programs via level mappings."""
    from .graphs import dependency_digraph, scc_info

    if scc is None:
        scc = scc_info(p, dependency_digraph(p))
    if not classify(p).is_hcf:
        raise ProgramError("program is not head-cycle-free")
    interp = frozenset(interp)
    if not satisfies(interp, p):
        return False
    return minimal_levels(p, interp, scc) is not None
