import itertools
import random

import pytest

from twasp.cnf import CnfFormula
from twasp.oracle import SizeGuardError, brute_answer_sets, brute_models, tight_answer_sets
from twasp.program import parse_program

from programs import EXAMPLE1, random_tight


def named(p, sets):
    return {frozenset(p.to_names(s)) for s in sets}


def test_example():
    p = parse_program(EXAMPLE1)
    assert named(p, brute_answer_sets(p)) == {frozenset("abcde"), frozenset("f"), frozenset("g")}


def test_even_negative_loop():
    p = parse_program("a :- not b. b :- not a.")
    assert named(p, brute_answer_sets(p)) == {frozenset("a"), frozenset("b")}


def test_free_choice():
    p = parse_program("{a}.")
    got = {s & {p.atom("a")} for s in brute_answer_sets(p)}
    assert got == {frozenset(), frozenset({p.atom("a")})}


def test_atom_guard():
    p = parse_program(" ".join(f"a{i}." for i in range(25)))
    with pytest.raises(SizeGuardError):
        brute_answer_sets(p)


def test_models_of_small_formulas():
    f = CnfFormula()
    x, y = f.var("x"), f.var("y")
    f.add([x, y])
    f.add([-x, -y])
    assert brute_models(f) == {frozenset({x}), frozenset({y})}
    assert brute_models(CnfFormula()) == {frozenset()}


def test_model_guard():
    f = CnfFormula()
    for v in range(20):
        f.var(v)
    with pytest.raises(SizeGuardError):
        brute_models(f, limit=1000)


def test_models_are_exhaustive():
    rng = random.Random(2)
    for _ in range(50):
        f = CnfFormula()
        n = rng.randint(1, 8)
        for v in range(n):
            f.var(v)
        for _ in range(rng.randint(0, 10)):
            f.add(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(rng.randint(1, 3)))
        expected = set()
        for bits in itertools.product((0, 1), repeat=n):
            true = frozenset(v + 1 for v in range(n) if bits[v])
            if f.satisfied_by(true):
                expected.add(true)
        assert brute_models(f) == expected


def test_tight_oracle_agrees_with_reduct_oracle():
    rng = random.Random(4)
    for _ in range(300):
        p = random_tight(rng, 8, 10)
        assert tight_answer_sets(p) == brute_answer_sets(p)


def test_tight_oracle_rejects_cycles():
    with pytest.raises(ValueError):
        tight_answer_sets(parse_program("a :- b. b :- a."))
