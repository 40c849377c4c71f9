import random

from hypothesis import given, settings, strategies as st

from twasp.cnf import CnfFormula, count_models, parse_dimacs
from twasp.oracle import brute_models


def random_cnf(rng: random.Random, max_vars: int = 14, max_clauses: int = 30) -> CnfFormula:
    f = CnfFormula()
    n = rng.randint(0, max_vars)
    for v in range(n):
        f.var(v)
    for _ in range(rng.randint(0, max_clauses) if n else 0):
        width = rng.choice((1, 2, 2, 3, 3, 3, 4))
        f.add(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(width))
    return f


def test_var_interning_and_names():
    f = CnfFormula()
    assert f.var("x") == 1 and f.var("y", "why") == 2 and f.var("x") == 1
    assert f.names == ["x", "why"]


def test_add_normalizes():
    f = CnfFormula()
    f.var(1), f.var(2)
    assert f.add([2, 1, 2]) and f.clauses == [(1, 2)]
    assert not f.add([1, -1]) and len(f.clauses) == 1


def test_dimacs_round_trip():
    f = CnfFormula()
    a, b = f.var("a"), f.var("__q(0,a)")
    f.add([a, -b])
    f.add([b])
    text = f.to_dimacs()
    assert "p cnf 2 2" in text and "c var 2 = __q(0,a)" in text
    g = parse_dimacs(text)
    assert g.names == f.names and g.clauses == f.clauses


def test_parse_dimacs_without_names():
    g = parse_dimacs("p cnf 3 2\n1 -2 0\n3\n0\n")
    assert g.names == ["1", "2", "3"] and g.clauses == [(1, -2), (3,)]


def test_small_counts():
    f = CnfFormula()
    x, y = f.var("x"), f.var("y")
    f.add([x, y])
    f.add([-x, -y])
    assert count_models(f) == 2
    assert brute_models(f) == {frozenset({x}), frozenset({y})}
    assert count_models(CnfFormula()) == 1
    f.add([x])
    f.add([y])
    assert count_models(f) == 0


def test_free_variables_and_empty_clause():
    f = CnfFormula()
    for v in range(40):
        f.var(v)
    assert count_models(f) == 2 ** 40
    f.clauses.append(())
    assert count_models(f) == 0


def test_independent_components_multiply():
    f = CnfFormula()
    for k in range(30):
        a, b, c = f.var((k, 0)), f.var((k, 1)), f.var((k, 2))
        f.add([a, b, c])
        f.add([-a, -b])
    # each block: 8 assignments minus all-false minus the two with a and b true
    assert count_models(f) == 5 ** 30


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_count_matches_enumeration(seed):
    f = random_cnf(random.Random(seed))
    models = brute_models(f)
    assert count_models(f) == len(models)
    assert all(f.satisfied_by(m) for m in models)
