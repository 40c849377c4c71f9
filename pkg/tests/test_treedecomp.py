import random

import pytest
from hypothesis import given, settings, strategies as st

from twasp.graphs import Graph, primal_graph
from twasp.program import parse_program
from twasp.treedecomp import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    TDFormatError,
    TreeDecomposition,
    bag_program,
    bag_rule_indices,
    check_nice,
    decompose,
    make_nice,
    read_td,
    validate_td,
    write_td,
)

from programs import EXAMPLE1, random_program


def random_graph(rng: random.Random, max_n: int = 12) -> Graph:
    n = rng.randint(0, max_n)
    density = rng.random()
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density])


def test_example_graph_has_width_two():
    g = primal_graph(parse_program(EXAMPLE1))
    for heuristic in ("min-fill", "min-degree"):
        td = decompose(g, heuristic)
        assert validate_td(g, td) is None
        assert td.width == 2


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_clique(n):
    g = Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])
    assert decompose(g).width == n - 1


def test_path():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    td = decompose(g)
    assert td.width == 1 and validate_td(g, td) is None


def test_empty_graph():
    td = decompose(Graph.from_edges(0, []))
    assert td.bags == [frozenset()] and validate_td(Graph.from_edges(0, []), td) is None


def test_disconnected_graph_yields_one_tree():
    g = Graph.from_edges(5, [(0, 1), (3, 4)])
    td = decompose(g)
    assert validate_td(g, td) is None
    assert sum(1 for pa in td.parent if pa is None) == 1


def test_seeds_give_valid_decompositions():
    g = primal_graph(parse_program(EXAMPLE1))
    for seed in range(10):
        assert validate_td(g, decompose(g, "min-degree", seed)) is None


def test_unknown_heuristic():
    with pytest.raises(ValueError):
        decompose(Graph.from_edges(2, [(0, 1)]), "magic")


class TestValidation:
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])

    def test_missing_vertex(self):
        td = TreeDecomposition([frozenset({0, 1}), frozenset({1, 2})], [None, 0], 0)
        bad = validate_td(self.g, td)
        assert bad.condition == "i" and bad.witness == (3,)

    def test_missing_edge(self):
        td = TreeDecomposition([frozenset({0, 1}), frozenset({1}), frozenset({2}), frozenset({2, 3})],
                               [None, 0, 1, 2], 0)
        bad = validate_td(self.g, td)
        assert bad.condition == "ii" and bad.witness == (1, 2)

    def test_disconnected_occurrence(self):
        # vertex 1 sits in nodes 0 and 2 but not in node 1 between them
        td = TreeDecomposition(
            [frozenset({0, 1, 2}), frozenset({2}), frozenset({1, 2, 3})], [None, 0, 1], 0)
        bad = validate_td(self.g, td)
        assert bad.condition == "iii"
        v, t1, t2, gap = bad.witness
        assert v == 1 and {t1, t2} == {0, 2} and gap == 1
        assert "vertex 1" in str(bad)

    def test_structure(self):
        td = TreeDecomposition([frozenset({0, 1, 2, 3}), frozenset()], [None, None], 0)
        assert validate_td(self.g, td).condition == "structure"


class TestNice:
    def test_example(self):
        g = primal_graph(parse_program(EXAMPLE1))
        ntd = make_nice(decompose(g))
        assert ntd.width == 2 and validate_td(g, ntd) is None and check_nice(ntd) is None

    def test_single_bag(self):
        td = TreeDecomposition([frozenset({0, 1})], [None], 0)
        ntd = make_nice(td)
        # root forgets down to the empty bag; leaf introduces 0 then 1
        path, t = [], ntd.root
        while True:
            path.append((ntd.kind[t], ntd.special[t], ntd.bags[t]))
            if not ntd.children[t]:
                break
            (t,) = ntd.children[t]
        assert path[-1] == (LEAF, None, frozenset())
        assert [k for k, _, _ in path] == [FORGET, FORGET, INTRODUCE, INTRODUCE, LEAF]
        assert ntd.bags[ntd.root] == frozenset()

    def test_many_children_become_binary_joins(self):
        star = TreeDecomposition([frozenset({0})] + [frozenset({0, i}) for i in range(1, 6)],
                                 [None, 0, 0, 0, 0, 0], 0)
        ntd = make_nice(star)
        assert check_nice(ntd) is None
        assert all(len(ntd.children[t]) == 2 for t in range(ntd.num_nodes) if ntd.kind[t] == JOIN)

    def test_check_nice_reports_problems(self):
        td = TreeDecomposition([frozenset({0})], [None], 0)
        ntd = make_nice(td)
        ntd.kind[ntd.root] = JOIN
        assert "not a well-formed join" in check_nice(ntd)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_graphs(self, seed):
        rng = random.Random(seed)
        g = random_graph(rng)
        td = decompose(g, rng.choice(("min-fill", "min-degree")), rng.randint(0, 3))
        assert validate_td(g, td) is None
        ntd = make_nice(td)
        assert validate_td(g, ntd) is None and check_nice(ntd) is None
        assert ntd.width == td.width
        assert all(not ntd.bags[t] for t in range(ntd.num_nodes) if ntd.kind[t] == LEAF)
        # linear size: every node is charged to a vertex or an original node
        assert ntd.num_nodes <= 4 * (g.n + td.num_nodes) * (td.width + 2)


def test_bag_program_example():
    p = parse_program(EXAMPLE1)

    def shown(bag):
        return sorted(p.rule_str(r) for r in bag_program(p, p.interp(bag)))

    assert shown("abd") == ["a :- d.", "b :- a.", "b :- d."]
    assert shown("bcd") == ["b :- d.", "c :- b.", "d :- b, c."]
    assert shown("") == []
    q = parse_program(":- . a.")
    assert len(bag_program(q, ())) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_every_rule_lies_in_some_bag(seed):
    p = random_program(random.Random(seed), 8, 10)
    td = decompose(primal_graph(p))
    covered = set().union(*bag_rule_indices(p, td))
    assert covered == set(range(len(p.rules)))
    for t, idx in enumerate(bag_rule_indices(p, td)):
        assert idx == [i for i, r in enumerate(p.rules) if r.atoms <= td.bags[t]]


class TestPace:
    def test_round_trip(self):
        g = primal_graph(parse_program(EXAMPLE1))
        td = decompose(g)
        text = write_td(td, g.n)
        assert text.startswith(f"s td {td.num_nodes} 3 7\n")
        back, n = read_td(text)
        assert n == 7 and validate_td(g, back) is None
        assert sorted(back.bags, key=sorted) == sorted(td.bags, key=sorted)

    def test_comments_and_numbering(self):
        back, n = read_td("c hello\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n")
        assert n == 3 and back.bags == [frozenset({0, 1}), frozenset({1, 2})]
        assert back.parent == [None, 0]

    @pytest.mark.parametrize("text", [
        "b 1 1\n",
        "s td 2 1 2\nb 1 1\nb 3 2\n1 3\n",
        "s td 2 1 2\nb 1 1\nb 2 2\n",
        "s td 3 1 3\nb 1 1\nb 2 2\nb 3 3\n1 2\n2 1\n",
        "s td 1 1 1\nb x 1\n",
        "s tw 1 1 1\nb 1 1\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(TDFormatError):
            read_td(text)
