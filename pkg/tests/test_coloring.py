import itertools

from hypothesis import given, settings

from gen import formulas
from standpoint.coloring import (
    ColoredFormula,
    active_side,
    count_proper_colorings,
    erase,
    first_coloring,
    inactive,
    is_proper,
    proper_colorings,
    render_colored,
)
from standpoint.syntax import And, Atom, Neg, children, iter_nodes, node_count, parse_formula

TWO_CONJ = parse_formula("[s](p | (~p & ~p)) & <s>(q | ~q)")


def _from_marks(phi, marks):
    """Build a coloring from a pre-order list of marks."""
    it = iter(marks)

    def go(node):
        mark = next(it)
        return ColoredFormula(node, mark, tuple(go(k) for k in children(node)))

    return go(phi)


def _brute_count(phi):
    # every mark assignment, filtered by is_proper
    n = node_count(phi)
    return sum(is_proper(_from_marks(phi, m)) for m in itertools.product((True, False), repeat=n))


def test_two_conjunction_example_has_three_colorings_in_order():
    cs = list(proper_colorings(TWO_CONJ))
    assert len(cs) == 3 == count_proper_colorings(TWO_CONJ)
    assert [active_side(c) for c in cs] == [0, 0, 1]
    # the two left-active ones differ at the inner conjunction
    inner = [c.kids[0].kids[0].kids[1] for c in cs[:2]]
    assert [active_side(x) for x in inner] == [0, 1]
    assert first_coloring(TWO_CONJ) == cs[0]


def test_nested_conjunction_count():
    assert count_proper_colorings(parse_formula("(p & q) & r")) == 3
    assert count_proper_colorings(parse_formula("(p & q) | (p & r)")) == 4
    assert count_proper_colorings(parse_formula("p | q")) == 1


def test_is_proper_rejects_bad_marks():
    phi = parse_formula("p & q")
    assert not is_proper(inactive(phi))
    both = ColoredFormula(phi, True, (ColoredFormula(Atom("p"), True), ColoredFormula(Atom("q"), True)))
    assert not is_proper(both)
    wrong_shape = ColoredFormula(phi, True, (ColoredFormula(Atom("p"), True),))
    assert not is_proper(wrong_shape)
    wrong_node = ColoredFormula(phi, True, (ColoredFormula(Atom("p"), True), ColoredFormula(Neg("q"), False)))
    assert not is_proper(wrong_node)
    # an inactive conjunct with an active descendant is not proper
    deep = parse_formula("p & (q | r)")
    c = _from_marks(deep, [True, True, False, True, False])
    assert not is_proper(c)


def test_render_colored():
    c = first_coloring(parse_formula("<s>(p & ~q)"))
    assert render_colored(c) == "(<s>(p^o & ~q^x)^o)^o"


@settings(max_examples=200)
@given(formulas(max_leaves=6))
def test_colorings_are_proper_distinct_and_counted(phi):
    cs = list(proper_colorings(phi))
    assert all(is_proper(c) for c in cs)
    assert all(erase(c) == phi for c in cs)
    assert len(set(cs)) == len(cs)
    assert len(cs) == count_proper_colorings(phi)


@settings(max_examples=60, deadline=None)
@given(formulas(max_leaves=4))
def test_recursive_count_matches_brute_force(phi):
    if node_count(phi) <= 12:
        assert count_proper_colorings(phi) == _brute_count(phi)


@given(formulas(max_leaves=6))
def test_every_conjunct_is_active_somewhere(phi):
    # an And reachable through active nodes gets each side in some coloring
    cs = list(proper_colorings(phi))

    def sides(c, acc):
        if isinstance(c.node, And) and c.active:
            acc.add((id(c.node), active_side(c)))
        for k in c.kids:
            sides(k, acc)
        return acc

    seen = set()
    for c in cs:
        seen |= sides(c, set())
    ands = {id(n) for n in iter_nodes(phi) if isinstance(n, And)}
    for a in {x for x, _ in seen}:
        assert (a, 0) in seen and (a, 1) in seen
    assert {x for x, _ in seen} <= ands
