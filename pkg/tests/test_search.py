import pytest
from hypothesis import given, settings

from gen import random_inputs, small_inputs
from standpoint.coloring import first_coloring
from standpoint.errors import ResourceExhausted, StandpointError, ZipError
from standpoint.search import extract_countermodel, is_saturated, proof_search, prove, search_bounds
from standpoint.semantics import check_countermodel, interpret, oracle_validity
from standpoint.sequent import NestedSequent, Nesting, initial_sequent, sharpening_closure
from standpoint.syntax import (
    UNIVERSAL,
    Atom,
    Neg,
    SequentInput,
    formula_size,
    make_input,
    normalize_input,
    parse_implication,
)

p = Atom("p")
SHARPEN = "s' <= s |- <s><*>~p | [s']p"
TWO_CONJ = "|- [s](p | (~p & ~p)) & <s>(q | ~q)"
CEX = "s <= s' |- [s']p | <s>~p"


def _inp(text):
    return normalize_input(parse_implication(text))


def _closure(inp):
    return sharpening_closure(inp.gamma, inp.vocabulary)


def test_sharpening_example_thread():
    v = prove(_inp(SHARPEN))
    assert v.valid
    assert [t.rules for t in v.threads] == [["(∨)", "□_{s'}", "◇1_{s}", "◇2_{*}", "(id)"]]


def test_two_conjunction_threads():
    v = prove(_inp(TWO_CONJ))
    assert v.valid and v.stats["colorings"] == 3 and v.stats["threads_run"] == 3
    assert [t.rules for t in v.threads] == [
        ["(∧)", "□_{s}", "(∨)", "(∧)", "(id)"],
        ["(∧)", "□_{s}", "(∨)", "(∧)", "(id)"],
        ["(∧)", "n_{s}", "◇1_{s}", "(∨)", "(id)"],
    ]
    assert [t.choices for t in v.threads] == [(0, 0), (0, 1), (1,)]


def test_two_conjunction_uniform_mode_gives_the_same_threads():
    v = prove(_inp(TWO_CONJ), mode="uniform")
    assert [t.rules for t in v.threads] == [t.rules for t in prove(_inp(TWO_CONJ)).threads]
    assert all(t.coloring is not None for t in v.threads)


def test_countermodel_example():
    v = prove(_inp(CEX))
    assert not v.valid
    assert v.witness_thread.rules == ["(∨)", "□_{s'}", "n_{s}", "◇1_{s}", "n_{*}"]
    m = v.model
    assert m.precisifications == ("pi0", "pi1", "pi2", "pi3")
    assert m.sigma["s"] == {"pi2"} and m.sigma["s'"] == {"pi1", "pi2"}
    assert m.delta["p"] == {"pi0", "pi2", "pi3"}
    assert check_countermodel(m, _inp(CEX), at="pi0")


def test_atom_alone_saturates_after_universal_nesting():
    v = prove(_inp("|- p"))
    assert v.witness_thread.rules == ["n_{*}"]
    assert v.model.precisifications == ("pi0", "pi1")
    assert v.model.delta["p"] == {"pi1"}


def test_is_saturated_examples():
    inp = _inp("|- p")
    cl = _closure(inp)
    assert not is_saturated(initial_sequent(inp), cl)
    done = initial_sequent(inp).with_nesting(UNIVERSAL)
    assert is_saturated(done, cl)
    assert is_saturated(initial_sequent(inp), cl, serial=False)
    clash = NestedSequent(frozenset(), (p, Neg("p")), (Nesting(UNIVERSAL, (), 1),))
    assert not is_saturated(clash, cl)
    inp = _inp("|- p | q")
    assert not is_saturated(initial_sequent(inp).with_nesting(UNIVERSAL), _closure(inp))


def test_diamond_saturation_needs_the_formula_in_every_matching_nesting():
    inp = _inp("s <= t |- <t>p")
    cl = _closure(inp)
    base = NestedSequent(inp.gamma, (inp.goal,), (Nesting("s", (), 1), Nesting("t", (p,), 2), Nesting(UNIVERSAL, (), 3)))
    assert not is_saturated(base, cl)
    full = NestedSequent(inp.gamma, (inp.goal,), (Nesting("s", (p,), 1), Nesting("t", (p,), 2), Nesting(UNIVERSAL, (), 3)))
    assert is_saturated(full, cl)


def test_extract_requires_saturation():
    inp = _inp("|- p")
    with pytest.raises(StandpointError):
        extract_countermodel(initial_sequent(inp), _closure(inp))


def test_extract_reads_sigma_through_the_closure():
    inp = _inp("s <= t |- <s>p")
    seq = NestedSequent(inp.gamma, (inp.goal,), (Nesting("s", (p,), 1), Nesting("t", (), 2), Nesting(UNIVERSAL, (), 3)))
    cl = _closure(inp)
    m = extract_countermodel(seq, cl, ["p"])
    assert m.sigma["s"] == {"pi1"} and m.sigma["t"] == {"pi1", "pi2"}
    assert m.delta["p"] == {"pi0", "pi2", "pi3"}
    assert check_countermodel(m, seq, at="pi0")


def test_search_is_deterministic():
    for inp in random_inputs(3, 30):
        a, b = prove(inp), prove(inp)
        assert a.valid == b.valid and a.stats == b.stats
        if a.valid:
            assert a.proof == b.proof
        else:
            assert a.model == b.model


def test_search_bounds():
    inp = _inp(CEX)
    assert search_bounds(inp) == (5 * 9, 9)


def test_thread_limit():
    with pytest.raises(ResourceExhausted):
        prove(_inp(TWO_CONJ), max_colorings=2)


def test_unknown_mode():
    with pytest.raises(ValueError):
        prove(_inp("|- p"), mode="greedy")


def test_uniform_mode_misses_invalidity_and_fails_to_zip():
    # one coloring per thread forces the same side at every copy of p & q
    inp = _inp("|- <*>(p & q) | ~q | [s]~p")
    assert not oracle_validity(inp)
    assert not prove(inp).valid
    with pytest.raises(ZipError):
        prove(inp, mode="uniform")


@settings(max_examples=150, deadline=None)
@given(small_inputs(6))
def test_verdict_matches_oracle(inp):
    v = prove(inp)
    assert v.valid == oracle_validity(inp)
    calls, comps = search_bounds(inp)
    assert v.stats["recursive_calls_max"] <= calls and v.stats["max_components"] <= comps


@settings(max_examples=100, deadline=None)
@given(small_inputs(6))
def test_without_seriality_matches_the_non_serial_oracle(inp):
    v = prove(inp, serial=False)
    assert v.valid == oracle_validity(inp, serial=False)
    assert all("n_" not in r for t in getattr(v, "threads", ()) for r in t.rules)


@settings(max_examples=80, deadline=None)
@given(small_inputs(6))
def test_uniform_mode_is_never_wrong(inp):
    try:
        v = prove(inp, mode="uniform")
    except ZipError:
        return
    assert v.valid == oracle_validity(inp)


def _sequent_valid(seq, vocabulary):
    imp = interpret(seq)
    q = make_input(imp.gamma, imp.matrix)
    return oracle_validity(SequentInput(q.gamma, q.goal, q.vocabulary), bound=4)


def test_rules_preserve_validity_both_ways():
    # every step of every thread: conclusion valid iff premise valid, except
    # that (∧) only transfers validity from the conclusion to the premise
    count = 0
    for inp in random_inputs(21, 40, max_size=5, max_sps=1, max_props=1, max_gamma=1):
        cl = _closure(inp)
        t = proof_search(initial_sequent(inp, first_coloring(inp.goal)), cl)
        steps = t.steps
        for a, b in zip(steps, steps[1:]):
            va, vb = _sequent_valid(a.sequent, inp.vocabulary), _sequent_valid(b.sequent, inp.vocabulary)
            if va:
                assert vb, (a.rule, a.sequent)
            if a.rule != "(∧)" and vb:
                assert va, (a.rule, a.sequent)
            count += 1
    assert count > 40


def test_formula_size_and_calls_on_larger_inputs():
    for inp in random_inputs(8, 40, max_size=12, max_sps=3, max_props=3, max_gamma=3):
        v = prove(inp)
        calls, comps = search_bounds(inp)
        assert formula_size(inp.goal) <= 12
        assert v.stats["recursive_calls_max"] <= calls and v.stats["max_components"] <= comps
