import pytest
from hypothesis import given, settings

from gen import random_inputs, small_inputs
from standpoint.errors import ModelError, OracleLimitError
from standpoint.semantics import (
    StandpointModel,
    check_countermodel,
    enumerate_models,
    eval_implication,
    evaluate,
    find_countermodel,
    holds_gamma,
    interpret,
    make_model,
    oracle_bound,
    oracle_validity,
    oracle_validity_naive,
)
from standpoint.sequent import NestedSequent, Nesting
from standpoint.syntax import (
    BOTTOM,
    TOP,
    UNIVERSAL,
    Atom,
    Box,
    Dia,
    Neg,
    Or,
    SequentInput,
    SharpeningStatement,
    negate_nnf,
    parse_implication,
)

p = Atom("p")
CEX_TEXT = "s <= s' |- [s']p | <s>~p"
PI = ["pi0", "pi1", "pi2", "pi3"]


def _literal_example_model():
    return make_model(PI, {"s": {"pi2"}, "s'": {"pi1"}}, {"p": {"pi0", "pi2", "pi3"}})


def test_literal_example_model_violates_the_antecedent():
    # read literally, sigma(s) is not contained in sigma(s')
    m = _literal_example_model()
    inp = parse_implication(CEX_TEXT)
    assert not holds_gamma(m, inp.gamma)
    assert eval_implication(m, inp)
    assert not evaluate(m, "pi0", inp.goal)


def test_corrected_example_model_falsifies_at_pi0():
    m = make_model(PI, {"s": {"pi2"}, "s'": {"pi1", "pi2"}}, {"p": {"pi0", "pi2", "pi3"}})
    inp = parse_implication(CEX_TEXT)
    assert holds_gamma(m, inp.gamma)
    assert check_countermodel(m, inp, at="pi0")
    assert not eval_implication(m, inp)


def test_evaluate_connectives():
    m = make_model(["a", "b"], {"s": {"b"}}, {"p": {"a"}})
    assert evaluate(m, "a", p) and not evaluate(m, "b", p)
    assert evaluate(m, "b", Neg("p"))
    assert evaluate(m, "b", Dia(UNIVERSAL, p))
    assert not evaluate(m, "a", Box(UNIVERSAL, p))
    assert evaluate(m, "a", Box("s", Neg("p")))
    assert not evaluate(m, "a", Dia("s", p))
    assert not evaluate(m, "a", BOTTOM) and evaluate(m, "a", TOP)


def test_model_validation():
    with pytest.raises(ModelError):
        make_model(["a"], {"s": set()}, {}).validate()
    make_model(["a"], {"s": set()}, {}).validate(serial=False)
    with pytest.raises(ModelError):
        StandpointModel(("a", "b"), {UNIVERSAL: frozenset({"a"})}, {}).validate()
    with pytest.raises(ModelError):
        make_model(["a"], {"s": {"z"}}, {}).validate()
    with pytest.raises(ModelError):
        make_model([], {}, {}).validate()
    with pytest.raises(ModelError):
        evaluate(make_model(["a"], {}, {}), "a", Box("s", p))


def test_json_round_trip():
    m = _literal_example_model()
    data = m.to_json("pi0")
    assert data["falsified_at"] == "pi0"
    assert data["sigma"]["s'"] == ["pi1"]
    assert StandpointModel.from_json(data) == m


def test_interpret_reads_nestings_as_boxes():
    seq = NestedSequent(frozenset(), (p,), (Nesting("s", (Neg("p"),), 1), Nesting(UNIVERSAL, (), 2)))
    imp = interpret(seq)
    assert imp.matrix == Or(Or(p, Box("s", Neg("p"))), Box(UNIVERSAL, BOTTOM))
    m = make_model(["a", "b"], {"s": {"b"}}, {"p": {"b"}})
    assert eval_implication(m, imp) is False
    assert check_countermodel(m, seq, at="a") and not check_countermodel(m, seq, at="b")


def test_oracle_examples():
    assert oracle_validity(parse_implication("|- p | ~p"))
    assert not oracle_validity(parse_implication("|- p"))
    assert oracle_validity(parse_implication("s' <= s |- <s><*>~p | [s']p"))
    assert oracle_validity(parse_implication("|- [s](p | (~p & ~p)) & <s>(q | ~q)"))
    assert not oracle_validity(parse_implication(CEX_TEXT))
    # seriality: [s]p -> <s>p needs sigma(s) non-empty
    d = parse_implication("|- <s>~p | <s>p")
    assert oracle_validity(d)
    assert not oracle_validity(d, serial=False)


def test_found_countermodel_is_smallest_and_checks():
    model, at = find_countermodel(parse_implication("|- p"))
    assert model.precisifications == ("pi0",) and at == "pi0"
    model, at = find_countermodel(parse_implication(CEX_TEXT))
    assert len(model.precisifications) == 2
    assert check_countermodel(model, parse_implication(CEX_TEXT), at=at)


def test_oracle_bound():
    assert oracle_bound(parse_implication(CEX_TEXT)) == 1 + 3 + 5


def test_oracle_ceiling():
    inp = parse_implication("|- <s>p | <t>q | <u>r | [*]p")
    with pytest.raises(OracleLimitError):
        oracle_validity(inp, ceiling=1 << 10)


def test_oracle_agrees_with_naive_enumeration():
    for inp in random_inputs(5, 40, max_size=4, max_sps=1, max_props=1, max_gamma=1):
        assert oracle_validity(inp, bound=3) == oracle_validity_naive(inp, 3), inp


@settings(max_examples=60, deadline=None)
@given(small_inputs(5))
def test_oracle_is_monotone_in_the_bound(inp):
    # more precisifications can only uncover more counter-models
    verdicts = [oracle_validity(inp, bound=b) for b in range(1, 5)]
    assert verdicts == sorted(verdicts, reverse=True)


@settings(max_examples=60, deadline=None)
@given(small_inputs(5))
def test_countermodels_found_by_the_oracle_check(inp):
    found = find_countermodel(inp)
    if found is not None:
        model, at = found
        model.validate()
        assert check_countermodel(model, inp, at=at)


@settings(max_examples=40, deadline=None)
@given(small_inputs(5))
def test_sequent_and_formula_readings_agree(inp):
    # a sequent with an empty nesting list means exactly its goal
    seq = NestedSequent(inp.gamma, (inp.goal,))
    for model in enumerate_models(["s", "t"], ["p", "q"], 2):
        assert eval_implication(model, interpret(seq)) == eval_implication(model, inp)


def test_negated_goal_validity_and_satisfiability():
    inp = parse_implication("|- <s>p & <s>~p")
    neg = SequentInput(inp.gamma, negate_nnf(inp.goal), inp.vocabulary)
    # <s>p & <s>~p is satisfiable, so its negation is not valid
    assert not oracle_validity(neg)
    assert not oracle_validity(inp)


def test_statement_semantics():
    m = make_model(["a", "b"], {"s": {"a"}, "t": {"a", "b"}}, {})
    assert holds_gamma(m, [SharpeningStatement("s", "t"), SharpeningStatement("t", UNIVERSAL)])
    assert not holds_gamma(m, [SharpeningStatement("t", "s")])
