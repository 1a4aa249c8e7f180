"""Standpoint models, evaluation, and a brute-force validity oracle.

The oracle is the ground truth the prover is tested against.  It never looks
at sequents or proofs: it enumerates finite models and evaluates.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ModelError, OracleLimitError
from .sequent import NestedSequent, erase_sequent
from .syntax import (
    RESERVED_PROP,
    UNIVERSAL,
    And,
    Atom,
    Box,
    Dia,
    Formula,
    Neg,
    Or,
    SequentInput,
    SharpeningStatement,
    big_or,
    formula_size,
    propositions_of,
    standpoints_of,
)

DEFAULT_ORACLE_CEILING = 1 << 22


@dataclass(frozen=True)
class StandpointModel:
    """``precisifications`` is ordered; ``sigma`` and ``delta`` map names to frozensets."""

    precisifications: tuple[str, ...]
    sigma: dict
    delta: dict

    def __hash__(self):
        return hash((self.precisifications, tuple(sorted(self.sigma.items())), tuple(sorted(self.delta.items()))))

    def validate(self, serial: bool = True) -> None:
        """Raise :class:`ModelError` unless sigma(*) = Pi and (if ``serial``) no sigma(s) is empty."""
        pis = set(self.precisifications)
        if not pis:
            raise ModelError("a model needs at least one precisification")
        if set(self.sigma.get(UNIVERSAL, ())) != pis:
            raise ModelError("sigma(*) must be the set of all precisifications")
        for s, members in self.sigma.items():
            if not set(members) <= pis:
                raise ModelError(f"sigma({s}) mentions unknown precisifications")
            if serial and not members:
                raise ModelError(f"sigma({s}) is empty")
        for p, members in self.delta.items():
            if not set(members) <= pis:
                raise ModelError(f"delta({p}) mentions unknown precisifications")

    def is_valid_model(self, serial: bool = True) -> bool:
        try:
            self.validate(serial)
        except ModelError:
            return False
        return True

    def sig(self, s: str) -> frozenset:
        if s == UNIVERSAL:
            return frozenset(self.precisifications)
        try:
            return self.sigma[s]
        except KeyError:
            raise ModelError(f"standpoint {s!r} is not interpreted") from None

    def val(self, p: str) -> frozenset:
        if p in self.delta:
            return self.delta[p]
        if p == RESERVED_PROP:
            return frozenset()
        raise ModelError(f"proposition {p!r} is not interpreted")

    def to_json(self, falsified_at: str | None = None) -> dict:
        out = {
            "precisifications": list(self.precisifications),
            "sigma": {s: sorted(m, key=self.precisifications.index) for s, m in sorted(self.sigma.items())},
            "delta": {p: sorted(m, key=self.precisifications.index) for p, m in sorted(self.delta.items())},
        }
        if falsified_at is not None:
            out["falsified_at"] = falsified_at
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "StandpointModel":
        if isinstance(data, str):
            data = json.loads(data)
        pis = tuple(data["precisifications"])
        sigma = {s: frozenset(m) for s, m in data["sigma"].items()}
        sigma.setdefault(UNIVERSAL, frozenset(pis))
        delta = {p: frozenset(m) for p, m in data["delta"].items()}
        return cls(pis, sigma, delta)


def make_model(pis: Iterable[str], sigma: dict, delta: dict) -> StandpointModel:
    pis = tuple(pis)
    sig = {s: frozenset(m) for s, m in sigma.items()}
    sig[UNIVERSAL] = frozenset(pis)
    return StandpointModel(pis, sig, {p: frozenset(m) for p, m in delta.items()})


def evaluate(model: StandpointModel, pi: str, phi: Formula) -> bool:
    """Truth of ``phi`` at precisification ``pi``."""
    match phi:
        case Atom(p):
            return pi in model.val(p)
        case Neg(p):
            return pi not in model.val(p)
        case And(a, b):
            return evaluate(model, pi, a) and evaluate(model, pi, b)
        case Or(a, b):
            return evaluate(model, pi, a) or evaluate(model, pi, b)
        case Dia(s, a):
            return any(evaluate(model, q, a) for q in model.sig(s))
        case Box(s, a):
            return all(evaluate(model, q, a) for q in model.sig(s))
    raise TypeError(f"not a formula: {phi!r}")


# ``eval`` in the interface; kept as an alias so the builtin is not shadowed
eval_formula = evaluate


def holds_gamma(model: StandpointModel, gamma: Iterable[SharpeningStatement]) -> bool:
    # sharpening statements do not depend on the precisification
    return all(model.sig(st.sharper) <= model.sig(st.broader) for st in gamma)


def eval_implication(model: StandpointModel, inp) -> bool:
    """``M |= /\\gamma -> phi``: true at every precisification.

    Accepts a :class:`SequentInput` or a :class:`StandpointImplication`.
    """
    matrix = inp.matrix if isinstance(inp, StandpointImplication) else inp.goal
    if not holds_gamma(model, inp.gamma):
        return True
    return all(evaluate(model, pi, matrix) for pi in model.precisifications)


@dataclass(frozen=True)
class StandpointImplication:
    gamma: frozenset
    matrix: Formula


def interpret(seq: NestedSequent) -> StandpointImplication:
    """Formula reading of a nested sequent: ``\\/S0 | [s1]\\/S1 | ... | [sn]\\/Sn``."""
    seq = erase_sequent(seq)
    parts = list(seq.root) + [Box(n.standpoint, big_or(n.items)) for n in seq.nestings]
    return StandpointImplication(seq.gamma, big_or(parts))


def falsifying_points(model: StandpointModel, seq: NestedSequent, among: Iterable[str] | None = None) -> list[str]:
    imp = interpret(seq)
    if not holds_gamma(model, imp.gamma):
        return []
    among = model.precisifications if among is None else among
    return [pi for pi in among if not evaluate(model, pi, imp.matrix)]


def check_countermodel(model: StandpointModel, seq: NestedSequent | SequentInput, at: str | None = None) -> bool:
    """True iff ``model`` falsifies the sequent at some precisification (or at ``at``)."""
    if isinstance(seq, SequentInput):
        seq = NestedSequent(seq.gamma, (seq.goal,))
    if at is not None and at not in model.precisifications:
        return False
    return bool(falsifying_points(model, seq, None if at is None else [at]))


# ---------------------------------------------------------------------------
# oracle


def oracle_bound(inp: SequentInput) -> int:
    """``1 + |S| + |phi|``: the size of the largest extracted counter-model."""
    return 1 + len(inp.vocabulary.standpoints) + formula_size(inp.goal)


def _names(inp: SequentInput) -> tuple[list[str], list[str]]:
    sps = [s for s in inp.vocabulary.proper_standpoints]
    for st in inp.gamma:
        for n in (st.sharper, st.broader):
            if n != UNIVERSAL and n not in sps:
                sps.append(n)
    for n in standpoints_of(inp.goal):
        if n != UNIVERSAL and n not in sps:
            sps.append(n)
    props = sorted(set(inp.vocabulary.propositions) | set(propositions_of(inp.goal)))
    return sps, props


class _TypeSpace:
    """Models up to isomorphism.

    Truth at a precisification depends only on its *type* (which sigma(s)
    and delta(p) it belongs to) and on the set of types present, because
    modalities quantify over sets.  So a model is a non-empty set ``W`` of
    types, encoded as a bitmask over all ``2**(|S|+|P|)`` types, and a model
    with ``|Pi| <= bound`` exists iff some ``W`` with ``|W| <= bound`` does.
    """

    def __init__(self, sps: list[str], props: list[str], ceiling: int):
        self.sps, self.props = sps, props
        width = len(sps) + len(props)
        self.n_types = 1 << width
        if self.n_types > 62 or (1 << self.n_types) > ceiling:
            raise OracleLimitError(
                f"oracle space of 2**{self.n_types} type sets exceeds the ceiling {ceiling}"
            )
        self.bit = {name: i for i, name in enumerate(sps + props)}
        self.full = (1 << self.n_types) - 1
        self.member = {
            name: sum(1 << t for t in range(self.n_types) if t >> i & 1) for name, i in self.bit.items()
        }

    def sigma_mask(self, s: str) -> int:
        return self.full if s == UNIVERSAL else self.member[s]

    def prop_mask(self, p: str) -> int:
        return self.member.get(p, 0)


def _eval_sets(space: _TypeSpace, W: np.ndarray, phi: Formula, cache: dict) -> np.ndarray:
    """Bitmask (per type set in ``W``) of the types at which ``phi`` is true."""
    if phi in cache:
        return cache[phi]
    zero = np.zeros_like(W)
    match phi:
        case Atom(p):
            out = W & np.uint64(space.prop_mask(p))
        case Neg(p):
            out = W & ~np.uint64(space.prop_mask(p))
        case And(a, b):
            out = _eval_sets(space, W, a, cache) & _eval_sets(space, W, b, cache)
        case Or(a, b):
            out = _eval_sets(space, W, a, cache) | _eval_sets(space, W, b, cache)
        case Dia(s, a):
            hit = (_eval_sets(space, W, a, cache) & np.uint64(space.sigma_mask(s))) != 0
            out = np.where(hit, W, zero)
        case Box(s, a):
            miss = (W & np.uint64(space.sigma_mask(s)) & ~_eval_sets(space, W, a, cache)) != 0
            out = np.where(miss, zero, W)
        case _:
            raise TypeError(f"not a formula: {phi!r}")
    cache[phi] = out
    return out


def find_countermodel(
    inp: SequentInput,
    bound: int | None = None,
    serial: bool = True,
    ceiling: int = DEFAULT_ORACLE_CEILING,
) -> tuple[StandpointModel, str] | None:
    """Smallest model with at most ``bound`` precisifications falsifying ``inp``.

    Returns ``(model, falsifying precisification)`` or ``None``.  Ties on size
    are broken by the numeric encoding of the type set, so the answer is
    deterministic.
    """
    bound = oracle_bound(inp) if bound is None else bound
    if bound < 1:
        raise ValueError("bound must be positive")
    sps, props = _names(inp)
    space = _TypeSpace(sps, props, ceiling)
    W = np.arange(1, 1 << space.n_types, dtype=np.uint64)
    size = np.bitwise_count(W)
    ok = size <= bound
    if serial:
        for s in sps:
            ok &= (W & np.uint64(space.member[s])) != 0
    for st in inp.gamma:
        lo, hi = space.sigma_mask(st.sharper), space.sigma_mask(st.broader)
        ok &= (W & np.uint64(lo) & ~np.uint64(hi)) == 0
    truth = _eval_sets(space, W, inp.goal, {})
    bad = ok & ((W & ~truth) != 0)
    idx = np.flatnonzero(bad)
    if idx.size == 0:
        return None
    best = idx[np.lexsort((W[idx], size[idx]))[0]]
    return _model_from_types(space, int(W[best]), int(W[best] & ~truth[best]))


def _model_from_types(space: _TypeSpace, w: int, false_at: int) -> tuple[StandpointModel, str]:
    types = [t for t in range(space.n_types) if w >> t & 1]
    first = next(t for t in types if false_at >> t & 1)
    types.remove(first)
    types.insert(0, first)
    names = [f"pi{i}" for i in range(len(types))]
    sigma = {s: {names[i] for i, t in enumerate(types) if t >> space.bit[s] & 1} for s in space.sps}
    delta = {p: {names[i] for i, t in enumerate(types) if t >> space.bit[p] & 1} for p in space.props}
    return make_model(names, sigma, delta), names[0]


def oracle_validity(
    inp: SequentInput,
    bound: int | None = None,
    serial: bool = True,
    ceiling: int = DEFAULT_ORACLE_CEILING,
) -> bool:
    """True iff no model with at most ``bound`` precisifications falsifies ``inp``.

    With the default bound ``1 + |S| + |phi|`` this decides validity.  With
    ``serial=False`` standpoints may be empty.
    """
    return find_countermodel(inp, bound, serial, ceiling) is None


def enumerate_models(
    sps: list[str], props: list[str], size: int, serial: bool = True
) -> Iterator[StandpointModel]:
    """Every model over exactly ``size`` named precisifications."""
    names = [f"pi{i}" for i in range(size)]
    subsets = [frozenset(c) for r in range(size + 1) for c in itertools.combinations(names, r)]
    sig_choices = [x for x in subsets if x] if serial else subsets
    for sig in itertools.product(sig_choices, repeat=len(sps)):
        for dl in itertools.product(subsets, repeat=len(props)):
            yield make_model(names, dict(zip(sps, sig)), dict(zip(props, dl)))


def oracle_validity_naive(inp: SequentInput, bound: int, serial: bool = True) -> bool:
    """Literal enumeration of every model with ``1 <= |Pi| <= bound``.

    Exponentially slower than :func:`oracle_validity`; only for cross-checks
    on tiny vocabularies.
    """
    sps, props = _names(inp)
    for size in range(1, bound + 1):
        for model in enumerate_models(sps, props, size, serial):
            if not eval_implication(model, inp):
                return False
    return True
