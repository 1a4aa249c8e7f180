"""Coloring-guided proof search, saturation, and counter-model extraction.

A single run of :func:`proof_search` builds one *thread*: a path through a
would-be derivation that follows exactly one premise at every (∧) step.
:func:`prove` runs enough threads to cover every branch and then either zips
them into a proof or turns a saturated thread into a counter-model.

Two ways of picking the premise at (∧) steps are supported:

``local`` (default)
    Each (∧) application takes its side from a *choice stream*.  Threads are
    enumerated depth first: left everywhere, then flip the last left choice
    to right, and so on.  Every choice sequence is a proper coloring of the
    conjunction occurrences the thread actually expands, and the threads are
    exactly the branches of one deterministic derivation.

``uniform``
    Each thread follows one proper coloring of the goal, read off the marks
    of the conjunction being expanded.  When the same conjunction is expanded
    in several components every expansion takes the same side, which can
    close every thread of an invalid goal; zipping then fails loudly instead
    of producing a bogus proof.

Membership tests ("φ ∉ Σ") compare erased formulae.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .coloring import ColoredFormula, active_side, first_coloring, proper_colorings
from .errors import InvariantViolation, ResourceExhausted, StandpointError
from .semantics import StandpointModel, make_model
from .sequent import NestedSequent, SharpeningClosure, initial_sequent, plain, sharpening_closure
from .syntax import UNIVERSAL, And, Atom, Box, Dia, Neg, Or, SequentInput, formula_size, iter_nodes
from . import tags

DEFAULT_MAX_COLORINGS = 1 << 20
MODES = ("local", "uniform")


@dataclass
class SearchStats:
    recursive_calls: int = 0
    max_components: int = 1
    max_sequent_size: int = 1

    def observe(self, seq: NestedSequent) -> None:
        self.max_components = max(self.max_components, len(seq))
        self.max_sequent_size = max(self.max_sequent_size, seq.size())


@dataclass(frozen=True)
class Step:
    """``sequent`` and the rule applied to it (bottom-up) to reach the next step.

    ``principal`` is ``(component label, item index)``; ``target`` is the label
    of the component that receives a formula or the new nesting; ``side`` is
    0/1 for (∧).  The last step of a closed thread carries ``(id)``; the last
    step of a saturated thread carries no rule.
    """

    sequent: NestedSequent
    rule: str | None = None
    principal: tuple[int, int] | None = None
    target: int | None = None
    side: int | None = None


@dataclass(frozen=True)
class Thread:
    steps: tuple[Step, ...]
    outcome: str  # "closed" | "saturated"
    coloring: ColoredFormula | None = None
    choices: tuple[int, ...] = ()
    stats: SearchStats = field(default_factory=SearchStats, compare=False)

    @property
    def closed(self) -> bool:
        return self.outcome == "closed"

    @property
    def final(self) -> NestedSequent:
        return self.steps[-1].sequent

    @property
    def rules(self) -> list[str]:
        return [s.rule for s in self.steps if s.rule is not None]


@dataclass(frozen=True)
class Valid:
    proof: object  # DerivationTree; typed loosely to avoid an import cycle
    threads: tuple[Thread, ...]
    stats: dict

    @property
    def valid(self) -> bool:
        return True


@dataclass(frozen=True)
class Invalid:
    model: StandpointModel
    witness_thread: Thread
    stats: dict
    falsified_at: str = "pi0"

    @property
    def valid(self) -> bool:
        return False


Verdict = Valid | Invalid


# ---------------------------------------------------------------------------
# saturation


def is_saturated(seq: NestedSequent, closure: SharpeningClosure, standpoints: Sequence[str] | None = None,
                 serial: bool = True) -> bool:
    """All seven saturation conditions, checked component by component.

    ``standpoints`` defaults to the closure's standpoint set; the n_s
    condition is skipped when ``serial`` is false.
    """
    sets = seq.erased_sets
    nest_sps = [seq.standpoint(j) for j in range(len(seq))]
    for i in range(len(seq)):
        here = sets[i]
        for x in seq.items(i):
            if isinstance(x, ColoredFormula) and not x.active:
                continue
            phi = plain(x)
            match phi:
                case Atom(p):
                    if Neg(p) in here:
                        return False
                case Or(a, b):
                    if a not in here or b not in here:
                        return False
                case And(a, b):
                    if a not in here and b not in here:
                        return False
                case Dia(s, a):
                    if s == UNIVERSAL and a not in sets[0]:
                        return False
                    for j in range(1, len(seq)):
                        if closure.holds(nest_sps[j], s) and a not in sets[j]:
                            return False
                case Box(s, a):
                    if not any(nest_sps[j] == s and a in sets[j] for j in range(1, len(seq))):
                        return False
    if serial:
        present = set(nest_sps[1:])
        if any(s not in present for s in (standpoints or closure.standpoints)):
            return False
    return True


# ---------------------------------------------------------------------------
# the search


@dataclass(frozen=True)
class _Move:
    rule: str
    principal: tuple[int, int] | None
    target: int | None
    side: int | None
    premise: NestedSequent | None  # None for (id)


def _conjunct(x, side: int, mode: str):
    """The colored conjunct added by an (∧) step."""
    kid = x.kids[side]
    if mode == "uniform":
        return kid
    # the unchosen conjunct carries inactive marks; re-color it canonically
    return kid if kid.active else first_coloring(kid.node)


def _next_move(seq: NestedSequent, closure: SharpeningClosure, standpoints: Sequence[str],
               mode: str, choose, serial: bool) -> _Move | None:
    """The first firing guard, in priority order; within a guard the first
    principal in (component, insertion) order wins.

    Priorities: clash, (∨), (∧), ◇ into a nesting, ◇_* into the root, □,
    then n_s.  One pass over the sequent collects the best candidate.
    """
    sets = seq.erased_sets
    n = len(seq)
    best, rank = None, 6
    for i in range(n):
        here = sets[i]
        for k, x in enumerate(seq.items(i)):
            if not x.active:
                continue
            node = x.node
            t = type(node)
            if t is Atom:
                if Neg(node.name) in here:
                    return _Move(tags.ID, (seq.label(i), k), None, None, None)
            elif t is Or:
                if rank > 1 and not (node.left in here and node.right in here):
                    best, rank = (i, k, x, None), 1
            elif t is And:
                if rank > 2 and node.left not in here and node.right not in here:
                    best, rank = (i, k, x, None), 2
            elif t is Dia:
                if rank > 3:
                    for j in range(1, n):
                        if closure.holds(seq.standpoint(j), node.standpoint) and node.sub not in sets[j]:
                            best, rank = (i, k, x, j), 3
                            break
                if rank > 4 and node.standpoint == UNIVERSAL and node.sub not in sets[0]:
                    best, rank = (i, k, x, 0), 4
            elif t is Box:
                if rank > 5 and not any(seq.standpoint(j) == node.standpoint and node.sub in sets[j]
                                        for j in range(1, n)):
                    best, rank = (i, k, x, None), 5
    if best is not None:
        i, k, x, j = best
        principal = (seq.label(i), k)
        if rank == 1:
            return _Move(tags.OR, principal, seq.label(i), None, seq.with_items(i, x.kids))
        if rank == 2:
            side = active_side(x) if mode == "uniform" else choose()
            return _Move(tags.AND, principal, seq.label(i), side, seq.with_items(i, (_conjunct(x, side, mode),)))
        if rank == 3:
            s = x.node.standpoint
            rule = tags.dia2(s) if j == i else tags.dia1(s)
            return _Move(rule, principal, seq.label(j), None, seq.with_items(j, x.kids))
        if rank == 4:
            return _Move(tags.DIA_STAR, principal, 0, None, seq.with_items(0, x.kids))
        premise = seq.with_nesting(x.node.standpoint, x.kids)
        return _Move(tags.box(x.node.standpoint), principal, premise.label(n), None, premise)
    # seriality: one nesting per standpoint, in vocabulary order
    if serial:
        present = {seq.standpoint(j) for j in range(1, n)}
        for s in standpoints:
            if s not in present:
                premise = seq.with_nesting(s)
                return _Move(tags.nec(s), None, premise.label(n), None, premise)
    return None


def search_bounds(inp: SequentInput) -> tuple[int, int]:
    """``(max rule applications, max components)`` for one thread on ``inp``."""
    size = formula_size(inp.goal)
    k = 1 + len(inp.vocabulary.standpoints) + size
    return size * k, k


def proof_search(
    start: NestedSequent,
    closure: SharpeningClosure,
    stats: SearchStats | None = None,
    *,
    standpoints: Sequence[str] | None = None,
    mode: str = "local",
    choices: Sequence[int] = (),
    serial: bool = True,
    bounds: tuple[int, int] | None = None,
) -> Thread:
    """Run the search from ``start`` until a clash or saturation.

    In ``local`` mode the k-th (∧) application takes side ``choices[k]``
    (left once the stream is exhausted); the sides actually taken are
    recorded in ``Thread.choices``.  ``bounds`` are hard limits on rule
    applications and components; exceeding them is an internal error.
    """
    if mode not in MODES:
        raise ValueError(f"unknown search mode {mode!r}")
    stats = stats if stats is not None else SearchStats()
    standpoints = tuple(standpoints if standpoints is not None else closure.standpoints)
    taken: list[int] = []

    def choose() -> int:
        side = choices[len(taken)] if len(taken) < len(choices) else 0
        taken.append(side)
        return side

    steps: list[Step] = []
    seq = start
    stats.observe(seq)
    while True:
        move = _next_move(seq, closure, standpoints, mode, choose, serial)
        if move is None:
            if not is_saturated(seq, closure, standpoints, serial):
                raise InvariantViolation("no rule applies but the sequent is not saturated")
            steps.append(Step(seq))
            outcome = "saturated"
            break
        if mode == "uniform" and move.side is not None:
            taken.append(move.side)
        steps.append(Step(seq, move.rule, move.principal, move.target, move.side))
        if move.premise is None:
            outcome = "closed"
            break
        seq = move.premise
        stats.recursive_calls += 1
        stats.observe(seq)
        if bounds is not None:
            max_calls, max_components = bounds
            if stats.recursive_calls > max_calls or len(seq) > max_components:
                raise InvariantViolation(
                    f"search exceeded its bound: {stats.recursive_calls} calls (limit {max_calls}), "
                    f"{len(seq)} components (limit {max_components})"
                )
    coloring = start.root[0] if mode == "uniform" and start.root else None
    return Thread(tuple(steps), outcome, coloring, tuple(taken), stats)


def _local_threads(start, closure, standpoints, serial, bounds, limit) -> Iterator[Thread]:
    """Depth-first over choice streams: every branch of the derivation once."""
    choices: list[int] = []
    runs = 0
    while True:
        runs += 1
        if runs > limit:
            raise ResourceExhausted(f"more than {limit} threads needed")
        t = proof_search(start, closure, SearchStats(), standpoints=standpoints, mode="local",
                         choices=choices, serial=serial, bounds=bounds)
        yield t
        taken = list(t.choices)
        while taken and taken[-1] == 1:
            taken.pop()
        if not taken:
            return
        taken[-1] = 1
        choices = taken


def _uniform_threads(inp, closure, standpoints, serial, bounds, limit) -> Iterator[Thread]:
    for n, coloring in enumerate(proper_colorings(inp.goal), 1):
        if n > limit:
            raise ResourceExhausted(f"more than {limit} proper colorings")
        start = initial_sequent(inp, coloring)
        yield proof_search(start, closure, SearchStats(), standpoints=standpoints, mode="uniform",
                           serial=serial, bounds=bounds)


def prove(
    inp: SequentInput,
    *,
    mode: str = "local",
    serial: bool = True,
    max_colorings: int = DEFAULT_MAX_COLORINGS,
    check: bool = True,
) -> Verdict:
    """Decide ``inp`` (assumed normalized) and return a certified verdict.

    The first saturated thread yields :class:`Invalid`; if every thread
    closes, the threads are zipped into a derivation.  With ``check`` the
    certificate is verified before it is returned.
    """
    # imported here: proof depends on search for the Thread type
    from .proof import check_proof, zip_threads
    from .semantics import check_countermodel

    closure = sharpening_closure(inp.gamma, inp.vocabulary)
    standpoints = inp.vocabulary.standpoints
    bounds = search_bounds(inp)
    if mode == "local":
        stream = _local_threads(initial_sequent(inp, first_coloring(inp.goal)), closure, standpoints,
                                serial, bounds, max_colorings)
    elif mode == "uniform":
        stream = _uniform_threads(inp, closure, standpoints, serial, bounds, max_colorings)
    else:
        raise ValueError(f"unknown search mode {mode!r}")

    from .coloring import count_proper_colorings

    threads: list[Thread] = []
    for t in stream:
        threads.append(t)
        if not t.closed:
            model = extract_countermodel(t.final, closure, inp.vocabulary.propositions, serial=serial)
            stats = _stats(inp, threads, bounds, count_proper_colorings(inp.goal))
            if check and not (model.is_valid_model(serial) and check_countermodel(model, t.final, "pi0")):
                raise InvariantViolation("extracted model does not falsify the saturated sequent")
            return Invalid(model, t, stats)
    proof = zip_threads(threads)
    if check:
        ok, why = check_proof(proof, closure, goal=initial_sequent(inp), serial=serial, explain=True)
        if not ok:
            raise InvariantViolation(f"zipped derivation rejected: {why}")
    return Valid(proof, tuple(threads), _stats(inp, threads, bounds, count_proper_colorings(inp.goal)))


def _stats(inp, threads, bounds, colorings) -> dict:
    return {
        "colorings": colorings,
        "threads_run": len(threads),
        "recursive_calls_max": max(t.stats.recursive_calls for t in threads),
        "bound": bounds[0],
        "max_components": max(t.stats.max_components for t in threads),
        "component_bound": bounds[1],
    }


def stats_json(verdict: Verdict) -> str:
    return json.dumps(verdict.stats, sort_keys=True)


# ---------------------------------------------------------------------------
# counter-models


def extract_countermodel(final: NestedSequent, closure: SharpeningClosure, propositions: Sequence[str] = (),
                         serial: bool = True) -> StandpointModel:
    """Read a model off a saturated, clash-free sequent.

    One precisification per component (``pi<label>``); ``sigma(s)`` collects
    every nesting whose standpoint is below ``s`` in the closure; ``delta(p)``
    is every component that does not contain the atom ``p``.
    """
    if not is_saturated(final, closure, serial=serial):
        raise StandpointError("counter-models are only read off saturated sequents")
    names = [f"pi{final.label(i)}" for i in range(len(final))]
    sigma = {
        s: {names[j] for j in range(1, len(final)) if closure.holds(final.standpoint(j), s)}
        for s in closure.standpoints
        if s != UNIVERSAL
    }
    props = list(propositions)
    if not props:
        props = sorted({node.name for i in range(len(final)) for x in final.items(i)
                        for node in iter_nodes(plain(x)) if isinstance(node, (Atom, Neg))})
    sets = final.erased_sets
    delta = {p: {names[i] for i in range(len(final)) if Atom(p) not in sets[i]} for p in props}
    return make_model(names, sigma, delta)
