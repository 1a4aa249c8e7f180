"""Depth-one nested sequents ``gamma |- S0, (s1)[S1]@pi1, ..., (sn)[Sn]@pin``.

Components hold either plain formulae (in derivations) or colored formulae
(during proof search); :func:`erase_sequent` maps the latter to the former.
The root component always has label 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable

from .coloring import ColoredFormula, render_colored
from .errors import ParseError, StandpointError
from .syntax import (
    UNIVERSAL,
    Parser,
    SequentInput,
    SharpeningStatement,
    Vocabulary,
    render_formula,
)

ROOT = 0


def plain(item) -> object:
    """The erased formula of a component item."""
    return item.node if isinstance(item, ColoredFormula) else item


@dataclass(frozen=True)
class Nesting:
    standpoint: str
    items: tuple
    label: int


@dataclass(frozen=True)
class NestedSequent:
    gamma: frozenset
    root: tuple
    nestings: tuple = ()

    def __post_init__(self):
        labels = [n.label for n in self.nestings]
        if len(set(labels)) != len(labels) or ROOT in labels:
            raise StandpointError(f"nesting labels must be distinct and non-zero: {labels}")

    # component access; index 0 is the root, index i >= 1 is nestings[i-1]
    def __len__(self) -> int:
        return 1 + len(self.nestings)

    def items(self, index: int) -> tuple:
        return self.root if index == 0 else self.nestings[index - 1].items

    def label(self, index: int) -> int:
        return ROOT if index == 0 else self.nestings[index - 1].label

    def standpoint(self, index: int) -> str | None:
        return None if index == 0 else self.nestings[index - 1].standpoint

    def index_of(self, label: int) -> int:
        return self._label_index[label]

    @cached_property
    def _label_index(self) -> dict[int, int]:
        return {self.label(i): i for i in range(len(self))}

    @cached_property
    def erased_sets(self) -> tuple[frozenset, ...]:
        """Per component, the set of erased formulae present."""
        return tuple(frozenset(plain(x) for x in self.items(i)) for i in range(len(self)))

    @property
    def labels(self) -> list[int]:
        return [self.label(i) for i in range(len(self))]

    def size(self) -> int:
        """Total number of formula occurrences over all components."""
        return sum(len(self.items(i)) for i in range(len(self)))

    def with_items(self, index: int, extra: Iterable) -> "NestedSequent":
        extra = tuple(extra)
        if index == 0:
            return replace(self, root=self.root + extra)
        nest = list(self.nestings)
        n = nest[index - 1]
        nest[index - 1] = Nesting(n.standpoint, n.items + extra, n.label)
        return replace(self, nestings=tuple(nest))

    def with_nesting(self, standpoint: str, items: Iterable = ()) -> "NestedSequent":
        return replace(self, nestings=self.nestings + (Nesting(standpoint, tuple(items), fresh_label(self)),))

    def erase(self) -> "NestedSequent":
        return erase_sequent(self)

    def __str__(self) -> str:
        return render_sequent(self)


def fresh_label(seq: NestedSequent) -> int:
    """One past the largest label in use; nestings are never removed, so
    labels are never recycled along a search history."""
    return max(seq.labels) + 1


def erase_sequent(seq: NestedSequent) -> NestedSequent:
    return NestedSequent(
        seq.gamma,
        tuple(plain(x) for x in seq.root),
        tuple(Nesting(n.standpoint, tuple(plain(x) for x in n.items), n.label) for n in seq.nestings),
    )


def initial_sequent(inp: SequentInput, colored_goal: ColoredFormula | None = None) -> NestedSequent:
    """``gamma |- goal`` with the goal (optionally colored) as the only formula."""
    if colored_goal is None:
        return NestedSequent(inp.gamma, (inp.goal,))
    if colored_goal.node != inp.goal:
        raise StandpointError("colored goal does not erase to the input goal")
    return NestedSequent(inp.gamma, (colored_goal,))


# ---------------------------------------------------------------------------
# sharpening closure


@dataclass(frozen=True)
class SharpeningClosure:
    """Reflexive-transitive closure of ``gamma`` with everything below ``*``."""

    standpoints: tuple[str, ...]
    relation: frozenset = field(repr=False)

    def holds(self, sharper: str, broader: str) -> bool:
        return sharper == broader or (sharper, broader) in self.relation

    def below(self, broader: str) -> set[str]:
        """All ``s`` with ``s <=* broader``."""
        return {s for s in self.standpoints if self.holds(s, broader)}


def sharpening_closure(gamma: Iterable[SharpeningStatement], vocabulary: Vocabulary) -> SharpeningClosure:
    gamma = list(gamma)
    names = list(vocabulary.proper_standpoints)
    for st in gamma:
        for n in (st.sharper, st.broader):
            if n not in names and n != UNIVERSAL:
                names.append(n)
    names.append(UNIVERSAL)
    rel = {(s, s) for s in names} | {(s, UNIVERSAL) for s in names}
    rel |= {(st.sharper, st.broader) for st in gamma}
    for k in names:
        for i in names:
            if (i, k) in rel:
                for j in names:
                    if (k, j) in rel:
                        rel.add((i, j))
    return SharpeningClosure(tuple(names), frozenset(rel))


# ---------------------------------------------------------------------------
# text form


def _render_items(items: tuple, debug: bool) -> str:
    def one(x) -> str:
        if isinstance(x, ColoredFormula):
            return render_colored(x) if debug else render_formula(x.node)
        return render_formula(x)

    return ", ".join(one(x) for x in items)


def render_sequent(seq: NestedSequent, debug: bool = False) -> str:
    """``gamma |- S0, (s)[S1]@pi1, ...``; with ``debug`` colored items show marks."""
    parts = []
    if seq.root:
        parts.append(_render_items(seq.root, debug))
    for n in seq.nestings:
        parts.append(f"({n.standpoint})[{_render_items(n.items, debug)}]@pi{n.label}")
    gamma = ", ".join(str(st) for st in sorted(seq.gamma))
    body = ", ".join(parts)
    return (f"{gamma} |-" if gamma else "|-") + (f" {body}" if body else "")


_LABEL = re.compile(r"pi(\d+)$")


def parse_sequent(text: str) -> NestedSequent:
    """Inverse of :func:`render_sequent` for uncolored sequents."""
    p = Parser(text)
    gamma = p.gamma()
    p.take("|-")
    root: list = []
    nestings: list[Nesting] = []

    def at_nesting() -> bool:
        return (
            p.tok.kind == "("
            and p.peek(1).kind in ("ident", "*")
            and p.peek(2).kind == ")"
            and p.peek(3).kind == "["
        )

    first = True
    while p.tok.kind != "eof":
        if not first:
            p.take(",")
        first = False
        if at_nesting():
            p.take("(")
            s = p.standpoint()
            p.take(")")
            p.take("[")
            items = []
            if p.tok.kind != "]":
                items.append(p.formula())
                while p.accept(","):
                    items.append(p.formula())
            p.take("]")
            p.take("@")
            tok = p.take("ident")
            m = _LABEL.match(tok.text)
            if not m:
                raise ParseError(f"bad label {tok.text!r}", tok.line, tok.column)
            nestings.append(Nesting(s, tuple(items), int(m.group(1))))
        else:
            if nestings:
                raise p.error("root formulae must precede nestings")
            root.append(p.formula())
    return NestedSequent(frozenset(gamma), tuple(root), tuple(nestings))
