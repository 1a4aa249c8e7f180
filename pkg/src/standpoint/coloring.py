"""Colored formulae: every node carries an active or inactive mark.

A proper coloring marks the root active, propagates the parent's mark through
disjunctions and modalities, and at every active conjunction makes exactly one
conjunct active (the other conjunct, and everything below it, inactive).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .syntax import BINARY, LITERALS, MODAL, And, Formula, Neg, Or, _modality, children


@dataclass(frozen=True)
class ColoredFormula:
    """A formula node plus its mark; ``kids`` mirror ``children(node)``."""

    node: Formula
    active: bool
    kids: tuple = ()

    def __str__(self) -> str:
        return render_colored(self)


def erase(cphi: ColoredFormula) -> Formula:
    return cphi.node


def inactive(phi: Formula) -> ColoredFormula:
    """The unique coloring with every node inactive."""
    return ColoredFormula(phi, False, tuple(inactive(k) for k in children(phi)))


def _colorings(phi: Formula) -> Iterator[ColoredFormula]:
    if isinstance(phi, LITERALS):
        yield ColoredFormula(phi, True)
    elif isinstance(phi, Or):
        for left in _colorings(phi.left):
            for right in _colorings(phi.right):
                yield ColoredFormula(phi, True, (left, right))
    elif isinstance(phi, And):
        for left in _colorings(phi.left):
            yield ColoredFormula(phi, True, (left, inactive(phi.right)))
        for right in _colorings(phi.right):
            yield ColoredFormula(phi, True, (inactive(phi.left), right))
    else:
        for sub in _colorings(phi.sub):
            yield ColoredFormula(phi, True, (sub,))


def proper_colorings(phi: Formula) -> Iterator[ColoredFormula]:
    """Stream every proper coloring of ``phi`` exactly once.

    Depth-first; at each active conjunction the left-active alternatives come
    before the right-active ones.  The stream can be exponentially long, so
    callers that can stop early should not materialize it.
    """
    return _colorings(phi)


def first_coloring(phi: Formula) -> ColoredFormula:
    """The first element of :func:`proper_colorings` (always left-active)."""
    return next(_colorings(phi))


def count_proper_colorings(phi: Formula) -> int:
    """|prc(phi)| computed by recursion on the shape, without enumerating."""
    if isinstance(phi, LITERALS):
        return 1
    if isinstance(phi, Or):
        return count_proper_colorings(phi.left) * count_proper_colorings(phi.right)
    if isinstance(phi, And):
        return count_proper_colorings(phi.left) + count_proper_colorings(phi.right)
    return count_proper_colorings(phi.sub)


def _proper(c: ColoredFormula, mark: bool) -> bool:
    if c.active != mark or len(c.kids) != len(children(c.node)):
        return False
    if any(k.node != n for k, n in zip(c.kids, children(c.node))):
        return False
    if isinstance(c.node, And) and mark:
        left, right = c.kids
        if left.active == right.active:
            return False
        return _proper(left, left.active) and _proper(right, right.active)
    return all(_proper(k, mark) for k in c.kids)


def is_proper(cphi: ColoredFormula) -> bool:
    """True iff ``cphi`` is one of the proper colorings of its erasure."""
    return _proper(cphi, True)


def active_side(c: ColoredFormula) -> int:
    """Index (0 left, 1 right) of the active conjunct of an active conjunction."""
    assert isinstance(c.node, And) and c.active
    return 0 if c.kids[0].active else 1


def render_colored(c: ColoredFormula) -> str:
    """Debug form: every node gets ``^o`` (active) or ``^x`` (inactive)."""
    mark = "^o" if c.active else "^x"
    node = c.node
    if isinstance(node, LITERALS):
        return ("~" if isinstance(node, Neg) else "") + node.name + mark
    if isinstance(node, BINARY):
        op = " | " if isinstance(node, Or) else " & "
        return f"({render_colored(c.kids[0])}{op}{render_colored(c.kids[1])}){mark}"
    assert isinstance(node, MODAL)
    return f"({_modality(node)}{render_colored(c.kids[0])}){mark}"
