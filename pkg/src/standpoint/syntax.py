"""Standpoint formulae in negation normal form, and the input front-end.

Formulae are immutable trees built from six node types::

    Atom("p")            p
    Neg("p")             ~p          (negation only on atoms)
    Or(a, b)             a | b
    And(a, b)            a & b
    Box("s", a)          [s]a
    Dia("s", a)          <s>a

The universal standpoint is spelled ``*``.  An input is a standpoint
implication ``s <= t, ... |- phi``: a set of sharpening statements and a goal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import ParseError

UNIVERSAL = "*"
# Proposition used to spell bottom/top; unreachable from the input grammar.
RESERVED_PROP = "_0"

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*")


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Neg:
    name: str


class _CachedHash:
    # compound formulae are hashed constantly during search; the recursive
    # dataclass hash is recomputed on every call, so memoize it per node
    __slots__ = ()

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = self.__dict__["_hash"] = hash((type(self).__name__,) + tuple(v for k, v in self.__dict__.items() if k != "_hash"))
            return h


@dataclass(frozen=True)
class Or(_CachedHash):
    left: "Formula"
    right: "Formula"
    __hash__ = _CachedHash.__hash__


@dataclass(frozen=True)
class And(_CachedHash):
    left: "Formula"
    right: "Formula"
    __hash__ = _CachedHash.__hash__


@dataclass(frozen=True)
class Box(_CachedHash):
    standpoint: str
    sub: "Formula"
    __hash__ = _CachedHash.__hash__


@dataclass(frozen=True)
class Dia(_CachedHash):
    standpoint: str
    sub: "Formula"
    __hash__ = _CachedHash.__hash__


Formula = Union[Atom, Neg, Or, And, Box, Dia]
LITERALS = (Atom, Neg)
BINARY = (Or, And)
MODAL = (Box, Dia)

BOTTOM = And(Atom(RESERVED_PROP), Neg(RESERVED_PROP))
TOP = Or(Atom(RESERVED_PROP), Neg(RESERVED_PROP))


def children(phi: Formula) -> tuple:
    if isinstance(phi, BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, MODAL):
        return (phi.sub,)
    return ()


def rebuild(phi: Formula, kids: tuple) -> Formula:
    """Same node type as ``phi`` with new children."""
    if isinstance(phi, BINARY):
        return type(phi)(*kids)
    if isinstance(phi, MODAL):
        return type(phi)(phi.standpoint, kids[0])
    return phi


def big_or(items: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is bottom."""
    result = None
    for item in items:
        result = item if result is None else Or(result, item)
    return BOTTOM if result is None else result


@dataclass(frozen=True, order=True)
class SharpeningStatement:
    """``sharper <= broader``: every precisification of ``sharper`` is one of ``broader``."""

    sharper: str
    broader: str

    def __str__(self) -> str:
        return f"{self.sharper} <= {self.broader}"


@dataclass(frozen=True)
class Vocabulary:
    propositions: tuple[str, ...]
    standpoints: tuple[str, ...]

    def __post_init__(self):
        if not self.propositions:
            raise ValueError("a vocabulary needs at least one proposition")
        if UNIVERSAL not in self.standpoints:
            raise ValueError("the universal standpoint must be declared")
        if self.standpoints[-1] != UNIVERSAL:
            rest = tuple(s for s in self.standpoints if s != UNIVERSAL)
            object.__setattr__(self, "standpoints", rest + (UNIVERSAL,))

    @property
    def proper_standpoints(self) -> tuple[str, ...]:
        """All standpoints except ``*``."""
        return self.standpoints[:-1]


@dataclass(frozen=True)
class SequentInput:
    """The standpoint implication ``/\\gamma -> goal`` over ``vocabulary``."""

    gamma: frozenset
    goal: Formula
    vocabulary: Vocabulary = field(compare=True)

    def __str__(self) -> str:
        return render_input(self)


# ---------------------------------------------------------------------------
# traversal


def iter_nodes(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over every node occurrence."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def node_count(phi: Formula) -> int:
    return sum(1 for _ in iter_nodes(phi))


def subformulae(phi: Formula) -> set:
    """The set of subformulae; structurally equal subtrees count once."""
    return set(iter_nodes(phi))


def formula_size(phi: Formula) -> int:
    return len(subformulae(phi))


def propositions_of(phi: Formula) -> list[str]:
    seen: dict[str, None] = {}
    for node in iter_nodes(phi):
        if isinstance(node, LITERALS):
            seen.setdefault(node.name)
    return list(seen)


def standpoints_of(phi: Formula) -> list[str]:
    seen: dict[str, None] = {}
    for node in iter_nodes(phi):
        if isinstance(node, MODAL):
            seen.setdefault(node.standpoint)
    return list(seen)


def is_modal_free(phi: Formula) -> bool:
    return not any(isinstance(n, MODAL) for n in iter_nodes(phi))


def negate_nnf(phi: Formula) -> Formula:
    """Classical negation pushed to the atoms (De Morgan and modal duality)."""
    match phi:
        case Atom(name):
            return Neg(name)
        case Neg(name):
            return Atom(name)
        case Or(left, right):
            return And(negate_nnf(left), negate_nnf(right))
        case And(left, right):
            return Or(negate_nnf(left), negate_nnf(right))
        case Box(s, sub):
            return Dia(s, negate_nnf(sub))
        case Dia(s, sub):
            return Box(s, negate_nnf(sub))
    raise TypeError(f"not a formula: {phi!r}")


def rename_standpoints(phi: Formula, mapping: dict[str, str]) -> Formula:
    if not mapping:
        return phi
    if isinstance(phi, LITERALS):
        return phi
    kids = tuple(rename_standpoints(k, mapping) for k in children(phi))
    if isinstance(phi, MODAL):
        return type(phi)(mapping.get(phi.standpoint, phi.standpoint), kids[0])
    return type(phi)(*kids)


# ---------------------------------------------------------------------------
# rendering

_PREC = {Or: 1, And: 2}


def _prec(phi: Formula) -> int:
    return _PREC.get(type(phi), 3)


def _modality(phi: Formula) -> str:
    return f"[{phi.standpoint}]" if isinstance(phi, Box) else f"<{phi.standpoint}>"


def render_formula(phi: Formula) -> str:
    """ASCII rendering accepted back by :func:`parse_formula`.

    ``&`` binds tighter than ``|``, both associate to the left, and
    modalities bind tightest.  Parentheses are emitted only where needed.
    """

    def wrap(sub: Formula, min_prec: int) -> str:
        text = render_formula(sub)
        return f"({text})" if _prec(sub) < min_prec else text

    match phi:
        case Atom(name):
            return name
        case Neg(name):
            return "~" + name
        case Or(left, right) | And(left, right):
            op = " | " if isinstance(phi, Or) else " & "
            p = _prec(phi)
            return wrap(left, p) + op + wrap(right, p + 1)
        case Box(_, sub) | Dia(_, sub):
            return _modality(phi) + wrap(sub, 3)
    raise TypeError(f"not a formula: {phi!r}")


def render_input(inp: SequentInput) -> str:
    gamma = ", ".join(str(st) for st in sorted(inp.gamma))
    head = f"{gamma} |- " if gamma else "|- "
    return head + render_formula(inp.goal)


# ---------------------------------------------------------------------------
# parsing


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


_PUNCT = ["|-", "<=", "~", "&", "|", "(", ")", "[", "]", "<", ">", ",", "*", "@"]


def tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token(p, p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class Parser:
    """Recursive-descent parser over a token list.

    Also used by the sequent module, which extends the grammar with
    nestings, so the cursor helpers are public.
    """

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def error(self, message: str, tok: _Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def take(self, kind: str) -> _Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.pos += 1
            return True
        return False

    def standpoint(self) -> str:
        if self.accept("*"):
            return UNIVERSAL
        return self.take("ident").text

    def proposition(self) -> str:
        if self.tok.kind == "*":
            raise self.error("'*' is reserved for the universal standpoint")
        return self.take("ident").text

    def formula(self) -> Formula:
        phi = self.conjunction()
        while self.accept("|"):
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self.accept("&"):
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        tok = self.tok
        if self.accept("~"):
            if self.tok.kind == "ident":
                return Neg(self.proposition())
            raise self.error("negation applies to atoms only")
        if self.accept("["):
            s = self.standpoint()
            self.take("]")
            return Box(s, self.unary())
        if self.accept("<"):
            s = self.standpoint()
            self.take(">")
            return Dia(s, self.unary())
        if self.accept("("):
            phi = self.formula()
            self.take(")")
            return phi
        if tok.kind in ("ident", "*"):
            return Atom(self.proposition())
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def statement(self) -> SharpeningStatement:
        left = self.standpoint()
        self.take("<=")
        return SharpeningStatement(left, self.standpoint())

    def gamma(self) -> list[SharpeningStatement]:
        stmts = []
        if self.tok.kind == "|-":
            return stmts
        stmts.append(self.statement())
        while self.accept(","):
            stmts.append(self.statement())
        return stmts

    def has_turnstile(self) -> bool:
        return any(t.kind == "|-" for t in self.tokens)


def infer_vocabulary(gamma: Iterable[SharpeningStatement], goal: Formula) -> Vocabulary:
    names = set(standpoints_of(goal))
    for st in gamma:
        names.update((st.sharper, st.broader))
    names.discard(UNIVERSAL)
    return Vocabulary(tuple(sorted(propositions_of(goal))), tuple(sorted(names)) + (UNIVERSAL,))


def make_input(gamma: Iterable[SharpeningStatement], goal: Formula) -> SequentInput:
    gamma = frozenset(gamma)
    return SequentInput(gamma, goal, infer_vocabulary(gamma, goal))


def parse_formula(text: str) -> Formula:
    p = Parser(text)
    phi = p.formula()
    p.take("eof")
    return phi


def parse_implication(text: str) -> SequentInput:
    """Parse ``gamma |- phi`` (or a bare ``phi``) into a :class:`SequentInput`."""
    p = Parser(text)
    gamma: list[SharpeningStatement] = []
    if p.has_turnstile():
        gamma = p.gamma()
        p.take("|-")
    goal = p.formula()
    p.take("eof")
    return make_input(gamma, goal)


# ---------------------------------------------------------------------------
# normalization


def _strongly_connected(nodes: list[str], edges: dict[str, set[str]]) -> list[list[str]]:
    """Tarjan's algorithm; components come out in reverse topological order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []

    def visit(v: str) -> None:
        index[v] = low[v] = len(index)
        stack.append(v)
        on_stack.add(v)
        for w in sorted(edges.get(v, ())):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in nodes:
        if v not in index:
            visit(v)
    return out


def normalize_input(raw: SequentInput) -> SequentInput:
    """Make the antecedent acyclic and free of ``*``.

    ``* <= s`` forces ``s`` to be universal, so ``s`` is renamed to ``*``;
    ``s <= *`` holds in every model and is dropped.  Each strongly connected
    component of the sharpening graph is collapsed onto its lexicographically
    greatest member.  The result is validity-equivalent to the input.
    """
    gamma = set(raw.gamma)
    goal = raw.goal
    renaming: dict[str, str] = {}

    def apply(mapping: dict[str, str]) -> None:
        nonlocal gamma, goal
        gamma = {
            SharpeningStatement(mapping.get(st.sharper, st.sharper), mapping.get(st.broader, st.broader))
            for st in gamma
        }
        goal = rename_standpoints(goal, mapping)
        for k, v in list(renaming.items()):
            renaming[k] = mapping.get(v, v)
        for k, v in mapping.items():
            renaming.setdefault(k, v)

    while True:
        forced = {st.broader: UNIVERSAL for st in gamma if st.sharper == UNIVERSAL and st.broader != UNIVERSAL}
        if not forced:
            break
        apply(forced)
    gamma = {st for st in gamma if st.broader != UNIVERSAL and st.sharper != st.broader}

    nodes = sorted({n for st in gamma for n in (st.sharper, st.broader)})
    edges: dict[str, set[str]] = {}
    for st in gamma:
        edges.setdefault(st.sharper, set()).add(st.broader)
    collapse = {}
    for comp in _strongly_connected(nodes, edges):
        if len(comp) > 1:
            rep = max(comp)
            collapse.update({name: rep for name in comp if name != rep})
    if collapse:
        apply(collapse)
    gamma = {st for st in gamma if st.sharper != st.broader}

    kept = [renaming.get(s, s) for s in raw.vocabulary.proper_standpoints]
    names = set(kept) | set(standpoints_of(goal))
    for st in gamma:
        names.update((st.sharper, st.broader))
    names.discard(UNIVERSAL)
    vocab = Vocabulary(raw.vocabulary.propositions, tuple(sorted(names)) + (UNIVERSAL,))
    return SequentInput(frozenset(gamma), goal, vocab)
