"""Derivations: zipping closed threads, checking rule instances, (de)serializing.

The checker works from the rule schemata alone.  It compares each premise
with its conclusion as multisets per component and never calls into the
search engine.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from . import tags
from .errors import ParseError, StandpointError, ZipError
from .sequent import NestedSequent, SharpeningClosure, erase_sequent, parse_sequent, render_sequent
from .syntax import UNIVERSAL, And, Atom, Box, Dia, Neg, Or


@dataclass(frozen=True)
class DerivationTree:
    conclusion: NestedSequent
    rule: str
    principal: tuple[int, int] | None = None
    premises: tuple["DerivationTree", ...] = ()

    def nodes(self) -> Iterable["DerivationTree"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def count(self, rule: str) -> int:
        return sum(1 for n in self.nodes() if n.rule == rule)

    def leaves(self) -> list["DerivationTree"]:
        return [n for n in self.nodes() if not n.premises]

    def height(self) -> int:
        best, stack = 0, [(self, 1)]
        while stack:
            node, h = stack.pop()
            best = max(best, h)
            stack.extend((p, h + 1) for p in node.premises)
        return best


# ---------------------------------------------------------------------------
# zipping


def _signature(thread) -> tuple:
    return tuple((erase_sequent(s.sequent), s.rule, s.principal, s.side) for s in thread.steps)


def zip_threads(threads) -> DerivationTree:
    """Fuse closed threads into one derivation of their common conclusion.

    Threads must agree step by step until an (∧) step, where they split by
    the side they took.  Threads that are identical (after erasing colors
    and including the sides taken) are merged first.
    """
    threads = list(threads)
    if not threads:
        raise ZipError("nothing to zip")
    if any(not t.closed for t in threads):
        raise ZipError("only closed threads can be zipped")
    unique = {}
    for t in threads:
        unique.setdefault(_signature(t), t)
    return _zip([sig for sig in unique], 0)


def _zip(group: list[tuple], k: int) -> DerivationTree:
    chain: list[tuple] = []  # (sequent, rule, principal) of unary steps, bottom first
    while True:
        heads = {sig[k][:3] if k < len(sig) else None for sig in group}
        if None in heads:
            raise ZipError(f"a thread ended before step {k} without closing")
        if len(heads) != 1:
            raise ZipError(f"threads disagree at step {k}: " + "; ".join(
                f"{h[1]} on {render_sequent(h[0])}" for h in heads))
        seq, rule, principal = heads.pop()
        if rule == tags.ID:
            node = DerivationTree(seq, rule, principal)
            break
        if rule == tags.AND:
            left = [sig for sig in group if sig[k][3] == 0]
            right = [sig for sig in group if sig[k][3] == 1]
            if not left or not right:
                raise ZipError(f"no thread covers the {'left' if not left else 'right'} premise of "
                               f"(∧) at step {k} on {render_sequent(seq)}")
            node = DerivationTree(seq, rule, principal, (_zip(left, k + 1), _zip(right, k + 1)))
            break
        chain.append((seq, rule, principal))
        k += 1
    for seq, rule, principal in reversed(chain):
        node = DerivationTree(seq, rule, principal, (node,))
    return node


# ---------------------------------------------------------------------------
# checking


class _Reject(Exception):
    pass


def _components(seq: NestedSequent) -> dict[int, tuple[str | None, Counter]]:
    out = {0: (None, Counter(seq.root))}
    for n in seq.nestings:
        out[n.label] = (n.standpoint, Counter(n.items))
    return out


def _diff(concl: NestedSequent, prem: NestedSequent) -> tuple[dict, dict]:
    """What the premise adds: ``({label: Counter}, {new label: (standpoint, Counter)})``."""
    if prem.gamma != concl.gamma:
        raise _Reject("premise changes the antecedent")
    c, p = _components(concl), _components(prem)
    added, fresh = {}, {}
    for label, (sp, items) in c.items():
        if label not in p:
            raise _Reject(f"premise drops component pi{label}")
        psp, pitems = p[label]
        if psp != sp:
            raise _Reject(f"premise relabels the standpoint of pi{label}")
        if items - pitems:
            raise _Reject(f"premise deletes formulae from pi{label}")
        extra = pitems - items
        if extra:
            added[label] = extra
    for label, comp in p.items():
        if label not in c:
            fresh[label] = comp
    return added, fresh


def _principal(seq: NestedSequent, principal):
    if principal is None:
        raise _Reject("rule needs a principal formula")
    label, index = principal
    comps = {0: seq.root, **{n.label: n.items for n in seq.nestings}}
    if label not in comps or not 0 <= index < len(comps[label]):
        raise _Reject(f"principal pi{label}#{index} does not exist")
    return comps[label][index]


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise _Reject(message)


def _check_node(node: DerivationTree, closure: SharpeningClosure, serial: bool) -> None:
    concl, prem = node.conclusion, node.premises
    family, s = tags.parse_tag(node.rule)
    arity = {tags.ID: 0, tags.AND: 2}.get(family, 1)
    _expect(len(prem) == arity, f"{node.rule} needs {arity} premise(s), found {len(prem)}")
    if family == tags.NEC:
        _expect(node.principal is None, "n_s has no principal formula")
        _expect(serial, "n_s is not sound without seriality")
        _expect(s in closure.standpoints, f"unknown standpoint {s}")
        added, fresh = _diff(concl, prem[0].conclusion)
        _expect(not added and len(fresh) == 1, "n_s must only append one nesting")
        (label, (sp, items)), = fresh.items()
        _expect(sp == s and not items, f"n_s must append ({s})[]")
        return
    phi = _principal(concl, node.principal)
    home = node.principal[0]
    if family == tags.ID:
        _expect(isinstance(phi, Atom), "(id) principal must be an atom")
        comp = concl.root if home == 0 else next(n.items for n in concl.nestings if n.label == home)
        _expect(Neg(phi.name) in comp, f"(id) needs ~{phi.name} next to {phi.name}")
        return
    if family == tags.OR:
        _expect(isinstance(phi, Or), "(∨) principal must be a disjunction")
        added, fresh = _diff(concl, prem[0].conclusion)
        _expect(not fresh and added == {home: Counter([phi.left, phi.right])},
                "(∨) premise must add both disjuncts to the principal's component")
        return
    if family == tags.AND:
        _expect(isinstance(phi, And), "(∧) principal must be a conjunction")
        for side, part in ((0, phi.left), (1, phi.right)):
            added, fresh = _diff(concl, prem[side].conclusion)
            _expect(not fresh and added == {home: Counter([part])},
                    f"(∧) {'left' if side == 0 else 'right'} premise must add its conjunct")
        return
    if family == tags.BOX:
        _expect(isinstance(phi, Box) and phi.standpoint == s, f"□_{{{s}}} principal must be [{s}]φ")
        added, fresh = _diff(concl, prem[0].conclusion)
        _expect(not added and len(fresh) == 1, "□_s must only append one nesting")
        (label, (sp, items)), = fresh.items()
        _expect(label != 0, "nesting labels start at 1")
        _expect(sp == s and items == Counter([phi.sub]), f"□_s must append ({s})[φ]")
        return
    if node.rule == tags.DIA_STAR:
        _expect(isinstance(phi, Dia) and phi.standpoint == UNIVERSAL, "◇_{*} principal must be <*>φ")
        added, fresh = _diff(concl, prem[0].conclusion)
        _expect(not fresh and added == {0: Counter([phi.sub])}, "◇_{*} must add φ to the root")
        return
    # ◇1_s / ◇2_s
    _expect(isinstance(phi, Dia) and phi.standpoint == s, f"{node.rule} principal must be <{s}>φ")
    added, fresh = _diff(concl, prem[0].conclusion)
    _expect(not fresh and len(added) == 1, f"{node.rule} must add to exactly one nesting")
    (target, extra), = added.items()
    _expect(target != 0 and extra == Counter([phi.sub]), f"{node.rule} must add φ to a nesting")
    sp = next(n.standpoint for n in concl.nestings if n.label == target)
    _expect(closure.holds(sp, s), f"side condition fails: {sp} is not sharper than {s}")
    if family == tags.DIA2:
        _expect(target == home, "◇2_s adds φ to the nesting holding the principal")
    else:
        _expect(target != home, "◇1_s adds φ to a nesting other than the principal's")


def check_proof(
    proof: DerivationTree,
    closure: SharpeningClosure,
    goal: NestedSequent | None = None,
    serial: bool = True,
    explain: bool = False,
):
    """True iff every node is a correct rule instance and every leaf is (id).

    With ``goal`` the root conclusion must also equal it (as multisets).  With
    ``explain`` the result is ``(ok, diagnostic)`` where the diagnostic names
    the path to the first bad node.
    """
    stack = [(proof, "root")]
    try:
        if goal is not None:
            goal = erase_sequent(goal)
            _expect(goal.gamma == proof.conclusion.gamma and _components(goal) == _components(proof.conclusion),
                    "conclusion differs from the goal")
        while stack:
            node, path = stack.pop()
            try:
                _check_node(node, closure, serial)
            except _Reject as e:
                raise _Reject(f"{path}: {node.rule}: {e}") from None
            except StandpointError as e:
                raise _Reject(f"{path}: {e}") from None
            for i, p in enumerate(node.premises):
                stack.append((p, f"{path}/{i}"))
    except _Reject as e:
        return (False, str(e)) if explain else False
    return (True, "") if explain else True


# ---------------------------------------------------------------------------
# serialization


def _principal_text(p) -> str:
    return "-" if p is None else f"pi{p[0]}#{p[1]}"


def render_proof(proof: DerivationTree, format: str = "text") -> str:
    """``text``: premises above conclusions, indented by depth; ``json``: nested objects."""
    if format == "json":
        return json.dumps(proof_to_json(proof), ensure_ascii=False, indent=1)
    if format != "text":
        raise ValueError(f"unknown proof format {format!r}")
    lines: list[str] = []
    # post-order without recursion
    stack = [(proof, 0, False)]
    while stack:
        node, depth, done = stack.pop()
        if done:
            pad = "  " * depth
            lines.append(f"{pad}--- {node.rule} {_principal_text(node.principal)}")
            lines.append(pad + render_sequent(node.conclusion))
        else:
            stack.append((node, depth, True))
            stack.extend((p, depth + 1, False) for p in reversed(node.premises))
    return "\n".join(lines) + "\n"


_BAR = re.compile(r"^( *)--- (\S+) (-|pi(\d+)#(\d+))$")


def parse_proof(text: str) -> DerivationTree:
    """Inverse of ``render_proof(..., "text")``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) % 2:
        raise ParseError("proof text must alternate rule bars and sequents", len(lines), 1)
    stack: list[tuple[int, DerivationTree]] = []
    for n in range(0, len(lines), 2):
        m = _BAR.match(lines[n])
        if not m:
            raise ParseError("expected a rule bar", n + 1, 1)
        depth = len(m.group(1)) // 2
        principal = None if m.group(3) == "-" else (int(m.group(4)), int(m.group(5)))
        premises = []
        while stack and stack[-1][0] == depth + 1:
            premises.append(stack.pop()[1])
        seq = parse_sequent(lines[n + 1].strip())
        stack.append((depth, DerivationTree(seq, m.group(2), principal, tuple(reversed(premises)))))
    if len(stack) != 1:
        raise ParseError("proof text does not form a single tree", len(lines), 1)
    return stack[0][1]


def proof_to_json(proof: DerivationTree) -> dict:
    p = proof.principal
    return {
        "sequent": render_sequent(proof.conclusion),
        "rule": proof.rule,
        "principal": None if p is None else {"component": f"pi{p[0]}", "index": p[1]},
        "premises": [proof_to_json(q) for q in proof.premises],
    }


def proof_from_json(data: dict | str) -> DerivationTree:
    if isinstance(data, str):
        data = json.loads(data)
    p = data.get("principal")
    principal = None if p is None else (int(p["component"].removeprefix("pi")), int(p["index"]))
    return DerivationTree(
        parse_sequent(data["sequent"]),
        data["rule"],
        principal,
        tuple(proof_from_json(q) for q in data["premises"]),
    )
