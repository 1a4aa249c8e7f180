"""Rule names as they appear on inference bars and in serialized proofs."""

from __future__ import annotations

import re

from .errors import StandpointError

ID = "(id)"
OR = "(∨)"
AND = "(∧)"
DIA_STAR = "◇_{*}"

# families parameterized by a standpoint
BOX, NEC, DIA1, DIA2 = "□", "n", "◇1", "◇2"
FAMILIES = (BOX, NEC, DIA1, DIA2)


def box(s: str) -> str:
    return f"□_{{{s}}}"


def nec(s: str) -> str:
    return f"n_{{{s}}}"


def dia1(s: str) -> str:
    return f"◇1_{{{s}}}"


def dia2(s: str) -> str:
    return f"◇2_{{{s}}}"


_PARAM = re.compile(r"(□|n|◇1|◇2)_\{([^{}]+)\}$")


def parse_tag(tag: str) -> tuple[str, str | None]:
    """``"◇1_{s}"`` -> ``("◇1", "s")``; plain rules map to ``(tag, None)``."""
    if tag in (ID, OR, AND, DIA_STAR):
        return tag, None
    m = _PARAM.match(tag)
    if not m:
        raise StandpointError(f"unknown rule tag {tag!r}")
    return m.group(1), m.group(2)
