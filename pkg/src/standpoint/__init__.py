"""Decision procedure with certificates for propositional standpoint logic."""

from .coloring import ColoredFormula, count_proper_colorings, erase, is_proper, proper_colorings
from .errors import (
    InvariantViolation,
    ModelError,
    OracleLimitError,
    ParseError,
    ResourceExhausted,
    StandpointError,
    ZipError,
)
from .proof import DerivationTree, check_proof, parse_proof, render_proof, zip_threads
from .search import Invalid, SearchStats, Thread, Valid, extract_countermodel, is_saturated, proof_search, prove
from .semantics import (
    StandpointImplication,
    StandpointModel,
    check_countermodel,
    eval_formula,
    eval_implication,
    interpret,
    oracle_validity,
)
from .sequent import NestedSequent, Nesting, fresh_label, initial_sequent, sharpening_closure
from .syntax import (
    And,
    Atom,
    Box,
    Dia,
    Neg,
    Or,
    SequentInput,
    SharpeningStatement,
    Vocabulary,
    formula_size,
    negate_nnf,
    normalize_input,
    parse_formula,
    parse_implication,
    render_formula,
    subformulae,
)

__all__ = [name for name in dir() if not name.startswith("_")]
