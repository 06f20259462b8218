"""Toy propositional-calculus proof environment with an independent
checker and a brute-force oracle."""

from .checker import check_proof
from .corpus import (
    CorpusError,
    generate_conjecture_gap_tasks,
    generate_corpus,
    read_corpus,
    task_from_record,
    task_to_record,
    write_corpus,
)
from .env import (
    InvalidTacticError,
    PropCalcEnv,
    ProofState,
    Sequent,
    Tactic,
    Task,
    apply_tactic,
    parse_tactic,
    replay,
)
from .formulas import (
    And,
    Atom,
    Formula,
    Imp,
    Not,
    Or,
    ParseError,
    atoms_of,
    format_formula,
    parse_formula,
    subformulas,
)
from .oracle import OracleBudgetError, oracle_solve

__all__ = [
    "And",
    "Atom",
    "CorpusError",
    "Formula",
    "Imp",
    "InvalidTacticError",
    "Not",
    "Or",
    "OracleBudgetError",
    "ParseError",
    "PropCalcEnv",
    "ProofState",
    "Sequent",
    "Tactic",
    "Task",
    "apply_tactic",
    "atoms_of",
    "check_proof",
    "format_formula",
    "generate_conjecture_gap_tasks",
    "generate_corpus",
    "oracle_solve",
    "parse_formula",
    "parse_tactic",
    "read_corpus",
    "replay",
    "subformulas",
    "task_from_record",
    "task_to_record",
    "write_corpus",
]
