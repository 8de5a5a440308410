"""Monoid identities over words: finite Rees quotients, brute-force
satisfaction, bounded equational derivation and basis reductions."""

from .identities import (
    UNKNOWN,
    Identity,
    claims_check,
    family,
    fve_holds,
    invertibility_chain,
    is_well_balanced,
    j_basis,
    j_identity,
    named,
    preset,
    preset_list,
)
from .monoids import (
    FiniteMonoid,
    deserialize,
    rees_quotient,
    rho_quotient,
    satisfies,
    serialize,
    tau_quotient,
    validate,
)
from .reductions import phi_basis, subvariety_basis, tau_term_violation, well_balance
from .rewrite import DerivationTrace, SearchBudget, derivable, free_object, holds_in_variety, verify_trace
from .words import Word, decompose, parse_word, reduce, render, tau_equiv, word

__version__ = "0.1.0"

__all__ = [
    "UNKNOWN",
    "Identity",
    "claims_check",
    "family",
    "fve_holds",
    "invertibility_chain",
    "is_well_balanced",
    "j_basis",
    "j_identity",
    "named",
    "preset",
    "preset_list",
    "FiniteMonoid",
    "deserialize",
    "rees_quotient",
    "rho_quotient",
    "satisfies",
    "serialize",
    "tau_quotient",
    "validate",
    "phi_basis",
    "subvariety_basis",
    "tau_term_violation",
    "well_balance",
    "DerivationTrace",
    "SearchBudget",
    "derivable",
    "free_object",
    "holds_in_variety",
    "verify_trace",
    "Word",
    "decompose",
    "parse_word",
    "reduce",
    "render",
    "tau_equiv",
    "word",
    "__version__",
]
