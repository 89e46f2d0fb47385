"""Simultaneous-messages model: execution, equality, derandomization, reduction."""

from .core import (BestProof, MessageTooLong, SmInstance, SmProtocol, acceptance, ma_sym_best_proof,
                   ma_sym_run, monte_carlo, sm_run)
from .derandomize import (AuditExhausted, GapCollapsed, MaSymDerandomization, StrengthTable,
                          derandomize_ma_sym, table_size)
from .eq import ReedSolomonCode, eq_private, full_input_equality
from .reduction import PathRoles, amplify_majority, reduce_tce_to_eq

__all__ = [
    "BestProof", "MessageTooLong", "SmInstance", "SmProtocol", "acceptance", "ma_sym_best_proof",
    "ma_sym_run", "monte_carlo", "sm_run", "AuditExhausted", "GapCollapsed", "MaSymDerandomization",
    "StrengthTable", "derandomize_ma_sym", "table_size", "ReedSolomonCode", "eq_private",
    "full_input_equality", "PathRoles", "amplify_majority", "reduce_tce_to_eq",
]
