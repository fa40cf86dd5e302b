"""Polynomial method: vanishing polynomials, Schwartz-Zippel counts and the proof trace."""

from .multipoly import BCoeffs, ExtCoeffs, FqCoeffs, MultiPoly, lift_to_B, monomial_basis
from .reduction import ExtUniPoly, compose_line, residue_on_C, residue_reduce
from .solver import SolveInfo, solve_vanishing, vanishing_polynomial
from .sz import (RatFunc, SZReport, exhaustive_sweep, lagrange_check, leading_identity, random_poly,
                 random_sweep, sz_bound, sz_count, sz_verify)
from .trace import ProofTrace, adversarial_instance, genuine_instance, proof_trace, replay_trace

__all__ = [
    "BCoeffs", "ExtCoeffs", "FqCoeffs", "MultiPoly", "lift_to_B", "monomial_basis",
    "ExtUniPoly", "compose_line", "residue_on_C", "residue_reduce",
    "SolveInfo", "solve_vanishing", "vanishing_polynomial",
    "RatFunc", "SZReport", "exhaustive_sweep", "lagrange_check", "leading_identity", "random_poly",
    "random_sweep", "sz_bound", "sz_count", "sz_verify",
    "ProofTrace", "adversarial_instance", "genuine_instance", "proof_trace", "replay_trace",
]
