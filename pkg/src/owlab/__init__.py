"""Boundaries, fillings and Ornstein-Weiss limits on cancellative semigroups."""

from .errors import (CertificateRefused, DomainError, HypothesisError, InvalidElementError,
                     MultipleSolutionsError, OwlabError, ResourceError)
from .semigroup import (FinSubset, FiniteTable, Heisenberg, IntLattice, NatMonoid, Semigroup,
                        cancellativity_probe, parse_semigroup)
from .boundary import AmenabilityConstant, Ratio, alpha, boundary, interior, translate_sum
from .folner import FolnerSequence, builtin_folner, defect, fc_witness_check, folner_report
from .filling import (WitnessedFamily, compute_n0, eps_disjoint_verify, filling_theorem_run,
                      greedy_filling)
from .subadditive import (SetFunction, cardinality_h, check_right_subinvariant, check_subadditive,
                          fekete_lift, inverse_max_h, ow_certificate, ow_estimate)
from .dynamics import (MarkovSpec, SftSpec, bernoulli_entropy_h, builtin_sft, markov_entropy_h,
                       pattern_count, sft_entropy_h)

__version__ = "0.1.0"

__all__ = [
    "AmenabilityConstant",
    "CertificateRefused",
    "DomainError",
    "FinSubset",
    "FiniteTable",
    "FolnerSequence",
    "Heisenberg",
    "HypothesisError",
    "IntLattice",
    "InvalidElementError",
    "MarkovSpec",
    "MultipleSolutionsError",
    "NatMonoid",
    "OwlabError",
    "Ratio",
    "ResourceError",
    "Semigroup",
    "SetFunction",
    "SftSpec",
    "WitnessedFamily",
    "alpha",
    "bernoulli_entropy_h",
    "boundary",
    "builtin_folner",
    "builtin_sft",
    "cancellativity_probe",
    "cardinality_h",
    "check_right_subinvariant",
    "check_subadditive",
    "compute_n0",
    "defect",
    "eps_disjoint_verify",
    "fc_witness_check",
    "fekete_lift",
    "filling_theorem_run",
    "folner_report",
    "greedy_filling",
    "interior",
    "inverse_max_h",
    "markov_entropy_h",
    "ow_certificate",
    "ow_estimate",
    "parse_semigroup",
    "pattern_count",
    "sft_entropy_h",
    "translate_sum",
]
