"""Exact evaluation and tractability classification for symmetric
weighted hypergraph homomorphism counting.

The top-level API re-exports the pieces most callers need: the data
model (SymFunc, Hypergraph, CspInstance and their file formats), the
classifier with its witness replay, the evaluators, and the gadget
constructions used by the reduction identities.
"""

from .abelian import AbelianGroup, CyclicDecomposition, count_homs, count_solutions_mod, decompose
from .dichotomy import (
    Classification,
    ComponentStructure,
    FactorStructure,
    GroupStructure,
    HardnessWitness,
    SimClasses,
    WITNESS_KINDS,
    check_product_structure,
    classify,
    equation_check,
    latin_check,
    reconstruct_group,
    replay_witness,
    sim_classes,
    verify_factoring_identity,
)
from .evaluator import (
    CapExceeded,
    EvalReport,
    eval_bruteforce,
    eval_tractable,
    evaluate,
    lambda_factor_direct,
    lambda_monomial_dp,
    monomial_value,
    northwest_contingency,
)
from .exactcore import IntMatrix, SnfResult, format_rational, parse_rational, snf
from .gadgets import (
    GadgetResult,
    InterpolationPlan,
    component_separator,
    contract_equalities,
    equality_eliminator,
    pad_to_arity,
    power_function,
    recover_via_interpolation,
    separator_eta,
    tilde_f,
    two_stretch,
    vertex_power,
)
from .model import (
    CspInstance,
    FormatError,
    Hypergraph,
    SymFunc,
    domain_components,
    dump_csp,
    dump_hypergraph,
    dump_symfunc,
    instance_components,
    load_csp,
    load_hypergraph,
    load_instance,
    load_symfunc,
    marginalize,
    prune_domain,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "CapExceeded",
    "Classification",
    "ComponentStructure",
    "CspInstance",
    "CyclicDecomposition",
    "EvalReport",
    "FactorStructure",
    "FormatError",
    "GadgetResult",
    "GroupStructure",
    "HardnessWitness",
    "Hypergraph",
    "IntMatrix",
    "InterpolationPlan",
    "SimClasses",
    "SnfResult",
    "SymFunc",
    "WITNESS_KINDS",
    "check_product_structure",
    "classify",
    "component_separator",
    "contract_equalities",
    "count_homs",
    "count_solutions_mod",
    "decompose",
    "domain_components",
    "dump_csp",
    "dump_hypergraph",
    "dump_symfunc",
    "equality_eliminator",
    "equation_check",
    "eval_bruteforce",
    "eval_tractable",
    "evaluate",
    "format_rational",
    "instance_components",
    "lambda_factor_direct",
    "lambda_monomial_dp",
    "latin_check",
    "load_csp",
    "load_hypergraph",
    "load_instance",
    "load_symfunc",
    "marginalize",
    "monomial_value",
    "northwest_contingency",
    "pad_to_arity",
    "parse_rational",
    "power_function",
    "prune_domain",
    "reconstruct_group",
    "recover_via_interpolation",
    "replay_witness",
    "separator_eta",
    "sim_classes",
    "snf",
    "tilde_f",
    "two_stretch",
    "verify_factoring_identity",
    "vertex_power",
]
