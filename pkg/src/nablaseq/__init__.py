"""Proof kernel, bounded proof search, proof transformations, and a finite
nabla-algebra countermodel oracle for sequent calculi with a nabla modality
and dynamic implication."""

from .syntax import (
    And,
    Atom,
    Bot,
    DynImp,
    HeytImp,
    Multiset,
    Nabla,
    NablaPrefix,
    Or,
    ParseError,
    Sequent,
    Top,
    Formula,
    atoms,
    box,
    is_lstar,
    is_variant,
    nabla_n,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
    rank,
    strip_nabla,
    variants_up_to,
)
from .kernel import (
    Base,
    CalculusId,
    Hypothesis,
    InternalError,
    Node,
    ProofError,
    ProofTree,
    Rule,
    RuleInstance,
    applicable_instances,
    check_instance,
    check_proof,
    derived_proof,
    identity,
    ikd,
    ikds,
    mp,
    proof_from_json,
    proof_to_json,
    stln,
    stlnh,
)
from .search import Exhausted, Found, SearchBudget, SearchOutcome, prove, prove_formula
from .transform import (
    DeductionResult,
    contract,
    cut_once,
    deduction_export,
    deduction_import,
    eliminate_cuts,
    ikd_to_stl,
    invert,
    invert_and,
    invert_heyt,
    invert_or,
    nabla_dist_proof,
    stl_to_ikd,
)
from .meta import (
    InterpolationResult,
    VisserAntecedent,
    deductive_interpolant,
    interpolate,
    interpolate_formula,
    split_disjunction,
    visser_disjunctive,
    visser_heyting,
    visser_implicative,
    visser_star,
)
from .algebra import (
    Countermodel,
    FiniteNablaAlgebra,
    enumerate_algebras,
    evaluate,
    refute,
)
