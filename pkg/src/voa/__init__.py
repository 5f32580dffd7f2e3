"""Exact OPE engine and verification toolkit for vertex superalgebras
presented by generators and pole tables over Q(k)."""

__version__ = "0.1.0"

from .scalars import (LevelPoly, LevelScalar, K, ONE, ZERO, scalar,
                      parse_scalar, normalize, evaluate_at, rational_roots,
                      PoleEvaluationError)
from .fields import (Field, GeneratorDecl, GeneratorSet, parse_field,
                     print_field, derivative, grade, weight_of, charge_of)
from .engine import AlgebraSpec, Context, complete_table, tensor
from .library import preset, preset_context, load_algebra, sugawara_vector, \
    check_automorphism, theta_map, omega_map, limit_coset_context
from .lab import (ChargePredicate, enumerate_basis, strong_gen_gf, decouple,
                  verify_identity, singular_check, singular_search,
                  commutant_basis, subalgebra_closure, central_charge,
                  attach_names, named)
from .oracle import ModeOracle

__all__ = [
    "LevelPoly", "LevelScalar", "K", "ONE", "ZERO", "scalar", "parse_scalar",
    "normalize", "evaluate_at", "rational_roots", "PoleEvaluationError",
    "Field", "GeneratorDecl", "GeneratorSet", "parse_field", "print_field",
    "derivative", "grade", "weight_of", "charge_of",
    "AlgebraSpec", "Context", "complete_table", "tensor",
    "preset", "preset_context", "load_algebra", "sugawara_vector",
    "check_automorphism", "theta_map", "omega_map", "limit_coset_context",
    "ChargePredicate", "enumerate_basis", "strong_gen_gf", "decouple",
    "verify_identity", "singular_check", "singular_search",
    "commutant_basis", "subalgebra_closure", "central_charge",
    "attach_names", "named", "ModeOracle",
]
