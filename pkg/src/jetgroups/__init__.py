"""Exact jets of formal diffeomorphisms and vector fields over Q(zeta_8).

Truncated power series, jet composition and inversion, exp / log of
nilpotent fields, BCH, the representation on m / m^(K+1), finite matrix
groups, and the derived-length examples N x| L and its towers.
"""
from .coeff import I, ONE, SQRT2, Z8, ZERO, CycRational, embed
from .diffeo import JetDiffeo, compose, group_commutator, invert, pullback_function
from .errors import (
    ClosureCapError,
    JetError,
    MismatchError,
    NoFixedVectorError,
    NonNilpotentError,
    NonStabilizationError,
    NonUnipotentError,
    NonUnitError,
    ParseError,
    VerificationError,
    WitnessDiedError,
)
from .jetrep import JetOperator, check_dk_membership, represent_diffeo, represent_field
from .matgroup import (
    MatGroupDesc,
    commutator_scaling_check,
    derived_series_finite,
    enumerate_closure,
    group_L,
    kolchin_flag,
)
from .parsing import parse_value
from .render import render
from .series import Substitution, TruncSeries
from .vfield import (
    JetVectorField,
    bch_dynkin,
    exp_nilpotent,
    lie_bracket,
    log_unipotent,
    one_parameter,
    pullback_field,
)

__version__ = "0.1.0"
