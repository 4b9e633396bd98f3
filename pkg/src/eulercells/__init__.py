"""Conjugate-point criteria for steady 2D Euler flows in a rotational cell."""

__version__ = "0.1.0"

from .expr import DomainError, Expression, ParseError, eval_jet, parse
from .index import (
    IndexQuadratic,
    TestFunctionXi,
    Verdict,
    constant_vorticity_rule,
    index_I1,
    index_I2,
    index_I3,
    minimize_over_alpha,
)
from .jet import Jet
from .profiles import RadialProfile, make_general, make_rotational
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "__version__",
    "DomainError",
    "Expression",
    "ParseError",
    "eval_jet",
    "parse",
    "IndexQuadratic",
    "TestFunctionXi",
    "Verdict",
    "constant_vorticity_rule",
    "index_I1",
    "index_I2",
    "index_I3",
    "minimize_over_alpha",
    "Jet",
    "RadialProfile",
    "make_general",
    "make_rotational",
    "QuadratureSpec",
    "integrate",
]
