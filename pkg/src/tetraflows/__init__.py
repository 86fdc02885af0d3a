"""Exact symbolic tetrahedral graph flows on polynomial Poisson bi-vectors.

The package provides exact sparse rational polynomial arithmetic, skew
multi-vectors with the Schouten bracket and Jacobi test, a graph DSL with a
generic graph-to-operator evaluator, the two tetrahedral flows in closed
form, three generators of polynomial Poisson structures, and the
verification experiments over them (compatibility grids, the exact 1:6
ratio solver, the eps-perturbation probe).
"""

from .analysis import (
    CompatReport,
    RatioSolution,
    compat_report,
    find_ratios,
    perturb_probe,
    reproduce_tables,
)
from .generators import (
    DetSpec,
    OneForm,
    VanhaeckeSpec,
    build_bivector,
    det_bracket,
    form_obstruction,
    premultiply,
    to_oneform,
    vanhaecke_bracket,
)
from .graphflow import (
    FlowResult,
    KGraph,
    balanced_flow,
    evaluate_kgraph,
    gamma1,
    gamma2,
    parse_kgraph,
    render_kgraph,
)
from .multivector import (
    MultiVector,
    RawMatrix,
    SCHOUTEN_SCALE,
    bivector_from_raw,
    is_poisson,
    jacobiator,
    mv_linear_combination,
    schouten,
)
from .polyring import Context, Polynomial, UPoly, compose_bivariate

__version__ = "0.1.0"

__all__ = [
    "CompatReport",
    "Context",
    "DetSpec",
    "FlowResult",
    "KGraph",
    "MultiVector",
    "OneForm",
    "Polynomial",
    "RatioSolution",
    "RawMatrix",
    "SCHOUTEN_SCALE",
    "UPoly",
    "VanhaeckeSpec",
    "balanced_flow",
    "bivector_from_raw",
    "build_bivector",
    "compat_report",
    "compose_bivariate",
    "det_bracket",
    "evaluate_kgraph",
    "find_ratios",
    "form_obstruction",
    "gamma1",
    "gamma2",
    "is_poisson",
    "jacobiator",
    "mv_linear_combination",
    "parse_kgraph",
    "perturb_probe",
    "premultiply",
    "render_kgraph",
    "reproduce_tables",
    "schouten",
    "to_oneform",
    "vanhaecke_bracket",
]
