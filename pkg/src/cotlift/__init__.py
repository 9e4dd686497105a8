"""Lifts of Riemannian geometry to the cotangent bundle.

Parse a metric, lift the Levi-Civita connection to the cotangent bundle
three ways (complete lift via the extension metric, balanced lift via frame
formulas, symplectified complete lift), and verify the defining identities
numerically through truncated Taylor arithmetic.
"""

from ._version import __version__
from .base_geometry import (
    CATALOG,
    ConnectionValue,
    CurvatureValue,
    FieldSpec,
    GeometryError,
    ManifoldSpec,
    MetricError,
    SamplingError,
    catalog_manifolds,
    christoffel_at,
    flat2,
    halfplane2,
    riemann_at,
    scalar_curvature_at,
    sphere2,
)
from .cotangent import PhasePoint, PhaseVector, sample_phase_point
from .expr import EvalError, ExprError, ParseError, evaluate, free_vars, parse, to_text
from .jets import Jet, JetDomainError, JetError, JetShapeError
from .lifted_connections import (
    NTensorValue,
    RiemannExtensionValue,
    balanced_lift_at,
    complete_connection_at,
    n_tensor_at,
    riemann_extension_at,
    symplectified_connection_at,
    symplectify_at,
)
from .verify import PropertyReport, ReportEntry, SampleConfig, run_suites
