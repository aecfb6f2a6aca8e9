"""Scherk-type minimal graphs on a geodesic disc.

Exact disc-model geometry, admissible Jenkins-Serrin polygon domains,
capped finite-element solves of four divergence-form operators, and
radial-limit (Fatou-type) classification reports.
"""

from .domains import (
    AdmissibilityReport,
    CompactCore,
    ExampleSchedule,
    ScherkPolygon,
    attach_and_perturb,
    check_admissible,
    compact_core,
    inscribed_quadrilateral,
    iterate_example,
    load_domain_json,
    regular_trapezoid,
    save_domain_json,
)
from .errors import (
    BracketError,
    DegenerateCoreError,
    EnumerationCapError,
    GeometryError,
    MalformedPolygonError,
    MeshError,
    NoAdmissibleTauError,
    SolverError,
    UnsupportedDomainError,
)
from .fatou import (
    Compression,
    FatouReport,
    HypothesisReport,
    RayTrace,
    TraceParams,
    check_hypotheses,
    compress,
    fatou_report,
    trace_and_classify,
    tv_integral,
)
from .geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    DiscSpec,
    GeodesicArc,
    GeodesicPolygon,
    MetricModel,
    disc,
    distance,
    metric_model,
    polar_density,
)
from .meshing import Mesh, triangulate
from .solver import (
    BoundaryData,
    Field,
    OperatorSpec,
    operator,
    origin_gaps,
    solve,
    solve_scherk,
)

__version__ = "0.1.0"
