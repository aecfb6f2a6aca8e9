"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid geometric input (point outside model disc, degenerate arc, ...)."""


class MalformedPolygonError(GeometryError):
    """Polygon with too few vertices or inconsistent structure."""


class EnumerationCapError(ValueError):
    """Inscribed-polygon enumeration refused: too many vertices (2^n subsets)."""


class BracketError(RuntimeError):
    """A root bracket expected from a sign change could not be established."""


class NoAdmissibleTauError(RuntimeError):
    """No perturbation size on the supplied grid restores admissibility."""


class DegenerateCoreError(ValueError):
    """Compact core is empty or does not contain the disc center."""


class MeshError(ValueError):
    """Triangulation failed (non-simple domain, node cap exceeded, ...)."""


class SolverError(RuntimeError):
    """Nonlinear solve failed (stagnation, singular stiffness)."""


class UnsupportedDomainError(ValueError):
    """Operation requires a disc-shaped domain."""
