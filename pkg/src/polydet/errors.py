"""Exception hierarchy shared by all polydet modules.

Every error carries a stable machine-readable ``code`` (its class name) so the
CLI can emit structured error JSON without string matching.
"""

from __future__ import annotations


class PolydetError(Exception):
    """Base class for all library errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# ---- metric construction / evaluation ----

class GaussBonnetViolation(PolydetError):
    """Vertex exponents do not sum to -2 within tolerance."""


class DuplicateVertex(PolydetError):
    """Two conical points share the same position."""


class InvalidExponent(PolydetError):
    """Vertex exponent b <= -1 (non-positive cone angle)."""


class NonpositiveScale(PolydetError):
    """Overall metric scale C must be positive."""


class EvaluationAtVertex(PolydetError):
    """Pointwise evaluation requested exactly at a conical point."""


class GaugeVertexVariation(PolydetError):
    """Angle variation requested for the gauge (compensating) vertex 1."""


class InvalidMetricJSON(PolydetError):
    """Metric JSON file does not match the documented schema."""


# ---- quadrature ----

class ToleranceNotReached(PolydetError):
    """Adaptive quadrature exhausted its subdivision budget.

    Carries the partial result so callers can inspect how far it got.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


# ---- regularized 1D integrals ----

class NonpositiveAngle(PolydetError):
    """Cone angle beta must be positive."""


class ContourPoleCollision(PolydetError):
    """A cotangent pole sits on the contour lines and no deterministic
    rewrite applies."""


# ---- cone kernels ----

class PoleOnContour(PolydetError):
    """Heat-kernel pole coincides with the contour in a configuration the
    deterministic half-residue rule cannot absorb."""


class CoincidentPoints(PolydetError):
    """Resolvent kernel evaluated on the diagonal."""


# ---- determinant comparisons ----

class AngleMultisetMismatch(PolydetError):
    """Same-angle comparison called on metrics with different exponent
    multisets."""


class ScaleMismatch(PolydetError):
    """Same-angle comparison requires equal overall scales."""


# ---- elliptic oracle ----

class DegenerateQuartic(PolydetError):
    """Branch points of the quartic are too close for reliable periods."""


# ---- finite-difference harness ----

class PerturbationLeavesDomain(PolydetError):
    """A finite-difference step would leave the admissible metric domain."""
