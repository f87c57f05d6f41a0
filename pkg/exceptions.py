#!/usr/bin/env python3
"""
Error types for the Leadterm certifier.

Every error carries a machine-readable ``code`` so the CLI and the HTTP
service can report it without parsing messages.
"""


class LeadtermError(ValueError):
    code = "leadterm-error"

    def __init__(self, message: str, code: str = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DimensionMismatchError(LeadtermError):
    code = "mismatched-dimensions"


class IndexOutOfRangeError(LeadtermError):
    code = "index-out-of-range"


class GradeUnderflowError(LeadtermError):
    code = "grade-underflow"


class EmptySupportError(LeadtermError):
    code = "empty-support"


class DegeneratePolyhedronError(LeadtermError):
    """No facet with positive level: the support contains the origin."""
    code = "degenerate-polyhedron"


class NonCompactFaceError(LeadtermError):
    code = "face-not-compact"


class UnattainedOrderError(LeadtermError):
    """A minimizing support point meets v*Gamma_+ only on non-compact faces."""
    code = "order-not-on-compact-face"


class ForeignFaceError(LeadtermError):
    code = "foreign-face"


class NonConvenientError(LeadtermError):
    code = "non-convenient"


class NonIntegralDegreeError(LeadtermError):
    code = "non-integral-degree"


class IntegralDegreeError(LeadtermError):
    code = "integral-degree"


class BetaArgumentError(LeadtermError):
    code = "non-positive-beta-argument"


class PoleRangeError(LeadtermError):
    code = "pole-order-out-of-range"


class GridDivergenceError(LeadtermError):
    code = "grid-in-divergence-region"


class SampleStarvationError(LeadtermError):
    code = "sample-starvation"


class PolynomialSyntaxError(LeadtermError):
    code = "syntax-error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
