"""Exception types raised by the analysis layers.

Every error carries enough context to reproduce the failing query: offending
parameters, points, or both.  Errors that merely report an unusable input
derive from ValidationError; errors that signal an internal inconsistency
derive from AnalysisError so callers can map them to distinct exit codes.
"""
from __future__ import annotations


class KappaRollError(Exception):
    """Base class for all package errors."""


class ValidationError(KappaRollError):
    """The input object violates a documented precondition."""


class AnalysisError(KappaRollError):
    """An analysis step failed or produced inconsistent results."""


# ---------------------------------------------------------------------------
# geometry-level


class DegenerateChord(ValidationError):
    """Two terminal points coincide within tolerance."""


class ChordTooLong(ValidationError):
    """Chord exceeds the disk diameter 2r; no radius-r disk passes through both points."""


class PointOnCurve(ValidationError):
    """Winding number queried at a point lying on the chain itself."""


class DegenerateInterval(ValidationError):
    """Sub-curve parameters coincide within tolerance."""


# ---------------------------------------------------------------------------
# loop validation


class NotClosed(ValidationError):
    """Piece chain does not close up."""


class NotC1(ValidationError):
    """Tangent directions disagree at a junction."""


class CurvatureExceeded(ValidationError):
    """A piece turns more sharply than the curvature bound allows."""


class SelfIntersecting(ValidationError):
    """Two pieces meet away from a shared junction."""


class WrongOrientation(ValidationError):
    """Total turning is +2*pi; the loop runs counterclockwise."""


class TooShort(ValidationError):
    """Loop length is below the 2*pi*r minimum."""


# ---------------------------------------------------------------------------
# searches and verification


class SearchFailed(AnalysisError):
    """A guaranteed-to-exist object was not found at the working resolution."""


class ContainmentViolated(AnalysisError):
    """A region that must be enclosed has a sample point outside."""


class WitnessNotFound(AnalysisError):
    """No witness configuration found at the working resolution (non-fatal)."""


class MethodDisagreement(AnalysisError):
    """Two decision procedures for the same property disagree."""


# ---------------------------------------------------------------------------
# rolling / decomposition


class StuckState(AnalysisError):
    """Rolling made no parameter progress."""


class NonTermination(AnalysisError):
    """Rolling produced more replacement events than essential families allow."""


class TransversalSeed(AnalysisError):
    """A seed disk crosses the boundary transversally; neck detection must recurse."""


class ResolutionExhausted(AnalysisError):
    """Decomposition could not cover the boundary within its iteration budget."""


class NoSeed(AnalysisError):
    """No interior point with clearance >= r exists at the raster resolution."""


# ---------------------------------------------------------------------------
# raster oracle


class ResolutionTooCoarse(ValidationError):
    """Raster cell size exceeds the r/20 precondition."""
