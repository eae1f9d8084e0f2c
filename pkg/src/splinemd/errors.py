"""Exception types shared across the toolkit."""


class SplinemdError(Exception):
    """Base class for toolkit-specific failures."""


class FitError(SplinemdError):
    """Least-squares spline fit failed (rank deficiency or bad samples)."""


class EnvelopeError(SplinemdError):
    """Envelope estimation failed (no usable tangent points)."""


class SoulSingularityError(SplinemdError):
    """Amplitude or frequency too close to zero for the operator."""


class DegenerateSystemError(SplinemdError):
    """Frequency-extraction system is rank deficient."""


class FrequencyExtractionError(SplinemdError):
    """Recovered inverse-square frequency is not usably positive."""
