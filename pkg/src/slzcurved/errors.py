"""Exception hierarchy shared by every module of the package."""


class SlzError(Exception):
    """Base class for all package errors."""


class DomainError(SlzError, ValueError):
    """A formula was evaluated outside the region where it is defined."""


class EvaluationError(SlzError):
    """A finite-difference stencil touched a point outside the domain."""


class NumericalError(SlzError):
    """Ill-conditioned data made a numerical result meaningless."""


class SingularityApproach(SlzError):
    """Integration came within the safety margin of a coordinate singularity."""

    def __init__(self, message, t_reached=None, trajectory=None):
        super().__init__(message)
        self.t_reached = t_reached
        self.trajectory = trajectory


class StepUnderflow(SlzError):
    """The adaptive integrator required a step below the allowed minimum."""

    def __init__(self, message, t_reached=None, trajectory=None):
        super().__init__(message)
        self.t_reached = t_reached
        self.trajectory = trajectory


class NoBoundRegion(SlzError):
    """The effective radial potential exceeds the energy everywhere."""


class QuadratureFailure(SlzError):
    """Adaptive quadrature did not reach its accuracy target."""


class SpecialFunctionError(SlzError):
    """A special-function evaluation failed or left its supported range."""


class SeriesDivergence(SpecialFunctionError):
    """No convergent representation was available for a series."""


class ConfigError(SlzError):
    """An experiment configuration was malformed or out of range."""
