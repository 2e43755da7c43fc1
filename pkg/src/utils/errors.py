"""
Error types for the wave asymptotics toolkit
Every failure a library operation can signal derives from ToolkitError
"""


class ToolkitError(Exception):
    """Base class for all toolkit failures"""


class ConfigError(ToolkitError):
    """Configuration file could not be loaded or failed validation"""


# forcing / singulant evaluation

class SingularityHit(ToolkitError):
    """Evaluation point lies inside the exclusion radius of a forcing singularity"""


class BranchCutHit(ToolkitError):
    """Evaluation point lies on a branch cut of a principal-branch function"""


class DomainError(ToolkitError):
    """Parameters outside the domain where a closed form is defined"""


# ode

class StepFailure(ToolkitError):
    """Adaptive step controller could not advance the solution"""


class DivisionNearZero(ToolkitError):
    """|phi| or |q_s| dropped below the division guard during integration"""


class WindowTooShort(ToolkitError):
    """Measurement window holds too few oscillations"""


class NoWaveDetected(ToolkitError):
    """Residual oscillation is below the numerical noise floor"""


# singulant

class PathTooClose(ToolkitError):
    """Quadrature path violates the clearance to a singularity or branch cut"""


class QuadratureFailure(ToolkitError):
    """Adaptive quadrature did not reach the requested accuracy"""


class SeedFailure(ToolkitError):
    """No admissible initial direction for a Stokes line"""


class CorrectorDivergence(ToolkitError):
    """Newton corrector failed to return to the level curve Im chi = 0"""


# recurrence

class SequenceOverflow(ToolkitError):
    """Unnormalized coefficient exceeds the floating point range"""


class NonConvergence(ToolkitError):
    """Extrapolated limit did not settle within tolerance"""


class BranchMismatch(ToolkitError):
    """Residue-class limits disagree after phase reconciliation"""


class IllConditioned(ToolkitError):
    """Least-squares fit is too short or its basis is numerically collinear"""


# amplitude

class WrongRegime(ToolkitError):
    """Formula requested outside the parameter regime it was derived for"""


class NoStokesCrossing(ToolkitError):
    """Stokes line from a singularity never reaches the positive real axis"""
