"""Exception hierarchy shared by the solver stack."""


class SolverError(Exception):
    """Base class for all solver failures."""


class DimensionMismatch(SolverError):
    """Array shapes are inconsistent with the declared problem dimensions."""


class CycleLimitExceeded(SolverError):
    """Pivoting stalled even after the anti-cycling fallback kicked in."""


class InfeasibleError(SolverError):
    """Problem has no feasible solution.

    ``certificate`` carries a dual (Farkas) ray when one is available.
    """

    def __init__(self, msg="infeasible", certificate=None):
        super().__init__(msg)
        self.certificate = certificate


class UnboundedError(SolverError):
    """Objective is unbounded below; ``ray`` is an improving feasible direction."""

    def __init__(self, msg="unbounded", ray=None):
        super().__init__(msg)
        self.ray = ray


class DualInfeasibleError(SolverError):
    """The subproblem dual is infeasible, i.e. the primal subproblem is unbounded."""


class MasterInfeasibleError(SolverError):
    """The Benders master problem (with its current cut set) is infeasible."""


class SubproblemUnboundedError(SolverError):
    """A weighted subproblem is unbounded below; the decomposed problem is ill-posed."""


class NotACertificateError(SolverError):
    """A vector offered as a Farkas/dual-ray certificate fails the certificate check."""


class LambdaOutOfRangeError(SolverError):
    """Weight outside [0, 1]."""


class IterationLimitError(SolverError):
    """Exploration/iteration budget exhausted; suspected numerical cycling."""


class RecursionLimitError(SolverError):
    """Dichotomic recursion exceeded its depth budget."""


class InvalidDimensionError(SolverError):
    """Instance generator called with impossible sizes or parameters."""


class ParseError(Exception):
    """Instance file is malformed; carries 1-based line and column."""

    def __init__(self, msg, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(msg + loc)
        self.line = line
        self.column = column


class VersionMismatchError(ParseError):
    """Instance file header declares an unsupported format version."""
