"""Exception types raised by the estimation library."""

from typing import Optional


class ArgumentError(ValueError):
    """Invalid argument value (range, shape or divisibility)."""


class InvalidKernelError(ValueError):
    """Kernel profile violates its invariants or has a zero normalisation."""


class SingularPointError(ValueError):
    """Tangent requested at a point of the singular set."""


class DegenerateGapError(ValueError):
    """No spectral gap between the d-th and (d+1)-th eigenvalues."""


class SamplerError(RuntimeError):
    """Rejection sampler exceeded its trial budget."""


class ProblemTooLargeError(RuntimeError):
    """Flat-metric problem exceeds the configured size cap."""


class OracleTooLargeError(RuntimeError):
    """LP oracle called on more points than it can enumerate."""


class FlowSolverError(RuntimeError):
    """Min-cost-flow backend did not reach an optimal solution."""


class ExperimentError(RuntimeError):
    """Failure inside one Monte-Carlo trial, tagged with its coordinates."""

    def __init__(self, message: str, n: Optional[int] = None, trial: Optional[int] = None,
                 seed: Optional[int] = None):
        super().__init__(message)
        self.n = n
        self.trial = trial
        self.seed = seed

    def __str__(self) -> str:
        base = super().__str__()
        if self.n is None:
            return base
        return f"{base} (N={self.n}, trial={self.trial}, seed={self.seed})"

    def __reduce__(self):
        return self.__class__, (super().__str__(), self.n, self.trial, self.seed)
