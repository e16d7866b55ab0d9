"""Exception types shared across the package.

Each error carries the process exit code the CLI maps it to.
"""


class PtlabError(Exception):
    exit_code = 2


class NumericalError(PtlabError):
    """A numerical routine failed to meet its contract."""


class NoSignChangeError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class BranchCutError(NumericalError):
    pass


class PhaseError(NumericalError):
    """Operation requested outside the unbroken PT phase."""


class BlowUpError(PtlabError):
    """Finite-time blow-up of a classical trajectory (step-size underflow)."""

    exit_code = 3

    def __init__(self, message, t_blowup=None, partial=None):
        super().__init__(message)
        self.t_blowup = t_blowup
        self.partial = partial
