"""Exception hierarchy. The CLI maps each class onto an exit status."""


class CascadeError(Exception):
    exit_code = 1


class ValidationError(CascadeError, ValueError):
    """Malformed input: out-of-range parameter, bad index, schema violation."""

    exit_code = 2


class PhysicalityError(CascadeError, ValueError):
    """Input is well-formed but does not describe a physical configuration."""

    exit_code = 3


class ThresholdError(PhysicalityError):
    """Pruning recursion produced a transmissivity outside [0, 1]."""

    def __init__(self, k, tau):
        self.k = k
        self.tau = tau
        super().__init__(
            f"pruning recursion leaves [0, 1] at k={k}: tau_{k} = {tau:.17g}"
        )


class ResourceCapError(CascadeError, MemoryError):
    exit_code = 4
