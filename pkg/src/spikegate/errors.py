"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Device or gate parameters violate their invariants."""


class ComplianceError(ValueError):
    """Requested source voltage exceeds the compliance limit."""


class ZeroingError(RuntimeError):
    """The device still holds memory after the zeroing hold."""

    def __init__(self, u, s, eps_u, eps_s):
        self.u = u
        self.s = s
        super().__init__(
            f"zeroing left residual memory: |u|={abs(u):.3e} V (tol {eps_u:.1e}), "
            f"|s|={abs(s):.3e} A (tol {eps_s:.1e})"
        )


class CalibrationError(RuntimeError):
    """The '0' and '1' read-current classes overlap."""

    def __init__(self, max_zero, min_one):
        self.max_zero = max_zero
        self.min_one = min_one
        super().__init__(
            f"classes are not separable: max |i| of '0' rows = {max_zero:.4e} A "
            f">= min |i| of '1' rows = {min_one:.4e} A"
        )


class ReplayDivergence(RuntimeError):
    """A replay port was driven differently from the recorded trace."""

    def __init__(self, step, message):
        self.step = step
        super().__init__(f"replay diverged at step {step}: {message}")


class RecordError(RuntimeError):
    """Driving a waveform failed part way; carries the partial trace."""

    def __init__(self, message, partial):
        self.partial = partial
        super().__init__(message)
