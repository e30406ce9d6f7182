"""Exception hierarchy shared across the package."""


class WaveguideQEDError(Exception):
    """Base class for every error raised by wgqed."""


class DomainError(WaveguideQEDError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NumericalError(WaveguideQEDError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy answer."""


class SingularMatrixError(NumericalError):
    """The coupling matrix is numerically non-invertible at some detuning."""

    def __init__(self, detuning, condition, index=None):
        self.detuning = detuning
        self.condition = condition
        self.index = index
        where = f" (grid index {index})" if index is not None else ""
        super().__init__(
            f"coupling matrix is singular at detuning {detuning:.9g}{where}; "
            f"condition number {condition:.3g}"
        )


class RefinementError(NumericalError):
    """Sub-grid polishing of an extremum left its bracketing interval."""


class ScanRangeError(NumericalError):
    """A required crossing lies outside the scanned detuning window."""


class BracketError(NumericalError):
    """No root could be bracketed in the admissible interval."""


class UnresolvedBranchError(NumericalError):
    """Two periodic branches explain the measurement equally well."""


class SeparabilityError(NumericalError):
    """Spectral peaks overlap too much to be treated as separate emitters."""


class ConfigError(WaveguideQEDError, ValueError):
    """A scenario configuration failed validation."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        loc = []
        if field is not None:
            loc.append(f"field '{field}'")
        if line is not None:
            loc.append(f"line {line}")
        prefix = f"{', '.join(loc)}: " if loc else ""
        super().__init__(prefix + message)
