"""Exception hierarchy for qkalman."""


class QKalmanError(Exception):
    """Base class for all library errors."""


class ShapeError(QKalmanError, ValueError):
    pass


class ZeroPatternViolation(QKalmanError, ValueError):
    """A position that must be zero in Kalman block coordinates is not."""

    def __init__(self, position, value):
        self.position = position
        self.value = float(value)
        super().__init__(f"zero pattern violated at {position}: |value| = {self.value:.3e}")


class ImaginaryResidue(QKalmanError, ValueError):
    """A matrix that should be real carries a significant imaginary part."""

    def __init__(self, name, value):
        self.name = name
        self.value = float(value)
        super().__init__(f"{name}: imaginary residue {self.value:.3e}")


class RealizabilityError(QKalmanError, ValueError):
    """Input violates the physical-realizability constraints."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class AsymmetryError(QKalmanError, ValueError):
    def __init__(self, name, value):
        self.name = name
        self.value = float(value)
        super().__init__(f"{name} is not symmetric: residual {self.value:.3e}")


class ConditionViolation(QKalmanError, ValueError):
    """A named decomposition condition failed.

    ``condition`` is a short label such as ``"B2"`` or ``"noiseless/H13"``.
    """

    def __init__(self, condition, value, detail=""):
        self.condition = condition
        self.value = float(value)
        msg = f"condition {condition} violated (residual {self.value:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class BlockCouplingResidual(ConditionViolation):
    pass


class OddRowSet(ConditionViolation):
    def __init__(self, rows):
        self.rows = tuple(rows)
        super().__init__("row-pairing", 0.0, f"nonzero rows {self.rows} are not conjugate-closed")


class SearchCapExceeded(QKalmanError, ValueError):
    pass


class NearSingularResolvent(QKalmanError, ArithmeticError):
    def __init__(self, s, cond):
        self.s = s
        self.cond = float(cond)
        super().__init__(f"sI - A is near singular at s={s!r} (cond={self.cond:.3e})")


class VerdictDisagreement(QKalmanError, RuntimeError):
    """Two independent routes to the same verdict disagree (internal consistency failure)."""


class ModelFormatError(QKalmanError, ValueError):
    """Malformed model document; ``field`` names the offending entry when known."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field '{field}'")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class UnknownExample(QKalmanError, KeyError):
    pass


class StructureError(QKalmanError, ValueError):
    """A matrix lacks a required structural property (e.g. stacked-conjugate rows)."""

    def __init__(self, name, value, detail=""):
        self.name = name
        self.value = float(value)
        msg = f"{name}: structure violated (residual {self.value:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
