"""Error hierarchy shared by the library and the command-line front end.

Every error carries the process exit code the CLI reports for it:
2 for structural or input validation failures, 3 for numerical-domain
failures, 1 for failed verification preconditions.
"""


class CurvLabError(Exception):
    """Base class for all laboratory errors."""

    exit_code = 1


class StructuralValidationError(CurvLabError):
    """Input is malformed or violates a structural invariant."""

    exit_code = 2


class ExpressionSyntaxError(StructuralValidationError):
    """Expression text does not follow the grammar."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at byte offset {offset}")


class UnknownIdentifierError(ExpressionSyntaxError):
    """Identifier is neither a known function nor a coordinate name."""


class ArityError(ExpressionSyntaxError):
    """Function applied to the wrong number of arguments."""


class MetricFileError(StructuralValidationError):
    """Metric definition file could not be parsed or validated."""

    def __init__(
        self, message: str, line: int | None = None, column: int | None = None
    ):
        self.line = line
        self.column = column
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
            location += ": "
        super().__init__(f"{location}{message}")


class DimensionError(StructuralValidationError):
    """Operation is undefined in the metric's dimension."""


class ContactStructureError(StructuralValidationError):
    """A contact metric identity fails at a sample point."""

    def __init__(self, identity: str, point: tuple[float, ...], residual: float):
        self.identity = identity
        self.point = point
        self.residual = residual
        super().__init__(
            f"contact identity '{identity}' violated at {point} "
            f"(residual {residual:.3e})"
        )


class CatalogLookupError(StructuralValidationError):
    """No catalog entry with the requested name."""


class InvalidArgumentError(StructuralValidationError):
    """Argument outside the operation's accepted range."""


class NumericalDomainError(CurvLabError):
    """Evaluation left the numerical domain of an expression or metric."""

    exit_code = 3


class DomainError(NumericalDomainError):
    """Expression evaluated outside its domain (log of nonpositive, division by ~0)."""

    def __init__(self, message: str, node: str = ""):
        self.node = node
        suffix = f" in '{node}'" if node else ""
        super().__init__(f"{message}{suffix}")


class DegenerateMetricError(NumericalDomainError):
    """Metric determinant is below the degeneracy threshold."""

    def __init__(self, determinant: float, point: tuple[float, ...]):
        self.determinant = determinant
        self.point = point
        super().__init__(
            f"degenerate metric at {point}: |det g| = {abs(determinant):.3e}"
        )


class HypothesisError(CurvLabError):
    """Preconditions of a verification procedure are not satisfied."""
