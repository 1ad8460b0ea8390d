"""Exception hierarchy shared by all gpdkit modules."""

from __future__ import annotations


class GpdError(Exception):
    """Base class for every error raised by gpdkit."""


class IndexOutOfRange(GpdError):
    """A table refers to an object or morphism index that does not exist."""


class EmptyGroupoid(GpdError):
    """Groupoids must have at least one object."""


class DuplicateLabel(GpdError):
    """Object or morphism labels must be pairwise distinct."""


class NotComposable(GpdError):
    """Requested composition gamma_i o gamma_j with source(i) != target(j)."""

    def __init__(self, i: int, j: int, message: str | None = None):
        self.i = i
        self.j = j
        super().__init__(message or f"morphisms {i} and {j} are not composable")


class GroupoidAxiomError(GpdError):
    """Raised by the smart constructor when validation reports violations."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(v.message for v in report.violations[:5])
        extra = "" if len(report.violations) <= 5 else f" (+{len(report.violations) - 5} more)"
        super().__init__(f"groupoid axioms violated: {lines}{extra}")


class InvalidGroupTable(GpdError):
    """Cayley table fails the group axioms."""


class InvalidActionSpec(GpdError):
    """Action table breaks the identity or compatibility law."""


class EmptyRestriction(GpdError):
    """Restriction to an empty object subset is not a groupoid."""


class ParentMismatch(GpdError):
    """Algebra elements or representations attached to different groupoids."""


class ShapeMismatch(GpdError):
    """Matrix shapes incompatible with the requested operation."""


class ConvergenceFailure(GpdError):
    """Power iteration hit its iteration cap before converging."""


class NotFunctorial(GpdError):
    """A representation violates unit preservation or multiplicativity."""


class UnknownEvent(GpdError):
    """An identification or cell refers to an event that no frame declares."""


class IntraFrameIdentification(GpdError):
    """Two events of one frame were identified; frame outcomes are distinct."""


class NotVerticallyComposable(GpdError):
    """Vertical composition needs matching middle 1-cells."""


class NotHorizontallyComposable(GpdError):
    """Horizontal composition needs matching middle events."""


class SpecError(GpdError):
    """Base class for .gpd language errors; carries a source location."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class UnexpectedCharacter(SpecError):
    def __init__(self, char: str, line: int, column: int):
        self.char = char
        super().__init__(f"unexpected character {char!r}", line, column)


class SpecSyntaxError(SpecError):
    def __init__(self, expected: tuple[str, ...], found: str, line: int, column: int):
        self.expected = tuple(expected)
        self.found = found
        super().__init__(
            f"expected {' or '.join(self.expected)}, found {found}", line, column
        )


class ElaborationError(SpecError):
    """Declaration parsed but could not be turned into a value.

    kind is one of: not_closed, axiom_violation, unknown_name,
    duplicate_label, invalid_table.
    """

    def __init__(self, kind: str, message: str, line: int, column: int):
        self.kind = kind
        super().__init__(f"{kind}: {message}", line, column)
