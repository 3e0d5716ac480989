"""Exception hierarchy shared by every modulant subsystem."""


class ModulantError(Exception):
    """Base class for all library errors."""


class ParseError(ModulantError, ValueError):
    """Malformed expression, module file, wiring or plan text.

    ``offset`` is 0-based into the parsed text; ``line`` and ``column`` are
    1-based.
    """

    def __init__(self, message, offset=0, line=1, column=None):
        self.message = message
        self.offset = offset
        self.line = line
        self.column = offset + 1 if column is None else column
        super().__init__(f"{message} (line {self.line}, column {self.column})")


class EvaluationError(ModulantError, ValueError):
    """Unbound label or state outside the alphabet during evaluation."""


class ValidationError(ModulantError, ValueError):
    """A module, configuration or function violates its invariants."""


class CapExceeded(ModulantError):
    """An enumeration would exceed its configured size limit."""


class NotAcyclicError(ModulantError, ValueError):
    """The operation requires an acyclic module."""


class WiringError(ModulantError, ValueError):
    """A wiring maps unknown inputs, targets unknown nodes or is not total."""
