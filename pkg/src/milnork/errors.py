"""Exception types shared across the engine."""


class EngineError(Exception):
    """Domain error in field, tower, chain or operation arithmetic."""


class FieldMismatchError(EngineError):
    """Operands belong to different fields or modulus modes."""


class NotAUnitError(EngineError):
    """Zero (or a non-unit) appeared where a unit is required."""


class SideConditionError(EngineError):
    """A weak divided-power side condition failed; the message names it."""


class ParseError(EngineError):
    """Syntax error with position information."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position
