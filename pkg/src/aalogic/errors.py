"""Exception hierarchy.  Everything raised on bad input derives from ``AAError``."""


class AAError(Exception):
    pass


class ParseError(AAError, ValueError):
    """Bad formula/word text.  ``pos`` is a 0-based character offset or None."""

    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} at position {pos}"
            if text is not None:
                message += f"\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


class LexError(ParseError):
    pass


class AmbiguityError(ParseError):
    """An identifier is neither a declared agent nor a declared atom."""


class FormulaSyntaxError(ParseError):
    """Malformed structure (unbalanced brackets, missing operand, ...)."""


class ModelError(AAError, ValueError):
    pass


class SchemaError(ModelError):
    pass


class PartitionError(ModelError):
    pass


class UnknownAtom(ModelError):
    pass


class UnknownState(ModelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownAgent(ModelError):
    pass


class EmptyUpdate(AAError):
    """No state survives an update."""


class NotAHistory(AAError, ValueError):
    pass


class SideConditionViolated(AAError, ValueError):
    pass


class IncompleteBindings(AAError, ValueError):
    pass


class TooManyLetters(AAError):
    pass


class ProofFormatError(AAError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
