"""Exception types shared across the package."""


class FormatError(ValueError):
    """A text file (grammar, automaton, forest, PCP instance) failed to parse."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotContextFreeError(ValueError):
    pass


class CyclicInputError(ValueError):
    """Raised when a strategy that needs a word graph is given a cyclic automaton."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        path = " -> ".join(self.cycle + self.cycle[:1])
        super().__init__(f"input automaton is cyclic: {path}")


class MalformedPathError(ValueError):
    pass


class SearchLimitExceeded(RuntimeError):
    pass
