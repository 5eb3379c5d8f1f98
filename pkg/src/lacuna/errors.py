"""Shared exception types."""


class ResourceLimitError(ValueError):
    """A computation was asked to exceed its configured resource bound."""


class InternalConsistencyError(RuntimeError):
    """An invariant that must hold by construction failed; indicates a bug."""


class AnnihilationError(ValueError):
    """An annihilation hypothesis required by a combinatorial routine fails.

    Carries the offending operation index and a surviving monomial so the
    caller can see exactly which hypothesis broke.
    """

    def __init__(self, t: int, survivor):
        self.t = t
        self.survivor = survivor
        super().__init__(
            f"Q_{t} does not annihilate the input; surviving monomial {survivor}"
        )


class ParseError(ValueError):
    """Syntax error in an element or operation expression."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")
