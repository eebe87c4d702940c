"""Error types shared by the net formalisms."""

from dataclasses import dataclass
from typing import List, Optional, Sequence


class NetError(Exception):
    """Base class for every error raised by nwn."""
    pass


class MultisetError(NetError):
    """Raised when a multiset or vector operation is misused."""
    pass


class DomainMismatch(MultisetError):
    """Raised when multisets over different domains are combined."""

    def __init__(self, left: Optional[str], right: Optional[str]):
        self.left = left
        self.right = right
        super().__init__(f"Cannot combine multisets over domains '{left}' and '{right}'")


class CountOverflow(MultisetError):
    """Raised when a count leaves the supported range."""

    def __init__(self, element: object, count: int):
        self.element = element
        self.count = count
        super().__init__(f"Count {count} for '{element}' exceeds the supported bound")


class UnknownTransition(NetError):
    """Raised when a transition id is not declared by the net."""

    def __init__(self, transition: str):
        self.transition = transition
        super().__init__(f"Unknown transition: {transition}")


class UnknownObjectNet(NetError):
    """Raised when an object net name is not part of the EOS."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown object net: {name}")


class UnknownEvent(NetError):
    """Raised when an event index is out of range."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Unknown event: {index}")


class NotEnabled(NetError):
    """Raised when a transition is fired on a marking that does not cover its pre-set."""

    def __init__(self, transition: str):
        self.transition = transition
        super().__init__(f"Transition '{transition}' is not enabled")


class ModeNotEnabled(NetError):
    """Raised when a mode does not enable its transition or event."""

    def __init__(self, transition: str, reason: str = ""):
        self.transition = transition
        self.reason = reason
        detail = f": {reason}" if reason else ""
        super().__init__(f"Mode does not enable '{transition}'{detail}")


@dataclass(frozen=True)
class Violation:
    """A single structural problem found by a validator."""

    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.location}: {self.message}"


class ValidationError(NetError):
    """Raised when a net fails its formalism's structural checks."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations: List[Violation] = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(f"Validation failed with {len(self.violations)} violation(s):\n{lines}")


class TranslationError(NetError):
    """Raised when a construction cannot be applied to its source."""
    pass


class InvalidSource(TranslationError):
    """Raised when the source net does not pass its validator."""
    pass


class NotRnu(TranslationError):
    """Raised when a channel net is not in the rename fragment."""
    pass


class NotConservative(TranslationError):
    """Raised when an EOS has a transition that destroys an object type."""
    pass


class NotNormalized(TranslationError):
    """Raised when an EOS violates the one-event-per-transition normal form."""
    pass


class OrderUnavailable(NetError):
    """Raised when coverability is asked of a system without a cover order."""
    pass


class StepNotEnabled(NetError):
    """Raised when a replayed trace hits a step that cannot fire."""

    def __init__(self, index: int, label: str):
        self.index = index
        self.label = label
        super().__init__(f"Step {index} ('{label}') is not enabled")
