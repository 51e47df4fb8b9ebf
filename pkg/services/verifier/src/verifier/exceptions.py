"""Exceptions raised by the verifier."""


class VerifierError(Exception):
    """Base exception for verifier errors."""


class ConfigurationError(VerifierError):
    """A check configuration or command-line invocation is invalid (exit code 2)."""


class DegenerateSearchError(VerifierError):
    """Every ratio-search start had a zero denominator."""

    def __init__(self, starts: int) -> None:
        self.starts = starts
        super().__init__(f"All {starts} ratio-search starts were degenerate (zero denominator)")


class UnknownCheckError(VerifierError, KeyError):
    """No check is registered under the requested id."""

    def __init__(self, lemma: str) -> None:
        self.lemma = lemma
        super().__init__(f"Unknown check: {lemma}")

    def __str__(self) -> str:
        return f"Unknown check: {self.lemma}"
