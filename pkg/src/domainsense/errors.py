"""Exception hierarchy. ScorerError maps to CLI exit code 2, the rest to 1."""


class DomainSenseError(Exception):
    """Base class for all package errors."""


class LexiconError(DomainSenseError):
    """Malformed or inconsistent lexicon file."""


class DatasetError(DomainSenseError):
    """Invalid dataset file or instances that violate lexicon constraints."""

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems or [])

    def __str__(self):
        base = super().__str__()
        if not self.problems:
            return base
        lines = "\n".join(f"  - {p}" for p in self.problems)
        return f"{base}\n{lines}"


class InventoryError(DomainSenseError):
    """Malformed inventory file, hierarchy cycle, or undeclared label."""


class NoCandidateDomainsError(DomainSenseError):
    """Every sense of a word is unassigned and the inventory has no fallback."""

    def __init__(self, word):
        super().__init__(f"no candidate domains for word {word!r}")
        self.word = word


class PromptError(DomainSenseError):
    """Invalid template pattern or missing placeholder binding."""


class ScorerError(DomainSenseError):
    """Scoring backend failure: remote unreachable, fixture miss, bad response."""


class EvalError(DomainSenseError):
    """Prediction/instance mismatch or other evaluation input problem."""


class DegenerateInputError(EvalError):
    """Statistic undefined for the given input (e.g. constant rank vector)."""


class ManifestError(DomainSenseError):
    """Invalid run manifest."""
