"""Exception types shared across the package."""

from __future__ import annotations


class ContractError(ValueError):
    """A caller violated an operation's precondition."""


class StructuralError(ValueError):
    """A graph constraint was violated (cycle, unknown node, bad arc)."""


class DiscretizationError(ValueError):
    """A column cannot be discretized as requested."""

    def __init__(self, column: str, message: str):
        super().__init__(f"column {column!r}: {message}")
        self.column = column


class ImpossibleEvidenceError(Exception):
    """The supplied evidence has probability zero under the model.

    Distinct from numerical underflow: raised only when the evidence
    probability is exactly zero. ``culprits`` lists evidence variables
    whose removal alone restores possibility (empty if the conflict
    needs several items at once).
    """

    def __init__(self, message: str, culprits: list[str] | None = None):
        super().__init__(message)
        self.culprits = culprits or []


class RunSpecError(ValueError):
    """A run-spec file failed schema or semantic validation."""
