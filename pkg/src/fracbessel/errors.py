"""Exception types shared across the package."""

from __future__ import annotations


class NumericError(RuntimeError):
    """An internal numerical routine could not meet its accuracy contract.

    Raised when adaptive refinement stalls, when two independent
    evaluation routes disagree beyond tolerance, or when a quantity
    overflows in a context where that cannot be given a meaning.
    """


class SolvabilityError(RuntimeError):
    """A mode determinant is too close to zero to divide by.

    Carries the offending mode index so callers (and the CLI) can name
    it in diagnostics.
    """

    def __init__(self, k: int, delta: float, floor: float):
        self.k = k
        self.delta = delta
        self.floor = floor
        super().__init__(
            f"mode k={k}: determinant {delta:.6e} is below the "
            f"solvability floor {floor:.1e}; the data cannot be divided "
            f"through for this mode"
        )
