"""Exhaustive ground truth on a bounded integer box.

Solvability inside the truncated box is decidable by brute force, and
every probabilistic verdict in the package is cross-checked against this
scan. Evaluation is exact integer arithmetic throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceededError
from .polynomial import Polynomial

__all__ = ["BoxSearchResult", "search_box", "agrees_with_HP_diagonal", "DEFAULT_BUDGET"]

DEFAULT_BUDGET = 100_000_000
MINIMIZER_CAP = 64


@dataclass(frozen=True)
class BoxSearchResult:
    """Global minimum of D^2 over the box, with all minimizers.

    ``min_value == 0`` exactly when a solution exists inside the box. The
    minimizer list is capped; ``minimizer_count`` is the true total.
    """

    box: tuple[int, ...]
    min_value: int
    minimizers: tuple[tuple[int, ...], ...]
    minimizer_count: int

    @property
    def solvable(self) -> bool:
        return self.min_value == 0

    @property
    def truncated_minimizers(self) -> int:
        return self.minimizer_count - len(self.minimizers)

    def to_dict(self) -> dict:
        return {
            "box": list(self.box),
            "min_value": self.min_value,
            "minimizers": [list(t) for t in self.minimizers],
            "minimizer_count": self.minimizer_count,
            "solvable": self.solvable,
        }


def search_box(
    polynomial: Polynomial, box: Sequence[int], budget: int = DEFAULT_BUDGET
) -> BoxSearchResult:
    """Scan every tuple with 0 <= n_i <= box_i and minimize D^2 exactly."""
    box = tuple(int(b) for b in box)
    if len(box) != polynomial.num_variables:
        raise ValueError(
            f"box of length {len(box)} does not match "
            f"{polynomial.num_variables} variables"
        )
    if any(b < 0 for b in box):
        raise ValueError("box bounds must be non-negative")
    points = math.prod(b + 1 for b in box)
    if points > budget:
        raise BudgetExceededError(
            f"box holds {points} tuples, above the enumeration budget {budget}"
        )
    best: int | None = None
    minimizers: list[tuple[int, ...]] = []
    count = 0
    for point in itertools.product(*(range(b + 1) for b in box)):
        value = polynomial.evaluate(point) ** 2
        if best is None or value < best:
            best = value
            minimizers = [point]
            count = 1
        elif value == best:
            count += 1
            if len(minimizers) < MINIMIZER_CAP:
                minimizers.append(point)
    return BoxSearchResult(
        box=box,
        min_value=best,
        minimizers=tuple(minimizers),
        minimizer_count=count,
    )


def agrees_with_HP_diagonal(polynomial: Polynomial, space, box: Sequence[int] | None = None) -> bool:
    """Check the brute-force scan against the untilted problem diagonal.

    Both routes enumerate the same grid, so minima and argmin sets must
    coincide; the box, when given, must equal cutoffs - 1.
    """
    from .hamiltonian import exact_square_diagonal

    expected = tuple(c - 1 for c in space.cutoffs)
    if box is None:
        box = expected
    else:
        box = tuple(int(b) for b in box)
        if box != expected:
            raise ValueError(f"box {box} does not match cutoffs - 1 = {expected}")
    search = search_box(polynomial, box)
    diag = exact_square_diagonal(polynomial, space)
    diag_min = min(diag)
    diag_argmin = {
        space.index_to_tuple(i) for i, v in enumerate(diag) if v == diag_min
    }
    if diag_min != search.min_value:
        return False
    if search.truncated_minimizers == 0:
        return diag_argmin == set(search.minimizers)
    return set(search.minimizers) <= diag_argmin and len(diag_argmin) == search.minimizer_count
