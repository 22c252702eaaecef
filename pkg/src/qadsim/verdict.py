"""Turn a final state into a solvability verdict.

Identification follows the majority-probability criterion: the most likely
basis outcome counts as identified only when its probability strictly
exceeds the threshold (default 1/2, configurable upward for stricter
readings). A claimed solution is always re-checked by exact substitution
before it is emitted, so that verdict can never be wrong; the complementary
verdict stays probabilistic by nature and never carries confidence 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle as oracle_mod
from .fockspace import QuantumState
from .hamiltonian import ProblemInstance

__all__ = [
    "SOLUTION",
    "NO_SOLUTION_PROBABLE",
    "INCONCLUSIVE",
    "Identification",
    "Verdict",
    "AgreementReport",
    "identify",
    "decide",
    "cross_check",
]

SOLUTION = "solution"
NO_SOLUTION_PROBABLE = "no_solution_probable"
INCONCLUSIVE = "inconclusive"

# Confidence values are probabilities that must stay strictly below 1.
MAX_CONFIDENCE = 1.0 - 1e-12


@dataclass(frozen=True)
class Identification:
    outcome: tuple[int, ...]
    probability: float
    identified: bool

    def to_dict(self) -> dict:
        return {
            "outcome": list(self.outcome),
            "probability": self.probability,
            "identified": self.identified,
        }


@dataclass(frozen=True)
class Verdict:
    status: str
    top_outcome: tuple[int, ...]
    top_probability: float
    threshold: float
    witness: tuple[int, ...] | None = None
    confidence: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "top_outcome": list(self.top_outcome),
            "top_probability": self.top_probability,
            "threshold": self.threshold,
            "witness": None if self.witness is None else list(self.witness),
            "confidence": self.confidence,
            "note": self.note,
        }


def identify(final_state: QuantumState, threshold: float = 0.5) -> Identification:
    """Most probable basis outcome; identified iff probability > threshold.

    Exactly tied maxima report the lexicographically smallest tuple and are
    never identified, regardless of the threshold.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly between 0 and 1")
    probs = final_state.probabilities()
    outcome, top = final_state.top_outcome()
    tied = int((probs == top).sum()) > 1
    identified = (top > threshold) and not tied
    return Identification(outcome=outcome, probability=top, identified=identified)


def decide(
    inst: ProblemInstance, identification: Identification, threshold: float = 0.5
) -> Verdict:
    """Map an identification to a verdict by exact substitution."""
    if not identification.identified:
        return Verdict(
            status=INCONCLUSIVE,
            top_outcome=identification.outcome,
            top_probability=identification.probability,
            threshold=threshold,
            note="identification failed; increase the run time T and retry",
        )
    value = inst.polynomial.evaluate(identification.outcome)
    if value == 0:
        return Verdict(
            status=SOLUTION,
            top_outcome=identification.outcome,
            top_probability=identification.probability,
            threshold=threshold,
            witness=identification.outcome,
            note="witness verified by exact substitution",
        )
    return Verdict(
        status=NO_SOLUTION_PROBABLE,
        top_outcome=identification.outcome,
        top_probability=identification.probability,
        threshold=threshold,
        confidence=min(identification.probability, MAX_CONFIDENCE),
        note=f"D(top outcome) = {value}",
    )


@dataclass(frozen=True)
class AgreementReport:
    verdict_status: str
    oracle: oracle_mod.BoxSearchResult
    agree: bool
    detail: str

    def to_dict(self) -> dict:
        return {
            "verdict_status": self.verdict_status,
            "oracle": self.oracle.to_dict(),
            "agree": self.agree,
            "detail": self.detail,
        }


def cross_check(
    inst: ProblemInstance, verdict: Verdict, box=None
) -> AgreementReport:
    """Compare a verdict with the exhaustive scan over the box.

    The box defaults to cutoffs - 1 so both sides look at the same grid;
    larger boxes are rejected because the quantum run never saw them.
    """
    cutoff_box = tuple(c - 1 for c in inst.space.cutoffs)
    if box is None:
        box = cutoff_box
    else:
        box = tuple(int(b) for b in box)
        if len(box) != inst.space.modes or any(
            b > c for b, c in zip(box, cutoff_box)
        ):
            raise ValueError(f"box {box} must fit within cutoffs - 1 = {cutoff_box}")
    search = oracle_mod.search_box(inst.polynomial, box)
    if verdict.status == SOLUTION:
        agree = search.solvable and verdict.witness in search.minimizers
        detail = (
            "witness confirmed by exhaustive search"
            if agree
            else "claimed witness is not an exhaustive-search minimizer"
        )
    elif verdict.status == NO_SOLUTION_PROBABLE:
        agree = not search.solvable
        detail = (
            f"exhaustive minimum {search.min_value} > 0 in the box"
            if agree
            else "exhaustive search found a solution the run missed"
        )
    else:
        agree = False
        detail = "identification inconclusive; no claim to compare"
    return AgreementReport(
        verdict_status=verdict.status, oracle=search, agree=agree, detail=detail
    )
