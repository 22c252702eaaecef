"""Time evolution over the interpolation schedule and its diagnostics:
instantaneous spectral flow, the run-time lower-bound product, and
stability of the outcome under growing cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import oracle as oracle_mod
from ._kernels import rk4_segment
from .errors import EvolutionError
from .fockspace import FockSpace, QuantumState, coherent_state
from .hamiltonian import (
    EvolutionOperands,
    ProblemInstance,
    Schedule,
    evolution_operands,
    hp_diagonal,
)

__all__ = [
    "EvolutionResult",
    "SpectralFlow",
    "BoundDiagnostic",
    "StabilityRow",
    "StabilityTable",
    "default_dt",
    "evolve",
    "evolve_diagonal",
    "spectral_flow",
    "bound_diagnostic",
    "truncation_stability",
]

# Per-run norm bookkeeping limits; a run whose worst per-step deviation
# reaches the total limit is flagged failed.
STEP_DRIFT_LIMIT = 1e-9
TOTAL_DRIFT_LIMIT = 1e-6

STATUS_OK = "ok"
STATUS_DEGENERATE_START = "degenerate_start"


@dataclass
class EvolutionResult:
    final_state: QuantumState
    norm_drift: float  # largest per-step |1 - ||psi|||
    total_drift: float  # accumulated per-step deviations
    steps: int
    dt: float
    failed: bool
    ground_overlap_trace: list[tuple[float, float]] | None = None

    def to_dict(self) -> dict:
        out = {
            "norm_drift": self.norm_drift,
            "total_drift": self.total_drift,
            "steps": self.steps,
            "dt": self.dt,
            "failed": self.failed,
        }
        if self.ground_overlap_trace is not None:
            out["ground_overlap_trace"] = [[s, o] for s, o in self.ground_overlap_trace]
        return out


@dataclass
class SpectralFlow:
    grid: np.ndarray
    levels: np.ndarray  # shape (grid, L), ascending at each s
    min_gap: float  # over interior grid points
    min_gap_s: float

    def endpoint_gap(self) -> float:
        """E1 - E0 of the final Hamiltonian (s = 1)."""
        return float(self.levels[-1, 1] - self.levels[-1, 0])

    def to_dict(self) -> dict:
        return {
            "grid": [float(s) for s in self.grid],
            "levels": [[float(e) for e in row] for row in self.levels],
            "min_gap": self.min_gap,
            "min_gap_s": self.min_gap_s,
        }


@dataclass
class BoundDiagnostic:
    """Run-time lower-bound data: the bound reads 4 < g * T * delta_ie.

    ``delta_ie`` is the energy spread of the initial state measured with
    the final Hamiltonian. A spread of zero means the initial state is
    already a final-Hamiltonian eigenstate, reported as its own status
    rather than as a violated bound.
    """

    delta_ie: float
    g_theta: float
    total_time: float
    product: float
    satisfied: bool | None
    status: str

    def to_dict(self) -> dict:
        return {
            "delta_ie": self.delta_ie,
            "g_theta": self.g_theta,
            "total_time": self.total_time,
            "product": self.product,
            "satisfied": self.satisfied,
            "status": self.status,
        }


def default_dt(operands: EvolutionOperands, total_time: float) -> float:
    """Step rule min(T/1000, 0.01 / largest |diagonal| of H)."""
    hmax = max(
        float(np.max(np.abs(operands.hi_diag))),
        float(np.max(np.abs(operands.hp_diag))),
        1e-12,
    )
    return min(total_time / 1000.0, 0.01 / hmax)


def evolve(
    inst: ProblemInstance,
    schedule: Schedule,
    dt: float | None = None,
    overlap_samples: int = 0,
) -> EvolutionResult:
    """Integrate from the coherent ground state of H_I to time T.

    Fixed-step classic RK4 with per-step renormalization; the recorded
    drift shows how far each step strayed from unitarity before the
    correction. ``overlap_samples`` > 0 additionally samples the overlap
    with the instantaneous ground state that many times along the run.
    """
    operands = evolution_operands(inst)
    psi0 = coherent_state(inst.space, inst.alphas)
    return _evolve_operands(inst.space, operands, psi0, schedule, dt, overlap_samples)


def evolve_diagonal(
    space: FockSpace,
    alphas,
    hp_diag: np.ndarray,
    schedule: Schedule,
    dt: float | None = None,
) -> EvolutionResult:
    """Evolution with an explicit final diagonal (perturbed-coefficient runs)."""
    from .hamiltonian import SymmetryBreak
    from .polynomial import Polynomial

    from .fockspace import broadcast_alphas

    alphas = broadcast_alphas(alphas, space.modes)
    placeholder = Polynomial.constant(0, [f"x{i}" for i in range(space.modes)])
    inst = ProblemInstance(placeholder, space, alphas, SymmetryBreak.off(space.modes))
    operands = evolution_operands(inst, hp_diag=hp_diag)
    psi0 = coherent_state(space, alphas)
    return _evolve_operands(space, operands, psi0, schedule, dt, 0)


def _evolve_operands(
    space: FockSpace,
    operands: EvolutionOperands,
    psi0: QuantumState,
    schedule: Schedule,
    dt: float | None,
    overlap_samples: int,
) -> EvolutionResult:
    total_time = schedule.total_time
    if dt is None:
        dt = default_dt(operands, total_time)
    elif dt > total_time / 1000.0:
        raise ValueError(f"dt={dt} exceeds T/1000={total_time / 1000.0}")
    n_steps = max(1, int(math.ceil(total_time / dt)))
    dt = total_time / n_steps

    psi = psi0.amplitudes.copy()
    trace = None
    if overlap_samples > 0:
        sample_s = np.linspace(0.0, 1.0, max(overlap_samples, 2))
        boundaries = np.round(sample_s * n_steps).astype(int)
        trace = [(0.0, _ground_overlap(operands, schedule, 0.0, psi))]
    else:
        boundaries = np.array([0, n_steps])

    max_drift = 0.0
    sum_drift = 0.0
    for seg_start, seg_end in zip(boundaries[:-1], boundaries[1:]):
        seg_steps = int(seg_end - seg_start)
        if seg_steps > 0:
            seg_max, seg_sum, finite = rk4_segment(
                psi,
                operands.hi_diag,
                operands.hp_diag,
                operands.hop,
                operands.hop_offsets,
                operands.sizes,
                operands.strides,
                seg_start * dt,
                seg_steps,
                dt,
                total_time,
                schedule.shape_tag,
            )
            max_drift = max(max_drift, seg_max)
            sum_drift += seg_sum
            if not finite:
                raise EvolutionError(
                    f"non-finite amplitudes after {seg_start + seg_steps} steps; "
                    f"the step dt={dt:.3e} is too large for this Hamiltonian"
                )
        if trace is not None:
            s = float(seg_end) / n_steps
            trace.append((s, _ground_overlap(operands, schedule, s, psi)))

    final = QuantumState(space, psi)
    failed = not (max_drift < TOTAL_DRIFT_LIMIT)
    return EvolutionResult(
        final_state=final,
        norm_drift=max_drift,
        total_drift=sum_drift,
        steps=n_steps,
        dt=dt,
        failed=failed,
        ground_overlap_trace=trace,
    )


def _dense_h(operands: EvolutionOperands, schedule: Schedule, s: float) -> np.ndarray:
    jt = schedule.jtilde(s)
    ut = schedule.utilde(s)
    return jt * operands.hi_dense() + ut * np.diag(operands.hp_diag.astype(np.complex128))


def _ground_overlap(operands, schedule, s, psi) -> float:
    h = _dense_h(operands, schedule, s)
    _, vecs = scipy.linalg.eigh(h, subset_by_index=(0, 0))
    return float(abs(np.vdot(vecs[:, 0], psi)) ** 2)


def spectral_flow(
    inst: ProblemInstance,
    schedule: Schedule,
    grid_points: int = 21,
    levels: int = 6,
) -> SpectralFlow:
    """Lowest eigenvalues of the interpolated Hamiltonian along the grid.

    The reported minimum gap E1 - E0 is taken over interior grid points
    only; endpoints can be legitimately degenerate when the tilt is off.
    """
    if grid_points < 11:
        raise ValueError("grid_points must be at least 11")
    operands = evolution_operands(inst)
    levels = min(levels, inst.space.dim)
    grid = np.linspace(0.0, 1.0, grid_points)
    table = np.empty((grid_points, levels))
    for row, s in enumerate(grid):
        eigvals = scipy.linalg.eigvalsh(_dense_h(operands, schedule, float(s)))
        table[row] = eigvals[:levels]
    interior_gaps = table[1:-1, 1] - table[1:-1, 0]
    idx = int(np.argmin(interior_gaps))
    return SpectralFlow(
        grid=grid,
        levels=table,
        min_gap=float(interior_gaps[idx]),
        min_gap_s=float(grid[idx + 1]),
    )


def bound_diagnostic(
    inst: ProblemInstance, schedule: Schedule, g_theta: float = 1.0
) -> BoundDiagnostic:
    """Energy spread of the initial state under the final Hamiltonian.

    The extrapolation factor g is a free knob (default 1); the diagnostic
    reports the product g * T * delta_ie rather than asserting the bound.
    """
    if g_theta <= 0:
        raise ValueError("g_theta must be positive")
    psi0 = coherent_state(inst.space, inst.alphas)
    diag = hp_diagonal(inst)
    probs = psi0.probabilities()
    m1 = float(np.sum(probs * diag))
    m2 = float(np.sum(probs * diag**2))
    variance = m2 - m1 * m1
    scale = max(1.0, m1 * m1)
    if variance < -1e-9 * scale:
        raise ArithmeticError(f"negative spread variance {variance}")
    delta_ie = math.sqrt(max(variance, 0.0))
    degenerate = delta_ie <= 1e-9 * max(1.0, abs(m1))
    product = g_theta * schedule.total_time * delta_ie
    return BoundDiagnostic(
        delta_ie=delta_ie,
        g_theta=g_theta,
        total_time=schedule.total_time,
        product=product,
        satisfied=None if degenerate else product > 4.0,
        status=STATUS_DEGENERATE_START if degenerate else STATUS_OK,
    )


@dataclass
class StabilityRow:
    cutoffs: tuple[int, ...]
    top_outcome: tuple[int, ...]
    top_probability: float
    norm_drift: float

    def to_dict(self) -> dict:
        return {
            "cutoffs": list(self.cutoffs),
            "top_outcome": list(self.top_outcome),
            "top_probability": self.top_probability,
            "norm_drift": self.norm_drift,
        }


@dataclass
class StabilityTable:
    rows: list[StabilityRow] = field(default_factory=list)

    @property
    def identical_outcomes(self) -> bool:
        return len({row.top_outcome for row in self.rows}) <= 1

    @property
    def max_probability_step(self) -> float:
        """Largest change of the top-outcome probability between
        consecutive ladder entries."""
        probs = [row.top_probability for row in self.rows]
        if len(probs) < 2:
            return 0.0
        return max(abs(b - a) for a, b in zip(probs, probs[1:]))

    def to_dict(self) -> dict:
        return {
            "rows": [row.to_dict() for row in self.rows],
            "identical_outcomes": self.identical_outcomes,
            "max_probability_step": self.max_probability_step,
        }


def _broadcast_cutoffs(entry, modes: int) -> tuple[int, ...]:
    if np.isscalar(entry):
        return (int(entry),) * modes
    entry = tuple(int(c) for c in entry)
    if len(entry) != modes:
        raise ValueError("cutoff entry length does not match mode count")
    return entry


def truncation_stability(
    inst: ProblemInstance,
    schedule: Schedule,
    cutoff_ladder: Sequence,
    dt: float | None = None,
) -> StabilityTable:
    """Re-run the evolution over an ascending ladder of cutoffs.

    Adding Fock levels beyond the witness should change the outcome
    distribution only marginally; the table records the winning outcome
    and probability per rung. The smallest rung must exceed the expected
    witness (from exhaustive search on the largest box) by at least 2.
    """
    modes = inst.space.modes
    ladder = [_broadcast_cutoffs(entry, modes) for entry in cutoff_ladder]
    if not ladder:
        raise ValueError("cutoff ladder is empty")
    for previous, current in zip(ladder, ladder[1:]):
        if any(c <= p for p, c in zip(previous, current)):
            raise ValueError("cutoff ladder must be strictly ascending")
    largest_box = tuple(c - 1 for c in ladder[-1])
    search = oracle_mod.search_box(inst.polynomial, largest_box)
    witness = min(search.minimizers)
    smallest = ladder[0]
    if any(c < w + 2 for c, w in zip(smallest, witness)):
        raise ValueError(
            f"smallest cutoffs {smallest} must exceed the expected witness "
            f"{witness} by at least 2 in every mode"
        )
    table = StabilityTable()
    for cutoffs in ladder:
        space = FockSpace(cutoffs)
        rung = ProblemInstance(inst.polynomial, space, inst.alphas, inst.symmetry)
        result = evolve(rung, schedule, dt=dt)
        outcome, probability = result.final_state.top_outcome()
        table.rows.append(
            StabilityRow(
                cutoffs=cutoffs,
                top_outcome=outcome,
                top_probability=probability,
                norm_drift=result.norm_drift,
            )
        )
    return table
