"""Problem and driver Hamiltonians plus the adiabatic interpolation.

The final Hamiltonian is diagonal with entries D(n1..nk)^2, optionally
tilted by a small symmetry-breaking term eps * sum_i c_i n_i that makes the
ground level unique when the squared equation has several minimizers. The
driver is the displaced number form sum_i (a_i+ - conj(alpha_i))(a_i -
alpha_i), whose ground state is the product coherent state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import FloatBudgetError
from .fockspace import (
    FockSpace,
    OperatorMatrix,
    annihilation,
    broadcast_alphas,
    number_operator,
)
from .polynomial import Polynomial

__all__ = [
    "Schedule",
    "SymmetryBreak",
    "ProblemInstance",
    "build_HP",
    "build_HI",
    "interpolate",
    "hp_diagonal",
    "exact_square_diagonal",
    "default_epsilon",
    "first_primes",
    "EvolutionOperands",
    "evolution_operands",
]

# Largest exact integer representable in float64 without rounding.
FLOAT_BUDGET = 2**53

SHAPES = ("linear", "smoothstep")


@dataclass(frozen=True)
class Schedule:
    """Interpolation weights over s in [0, 1] with a total run time T.

    Both shapes satisfy jtilde(0) = 1, utilde(0) = 0, jtilde(1) = 0,
    utilde(1) = 1 and are monotone.
    """

    total_time: float
    shape: str = "linear"

    def __post_init__(self):
        if self.total_time <= 0:
            raise ValueError("total_time must be positive")
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}")

    def utilde(self, s: float) -> float:
        _check_s(s)
        if self.shape == "smoothstep":
            return s * s * (3.0 - 2.0 * s)
        return s

    def jtilde(self, s: float) -> float:
        return 1.0 - self.utilde(s)

    @property
    def shape_tag(self) -> int:
        return SHAPES.index(self.shape)

    @classmethod
    def linear(cls, total_time: float) -> "Schedule":
        return cls(total_time, "linear")

    @classmethod
    def smoothstep(cls, total_time: float) -> "Schedule":
        return cls(total_time, "smoothstep")

    def with_time(self, total_time: float) -> "Schedule":
        return Schedule(total_time, self.shape)

    def to_dict(self) -> dict:
        return {"total_time": self.total_time, "shape": self.shape}


def _check_s(s: float):
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"schedule parameter s={s} outside [0, 1]")


def first_primes(count: int) -> tuple[int, ...]:
    primes = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return tuple(primes)


@dataclass(frozen=True)
class SymmetryBreak:
    """Degeneracy-lifting tilt eps * sum_i c_i n_i on the final diagonal."""

    epsilon: float
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        weights = tuple(float(w) for w in self.weights)
        if self.epsilon > 0:
            if any(w <= 0 for w in weights):
                raise ValueError("symmetry-breaking weights must be positive")
            if len(set(weights)) != len(weights):
                raise ValueError("symmetry-breaking weights must be distinct")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def off(cls, modes: int) -> "SymmetryBreak":
        return cls(0.0, tuple(float(p) for p in first_primes(modes)))

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "weights": list(self.weights)}


@dataclass(frozen=True)
class ProblemInstance:
    """A Diophantine polynomial bound to a truncated Fock space."""

    polynomial: Polynomial
    space: FockSpace
    alphas: tuple[complex, ...]
    symmetry: SymmetryBreak

    def __post_init__(self):
        if self.polynomial.num_variables != self.space.modes:
            raise ValueError(
                f"{self.polynomial.num_variables} variables do not match "
                f"{self.space.modes} modes"
            )
        if len(self.alphas) != self.space.modes:
            raise ValueError("one displacement per mode is required")
        if len(self.symmetry.weights) != self.space.modes:
            raise ValueError("one symmetry-breaking weight per mode is required")

    @classmethod
    def create(
        cls,
        polynomial: Polynomial,
        space: FockSpace,
        alphas=1.0,
        epsilon: float | str = "auto",
        weights: Sequence[float] | None = None,
    ) -> "ProblemInstance":
        """Build an instance with the default knobs resolved.

        ``alphas`` defaults to 1 on every mode, which keeps the required
        cutoffs small while giving the initial state broad Fock support.
        ``epsilon="auto"`` applies the spacing-scaled default; pass 0 to
        disable symmetry breaking. ``weights`` default to the first primes,
        which are distinct and therefore break any tie between integer
        tuples.
        """
        alphas = broadcast_alphas(alphas, space.modes)
        if weights is None:
            weights = tuple(float(p) for p in first_primes(space.modes))
        if epsilon == "auto":
            epsilon = default_epsilon(polynomial, space)
        symmetry = SymmetryBreak(float(epsilon), tuple(weights))
        return cls(polynomial, space, alphas, symmetry)


def exact_square_diagonal(polynomial: Polynomial, space: FockSpace) -> list[int]:
    """D(n)^2 over the truncated box as exact integers, in flat order."""
    if polynomial.num_variables != space.modes:
        raise ValueError("variable count does not match mode count")
    return [polynomial.evaluate(occ) ** 2 for occ in space.occupations()]


def default_epsilon(polynomial: Polynomial, space: FockSpace) -> float:
    """Tilt strength 1e-2 * (1 + smallest nonzero gap of the D^2 diagonal)."""
    values = sorted(set(exact_square_diagonal(polynomial, space)))
    spacing = 0.0
    if len(values) > 1:
        spacing = float(min(b - a for a, b in zip(values, values[1:])))
    return 1e-2 * (1.0 + spacing)


def hp_diagonal(inst: ProblemInstance) -> np.ndarray:
    """Final-Hamiltonian diagonal as float64, including the tilt.

    The squared values are checked exactly before conversion; anything
    beyond 2**53 would round silently and is rejected instead.
    """
    exact = exact_square_diagonal(inst.polynomial, inst.space)
    worst = max(exact, default=0)
    if worst > FLOAT_BUDGET:
        flat = exact.index(worst)
        raise FloatBudgetError(
            f"D^2 = {worst} at occupation {inst.space.index_to_tuple(flat)} "
            f"exceeds the float64 budget 2^53; shrink the cutoffs"
        )
    diag = np.array(exact, dtype=np.float64)
    if inst.symmetry.epsilon > 0:
        weights = np.array(inst.symmetry.weights)
        tilt = np.array(
            [float(np.dot(weights, occ)) for occ in inst.space.occupations()]
        )
        diag = diag + inst.symmetry.epsilon * tilt
    return diag


def build_HP(inst: ProblemInstance) -> OperatorMatrix:
    """Diagonal problem Hamiltonian: entry D(n1..nk)^2 + eps * sum c_i n_i."""
    diag = hp_diagonal(inst).astype(np.complex128)
    if inst.space.modes == 1:
        return OperatorMatrix(inst.space, np.diag(diag))
    return OperatorMatrix(inst.space, sp.diags(diag, format="csr"))


def build_HI(inst: ProblemInstance) -> OperatorMatrix:
    """Driver sum_i (a_i+ - conj(alpha_i)) (a_i - alpha_i).

    Positive semidefinite by construction; the product coherent state is
    its ground state up to the truncation tail.
    """
    space = inst.space
    total = None
    for mode, alpha in enumerate(inst.alphas):
        a = annihilation(space, mode)
        n_op = number_operator(space, mode)
        if space.modes == 1:
            ident = OperatorMatrix(space, np.eye(space.dim, dtype=np.complex128))
        else:
            ident = OperatorMatrix(space, sp.identity(space.dim, dtype=np.complex128, format="csr"))
        term = (
            n_op
            + a.dagger().scaled(-alpha)
            + a.scaled(-np.conj(alpha))
            + ident.scaled(abs(alpha) ** 2)
        )
        total = term if total is None else total + term
    return total


def interpolate(inst: ProblemInstance, schedule: Schedule, s: float) -> OperatorMatrix:
    """jtilde(s) * H_I + utilde(s) * H_P."""
    _check_s(s)
    hi = build_HI(inst)
    hp = build_HP(inst)
    return hi.scaled(schedule.jtilde(s)) + hp.scaled(schedule.utilde(s))


@dataclass(frozen=True)
class EvolutionOperands:
    """Flat arrays describing H(s) for the time stepper.

    H_I splits into a real diagonal plus one sub/super-diagonal band per
    mode; ``hop[hop_offsets[m] + n]`` couples occupation n to n+1 on mode m
    (row n+1, column n), with the conjugate on the transpose position.
    """

    hi_diag: np.ndarray  # float64 (dim,)
    hp_diag: np.ndarray  # float64 (dim,)
    hop: np.ndarray  # complex128, concatenated per-mode bands
    hop_offsets: np.ndarray  # int64 (modes,)
    sizes: np.ndarray  # int64 (modes,)
    strides: np.ndarray  # int64 (modes,)

    @property
    def dim(self) -> int:
        return self.hi_diag.shape[0]

    def hi_dense(self) -> np.ndarray:
        """Reassemble H_I as a dense matrix (consistency checks, tests)."""
        dim = self.dim
        mat = np.diag(self.hi_diag.astype(np.complex128))
        for m in range(self.sizes.shape[0]):
            stride = int(self.strides[m])
            size = int(self.sizes[m])
            block = stride * size
            offset = int(self.hop_offsets[m])
            for base in range(0, dim, block):
                for n in range(size - 1):
                    c = self.hop[offset + n]
                    for j in range(base + n * stride, base + n * stride + stride):
                        mat[j + stride, j] += c
                        mat[j, j + stride] += np.conj(c)
        return mat


def evolution_operands(
    inst: ProblemInstance, hp_diag: np.ndarray | None = None
) -> EvolutionOperands:
    """Kernel inputs for H(s) = jtilde * H_I + utilde * diag(hp).

    ``hp_diag`` overrides the instance diagonal; the perturbed-coefficient
    experiments use that hook to evolve sampled real-coefficient problems.
    """
    space = inst.space
    if hp_diag is None:
        hp_diag = hp_diagonal(inst)
    else:
        hp_diag = np.asarray(hp_diag, dtype=np.float64)
        if hp_diag.shape != (space.dim,):
            raise ValueError("hp_diag length does not match the space dimension")
    hi_diag = np.zeros(space.dim)
    offset = float(sum(abs(a) ** 2 for a in inst.alphas))
    for flat, occ in enumerate(space.occupations()):
        hi_diag[flat] = sum(occ) + offset
    bands = []
    offsets = []
    for alpha, cutoff in zip(inst.alphas, space.cutoffs):
        offsets.append(sum(len(b) for b in bands))
        bands.append(-alpha * np.sqrt(np.arange(1, cutoff)))
    hop = (
        np.concatenate(bands).astype(np.complex128)
        if bands
        else np.zeros(0, np.complex128)
    )
    return EvolutionOperands(
        hi_diag=hi_diag,
        hp_diag=hp_diag,
        hop=hop,
        hop_offsets=np.array(offsets, dtype=np.int64),
        sizes=np.array(space.cutoffs, dtype=np.int64),
        strides=np.array(space.strides, dtype=np.int64),
    )
