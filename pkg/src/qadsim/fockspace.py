"""Truncated multi-mode bosonic Fock spaces: basis indexing, ladder
operators, number operators, coherent states, and a thin operator wrapper.

Occupations run 0..N_i-1 per mode; the top level is a hard wall. Flat
indices follow C order, so mode 0 varies slowest.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import TailWeightError

__all__ = [
    "FockSpace",
    "QuantumState",
    "OperatorMatrix",
    "CommutatorDefect",
    "annihilation",
    "creation",
    "number_operator",
    "coherent_state",
    "commutator_defect",
]

# Mass allowed beyond the cutoff before a coherent state is rejected.
COHERENT_TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class FockSpace:
    """k bosonic modes with per-mode occupation cutoffs."""

    cutoffs: tuple[int, ...]

    def __post_init__(self):
        cutoffs = tuple(int(n) for n in self.cutoffs)
        if not cutoffs:
            raise ValueError("at least one mode is required")
        if any(n < 2 for n in cutoffs):
            raise ValueError("every mode needs cutoff >= 2")
        object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def modes(self) -> int:
        return len(self.cutoffs)

    @property
    def dim(self) -> int:
        return math.prod(self.cutoffs)

    @property
    def strides(self) -> tuple[int, ...]:
        out = []
        acc = 1
        for n in reversed(self.cutoffs):
            out.append(acc)
            acc *= n
        return tuple(reversed(out))

    def tuple_to_index(self, occupations: Sequence[int]) -> int:
        if len(occupations) != self.modes:
            raise ValueError("occupation tuple has wrong length")
        index = 0
        for n, cutoff, stride in zip(occupations, self.cutoffs, self.strides):
            if not 0 <= n < cutoff:
                raise ValueError(f"occupation {n} outside 0..{cutoff - 1}")
            index += n * stride
        return index

    def index_to_tuple(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside 0..{self.dim - 1}")
        out = []
        for stride in self.strides:
            out.append(index // stride)
            index %= stride
        return tuple(out)

    def occupations(self) -> Iterator[tuple[int, ...]]:
        """All occupation tuples in flat-index order."""
        return itertools.product(*(range(n) for n in self.cutoffs))

    def to_dict(self) -> dict:
        return {"cutoffs": list(self.cutoffs)}


class QuantumState:
    """Normalized complex amplitudes over a Fock space basis."""

    __slots__ = ("space", "amplitudes")

    def __init__(self, space: FockSpace, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128).copy()
        if amplitudes.shape != (space.dim,):
            raise ValueError(f"expected {space.dim} amplitudes, got {amplitudes.shape}")
        self.space = space
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, space: FockSpace, occupations: Sequence[int]) -> "QuantumState":
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[space.tuple_to_index(occupations)] = 1.0
        return cls(space, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "QuantumState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        self.amplitudes /= n
        return self

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def top_outcome(self) -> tuple[tuple[int, ...], float]:
        """Most probable occupation tuple and its probability.

        Ties resolve to the lexicographically smallest tuple because flat
        C-order indices are scanned first to last.
        """
        probs = self.probabilities()
        flat = int(np.argmax(probs))
        return self.space.index_to_tuple(flat), float(probs[flat])

    def fidelity(self, other: "QuantumState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def expectation_diagonal(self, diagonal: np.ndarray) -> float:
        return float(np.real(np.sum(self.probabilities() * diagonal)))

    def copy(self) -> "QuantumState":
        return QuantumState(self.space, self.amplitudes)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuantumState":
        space = FockSpace(tuple(data["space"]["cutoffs"]))
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(space, amps)


MatrixLike = Union[np.ndarray, sp.spmatrix]


class OperatorMatrix:
    """A linear operator on a Fock space, dense or sparse."""

    __slots__ = ("space", "mat")

    def __init__(self, space: FockSpace, mat: MatrixLike):
        if mat.shape != (space.dim, space.dim):
            raise ValueError(f"operator shape {mat.shape} does not match dim {space.dim}")
        self.space = space
        self.mat = mat

    def toarray(self) -> np.ndarray:
        if sp.issparse(self.mat):
            return self.mat.toarray()
        return np.asarray(self.mat)

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.mat.diagonal())

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        return self.mat @ vec

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.mat.conj().T)

    def hermiticity_defect(self) -> float:
        diff = self.mat - self.mat.conj().T
        if sp.issparse(diff):
            return float(np.max(np.abs(diff.toarray()))) if diff.nnz else 0.0
        return float(np.max(np.abs(diff)))

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.space != other.space:
            raise ValueError("operators act on different spaces")
        return OperatorMatrix(self.space, self.mat + other.mat)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.space != other.space:
            raise ValueError("operators act on different spaces")
        return OperatorMatrix(self.space, self.mat @ other.mat)

    def scaled(self, factor: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.mat * factor)

    def to_coo_text(self) -> str:
        """Coordinate-list dump: one ``row col re im`` line per entry."""
        coo = sp.coo_matrix(self.mat)
        lines = [f"# {coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
        order = np.lexsort((coo.col, coo.row))
        for idx in order:
            value = coo.data[idx]
            lines.append(f"{coo.row[idx]} {coo.col[idx]} {value.real!r} {value.imag!r}")
        return "\n".join(lines) + "\n"


def _annihilation_1d(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(np.complex128)


def _embed(space: FockSpace, mode: int, local: np.ndarray) -> OperatorMatrix:
    """Lift a single-mode matrix to the full space (identity elsewhere)."""
    if not 0 <= mode < space.modes:
        raise ValueError(f"mode {mode} outside 0..{space.modes - 1}")
    if space.modes == 1:
        return OperatorMatrix(space, local)
    factors = []
    for i, cutoff in enumerate(space.cutoffs):
        factors.append(sp.csr_matrix(local) if i == mode else sp.identity(cutoff, format="csr"))
    result = factors[0]
    for factor in factors[1:]:
        result = sp.kron(result, factor, format="csr")
    return OperatorMatrix(space, result)


def annihilation(space: FockSpace, mode: int) -> OperatorMatrix:
    """Truncated lowering operator on one mode: a|n> = sqrt(n)|n-1>."""
    return _embed(space, mode, _annihilation_1d(space.cutoffs[mode]))


def creation(space: FockSpace, mode: int) -> OperatorMatrix:
    return _embed(space, mode, _annihilation_1d(space.cutoffs[mode]).conj().T)


def number_operator(space: FockSpace, mode: int) -> OperatorMatrix:
    return _embed(
        space, mode, np.diag(np.arange(space.cutoffs[mode], dtype=np.float64)).astype(np.complex128)
    )


def coherent_amplitudes(alpha: complex, cutoff: int) -> tuple[np.ndarray, float]:
    """Truncated coherent amplitudes and the probability mass beyond the cutoff.

    Magnitudes go through log-gamma so cutoffs beyond 170 stay finite.
    """
    if alpha == 0:
        amps = np.zeros(cutoff, dtype=np.complex128)
        amps[0] = 1.0
        return amps, 0.0
    n = np.arange(cutoff)
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * np.array(
        [math.lgamma(k + 1) for k in range(cutoff)]
    )
    phase = np.angle(complex(alpha)) * n
    amps = np.exp(log_mag) * np.exp(1j * phase)
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    return amps, max(tail, 0.0)


def coherent_state(space: FockSpace, alphas) -> QuantumState:
    """Normalized product of per-mode coherent states.

    ``alphas`` is a scalar (shared by all modes) or one value per mode.
    Raises :class:`TailWeightError` when the mass lost beyond any cutoff
    exceeds ``COHERENT_TAIL_TOLERANCE``.
    """
    alphas = broadcast_alphas(alphas, space.modes)
    vector = None
    for mode, (alpha, cutoff) in enumerate(zip(alphas, space.cutoffs)):
        amps, tail = coherent_amplitudes(alpha, cutoff)
        if tail > COHERENT_TAIL_TOLERANCE:
            raise TailWeightError(
                f"mode {mode}: coherent tail weight {tail:.3e} exceeds "
                f"{COHERENT_TAIL_TOLERANCE:.0e}; raise the cutoff ({cutoff}) "
                f"for alpha={alpha}"
            )
        vector = amps if vector is None else np.kron(vector, amps)
    return QuantumState(space, vector).normalize()


def broadcast_alphas(alphas, modes: int) -> tuple[complex, ...]:
    if np.isscalar(alphas):
        return (complex(alphas),) * modes
    alphas = tuple(complex(a) for a in alphas)
    if len(alphas) != modes:
        raise ValueError(f"expected {modes} displacement values, got {len(alphas)}")
    return alphas


class CommutatorDefect(NamedTuple):
    """Deviation of [a, a+] from the identity on a single mode."""

    interior: float  # max over levels 0..N-2
    boundary: float  # the top level, where truncation removes a+|N-1>


def commutator_defect(space: FockSpace, mode: int) -> CommutatorDefect:
    """Quantify how the hard cutoff breaks the canonical commutator.

    Below the boundary the commutator is the identity up to float rounding;
    the top diagonal entry deviates by exactly the cutoff value N.
    """
    if not 0 <= mode < space.modes:
        raise ValueError(f"mode {mode} outside 0..{space.modes - 1}")
    cutoff = space.cutoffs[mode]
    a = _annihilation_1d(cutoff)
    comm = a @ a.conj().T - a.conj().T @ a
    interior_block = comm[: cutoff - 1, : cutoff - 1] - np.eye(cutoff - 1)
    interior = float(np.max(np.abs(interior_block))) if cutoff > 1 else 0.0
    boundary = float(abs(comm[cutoff - 1, cutoff - 1] - 1.0))
    return CommutatorDefect(interior=interior, boundary=boundary)
