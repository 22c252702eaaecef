"""Bose-Hubbard lattice at fixed atom number and its single-site mean-field
reduction.

The lattice Hamiltonian is

    H_B = -J sum_<i,j> (a_i+ a_j + a_j+ a_i) + U sum_i n_i (n_i - m)

on the fixed-K occupation basis (total atom number is conserved, so the
combinatorial basis is exact and small). In the mean-field treatment of a
single site the neighbors enter only through the coherence alpha = <a>,
reducing the site Hamiltonian to

    zJ (a+ - conj(alpha)) (a - alpha) + U (n - m)^2

which is exactly the two-term interpolation the solver applies to the
linear equation x - m = 0: deep in the superfluid the site sits in a
coherent state, and past the transition alpha vanishes and the occupation
locks to the solution m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BudgetExceededError, ConvergenceError
from .fockspace import FockSpace, QuantumState
from .polynomial import Polynomial

__all__ = [
    "LatticeModel",
    "LatticeOperator",
    "MeanFieldState",
    "TransitionSweep",
    "basis_states",
    "build_HB",
    "superfluid_state",
    "mott_state",
    "mean_field_solve",
    "sweep_transition",
    "as_diophantine",
]

DEFAULT_BASIS_BUDGET = 20_000

# Damped self-consistency iteration; convergence is declared at the inner
# tolerance, and a run that exhausts max_iter still counts as converged if
# the residual ended below RESIDUAL_LIMIT.
FIXED_POINT_TOL = 1e-12
RESIDUAL_LIMIT = 1e-8
ORDER_PARAMETER_CUT = 1e-3


@dataclass(frozen=True)
class LatticeModel:
    """A 1D chain of M sites holding K atoms (ring for M >= 3)."""

    sites: int
    atoms: int
    tunneling: float
    interaction: float
    filling: int

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("at least two sites are required")
        if self.atoms < 1:
            raise ValueError("at least one atom is required")
        if self.tunneling < 0 or self.interaction < 0:
            raise ValueError("J and U must be >= 0")
        if self.filling < 1:
            raise ValueError("target filling m must be a positive integer")

    @property
    def coordination(self) -> int:
        return 1 if self.sites == 2 else 2

    @property
    def neighbor_pairs(self) -> tuple[tuple[int, int], ...]:
        pairs = [(i, i + 1) for i in range(self.sites - 1)]
        if self.sites >= 3:
            pairs.append((self.sites - 1, 0))
        return tuple(pairs)

    @property
    def basis_dimension(self) -> int:
        return math.comb(self.atoms + self.sites - 1, self.sites - 1)

    def to_dict(self) -> dict:
        return {
            "sites": self.sites,
            "atoms": self.atoms,
            "tunneling": self.tunneling,
            "interaction": self.interaction,
            "filling": self.filling,
        }


@lru_cache(maxsize=None)
def basis_states(sites: int, atoms: int) -> tuple[tuple[int, ...], ...]:
    """Occupation tuples with total ``atoms``, in descending lex order."""
    if sites == 1:
        return ((atoms,),)
    states = []
    for first in range(atoms, -1, -1):
        for rest in basis_states(sites - 1, atoms - first):
            states.append((first,) + rest)
    return tuple(states)


@dataclass(frozen=True)
class LatticeOperator:
    """A matrix on the fixed-K basis of a lattice model."""

    model: LatticeModel
    basis: tuple[tuple[int, ...], ...]
    mat: np.ndarray

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def ground(self) -> tuple[float, np.ndarray]:
        eigvals, eigvecs = np.linalg.eigh(self.mat)
        return float(eigvals[0]), eigvecs[:, 0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)


def build_HB(model: LatticeModel, budget: int = DEFAULT_BASIS_BUDGET) -> LatticeOperator:
    """Assemble the lattice Hamiltonian on the fixed-K basis."""
    if model.basis_dimension > budget:
        raise BudgetExceededError(
            f"fixed-K basis holds {model.basis_dimension} states, above the "
            f"budget {budget}"
        )
    basis = basis_states(model.sites, model.atoms)
    index = {state: i for i, state in enumerate(basis)}
    dim = len(basis)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for col, state in enumerate(basis):
        diagonal = model.interaction * sum(n * (n - model.filling) for n in state)
        mat[col, col] += diagonal
        if model.tunneling == 0:
            continue
        for i, j in model.neighbor_pairs:
            # -J a_i+ a_j and its reverse
            for src, dst in ((j, i), (i, j)):
                if state[src] == 0:
                    continue
                lifted = list(state)
                lifted[src] -= 1
                lifted[dst] += 1
                amplitude = math.sqrt(state[src] * (state[dst] + 1))
                row = index[tuple(lifted)]
                mat[row, col] += -model.tunneling * amplitude
    return LatticeOperator(model=model, basis=basis, mat=mat)


def total_number_operator(model: LatticeModel) -> LatticeOperator:
    basis = basis_states(model.sites, model.atoms)
    mat = np.diag(np.array([float(sum(s)) for s in basis], dtype=np.complex128))
    return LatticeOperator(model=model, basis=basis, mat=mat)


def superfluid_state(model: LatticeModel) -> np.ndarray:
    """Normalized (sum_i a_i+)^K |0>, expanded over the fixed-K basis.

    The expansion coefficient on |n_1..n_M> is K! / prod sqrt(n_i!), from
    the multinomial count combined with the (a+)^n |0> = sqrt(n!) |n> rule.
    """
    basis = basis_states(model.sites, model.atoms)
    amps = np.empty(len(basis))
    log_kfact = math.lgamma(model.atoms + 1)
    for i, state in enumerate(basis):
        log_amp = log_kfact - 0.5 * sum(math.lgamma(n + 1) for n in state)
        amps[i] = math.exp(log_amp)
    amps /= np.linalg.norm(amps)
    return amps.astype(np.complex128)


def mott_state(model: LatticeModel) -> np.ndarray:
    """The unit-filling product state |m, m, .., m> (requires K = m*M)."""
    if model.atoms != model.filling * model.sites:
        raise ValueError(
            f"filling mismatch: K={model.atoms} but m*M="
            f"{model.filling * model.sites}"
        )
    basis = basis_states(model.sites, model.atoms)
    target = (model.filling,) * model.sites
    amps = np.zeros(len(basis), dtype=np.complex128)
    amps[basis.index(target)] = 1.0
    return amps


@dataclass
class MeanFieldState:
    """Converged (or abandoned) self-consistency data for one site."""

    alpha: complex
    single_site_ground: QuantumState
    iterations: int
    converged: bool
    residual: float

    @property
    def order_parameter(self) -> float:
        return abs(self.alpha)

    def occupation_probabilities(self) -> np.ndarray:
        return self.single_site_ground.probabilities()

    def to_dict(self) -> dict:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "order_parameter": self.order_parameter,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
        }


def _single_site_ground(
    jt: float, ut: float, alpha: complex, filling: int, cutoff: int, a: np.ndarray
) -> np.ndarray:
    n = np.arange(cutoff, dtype=np.float64)
    h = ut * np.diag(((n - filling) ** 2).astype(np.complex128))
    if jt != 0.0:
        displaced = a - alpha * np.eye(cutoff)
        h = h + jt * (displaced.conj().T @ displaced)
    _, vecs = np.linalg.eigh(h)
    return vecs[:, 0]


def mean_field_solve(
    J: float,
    U: float,
    m: int,
    z: int,
    alpha0: complex = 1.0,
    cutoff: int | None = None,
    max_iter: int = 500,
    damping: float = 0.5,
) -> MeanFieldState:
    """Damped fixed-point iteration alpha <- (1-l) alpha + l <a>.

    The site Hamiltonian is zJ (a+ - conj(alpha))(a - alpha) + U (n - m)^2.
    With J = 0 the Hamiltonian no longer depends on alpha, so the coherence
    is read off after a single diagonalization. Iteration near the critical
    ratio slows down markedly; raise ``max_iter`` to chase such points.
    """
    if cutoff is None:
        cutoff = m + 8
    if cutoff < m + 6:
        raise ValueError(f"single-site cutoff must be at least m + 6 = {m + 6}")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    space = FockSpace((cutoff,))
    a = np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(np.complex128)
    jt = float(z) * float(J)
    ut = float(U)
    if jt == 0.0:
        ground = _single_site_ground(jt, ut, 0.0, m, cutoff, a)
        alpha = complex(np.vdot(ground, a @ ground))
        return MeanFieldState(
            alpha=alpha,
            single_site_ground=QuantumState(space, ground),
            iterations=1,
            converged=True,
            residual=0.0,
        )
    alpha = complex(alpha0)
    residual = math.inf
    ground = None
    iterations = 0
    for it in range(max_iter):
        iterations = it + 1
        ground = _single_site_ground(jt, ut, alpha, m, cutoff, a)
        mean_a = complex(np.vdot(ground, a @ ground))
        residual = abs(mean_a - alpha)
        if residual < FIXED_POINT_TOL:
            alpha = mean_a
            break
        alpha = (1.0 - damping) * alpha + damping * mean_a
    converged = residual < RESIDUAL_LIMIT
    return MeanFieldState(
        alpha=alpha,
        single_site_ground=QuantumState(space, ground),
        iterations=iterations,
        converged=converged,
        residual=residual,
    )


@dataclass
class TransitionSweep:
    """|alpha| versus U/J along an ascending ratio grid."""

    filling: int
    coordination: int
    ratios: list[float]
    order_parameters: list[float]
    ground_occupations: list[list[float]]
    transition_ratio: float | None
    max_increase: float

    @property
    def monotone(self) -> bool:
        return self.max_increase <= 1e-6

    def to_dict(self) -> dict:
        return {
            "filling": self.filling,
            "coordination": self.coordination,
            "ratios": self.ratios,
            "order_parameters": self.order_parameters,
            "transition_ratio": self.transition_ratio,
            "monotone": self.monotone,
            "max_increase": self.max_increase,
        }


def sweep_transition(
    m: int,
    z: int,
    ratio_grid: Sequence[float],
    alpha0: complex = 1.0,
    cutoff: int | None = None,
    max_iter: int = 500,
) -> TransitionSweep:
    """Solve the self-consistency at every ratio and locate the transition.

    Each grid point starts fresh from ``alpha0`` (points are independent).
    The empirical transition is the first grid ratio whose converged order
    parameter falls below 1e-3. Non-convergence at any point is raised.
    """
    ratios = [float(r) for r in ratio_grid]
    if sorted(ratios) != ratios:
        raise ValueError("ratio grid must be ascending")
    if not ratios:
        raise ValueError("ratio grid is empty")
    order = []
    occupations = []
    for ratio in ratios:
        state = mean_field_solve(
            1.0, ratio, m, z, alpha0=alpha0, cutoff=cutoff, max_iter=max_iter
        )
        if not state.converged:
            raise ConvergenceError(
                f"self-consistency failed at U/J={ratio}: residual "
                f"{state.residual:.3e} after {state.iterations} iterations"
            )
        order.append(state.order_parameter)
        occupations.append([float(p) for p in state.occupation_probabilities()])
    max_increase = 0.0
    for previous, current in zip(order, order[1:]):
        max_increase = max(max_increase, current - previous)
    transition = next(
        (r for r, a in zip(ratios, order) if a < ORDER_PARAMETER_CUT), None
    )
    return TransitionSweep(
        filling=m,
        coordination=z,
        ratios=ratios,
        order_parameters=order,
        ground_occupations=occupations,
        transition_ratio=transition,
        max_increase=max_increase,
    )


def as_diophantine(m: int) -> Polynomial:
    """The linear equation x - m = 0 realized by the Mott phase."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    x = Polynomial.variable("x", ("x",))
    return x - m
