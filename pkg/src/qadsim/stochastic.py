"""Coefficient-noise experiment: perturb the integer coefficients, locate
each sample's ground state, and test the 1/sqrt(N) shrinkage of the spread
of averaged outputs.

The exact coefficients serve as the means; each sample draws real-valued
coefficients, solves the perturbed minimization over the box, and the
batch statistics of the resulting argmin tuples are reported. Ground-state
locations come from direct minimization by default (the claim under test
is statistical, not dynamical); the adiabatic engine runs the full
evolution per sample and is meant for small sample counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fockspace import FockSpace
from .hamiltonian import Schedule
from .polynomial import Polynomial

__all__ = ["NoiseModel", "PerturbedProblem", "CltReport", "sample_instance", "run_clt"]

DISTRIBUTIONS = ("gaussian", "uniform")


@dataclass(frozen=True)
class NoiseModel:
    """Independent noise per monomial coefficient.

    ``sigma`` is a scalar applied to every coefficient or one value per
    monomial in canonical order. Means are always the exact integer
    coefficients of the polynomial being perturbed.
    """

    sigma: float | tuple[float, ...] = 0.2
    distribution: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if np.isscalar(self.sigma):
            if self.sigma < 0:
                raise ValueError("sigma must be >= 0")
        else:
            sigma = tuple(float(s) for s in self.sigma)
            if any(s < 0 for s in sigma):
                raise ValueError("sigma must be >= 0")
            object.__setattr__(self, "sigma", sigma)

    def sigmas_for(self, n_coefficients: int) -> np.ndarray:
        if np.isscalar(self.sigma):
            return np.full(n_coefficients, float(self.sigma))
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if sigma.shape != (n_coefficients,):
            raise ValueError(
                f"{sigma.shape[0]} sigma values for {n_coefficients} coefficients"
            )
        return sigma

    def to_dict(self) -> dict:
        sigma = self.sigma if np.isscalar(self.sigma) else list(self.sigma)
        return {"sigma": sigma, "distribution": self.distribution, "seed": self.seed}


class PerturbedProblem:
    """Real-coefficient diagonal builder for one polynomial and noise model.

    Monomial values on the box grid are precomputed once; each sample is a
    single matrix-vector product followed by squaring.
    """

    def __init__(self, polynomial: Polynomial, noise: NoiseModel, box: Sequence[int]):
        self.polynomial = polynomial
        self.noise = noise
        self.box = tuple(int(b) for b in box)
        if len(self.box) != polynomial.num_variables:
            raise ValueError("box length does not match the variable count")
        self.means = np.array([m.coefficient for m in polynomial.monomials], dtype=np.float64)
        self.sigmas = noise.sigmas_for(len(polynomial.monomials))
        space = FockSpace(tuple(b + 1 for b in self.box))
        grid = np.array(list(space.occupations()), dtype=np.float64)  # (points, k)
        self._space = space
        # monomial_values[j, p] = prod_i grid[p, i] ** exponents[j, i]
        values = np.ones((len(polynomial.monomials), grid.shape[0]))
        for j, mono in enumerate(polynomial.monomials):
            for i, e in enumerate(mono.exponents):
                if e:
                    values[j] *= grid[:, i] ** e
        self.monomial_values = values

    @property
    def space(self) -> FockSpace:
        return self._space

    def draw_coefficients(self, rng: np.random.Generator) -> np.ndarray:
        if self.noise.distribution == "uniform":
            # matched standard deviation: uniform on +- sqrt(3) sigma
            draw = rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), self.means.shape[0])
        else:
            draw = rng.standard_normal(self.means.shape[0])
        return self.means + self.sigmas * draw

    def diagonal(self, coefficients: np.ndarray) -> np.ndarray:
        """Perturbed D(n)^2 over the box grid, flat order."""
        return (coefficients @ self.monomial_values) ** 2

    def argmin(self, coefficients: np.ndarray) -> tuple[int, ...]:
        flat = int(np.argmin(self.diagonal(coefficients)))
        return self._space.index_to_tuple(flat)


def sample_instance(
    polynomial: Polynomial, noise: NoiseModel, box: Sequence[int]
) -> PerturbedProblem:
    """Builder producing per-sample perturbed diagonals D_i(n)^2."""
    return PerturbedProblem(polynomial, noise, box)


@dataclass
class CltReport:
    """Spread-of-the-mean statistics across sample counts.

    ``spread`` is the standard deviation over batches of the batch means
    (componentwise; ``spread_scalar`` is its Euclidean norm). Under the
    inverse-square-root law the ratio between consecutive sample counts
    N1 < N2 tends to sqrt(N2 / N1). Samples whose argmin touches the upper
    box edge flag the whole report: those outputs may be escaping the box,
    so the finite-variance premise is in doubt and shrinkage assertions
    should skip flagged reports.
    """

    n_values: list[int]
    batches: int
    engine: str
    noise: dict
    box: list[int]
    per_n: list[dict] = field(default_factory=list)
    shrinkage_ratios: list[float | None] = field(default_factory=list)
    boundary_hits: int = 0

    @property
    def boundary_flagged(self) -> bool:
        return self.boundary_hits > 0

    def to_dict(self) -> dict:
        return {
            "n_values": self.n_values,
            "batches": self.batches,
            "engine": self.engine,
            "noise": self.noise,
            "box": self.box,
            "per_n": self.per_n,
            "shrinkage_ratios": self.shrinkage_ratios,
            "boundary_hits": self.boundary_hits,
            "boundary_flagged": self.boundary_flagged,
        }


def _sample_rng(seed: int, n_index: int, batch: int, sample: int) -> np.random.Generator:
    # Stateless spawn keys: reproducible regardless of execution order.
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(n_index, batch, sample))
    )


def run_clt(
    polynomial: Polynomial,
    noise: NoiseModel,
    box: Sequence[int],
    n_values: Sequence[int],
    batches: int = 25,
    engine: str = "oracle",
    alphas=1.0,
    schedule: Schedule | None = None,
    dt: float | None = None,
) -> CltReport:
    """Collect per-sample ground-state locations and batch statistics.

    ``engine="oracle"`` minimizes each perturbed diagonal directly;
    ``engine="adiabatic"`` runs the full time evolution per sample (small
    sample counts only) and takes the most probable outcome.
    """
    if engine not in ("oracle", "adiabatic"):
        raise ValueError("engine must be 'oracle' or 'adiabatic'")
    if batches < 2:
        raise ValueError("at least two batches are required for a spread")
    n_values = [int(n) for n in n_values]
    if sorted(n_values) != n_values:
        raise ValueError("n_values must be ascending")
    problem = sample_instance(polynomial, noise, box)
    if engine == "adiabatic":
        from .adiabatic import evolve_diagonal

        if schedule is None:
            schedule = Schedule.linear(20.0)

    box_arr = np.array(problem.box)
    report = CltReport(
        n_values=list(n_values),
        batches=batches,
        engine=engine,
        noise=noise.to_dict(),
        box=list(problem.box),
    )
    spreads = []
    for n_index, n_samples in enumerate(n_values):
        batch_means = np.empty((batches, polynomial.num_variables))
        for batch in range(batches):
            outputs = np.empty((n_samples, polynomial.num_variables))
            for sample in range(n_samples):
                rng = _sample_rng(noise.seed, n_index, batch, sample)
                coefficients = problem.draw_coefficients(rng)
                if engine == "oracle":
                    outcome = problem.argmin(coefficients)
                else:
                    diag = problem.diagonal(coefficients)
                    result = evolve_diagonal(
                        problem.space, alphas, diag, schedule, dt=dt
                    )
                    outcome, _ = result.final_state.top_outcome()
                outputs[sample] = outcome
                if np.any(np.array(outcome) == box_arr):
                    report.boundary_hits += 1
            batch_means[batch] = outputs.mean(axis=0)
        mean = batch_means.mean(axis=0)
        spread = batch_means.std(axis=0, ddof=1)
        spread_scalar = float(np.linalg.norm(spread))
        spreads.append(spread_scalar)
        report.per_n.append(
            {
                "n": n_samples,
                "mean": [float(x) for x in mean],
                "spread": [float(x) for x in spread],
                "spread_scalar": spread_scalar,
            }
        )
    for a, b in zip(spreads, spreads[1:]):
        report.shrinkage_ratios.append(None if b == 0.0 else a / b)
    return report
