"""Covariance matrix adaptation evolution strategy (CMA-ES).

A plain ask/tell implementation with rank-one and rank-mu covariance
updates, cumulative step-size adaptation and log-linear recombination
weights. Sampling uses an eigendecomposition of the covariance from the
in-repo Jacobi solver, refreshed lazily.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import jacobi_eigh

ANGLE_BOUNDS = (-math.pi, math.pi)
EIGEN_FLOOR = 1e-20


def population_size(dim: int, log_base: float = math.e) -> int:
    """``4 + floor(2 log(dim))``; natural log unless ``log_base`` says otherwise."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return 4 + int(math.floor(2 * math.log(dim) / math.log(log_base)))


def reflect(x, lower: float, upper: float) -> np.ndarray:
    """Fold ``x`` into ``[lower, upper)`` by mirroring at the bounds."""
    width = upper - lower
    y = np.mod(np.asarray(x, dtype=float) - lower, 2 * width)
    y = np.where(y > width, 2 * width - y, y)
    out = lower + y
    return np.where(out >= upper, lower, out)


@dataclass
class GenerationRecord:
    generation: int
    best: float
    mean: float
    variance: float
    sigma: float


class CMAES:
    """Minimizer state for one search distribution.

    Parameters
    ----------
    mean : array_like
        Initial distribution mean, length ``M``.
    sigma : float
        Initial step size.
    popsize : int, optional
        Defaults to :func:`population_size`.
    bounds : (float, float), optional
        Box applied to every coordinate by reflection.
    seed : int or numpy.random.Generator, optional
    log_base : float
        Log base of the default population rule.
    """

    def __init__(self, mean, sigma, *, popsize=None, bounds=None, seed=None, log_base=math.e):
        mean = np.array(mean, dtype=float).ravel()
        if mean.size < 1:
            raise ValueError("mean must have at least one coordinate")
        if not sigma > 0 or not math.isfinite(sigma):
            raise ValueError("step size must be positive")
        n = mean.size
        self.dim = n
        self.popsize = population_size(n, log_base) if popsize is None else int(popsize)
        if self.popsize < 2:
            raise ValueError("population must have at least 2 members")
        self.bounds = bounds
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

        self.mu = self.popsize // 2
        w = math.log(self.mu + 0.5) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / np.sum(self.weights ** 2)
        self.cc = (4 + self.mueff / n) / (n + 4 + 2 * self.mueff / n)
        self.cs = (self.mueff + 2) / (n + self.mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + self.mueff)
        self.cmu = min(1 - self.c1, 2 * (self.mueff - 2 + 1 / self.mueff) / ((n + 2) ** 2 + self.mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((self.mueff - 1) / (n + 1)) - 1) + self.cs
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        self.mean = mean
        self.sigma = float(sigma)
        self.cov = np.eye(n)
        self.B = np.eye(n)
        self.D = np.ones(n)
        self.pc = np.zeros(n)
        self.ps = np.zeros(n)
        self.generation = 0
        self.evaluations = 0
        self._eigen_at = 0
        self.best_x = mean.copy()
        self.best_f = math.inf

    def ask(self) -> np.ndarray:
        """Sample ``popsize`` candidates as rows of an array."""
        z = self.rng.standard_normal((self.popsize, self.dim))
        x = self.mean + self.sigma * (z * self.D) @ self.B.T
        if self.bounds is not None:
            x = reflect(x, *self.bounds)
        return x

    def tell(self, population, costs) -> None:
        """Update the distribution from evaluated candidates.

        Non-finite costs rank behind every finite one.
        """
        x = np.asarray(population, dtype=float)
        f = np.asarray(costs, dtype=float).ravel()
        if x.shape != (self.popsize, self.dim) or f.size != self.popsize:
            raise ValueError("population and costs must match the population size")
        finite = np.isfinite(f)
        ranked = np.where(finite, f, np.inf)
        order = np.argsort(ranked, kind="stable")
        if finite.any():
            i = order[0]
            if ranked[i] < self.best_f:
                self.best_f = float(ranked[i])
                self.best_x = x[i].copy()

        n = self.dim
        self.generation += 1
        self.evaluations += self.popsize
        old = self.mean
        steps = (x[order[: self.mu]] - old) / self.sigma
        yw = self.weights @ steps
        self.mean = old + self.sigma * yw

        inv_sqrt = (self.B / self.D) @ self.B.T
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * (inv_sqrt @ yw)
        ps_norm = np.linalg.norm(self.ps)
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * self.generation)) / self.chi_n < 1.4 + 2 / (n + 1)
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * yw

        rank_one = np.outer(self.pc, self.pc)
        if not hsig:
            rank_one += self.cc * (2 - self.cc) * self.cov
        rank_mu = (steps.T * self.weights) @ steps
        self.cov = (1 - self.c1 - self.cmu) * self.cov + self.c1 * rank_one + self.cmu * rank_mu
        self.sigma *= math.exp(min(1.0, (self.cs / self.damps) * (ps_norm / self.chi_n - 1)))

        lag = self.popsize / (self.c1 + self.cmu) / n / 10
        if self.evaluations - self._eigen_at > lag:
            self._update_eigensystem()

    def _update_eigensystem(self) -> None:
        self._eigen_at = self.evaluations
        self.cov = (self.cov + self.cov.T) / 2
        # C drifts slowly, so rotate into the previous eigenbasis first
        w, u = jacobi_eigh(self.B.T @ self.cov @ self.B)
        b = self.B @ u
        floor = EIGEN_FLOOR * max(w.max(), EIGEN_FLOOR)
        if w.min() < floor:
            w = np.maximum(w, floor)
            self.cov = (b * w) @ b.T
        self.B, self.D = b, np.sqrt(w)


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    nfev: int
    history: list[GenerationRecord] = field(default_factory=list)
    stop: str = ""


def stagnated(history, window: int, tol: float) -> bool:
    """True when best-ever cost improved by less than ``tol`` over ``window`` generations."""
    if window <= 0 or len(history) <= window:
        return False
    return history[-window - 1].best - history[-1].best < tol


def record(es: CMAES, costs) -> GenerationRecord:
    f = np.asarray(costs, dtype=float)
    f = f[np.isfinite(f)]
    return GenerationRecord(
        generation=es.generation,
        best=es.best_f,
        mean=float(f.mean()) if f.size else math.nan,
        variance=float(f.var()) if f.size else math.nan,
        sigma=es.sigma,
    )


def minimize(
    objective,
    x0,
    sigma0=None,
    *,
    budget: int = 10_000,
    bounds=None,
    stagnation_tol: float = 1e-12,
    stagnation_window: int = 100,
    seed=None,
    popsize=None,
    vectorized: bool = False,
    callback=None,
) -> MinimizeResult:
    """Minimize ``objective`` with CMA-ES until ``budget`` evaluations are spent.

    With ``vectorized=True`` the objective receives the whole population as
    a 2-D array and returns one cost per row. ``sigma0`` defaults to 0.3 of
    the bound half-width (or 0.3 when unbounded). The run also stops once
    the best-ever cost has improved by less than ``stagnation_tol`` over
    ``stagnation_window`` generations.
    """
    if sigma0 is None:
        sigma0 = 0.3 * ((bounds[1] - bounds[0]) / 2 if bounds is not None else 1.0)
    es = CMAES(x0, sigma0, popsize=popsize, bounds=bounds, seed=seed)
    if budget < es.popsize:
        raise ValueError(f"budget {budget} is below the population size {es.popsize}")
    history: list[GenerationRecord] = []
    stop = "budget"
    while es.evaluations + es.popsize <= budget:
        pop = es.ask()
        costs = objective(pop) if vectorized else [objective(p) for p in pop]
        es.tell(pop, costs)
        history.append(record(es, costs))
        if callback is not None:
            callback(es, history[-1])
        if stagnated(history, stagnation_window, stagnation_tol):
            stop = "stagnation"
            break
    return MinimizeResult(es.best_x.copy(), es.best_f, es.evaluations, history, stop)
