"""The quantum adversarial game: discriminator score, losses and training loop.

The discriminator score of an ``n``-qubit real state ``|s>`` is the ancilla
``<Z>`` after running the discriminator on ``|s> (x) |0>``. Because the
circuit is real-orthogonal and the ancilla starts in ``|0>``, the score is a
quadratic form ``s^T M s`` with ``M`` a symmetric ``2**n x 2**n`` matrix that
depends only on the discriminator angles. Training builds ``M`` once per
candidate and scores every input against it.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import circuits
from .encoding import NorthPoleError, si_decode
from .optimizer import ANGLE_BOUNDS, CMAES, population_size, record, stagnated
from .simulator import expect_z, num_qubits_of, run_circuit

log = logging.getLogger(__name__)

AGENTS = {"D": 0, "G": 1}


def input_qubits_for(theta_D) -> int:
    """Recover ``n`` from a discriminator parameter vector of length ``2**(n+1) + n - 1``."""
    m = np.shape(theta_D)[-1]
    n = 1
    while circuits.discriminator_param_count(n) < m:
        n += 1
    if circuits.discriminator_param_count(n) != m:
        raise ValueError(f"{m} is not a valid discriminator parameter count")
    return n


def _with_ancilla(states: np.ndarray) -> np.ndarray:
    out = np.zeros(states.shape[:-1] + (2 * states.shape[-1],))
    out[..., 0::2] = states
    return out


def sigma(x, theta_D) -> np.ndarray | float:
    """Discriminator score in ``[-1, 1]``.

    ``x`` is either an ``n``-qubit state (length ``2**n``) or generator
    angles (length ``2**n - 1``); the generator then prepares the state.
    Leading batch axes of ``x`` and ``theta_D`` broadcast.
    """
    theta_D = np.asarray(theta_D, dtype=float)
    n = input_qubits_for(theta_D)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] == circuits.generator_param_count(n):
        state = circuits.generator_state(n, x)
    elif x.shape[-1] == 1 << n:
        state = x
    else:
        raise ValueError(
            f"input of length {x.shape[-1]} fits neither a {n}-qubit state nor generator angles"
        )
    out = run_circuit(circuits.build_discriminator(n), theta_D, _with_ancilla(state))
    return expect_z(out, n)


def discriminator_observable(theta_D) -> np.ndarray:
    """Symmetric ``M`` with ``sigma(s, theta_D) == s @ M @ s``; batched over ``theta_D``."""
    theta_D = np.asarray(theta_D, dtype=float)
    n = input_qubits_for(theta_D)
    basis = _with_ancilla(np.eye(1 << n))
    # columns of the circuit restricted to ancilla-|0> inputs: (..., 2**n, 2**(n+1))
    cols = run_circuit(circuits.build_discriminator(n), theta_D[..., None, :], basis)
    z = np.where(np.arange(2 << n) % 2 == 0, 1.0, -1.0)
    return np.einsum("...ik,k,...jk->...ij", cols, z, cols)


def score_states(M, states) -> np.ndarray:
    """``s^T M s`` for every state; ``M`` is ``(..., d, d)``, ``states`` is ``(K, d)``."""
    return np.einsum("ki,...ij,kj->...k", states, M, states)


def discriminator_loss_from_sigma(sigma_real, sigma_fake) -> np.ndarray | float:
    """``(1/2N) sum[(1 - sigma_real)^2 + (1 + sigma_fake)^2]`` over the last axis."""
    sr = np.asarray(sigma_real, dtype=float)
    sf = np.asarray(sigma_fake, dtype=float)
    if sr.shape[-1] != sf.shape[-1]:
        raise ValueError("real and generated sets must have the same size")
    value = (np.sum((1 - sr) ** 2, axis=-1) + np.sum((1 + sf) ** 2, axis=-1)) / (2 * sr.shape[-1])
    return float(value) if np.ndim(value) == 0 else value


def generator_loss_from_sigma(sigma_fake) -> np.ndarray | float:
    """``(1/N) sum (1 - sigma_fake)^2`` over the last axis."""
    sf = np.asarray(sigma_fake, dtype=float)
    value = np.mean((1 - sf) ** 2, axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def _check_sets(theta_G_set, n):
    theta_G_set = np.atleast_2d(np.asarray(theta_G_set, dtype=float))
    if theta_G_set.shape[-1] != circuits.generator_param_count(n):
        raise ValueError(
            f"generator angles must have length {circuits.generator_param_count(n)}"
        )
    return theta_G_set


def loss_discriminator(theta_D, theta_G_set, C_Q) -> np.ndarray | float:
    """Discriminator loss; ``theta_D`` may be a population ``(P, M)``."""
    theta_D = np.asarray(theta_D, dtype=float)
    n = input_qubits_for(theta_D)
    theta_G_set = _check_sets(theta_G_set, n)
    C_Q = np.atleast_2d(np.asarray(C_Q, dtype=float))
    if C_Q.shape != (len(theta_G_set), 1 << n):
        raise ValueError(f"expected {len(theta_G_set)} real states of length {1 << n}")
    M = discriminator_observable(theta_D)
    fake = circuits.generator_state(n, theta_G_set)
    return discriminator_loss_from_sigma(score_states(M, C_Q), score_states(M, fake))


def loss_generator(theta_G_set, theta_D) -> float:
    theta_D = np.asarray(theta_D, dtype=float)
    n = input_qubits_for(theta_D)
    theta_G_set = _check_sets(theta_G_set, n)
    M = discriminator_observable(theta_D)
    return generator_loss_from_sigma(score_states(M, circuits.generator_state(n, theta_G_set)))


@dataclass
class GameConfig:
    n: int
    n_samples: int
    epochs: int = 25
    iters_per_epoch: int = 500
    seed: int = 0
    sigma0: float = 0.3 * math.pi
    log_base: float = math.e
    stagnation_tol: float = 1e-12
    stagnation_window: int = 100
    generator_mode: str = "per_sample"
    warm_start: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.iters_per_epoch < 1:
            raise ValueError("iters_per_epoch must be >= 1")
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if self.generator_mode not in ("per_sample", "joint"):
            raise ValueError("generator_mode must be 'per_sample' or 'joint'")


@dataclass
class GameState:
    theta_D: np.ndarray
    theta_G: np.ndarray
    C_Q: np.ndarray
    epochs: list[dict] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)

    def history(self, agent: str, key: str = "best") -> np.ndarray:
        """Per-generation trace of ``key`` for agent ``"D"`` or ``"G"`` across all epochs."""
        return np.array([r[key] for r in self.log if r["agent"] == agent])


def _seed(cfg: GameConfig, epoch: int, agent: str, k: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence([cfg.seed, epoch, AGENTS[agent], k])


def _train_discriminator(cfg, epoch, theta_D, C_Q, fake, emit):
    mean = theta_D if cfg.warm_start else np.random.default_rng(_seed(cfg, epoch, "D", 1)).uniform(
        *ANGLE_BOUNDS, theta_D.size)
    es = CMAES(mean, cfg.sigma0, bounds=ANGLE_BOUNDS, seed=np.random.default_rng(_seed(cfg, epoch, "D")),
               log_base=cfg.log_base)
    history = []
    for _ in range(cfg.iters_per_epoch):
        pop = es.ask()
        M = discriminator_observable(pop)
        costs = discriminator_loss_from_sigma(score_states(M, C_Q), score_states(M, fake))
        es.tell(pop, costs)
        history.append(record(es, costs))
        emit("D", history[-1])
        if stagnated(history, cfg.stagnation_window, cfg.stagnation_tol):
            break
    return es.best_x.copy(), es.best_f, history


def _train_generator_joint(cfg, epoch, theta_G, M, emit):
    n_samples, dim = theta_G.shape
    es = CMAES(theta_G.ravel(), cfg.sigma0, bounds=ANGLE_BOUNDS,
               seed=np.random.default_rng(_seed(cfg, epoch, "G")), log_base=cfg.log_base)
    history = []
    for _ in range(cfg.iters_per_epoch):
        pop = es.ask()
        states = circuits.generator_state(cfg.n, pop.reshape(-1, n_samples, dim))
        costs = generator_loss_from_sigma(np.einsum("pki,ij,pkj->pk", states, M, states))
        es.tell(pop, costs)
        history.append(record(es, costs))
        emit("G", history[-1])
        if stagnated(history, cfg.stagnation_window, cfg.stagnation_tol):
            break
    return es.best_x.reshape(n_samples, dim).copy(), es.best_f, history


def _train_generator_per_sample(cfg, epoch, theta_G, M, emit):
    """One CMA-ES per sample, stepped in lockstep so a generation covers all samples.

    The joint population member ``j`` is the tuple of every sample's ``j``-th
    candidate; its cost is the generator loss of that tuple. Samples whose
    own run has stagnated are frozen at their best point.
    """
    n_samples, dim = theta_G.shape
    runs = [
        CMAES(theta_G[k], cfg.sigma0, bounds=ANGLE_BOUNDS,
              seed=np.random.default_rng(_seed(cfg, epoch, "G", k)), log_base=cfg.log_base)
        for k in range(n_samples)
    ]
    own = [[] for _ in runs]
    active = np.ones(n_samples, dtype=bool)
    popsize = runs[0].popsize
    history = []
    for gen in range(1, cfg.iters_per_epoch + 1):
        idx = np.flatnonzero(active)
        pops = np.stack([runs[k].ask() for k in idx])
        states = circuits.generator_state(cfg.n, pops)
        costs = (1 - np.einsum("kpi,ij,kpj->kp", states, M, states)) ** 2
        joint = np.array([[r.best_f] * popsize for r in runs])
        joint[idx] = costs
        for row, k in enumerate(idx):
            runs[k].tell(pops[row], costs[row])
            own[k].append(record(runs[k], costs[row]))
            if stagnated(own[k], cfg.stagnation_window, cfg.stagnation_tol):
                active[k] = False
        per_member = joint.mean(axis=0)
        rec = record(runs[0], per_member)
        rec.generation = gen
        rec.best = float(np.mean([r.best_f for r in runs]))
        rec.sigma = float(np.mean([r.sigma for r in runs]))
        history.append(rec)
        emit("G", rec)
        if not active.any():
            break
    best = np.stack([r.best_x for r in runs])
    return best, history[-1].best, history


def train(config: GameConfig, C_Q, *, init=None, callback=None) -> GameState:
    """Run the adversarial game on the encoded training states ``C_Q``.

    Each epoch first minimizes the discriminator loss with the generator
    frozen, then the generator loss against the new discriminator. Every
    optimizer generation is appended to ``state.log`` and passed to
    ``callback`` if given. ``init`` may supply ``(theta_D, theta_G)``;
    otherwise both are drawn uniformly from ``[-pi, pi)`` with the run seed.
    """
    cfg = config
    C_Q = np.atleast_2d(np.asarray(C_Q, dtype=float))
    if C_Q.shape != (cfg.n_samples, 1 << cfg.n):
        raise ValueError(f"C_Q must have shape ({cfg.n_samples}, {1 << cfg.n}), got {C_Q.shape}")
    if num_qubits_of(C_Q) != cfg.n or not np.allclose(np.linalg.norm(C_Q, axis=1), 1, atol=1e-10):
        raise ValueError("C_Q rows must be unit-norm states")
    dim_D = circuits.discriminator_param_count(cfg.n)
    dim_G = circuits.generator_param_count(cfg.n)
    if init is None:
        rng = np.random.default_rng(cfg.seed)
        theta_D = rng.uniform(*ANGLE_BOUNDS, dim_D)
        theta_G = rng.uniform(*ANGLE_BOUNDS, (cfg.n_samples, dim_G))
    else:
        theta_D = np.array(init[0], dtype=float).reshape(dim_D)
        theta_G = np.array(init[1], dtype=float).reshape(cfg.n_samples, dim_G)
    state = GameState(theta_D, theta_G, C_Q)
    log.info("training n=%d N=%d: D has %d params (pop %d), G has %d params (pop %d)",
             cfg.n, cfg.n_samples, dim_D, population_size(dim_D, cfg.log_base),
             dim_G, population_size(dim_G, cfg.log_base))

    for epoch in range(1, cfg.epochs + 1):
        def emit(agent, rec, epoch=epoch):
            row = {"epoch": epoch, "agent": agent, **asdict(rec)}
            state.log.append(row)
            if callback is not None:
                callback(row)

        fake = circuits.generator_state(cfg.n, state.theta_G)
        state.theta_D, loss_D, hist_D = _train_discriminator(cfg, epoch, state.theta_D, C_Q, fake, emit)
        M = discriminator_observable(state.theta_D)
        step = _train_generator_per_sample if cfg.generator_mode == "per_sample" else _train_generator_joint
        state.theta_G, loss_G, hist_G = step(cfg, epoch, state.theta_G, M, emit)

        fake = circuits.generator_state(cfg.n, state.theta_G)
        summary = {
            "epoch": epoch,
            "loss_D": loss_D,
            "loss_G": loss_G,
            "var_D": hist_D[-1].variance,
            "var_G": hist_G[-1].variance,
            "generations_D": len(hist_D),
            "generations_G": len(hist_G),
            "sigma_real": float(score_states(M, C_Q).mean()),
            "sigma_fake": float(score_states(M, fake).mean()),
        }
        state.epochs.append(summary)
        log.info("epoch %d: L_D=%.6g L_G=%.6g mean sigma(fake)=%.4f",
                 epoch, loss_D, loss_G, summary["sigma_fake"])
    return state


def generate(theta_G_set, pca_model, scale: float, n_components: int | None = None):
    """Decode generator angles into clipped ``[0, 1]`` images.

    Pipeline per sample: generator state, SI decode, divide by ``scale``,
    keep the first ``n_components`` coordinates (the rest pad the plane to
    ``2**n - 1``), PCA inverse transform, clip. Samples at the north pole
    are skipped with a warning. Returns ``(images, kept_indices)``.
    """
    theta_G_set = np.atleast_2d(np.asarray(theta_G_set, dtype=float))
    dim = theta_G_set.shape[1]
    n = (dim + 1).bit_length() - 1
    if circuits.generator_param_count(n) != dim:
        raise ValueError(f"{dim} is not a valid generator parameter count")
    if n_components is None:
        n_components = len(pca_model.components_)
    states = circuits.generator_state(n, theta_G_set)
    images, kept = [], []
    for k, v in enumerate(states):
        try:
            plane = si_decode(v) / scale
        except NorthPoleError:
            log.warning("sample %d decodes to the north pole; skipped", k)
            continue
        pixels = pca_model.inverse_transform(plane[None, :n_components])[0]
        images.append(np.clip(pixels, 0.0, 1.0))
        kept.append(k)
    width = pca_model.components_.shape[1]
    return (np.array(images) if images else np.empty((0, width))), kept
