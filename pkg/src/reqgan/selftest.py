"""Fast invariant checks behind ``reqgan selftest``."""
from __future__ import annotations

import math
import time

import numpy as np

from . import circuits
from .encoding import si_decode, si_encode
from .optimizer import minimize, population_size

# (generator Ry, generator CX, discriminator Ry, discriminator CX) per qubit count
EXPECTED_COUNTS = {2: (3, 1, 9, 4), 3: (7, 4, 18, 11), 4: (15, 11, 35, 26)}


def half(t):
    return np.cos(np.asarray(t) / 2), np.sin(np.asarray(t) / 2)


def closed_form_2q(theta):
    """Two-qubit generator amplitudes as products of half-angle factors."""
    c1, s1 = half(theta[0])
    cp, sp = half(circuits.hadamard(2) @ np.asarray(theta[1:3]))
    return np.array([c1 * cp[0], c1 * sp[0], s1 * sp[1], s1 * cp[1]])


def closed_form_3q(theta):
    """Three-qubit generator amplitudes as products of half-angle factors."""
    theta = np.asarray(theta)
    c1, s1 = half(theta[0])
    cp, sp = half(circuits.hadamard(2) @ theta[1:3])
    cq, sq = half(circuits.hadamard(4) @ theta[3:7])
    return np.array([
        c1 * cp[0] * cq[0], c1 * cp[0] * sq[0], c1 * sp[0] * cq[3], c1 * sp[0] * sq[3],
        s1 * sp[1] * sq[1], s1 * sp[1] * cq[1], s1 * cp[1] * sq[2], s1 * cp[1] * cq[2],
    ])


def check_counts():
    bad = []
    for n, expected in EXPECTED_COUNTS.items():
        g, d = circuits.build_generator(n), circuits.build_discriminator(n)
        built = (g.count("ry"), g.count("cx"), d.count("ry"), d.count("cx"))
        formula = (circuits.generator_param_count(n), (1 << n) - n - 1,
                   circuits.discriminator_param_count(n), (1 << (n + 1)) - n - 2)
        if built != expected or formula != expected:
            bad.append(f"n={n}: built {built}, formula {formula}, table {expected}")
    return not bad, "; ".join(bad) or "gate and parameter counts match for n=2,3,4"


def check_closed_forms(trials=200, seed=0):
    rng = np.random.default_rng(seed)
    err = 0.0
    for _ in range(trials):
        t = rng.uniform(-math.pi, math.pi, 7)
        err = max(err, np.abs(circuits.generator_state(2, t[:3]) - closed_form_2q(t[:3])).max())
        err = max(err, np.abs(circuits.generator_state(3, t) - closed_form_3q(t)).max())
    return err < 1e-12, f"max amplitude error {err:.2e}"


def check_state_prep(trials=100, seed=1):
    rng = np.random.default_rng(seed)
    err = 0.0
    for n in range(1, 5):
        for _ in range(trials):
            v = rng.normal(size=1 << n)
            v /= np.linalg.norm(v)
            theta, sign = circuits.state_to_params(v, return_sign=True)
            err = max(err, np.abs(circuits.generator_state(n, theta) - sign * v).max())
    return err < 1e-10, f"max round-trip error {err:.2e}"


def check_encoding(trials=1000, seed=2):
    rng = np.random.default_rng(seed)
    err = 0.0
    for d in (3, 7, 15):
        u = rng.normal(size=(trials, d)) * rng.lognormal(size=(trials, 1))
        back = si_decode(si_encode(u))
        err = max(err, float(np.max(np.linalg.norm(back - u, axis=1) / np.linalg.norm(u, axis=1))))
    return err < 1e-10, f"max relative error {err:.2e}"


def check_cmaes():
    for m in range(1, 101):
        k = 0
        while math.exp((k + 1) / 2) <= m:
            k += 1
        if population_size(m) != 4 + k:
            return False, f"population size wrong at M={m}"
    res = minimize(lambda x: float(x @ x), np.ones(10), 0.5, budget=10_000, seed=0,
                   stagnation_tol=0.0)
    best = [r.best for r in res.history]
    monotone = all(b <= a for a, b in zip(best, best[1:]))
    ok = res.fun < 1e-8 and monotone
    return ok, f"sphere-10 best {res.fun:.2e} after {res.nfev} evaluations"


CHECKS = {
    "counts": check_counts,
    "closed_forms": check_closed_forms,
    "state_prep": check_state_prep,
    "encoding": check_encoding,
    "cmaes": check_cmaes,
}


def run_selftest(checks=None):
    """Run every check; returns a list of ``(name, passed, detail, seconds)``."""
    results = []
    for name, fn in (checks or CHECKS).items():
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail, time.perf_counter() - start))
    return results
