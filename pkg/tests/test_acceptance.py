"""Acceptance criteria, one check per criterion at its stated tolerance.

Run with pytest (a PASS/FAIL line per criterion is printed in the summary)
or directly: ``python tests/test_acceptance.py``.
"""
import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from conftest import SAMPLE_IMAGES, SAMPLE_LABELS  # noqa: E402
from reqgan import adversarial as adv  # noqa: E402
from reqgan import circuits, cli  # noqa: E402
from reqgan.encoding import si_decode, si_encode  # noqa: E402
from reqgan.optimizer import minimize, population_size  # noqa: E402

RESULTS = {}
EXPECTED_COUNTS = {2: ((3, 1), (9, 4)), 3: ((7, 4), (18, 11)), 4: ((15, 11), (35, 26))}


def c1_table_counts():
    start = time.perf_counter()
    got = {}
    for n in EXPECTED_COUNTS:
        g, d = circuits.build_generator(n), circuits.build_discriminator(n)
        got[n] = ((g.count("ry"), g.count("cx")), (d.count("ry"), d.count("cx")))
    elapsed = time.perf_counter() - start
    return got == EXPECTED_COUNTS and elapsed < 1, f"counts {got}, {elapsed * 1e3:.1f} ms"


def c2a_two_qubit_closed_form():
    rng = np.random.default_rng(20)
    t = rng.uniform(-np.pi, np.pi, (1000, 3))
    err = max(np.abs(circuits.generator_state(2, x) - oracles.published_2q(x)).max() for x in t)
    return err < 1e-12, f"max |G2 - two-qubit form| = {err:.3g} over 1000 draws"


def c2b_three_qubit_closed_form_and_dense():
    start = time.perf_counter()
    rng = np.random.default_rng(21)
    t3 = rng.uniform(-np.pi, np.pi, (1000, 7))
    err3 = max(np.abs(circuits.generator_state(3, x) - oracles.published_3q(x)).max() for x in t3)
    g4 = circuits.build_generator(4)
    t4 = rng.uniform(-np.pi, np.pi, (1000, 15))
    err4 = max(np.abs(circuits.generator_state(4, x) - oracles.circuit_state(g4, x)).max() for x in t4)
    elapsed = time.perf_counter() - start
    ok = err3 < 1e-12 and err4 < 1e-12 and elapsed < 10
    return ok, f"max |G3 - three-qubit form| = {err3:.3g}, max |G4 - dense| = {err4:.3g}, {elapsed:.2f} s"


def c3_encoding_bijection():
    rng = np.random.default_rng(3)
    rel, norm = 0.0, 0.0
    for d in (3, 7, 15):
        u = rng.normal(size=(10_000, d)) * rng.lognormal(sigma=1.0, size=(10_000, 1))
        v = si_encode(u)
        norm = max(norm, np.abs(np.linalg.norm(v, axis=1) - 1).max())
        rel = max(rel, (np.linalg.norm(si_decode(v) - u, axis=1) / np.linalg.norm(u, axis=1)).max())
    return rel < 1e-10 and norm < 1e-12, f"max relative error {rel:.3g}, max norm deviation {norm:.3g}"


def c4_state_preparation():
    rng = np.random.default_rng(4)
    err = 0.0
    for n in (1, 2, 3, 4):
        for v in rng.normal(size=(1000, 2**n)):
            v /= np.linalg.norm(v)
            theta = circuits.state_to_params(v)
            out = circuits.generator_state(n, theta)
            err = max(err, min(np.abs(out - v).max(), np.abs(out + v).max()))
    return err < 1e-10, f"max error up to sign {err:.3g}"


def c5_cmaes():
    formula = all(population_size(m) == 4 + math.floor(2 * math.log(m)) for m in range(1, 101))
    runs = [minimize(lambda x: float(x @ x), np.ones(10), 0.5, budget=10_000, seed=s, stagnation_tol=0)
            for s in range(3)]
    runs += [minimize(lambda x: float(np.sum(np.abs(x))), np.ones(4), 1.0, budget=3000, seed=9,
                      bounds=(-np.pi, np.pi))]
    sphere_ok = all(r.fun < 1e-8 and r.nfev <= 10_000 for r in runs[:3])
    monotone = all(
        all(b.best <= a.best for a, b in zip(r.history, r.history[1:])) for r in runs
    )
    return formula and sphere_ok and monotone, (
        f"formula {formula}, sphere best {max(r.fun for r in runs[:3]):.3g} "
        f"within {max(r.nfev for r in runs[:3])} evals, monotone {monotone}")


def c6_sigma_oracle():
    rng = np.random.default_rng(6)
    err = 0.0
    for n in (2, 3):
        tmpl = circuits.build_discriminator(n)
        for _ in range(1000):
            x = rng.normal(size=2**n)
            x /= np.linalg.norm(x)
            t = rng.uniform(-np.pi, np.pi, tmpl.num_params)
            err = max(err, abs(adv.sigma(x, t) - oracles.sigma_dense(tmpl, t, x)))
    return err < 1e-12, f"max |sigma - dense| = {err:.3g} over 2000 pairs"


def _train(out):
    args = ["train", "--images", str(SAMPLE_IMAGES), "--labels", str(SAMPLE_LABELS), "--qubits", "2",
            "--digit", "8", "--samples", "20", "--epochs", "25", "--iters", "500", "--seed", "7",
            "--out", str(out)]
    start = time.perf_counter()
    code = cli.main(args)
    return code, time.perf_counter() - start


def c7_end_to_end():
    with tempfile.TemporaryDirectory() as tmp:
        first, second = Path(tmp) / "a", Path(tmp) / "b"
        code, elapsed = _train(first)
        if code != 0:
            return False, f"train exited with {code}"
        epochs = [json.loads(x) for x in (first / "epochs.jsonl").read_text().splitlines()]
        rows = [json.loads(x) for x in (first / "training_log.jsonl").read_text().splitlines()]
        monotone = all(
            b["best"] <= a["best"] for a, b in zip(rows, rows[1:])
            if a["epoch"] == b["epoch"] and a["agent"] == b["agent"]
        )
        lg1, lg_end, ld_end = epochs[0]["loss_G"], epochs[-1]["loss_G"], epochs[-1]["loss_D"]
        images = sorted((first / "images").glob("*.pgm"))
        valid = len(images) == 20 and all(p.stat().st_size == len(b"P5\n28 28\n255\n") + 784 for p in images)
        code2, _ = _train(second)
        same = code2 == 0 and all(
            (second / p.relative_to(first)).read_bytes() == p.read_bytes()
            for p in first.rglob("*") if p.is_file()
        )
        undetected = next((e["epoch"] for e in epochs if e["sigma_fake"] > 0), None)
    ok = lg_end < lg1 and ld_end < 4 and valid and same and monotone and elapsed < 900
    return ok, (f"{elapsed:.0f} s; L_G {lg1:.3g} -> {lg_end:.3g}; final L_D {ld_end:.3g}; "
                f"{len(images)} images; replay identical {same}; "
                f"first epoch with mean sigma(fake) > 0: {undetected}")


def c8_loss_algebra():
    cases = [((1, -1), 0, 4), ((0, 0), 1, 1), ((-1, 1), 4, 0)]
    ok = True
    for (sr, sf), ld, lg in cases:
        ok &= adv.discriminator_loss_from_sigma(np.full(20, sr), np.full(20, sf)) == ld
        ok &= adv.generator_loss_from_sigma(np.full(20, sf)) == lg
    ok &= adv.generator_loss_from_sigma(np.full(20, 1)) == 0
    ok &= adv.generator_loss_from_sigma(np.full(20, 0)) == 1
    t_D = np.zeros(9)
    ok &= adv.loss_discriminator(t_D, [[np.pi, 0, 0]], [[1.0, 0, 0, 0]]) == 0
    ok &= adv.loss_discriminator(t_D, [[0.0, 0, 0]], [[0.0, 0, 0, 1]]) == 4
    ok &= adv.loss_generator([[0.0, 0, 0]], t_D) == 0
    ok &= adv.loss_generator([[np.pi, 0, 0]], t_D) == 4
    return bool(ok), "L_D, L_G in {0, 1, 4} for the three sigma patterns (direct and through circuits)"


CRITERIA = {
    "1 reference gate counts": c1_table_counts,
    "2 two-qubit closed form": c2a_two_qubit_closed_form,
    "2 three-qubit closed form and n=4 dense oracle": c2b_three_qubit_closed_form_and_dense,
    "3 encoding bijection": c3_encoding_bijection,
    "4 state-preparation round trip": c4_state_preparation,
    "5 CMA-ES sanity": c5_cmaes,
    "6 sigma dense oracle": c6_sigma_oracle,
    "7 end-to-end training": c7_end_to_end,
    "8 loss algebra": c8_loss_algebra,
}


def evaluate(name):
    try:
        ok, detail = CRITERIA[name]()
    except Exception as exc:  # report, then fail
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    RESULTS[name] = (ok, detail)
    return ok, detail


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name):
    ok, detail = evaluate(name)
    print(f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for crit in CRITERIA:
        ok, detail = evaluate(crit)
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {crit}: {detail}", flush=True)
    sys.exit(1 if failed else 0)
