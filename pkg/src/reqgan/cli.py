"""Command-line entry point: ``reqgan {train,generate,inspect,selftest}``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adversarial import generate as decode_generator
from .dataio import IDXConsistencyError, IDXFormatError, export_image, load_idx, save_csv, select_subset
from .estimator import ReQGAN
from .pca import load_pca, save_pca
from .selftest import run_selftest

log = logging.getLogger("reqgan")

DATA_ENV = "REQGAN_DATA_DIR"
RUN_FORMAT = "reqgan-run/1"
IMAGES_NAMES = ("train-images-idx3-ubyte", "train-images-idx3-ubyte.gz", "train-images.idx3-ubyte")
LABELS_NAMES = ("train-labels-idx1-ubyte", "train-labels-idx1-ubyte.gz", "train-labels.idx1-ubyte")
LOG_FIELDS = {"epoch": int, "agent": str, "generation": int, "best": float, "mean": float,
              "variance": float, "sigma": float}


class UsageError(Exception):
    """Bad configuration or input; maps to exit code 2."""


@dataclasses.dataclass
class RunConfig:
    qubits: int = 2
    digit: int = 8
    samples: int = 20
    epochs: int = 25
    iters: int = 500
    seed: int = 0
    scale_statistic: str = "mean"
    log_base: float = math.e
    generator_mode: str = "per_sample"
    images: str | None = None
    labels: str | None = None
    out: str | None = None

    def validate(self):
        if not 2 <= self.qubits <= 8:
            raise UsageError("qubits must be in 2..8")
        if not 0 <= self.digit <= 9:
            raise UsageError("digit must be in 0..9")
        if self.samples < 2:
            raise UsageError("samples must be >= 2 (PCA needs two images)")
        if self.epochs < 1:
            raise UsageError("epochs must be >= 1")
        if self.iters < 1:
            raise UsageError("iters must be >= 1")
        if self.scale_statistic not in ("mean", "median", "max"):
            raise UsageError("scale_statistic must be mean, median or max")
        if self.generator_mode not in ("per_sample", "joint"):
            raise UsageError("generator_mode must be per_sample or joint")
        if not self.log_base > 1:
            raise UsageError("log_base must be > 1")
        return self


def _default_data_file(names):
    root = os.environ.get(DATA_ENV)
    if not root:
        return None
    for name in names:
        if (Path(root) / name).exists():
            return str(Path(root) / name)
    return str(Path(root) / names[0])


def load_config(path) -> dict:
    """Read a JSON config; a run manifest is accepted and its ``config`` used."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, dict) and data.get("format") == RUN_FORMAT:
        data = data["config"]
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"{path}: unknown config keys {sorted(unknown)}")
    return data


def build_config(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for f in dataclasses.fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = RunConfig(**values)
    cfg.images = cfg.images or _default_data_file(IMAGES_NAMES)
    cfg.labels = cfg.labels or _default_data_file(LABELS_NAMES)
    return cfg.validate()


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def write_images(out: Path, images) -> None:
    img_dir = out / "images"
    img_dir.mkdir(exist_ok=True)
    for old in img_dir.glob("sample_*.pgm"):
        old.unlink()
    for i, img in enumerate(images):
        export_image(255 * img, img_dir / f"sample_{i:03d}.pgm")
    save_csv(images if len(images) else np.empty((0, 784)), out / "generated.csv")


def cmd_train(cfg: RunConfig) -> Path:
    """Train on a digit subset and write a self-describing run directory."""
    if cfg.out is None:
        raise UsageError("an output directory is required (--out)")
    for label, path in (("images", cfg.images), ("labels", cfg.labels)):
        if path is None:
            raise UsageError(f"no MNIST {label} file given and ${DATA_ENV} is not set")
        if not Path(path).is_file():
            raise UsageError(f"MNIST {label} file not found: {path}")
    try:
        data = load_idx(cfg.images, cfg.labels)
        subset = select_subset(data, cfg.digit, cfg.samples, seed=cfg.seed)
    except (IDXFormatError, IDXConsistencyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    model = ReQGAN(n_qubits=cfg.qubits, epochs=cfg.epochs, iters_per_epoch=cfg.iters,
                   log_base=cfg.log_base, scale_statistic=cfg.scale_statistic,
                   generator_mode=cfg.generator_mode, random_state=cfg.seed)
    with open(out / "training_log.jsonl", "w") as fh:
        model.fit(subset.as_float(), callback=lambda row: fh.write(json.dumps(row) + "\n"))
    with open(out / "epochs.jsonl", "w") as fh:
        for row in model.epochs_:
            fh.write(json.dumps(row) + "\n")

    save_pca(model.pca_, out / "pca.bin")
    _write_json(out / "params.json", {
        "n": cfg.qubits,
        "n_pca": model.n_components_,
        "scale": model.encoder_.scale_,
        "theta_D": model.theta_D_.tolist(),
        "theta_G": model.theta_G_.tolist(),
    })
    images = model.generate()
    write_images(out, images)
    _write_json(out / "manifest.json", {
        "format": RUN_FORMAT,
        "version": __version__,
        "config": {k: v for k, v in dataclasses.asdict(cfg).items() if k != "out"},
        "n_pca": model.n_components_,
        "cev": model.pca_.cev_,
        "scale": model.encoder_.scale_,
        "generated": model.generated_indices_,
        "files": {"log": "training_log.jsonl", "epochs": "epochs.jsonl", "params": "params.json",
                  "pca": "pca.bin", "images": "images", "generated": "generated.csv"},
    })
    log.info("wrote %d images to %s", len(images), out)
    return out


def _read_manifest(run_dir: Path) -> dict:
    path = run_dir / "manifest.json"
    try:
        manifest = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"{run_dir}: no manifest.json") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: corrupt manifest ({exc})") from exc
    if not isinstance(manifest, dict) or manifest.get("format") != RUN_FORMAT:
        raise UsageError(f"{path}: not a reqgan run manifest")
    return manifest


def cmd_generate(run_dir, out=None) -> int:
    """Re-decode images from a run's saved parameters."""
    run_dir = Path(run_dir)
    _read_manifest(run_dir)
    params = json.loads((run_dir / "params.json").read_text())
    pca = load_pca(run_dir / "pca.bin")
    images, _ = decode_generator(np.array(params["theta_G"]), pca, params["scale"], params["n_pca"])
    target = Path(out) if out else run_dir
    target.mkdir(parents=True, exist_ok=True)
    write_images(target, images)
    return len(images)


def read_log(path: Path) -> list[dict]:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            try:
                row = json.loads(line)
                if not isinstance(row, dict) or set(row) != set(LOG_FIELDS):
                    raise ValueError("unexpected fields")
                for key, typ in LOG_FIELDS.items():
                    if typ is float and not isinstance(row[key], (int, float)):
                        raise ValueError(f"{key} is not a number")
                    if typ is not float and not isinstance(row[key], typ):
                        raise ValueError(f"{key} has the wrong type")
                if row["agent"] not in ("D", "G"):
                    raise ValueError("agent must be D or G")
            except ValueError as exc:
                raise UsageError(f"{path.name} line {lineno}: malformed record ({exc})") from exc
            rows.append(row)
    return rows


def cmd_inspect(run_dir) -> str:
    """Per-epoch summary CSV of a run; a trailing comment flags the undetected epoch."""
    run_dir = Path(run_dir)
    manifest = _read_manifest(run_dir)
    rows = read_log(run_dir / manifest["files"]["log"])
    epochs = [json.loads(line) for line in (run_dir / manifest["files"]["epochs"]).read_text().splitlines()]
    n_epochs = manifest["config"]["epochs"]
    if len(epochs) != n_epochs:
        raise UsageError(f"{run_dir}: expected {n_epochs} epoch summaries, found {len(epochs)}")
    last = {}
    for row in rows:
        last[(row["epoch"], row["agent"])] = row
    lines = ["epoch,loss_D,loss_G,var_D,var_G,sigma_real,sigma_fake"]
    undetected = None
    for summary in epochs:
        e = summary["epoch"]
        if (e, "D") not in last or (e, "G") not in last:
            raise UsageError(f"{run_dir}: training log has no records for epoch {e}")
        d, g = last[(e, "D")], last[(e, "G")]
        lines.append(",".join([str(e)] + [f"{v:.10g}" for v in (
            d["best"], g["best"], d["variance"], g["variance"],
            summary["sigma_real"], summary["sigma_fake"])]))
        if undetected is None and summary["sigma_fake"] > 0:
            undetected = e
    lines.append(f"# first epoch with mean generated sigma > 0: {undetected if undetected else 'none'}")
    return "\n".join(lines) + "\n"


def cmd_selftest(stream=None) -> bool:
    stream = stream or sys.stdout
    results = run_selftest()
    for name, ok, detail, seconds in results:
        print(f"{'PASS' if ok else 'FAIL'} {name:<13} {detail} ({seconds:.2f}s)", file=stream)
    return all(ok for _, ok, _, _ in results)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reqgan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train on an MNIST digit subset")
    train.add_argument("--config", help="JSON config or a previous run's manifest.json")
    train.add_argument("--images", help=f"IDX image file (default: ${DATA_ENV}/train-images-idx3-ubyte)")
    train.add_argument("--labels", help=f"IDX label file (default: ${DATA_ENV}/train-labels-idx1-ubyte)")
    train.add_argument("--digit", type=int)
    train.add_argument("--qubits", type=int)
    train.add_argument("--samples", type=int, help="training subset size N")
    train.add_argument("--epochs", type=int)
    train.add_argument("--iters", type=int, help="CMA-ES generations per agent per epoch")
    train.add_argument("--seed", type=int)
    train.add_argument("--scale-statistic", dest="scale_statistic", choices=("mean", "median", "max"))
    train.add_argument("--log-base", dest="log_base", type=float, help="log base of the population rule")
    train.add_argument("--generator-mode", dest="generator_mode", choices=("per_sample", "joint"))
    train.add_argument("--out", help="run directory")

    gen = sub.add_parser("generate", help="decode images from a run's saved parameters")
    gen.add_argument("run_dir")
    gen.add_argument("--out", help="write images here instead of the run directory")

    insp = sub.add_parser("inspect", help="per-epoch loss/variance summary of a run")
    insp.add_argument("run_dir")
    insp.add_argument("--csv", help="also write the table to this file")

    sub.add_parser("selftest", help="fast invariant checks")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "train":
            out = cmd_train(build_config(args))
            print(out)
        elif args.command == "generate":
            print(cmd_generate(args.run_dir, args.out))
        elif args.command == "inspect":
            report = cmd_inspect(args.run_dir)
            if args.csv:
                Path(args.csv).write_text(report)
            sys.stdout.write(report)
        elif args.command == "selftest":
            return 0 if cmd_selftest() else 1
    except UsageError as exc:
        print(f"reqgan: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        log.debug("failure", exc_info=True)
        print(f"reqgan: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
