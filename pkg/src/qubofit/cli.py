"""Command-line pipeline: generate, hypothesize, fit, bench, eval.

Settings resolve in three layers: built-in defaults, then a key=value
config file (--config), then explicit flags. Every run draws all its
randomness from one seed through fixed per-component substreams, so a
stored config reproduces byte-identical outputs.

Exit codes: 0 success, 2 usage error, 3 data error, 4 solver guard
(stalled pruning or an oversized exhaustive problem).
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

from scipy import stats

from .annealer import AnnealConfig, sample_set_to_json
from .datagen import (
    HypothesisPoolSpec,
    SyntheticSpec,
    generate_star,
    load_models,
    sample_hypotheses,
    save_models,
)
from .errors import StalledPruning, TooLarge
from .evaluation import (
    label_points,
    labeling_from_dict,
    labeling_to_dict,
    misclassification,
)
from .geometry import load_points, save_points
from .preference import build_preference
from .seeding import derive_seed
from .solver import DecompositionConfig, SolveConfig, dequmf, qumf

# Substream tags: one per consumer of the top-level seed.
DATA_TAG = 1
POOL_TAG = 2
ANNEAL_TAG = 3
PARTITION_TAG = 4

CSV_COLUMNS = (
    "dataset,method,backend,lambda,epsilon,n,m,k,seed,"
    "error_percent,energy,iterations,wall_ms"
)


@dataclass(frozen=True)
class RunConfig:
    """Every knob a pipeline run depends on, in one flat record."""

    method: str = "qumf"
    backend: str = "sa"
    penalty: float = 1.1
    epsilon: float = 0.03
    anneals: int = 100
    sweeps: int = 1000
    beta_start: float = 0.1
    beta_end: float = 10.0
    subproblem_size: int = 40
    seed: int = 0
    n: int = 30
    k: int = 5
    noise_sigma: float = 0.0075
    m: int = 100
    include_ground_truth: bool = True
    trials: int = 20
    m_grid: tuple[int, ...] = (20, 40, 60, 80, 100)

    def solve_config(self) -> SolveConfig:
        anneal = AnnealConfig(
            num_anneals=self.anneals,
            sweeps_per_anneal=self.sweeps,
            beta_start=self.beta_start,
            beta_end=self.beta_end,
            seed=derive_seed(self.seed, ANNEAL_TAG),
        )
        decomposition = None
        if self.method == "dequmf":
            decomposition = DecompositionConfig(
                subproblem_size=self.subproblem_size,
                partition_seed=derive_seed(self.seed, PARTITION_TAG),
            )
        return SolveConfig(self.penalty, self.backend, anneal, decomposition)


class UsageError(Exception):
    pass


def _auto_type(text: str):
    raw = text.strip()
    if "," in raw:
        return tuple(_auto_type(part) for part in raw.split(","))
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def read_config_file(path: str | Path) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = _auto_type(value)
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    if getattr(args, "config", None):
        entries = read_config_file(args.config)
        unknown = set(entries) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "m_grid" in entries and not isinstance(entries["m_grid"], tuple):
            entries["m_grid"] = (entries["m_grid"],)
        cfg = replace(cfg, **entries)
    overrides = {
        name: getattr(args, name)
        for name in known
        if getattr(args, name, None) is not None
    }
    if "m_grid" in overrides:
        grid = _auto_type(overrides["m_grid"])
        overrides["m_grid"] = grid if isinstance(grid, tuple) else (grid,)
    return replace(cfg, **overrides)


def _write_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_generate(args) -> int:
    cfg = resolve_config(args)
    spec = SyntheticSpec(
        n=cfg.n,
        k=cfg.k,
        noise_sigma=cfg.noise_sigma,
        seed=derive_seed(cfg.seed, DATA_TAG),
    )
    points, labels, models = generate_star(spec)
    save_points(args.points_out, points, labels)
    save_models(args.models_out, models)
    print(f"wrote {len(points)} points to {args.points_out}, "
          f"{len(models)} models to {args.models_out}")
    return 0


def cmd_hypothesize(args) -> int:
    cfg = resolve_config(args)
    points, _ = load_points(args.points)
    gt_models = load_models(args.gt_models)
    pool = sample_hypotheses(
        points,
        gt_models,
        HypothesisPoolSpec(
            m=cfg.m,
            include_ground_truth=cfg.include_ground_truth,
            seed=derive_seed(cfg.seed, POOL_TAG),
        ),
    )
    save_models(args.models_out, pool)
    print(f"wrote {len(pool)} hypotheses to {args.models_out}")
    return 0


def _solve(pref, cfg: RunConfig, want_samples: bool = False):
    solve_cfg = cfg.solve_config()
    if cfg.method == "dequmf":
        return dequmf(pref, solve_cfg), None
    selection, samples = qumf(pref, solve_cfg, return_samples=True)
    return selection, (samples if want_samples else None)


def cmd_fit(args) -> int:
    cfg = resolve_config(args)
    if args.dump_samples and cfg.method != "qumf":
        raise UsageError("--dump-samples needs --method qumf")
    points, gt_labels = load_points(args.points)
    models = load_models(args.models)
    pref = build_preference(points, models, cfg.epsilon)
    selection, samples = _solve(pref, cfg, want_samples=args.dump_samples)
    labeling = label_points(pref, selection)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "selection.json", selection.to_dict(models))
    _write_json(out / "labels.json", labeling_to_dict(labeling))
    if samples is not None:
        sample_set_to_json(samples, out / "samples.json")
    line = (f"selected {len(selection.selected)} of {pref.m} models, "
            f"energy {selection.final_energy:.6f}")
    if gt_labels is not None:
        report = misclassification(labeling, gt_labels)
        _write_json(out / "report.json", report.to_dict())
        line += f", error {report.error_percent:.3f}%"
    print(line)
    return 0


def _bench_row(cfg: RunConfig, dataset: str, m: int, seed: int) -> str:
    trial = replace(cfg, m=m, seed=seed)
    data_spec = SyntheticSpec(
        n=trial.n,
        k=trial.k,
        noise_sigma=trial.noise_sigma,
        seed=derive_seed(seed, DATA_TAG),
    )
    points, gt_labels, gt_models = generate_star(data_spec)
    pool = sample_hypotheses(
        points,
        gt_models,
        HypothesisPoolSpec(m=m, seed=derive_seed(seed, POOL_TAG)),
    )
    pref = build_preference(points, pool, trial.epsilon)
    start = time.perf_counter()
    selection, _ = _solve(pref, trial)
    wall_ms = 1000.0 * (time.perf_counter() - start)
    labeling = label_points(pref, selection)
    report = misclassification(labeling, gt_labels)
    return (
        f"{dataset},{trial.method},{trial.backend},{trial.penalty:g},"
        f"{trial.epsilon:g},{trial.n},{m},{trial.k},{seed},"
        f"{report.error_percent:.6f},{selection.final_energy:.9g},"
        f"{selection.iterations},{wall_ms:.3f}"
    )


def _failed_row(cfg: RunConfig, dataset: str, m: int, seed: int) -> str:
    return (
        f"{dataset},{cfg.method},{cfg.backend},{cfg.penalty:g},{cfg.epsilon:g},"
        f"{cfg.n},{m},{cfg.k},{seed},nan,nan,-1,nan"
    )


def _summarize(rows: list[tuple[int, float]]) -> list[str]:
    lines = ["m,trials,mean_error,median_error,ci95_low,ci95_high"]
    for m in sorted({m for m, _ in rows}):
        errors = [e for mm, e in rows if mm == m and e == e]
        if not errors:
            lines.append(f"{m},0,nan,nan,nan,nan")
            continue
        mean = statistics.fmean(errors)
        median = statistics.median(errors)
        half = 0.0
        if len(errors) > 1:
            half = float(stats.t.ppf(0.975, len(errors) - 1) * stats.sem(errors))
        lines.append(
            f"{m},{len(errors)},{mean:.6f},{median:.6f},"
            f"{mean - half:.6f},{mean + half:.6f}"
        )
    return lines


def cmd_bench(args) -> int:
    cfg = resolve_config(args)
    if not cfg.m_grid or cfg.trials < 1:
        raise UsageError("bench needs a nonempty m grid and trials >= 1")
    dataset = f"star{cfg.k}"
    rows: list[str] = []
    summary_points: list[tuple[int, float]] = []
    for m in sorted(cfg.m_grid):
        for t in range(cfg.trials):
            seed = cfg.seed + t
            try:
                row = _bench_row(cfg, dataset, m, seed)
            except Exception as exc:  # noqa: BLE001 - keep the grid running
                print(f"trial m={m} seed={seed} failed: {exc}", file=sys.stderr)
                row = _failed_row(cfg, dataset, m, seed)
            rows.append(row)
            summary_points.append((m, float(row.split(",")[9])))
    out = Path(args.out)
    out.write_text("\n".join([CSV_COLUMNS] + rows) + "\n")
    summary = out.with_name(out.stem + "_summary.csv")
    summary.write_text("\n".join(_summarize(summary_points)) + "\n")
    print(f"wrote {len(rows)} trial rows to {out}, summary to {summary}")
    return 0


def cmd_eval(args) -> int:
    _, gt_labels = load_points(args.points)
    if gt_labels is None:
        raise ValueError(f"{args.points} carries no ground-truth labels")
    labeling = labeling_from_dict(json.loads(Path(args.labels).read_text()))
    report = misclassification(labeling, gt_labels)
    if args.out:
        _write_json(args.out, report.to_dict())
    print(f"error_percent={report.error_percent:.6f}")
    return 0


def _add_config_flags(p: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "method": dict(choices=("qumf", "dequmf")),
        "backend": dict(choices=("sa", "exhaustive")),
        "penalty": dict(type=float, flag="--lambda"),
        "epsilon": dict(type=float),
        "anneals": dict(type=int),
        "sweeps": dict(type=int),
        "beta_start": dict(type=float),
        "beta_end": dict(type=float),
        "subproblem_size": dict(type=int),
        "seed": dict(type=int),
        "n": dict(type=int),
        "k": dict(type=int),
        "noise_sigma": dict(type=float),
        "m": dict(type=int),
        "include_ground_truth": dict(action=argparse.BooleanOptionalAction),
        "trials": dict(type=int),
        "m_grid": dict(type=str),
    }
    p.add_argument("--config", help="key=value settings file; flags win")
    for name in names:
        spec = dict(flags[name])
        flag = spec.pop("flag", "--" + name.replace("_", "-"))
        p.add_argument(flag, dest=name, default=None, **spec)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubofit",
        description="Multi-model geometric fitting via QUBO annealing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic star dataset")
    p.add_argument("--points-out", required=True)
    p.add_argument("--models-out", required=True)
    _add_config_flags(p, "n", "k", "noise_sigma", "seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("hypothesize", help="sample a hypothesis pool")
    p.add_argument("--points", required=True)
    p.add_argument("--gt-models", required=True)
    p.add_argument("--models-out", required=True)
    _add_config_flags(p, "m", "include_ground_truth", "seed")
    p.set_defaults(func=cmd_hypothesize)

    p = sub.add_parser("fit", help="select models for a dataset")
    p.add_argument("--points", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--dump-samples", action="store_true")
    _add_config_flags(
        p, "method", "backend", "penalty", "epsilon", "anneals", "sweeps",
        "beta_start", "beta_end", "subproblem_size", "seed",
    )
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bench", help="run a seeded m-grid of trials")
    p.add_argument("--out", default="bench.csv")
    _add_config_flags(
        p, "method", "backend", "penalty", "epsilon", "anneals", "sweeps",
        "beta_start", "beta_end", "subproblem_size", "seed", "n", "k",
        "noise_sigma", "trials", "m_grid",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval", help="score a labeling against ground truth")
    p.add_argument("--labels", required=True)
    p.add_argument("--points", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (StalledPruning, TooLarge) as exc:
        print(f"solver guard: {exc}", file=sys.stderr)
        return 4
    except (OSError, ValueError, KeyError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
