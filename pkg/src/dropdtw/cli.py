"""Command-line front end.

Subcommands: ``align``, ``localize``, ``synth`` and ``bench``. Sequences are
read from headerless comma-separated files (one element per row). Outputs
use 1-based indices. Exit codes: 0 success, 2 malformed input or unusable
paths, 3 contract violations.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bench
from .alignment import MinOperator, drop_dtw_smooth_grad, dtw_smooth_grad
from .costs import DropCostPolicy, build_drop_costs
from .synth import SynthConfig, TrajectoryClass, retrieval_dataset
from .tasks import AlignConfig, assign_step_labels, build_costs, run_aligner
from .types import AlignmentError, CostMatrix

EXIT_INPUT = 2
EXIT_CONTRACT = 3
ALGO_CHOICES = ("dtw", "dropdtw1", "dropdtw2", "greedy", "nw", "lcss", "otam")


class InputError(Exception):
    """Malformed input or an unusable path; maps to exit code 2."""


# --------------------------------------------------------------------------
# I/O helpers


def read_matrix(path) -> np.ndarray:
    """Parse a headerless numeric CSV into a 2-D float array.

    Raises
    ------
    InputError
        With ``file:line`` context for ragged rows, non-numeric cells,
        non-finite values, empty files or unreadable paths.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputError(f"{path}: cannot read ({err})") from None
    rows, width = [], None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            bad = next(c for c in row if not _is_float(c))
            raise InputError(f"{path}:{lineno}: non-numeric cell {bad.strip()!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise InputError(f"{path}:{lineno}: non-finite value")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise InputError(f"{path}:{lineno}: ragged row with {len(values)} cells, expected {width}")
        rows.append(values)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def _is_float(cell) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def format_real(x: float):
    """Round to 9 significant digits; non-finite values become strings."""
    x = float(x)
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return float(f"{x:.9g}")


def _reals(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return format_real(a)
    return [_reals(v) for v in a]


def dumps(obj) -> str:
    return json.dumps(obj, separators=(", ", ": ")) + "\n"


def atomic_write(path, data: str) -> None:
    """Write ``data`` to ``path`` through a temp file in the same directory."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as err:
        raise InputError(f"{path}: cannot write ({err})") from None


def matrix_csv(a) -> str:
    return "".join(",".join(f"{v:.9g}" for v in row) + "\n" for row in np.asarray(a, dtype=float))


def _parse_drop(text: str, dim: int) -> DropCostPolicy:
    kind, _, arg = text.partition(":")
    try:
        if kind == "const":
            return DropCostPolicy.constant(float(arg))
        if kind == "pct":
            return DropCostPolicy.percentile(float(arg))
    except ValueError:
        raise InputError(f"bad --drop value {text!r}") from None
    if kind == "inf" and not arg:
        return DropCostPolicy.infinite()
    if kind == "param" and arg:
        w = read_matrix(arg)
        if w.shape != (2 * dim, dim):
            raise InputError(f"{arg}: expected {2 * dim} rows of {dim} weights (W_x then W_z)")
        return DropCostPolicy.parameterized(w[:dim], w[dim:])
    raise InputError(f"bad --drop value {text!r}; use const:S, pct:P, param:FILE or inf")


def _parse_min(text: str) -> MinOperator:
    try:
        return MinOperator.parse(text)
    except AlignmentError:
        raise
    except ValueError:
        raise InputError(f"bad --min value {text!r}; use hard, smooth:G or soft:G") from None


# --------------------------------------------------------------------------
# commands


def _precomputed_costs(args, config: AlignConfig) -> CostMatrix:
    c = read_matrix(args.c)
    if config.drop.variant == "parameterized":
        raise InputError("param drop costs need --z and --x, not --c")
    dz, dx = build_drop_costs(c, config.drop, one_sided=config.algorithm == "one")
    return CostMatrix(c, dz, dx)


def cmd_align(args) -> int:
    if args.c is not None:
        if args.z is not None or args.x is not None:
            raise InputError("give either --c or both --z and --x")
        dim = 0
    else:
        if args.z is None or args.x is None:
            raise InputError("--z and --x are both required without --c")
        z, x = read_matrix(args.z), read_matrix(args.x)
        if z.shape[1] != x.shape[1]:
            raise InputError(f"feature dimensions differ: {z.shape[1]} vs {x.shape[1]}")
        dim = z.shape[1]
    min_op = _parse_min(args.min)
    config = AlignConfig(args.cost, args.gamma, _parse_drop(args.drop, dim), args.algo, min_op)
    if args.grad and (min_op.is_hard or config.algorithm not in ("dtw", "one", "two")):
        raise AlignmentError("--grad needs a smooth or soft --min and a DP aligner")
    costs = _precomputed_costs(args, config) if args.c is not None else build_costs(z, x, config)
    result = run_aligner(costs, config)
    out = {
        "cost": format_real(result.total_cost),
        "matches": [[i + 1, j + 1] for i, j in result.matches],
        "dropped_z": [i + 1 for i in result.dropped_rows],
        "dropped_x": [j + 1 for j in result.dropped_cols],
    }
    if args.grad:
        if config.algorithm == "dtw":
            g = dtw_smooth_grad(costs.values, min_op.gamma, min_op.variant)
        else:
            g = drop_dtw_smooth_grad(costs, min_op.gamma, config.algorithm == "two", min_op.variant)
        out["grad"] = {"c": _reals(g.grad_c), "drop_z": _reals(g.grad_drop_z),
                       "drop_x": _reals(g.grad_drop_x)}
    sys.stdout.write(dumps(out))
    return 0


def cmd_localize(args) -> int:
    video, steps = read_matrix(args.video), read_matrix(args.steps)
    if video.shape[1] != steps.shape[1]:
        raise InputError(f"feature dimensions differ: {video.shape[1]} vs {steps.shape[1]}")
    out = assign_step_labels(video, steps, gamma=args.gamma, p=args.pct, cost=args.cost)
    intervals = {str(k): [[a + 1, b + 1] for a, b in spans]
                 for k, spans in enumerate(out.intervals, start=1)}
    sys.stdout.write(dumps({"labels": out.labels.tolist(), "intervals": intervals}))
    return 0


def _synth_retrieval(out: Path, config: SynthConfig) -> dict:
    queries, gallery, classes = retrieval_dataset(config)
    items = []
    for q, g, cid in zip(queries, gallery, classes):
        full, part = f"full_{cid:02d}.csv", f"part_{cid:02d}.csv"
        atomic_write(out / full, matrix_csv(g.elements))
        atomic_write(out / part, matrix_csv(q.elements))
        items.append({"class_id": int(cid), "class": str(TrajectoryClass.from_id(cid)),
                      "full": full, "part": part})
    return {"items": items}


def _synth_localization(out: Path, seed: int, count: int) -> dict:
    items = []
    for inst in range(count):
        li = bench.localization_instance(inst, seed)
        signal, query = f"signal_{inst:04d}.csv", f"query_{inst:04d}.csv"
        atomic_write(out / signal, matrix_csv(li.signal.elements))
        atomic_write(out / query, matrix_csv(li.query.elements))
        items.append({"instance": inst, "target": li.target.class_id,
                      "m": len(li.clip_classes),
                      "clip_classes": [int(c) for c in li.clip_classes],
                      "truth": [[a + 1, b + 1] for a, b in li.truth],
                      "signal": signal, "query": query})
    return {"items": items}


def cmd_synth(args) -> int:
    out = Path(args.out)
    if out.exists() and not out.is_dir():
        raise InputError(f"{out}: not a directory")
    try:
        if args.mode == "retrieval":
            config = SynthConfig(seed=args.seed, noise_rate=args.noise,
                                 part_fraction_range=bench.RETRIEVAL_FRACTIONS)
        else:
            config = SynthConfig(seed=args.seed)
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.mode == "retrieval":
        manifest = _synth_retrieval(out, config)
    else:
        manifest = _synth_localization(out, args.seed, args.instances)
    header = {"mode": args.mode, "seed": args.seed, "noise_rate": args.noise,
              "encoding": config.encoding, "feature_dim": config.feature_dim}
    atomic_write(out / "manifest.json", json.dumps({**header, **manifest}, indent=1) + "\n")
    return 0


# seeds for the retrieval sweep, instances otherwise
_DEFAULT_TRIALS = {"retrieval_noise": 1, "localization": 1000, "inference_baselines": 100}


def cmd_bench(args) -> int:
    trials = args.trials or _DEFAULT_TRIALS[args.suite]
    if trials < 1:
        raise InputError("--trials must be positive")
    if args.suite == "retrieval_noise":
        rows = bench.retrieval_noise_sweep(seeds=range(args.seed, args.seed + trials))
    elif args.suite == "localization":
        rows = bench.localization_benchmark(trials, args.seed)
    else:
        rows = bench.inference_baselines(trials, args.seed)
    fields = ("suite", "setting", "algorithm", "metric", "value", "stderr", "trials")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "value": f"{row['value']:.9g}", "stderr": f"{row['stderr']:.9g}"})
    atomic_write(args.out, buf.getvalue())
    return 0


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dropdtw", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("align", help="align two CSV sequences and print JSON")
    a.add_argument("--z", help="CSV of the first sequence (rows = elements)")
    a.add_argument("--x", help="CSV of the second sequence")
    a.add_argument("--c", help="CSV of a precomputed K x N match-cost matrix instead of --z/--x")
    a.add_argument("--algo", choices=ALGO_CHOICES, default="dropdtw2")
    a.add_argument("--cost", choices=("sym", "asym"), default="sym")
    a.add_argument("--gamma", type=float, default=0.1)
    a.add_argument("--drop", default="const:0.3")
    a.add_argument("--min", default="hard")
    a.add_argument("--grad", action="store_true")
    a.set_defaults(func=cmd_align)

    loc = sub.add_parser("localize", help="label video elements with ordered steps")
    loc.add_argument("--video", required=True)
    loc.add_argument("--steps", required=True)
    loc.add_argument("--pct", type=float, default=30.0)
    loc.add_argument("--gamma", type=float, default=0.1)
    loc.add_argument("--cost", choices=("sym", "asym"), default="asym")
    loc.set_defaults(func=cmd_localize)

    s = sub.add_parser("synth", help="write a synthetic dataset")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--mode", choices=("retrieval", "localization"), default="retrieval")
    s.add_argument("--instances", type=int, default=1000)
    s.set_defaults(func=cmd_synth)

    b = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    b.add_argument("--suite", choices=tuple(bench.SUITES), required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--trials", type=int, default=None,
                   help="seeds (retrieval_noise) or instances (other suites)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except AlignmentError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
