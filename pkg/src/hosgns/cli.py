"""Command-line pipeline: ingest, train, eval, pmi-check.

Every command writes machine-readable JSON embedding the resolved
configuration and a version string, and prints a short human summary.
Flag values win over config-file values, which win over defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

from hosgns import __version__
from hosgns.cooccurrence import dyn_tensor, stat_tensor, statdyn_tensor
from hosgns.errors import HosgnsError
from hosgns.evaluation import (
    OPERATORS,
    SirConfig,
    run_classification,
    run_reconstruction,
)
from hosgns.io import (
    read_embeddings,
    write_embeddings,
    write_training_log,
)
from hosgns.seeding import derive_seed
from hosgns.supra import build_supra
from hosgns.temporal_graph import TimeVaryingGraph, parse_contact_lines, stats
from hosgns.training import TrainConfig, reconstruct_spmi, train

TENSOR_KINDS = ("stat", "dyn", "statdyn")


def version_string() -> str:
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).parent,
        )
        if described.returncode == 0:
            return f"{__version__}+{described.stdout.strip()}"
    except (OSError, subprocess.TimeoutExpired):
        pass
    return __version__


def _positive_int(value: str) -> int:
    parsed = int(value)
    if parsed <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return parsed


def _load_config(argv: list[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        with open(known.config) as fh:
            return json.load(fh)
    return {}


def build_parser(config: dict) -> argparse.ArgumentParser:
    def default(key, fallback):
        return config.get(key, fallback)

    parser = argparse.ArgumentParser(
        prog="hosgns",
        description="Disentangled node/time embeddings for time-varying graphs",
    )
    parser.add_argument("--config", help="JSON config file (flags take precedence)")
    parser.add_argument("--threads", type=_positive_int,
                        default=int(os.environ.get("HOSGNS_THREADS", "1")),
                        help="worker cap (training is single-threaded in "
                             "deterministic mode)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse raw contacts into a graph file")
    p_ingest.add_argument("--input", required=True)
    p_ingest.add_argument("--window-seconds", type=_positive_int,
                          default=default("window_seconds", 600))
    p_ingest.add_argument("--output", required=True)

    p_train = sub.add_parser("train", help="build a tensor and train embeddings")
    p_train.add_argument("--graph", required=True)
    p_train.add_argument("--tensor", choices=TENSOR_KINDS,
                         default=default("tensor", "stat"))
    p_train.add_argument("--window", type=_positive_int,
                         default=default("window", 10),
                         help="context window for the walk tensor")
    p_train.add_argument("--dim", type=_positive_int, default=default("dim", 128))
    p_train.add_argument("--kappa", type=float, default=default("kappa", 5.0))
    p_train.add_argument("--batch", type=_positive_int,
                         default=default("batch", 50000))
    p_train.add_argument("--lr", type=float, default=default("lr", 0.05))
    p_train.add_argument("--iterations", type=_positive_int,
                         default=default("iterations", 10000))
    p_train.add_argument("--seed", type=int, default=default("seed", 0))
    p_train.add_argument("--outdir", required=True)

    p_eval = sub.add_parser("eval", help="run a downstream task")
    p_eval.add_argument("--graph", required=True)
    p_eval.add_argument("--embeddings", required=True,
                        help="directory of factor TSVs, or of run_* subdirectories")
    p_eval.add_argument("--task", choices=("classify", "reconstruct"),
                        required=True)
    p_eval.add_argument("--operator", choices=OPERATORS,
                        default=default("operator", "hadamard"))
    p_eval.add_argument("--beta", type=float, default=default("beta", 0.25))
    p_eval.add_argument("--mu", type=float, default=default("mu", 0.002))
    p_eval.add_argument("--splits", type=_positive_int,
                        default=default("splits", 10))
    p_eval.add_argument("--seed", type=int, default=default("seed", 0))
    p_eval.add_argument("--output", required=True)

    p_pmi = sub.add_parser("pmi-check",
                           help="squared Pearson correlation of inner products "
                                "vs shifted PMI")
    p_pmi.add_argument("--graph", required=True)
    p_pmi.add_argument("--tensor", choices=TENSOR_KINDS,
                       default=default("tensor", "stat"))
    p_pmi.add_argument("--window", type=_positive_int,
                       default=default("window", 10))
    p_pmi.add_argument("--embeddings", required=True)
    p_pmi.add_argument("--kappa", type=float, default=default("kappa", 5.0))
    p_pmi.add_argument("--samples", type=_positive_int,
                       default=default("samples", 10000))
    p_pmi.add_argument("--seed", type=int, default=default("seed", 0))
    p_pmi.add_argument("--output", required=True)

    return parser


def _load_graph(path: str) -> TimeVaryingGraph:
    return TimeVaryingGraph.from_json(Path(path).read_text())


def _build_tensor(graph, kind: str, window: int):
    if kind == "stat":
        return stat_tensor(graph)
    supra = build_supra(graph)
    dyn = dyn_tensor(supra, window)
    if kind == "dyn":
        return dyn
    return statdyn_tensor(stat_tensor(graph), dyn)


def _resolved(args: argparse.Namespace) -> dict:
    resolved = {k: v for k, v in vars(args).items() if k != "config"}
    resolved["version"] = version_string()
    return resolved


def cmd_ingest(args) -> int:
    with open(args.input) as fh:
        graph = parse_contact_lines(fh, args.window_seconds)
    Path(args.output).write_text(graph.to_json())
    doc = {"stats": stats(graph).to_dict(), "config": _resolved(args)}
    Path(args.output).with_suffix(".stats.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True)
    )
    print(json.dumps(doc["stats"], indent=2, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    graph = _load_graph(args.graph)
    tensor = _build_tensor(graph, args.tensor, args.window)
    cfg = TrainConfig(
        dim=args.dim, kappa=args.kappa, batch=args.batch, lr_start=args.lr,
        iterations=args.iterations, seed=derive_seed(args.seed, "train"),
    )
    embeddings, reports = train(tensor, cfg)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_embeddings(embeddings, outdir, kappa=args.kappa, seed=args.seed)
    write_training_log(reports, cfg, outdir / "training_log.jsonl")
    meta = {"config": _resolved(args), "final_loss": reports[-1].total,
            "tensor_nnz": tensor.nnz}
    (outdir / "train_meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True)
    )
    print(f"trained {args.tensor} embeddings (d={args.dim}) -> {outdir}; "
          f"final sampled loss {reports[-1].total:.4f}")
    return 0


def _load_embedding_runs(root: str):
    root = Path(root)
    run_dirs = sorted(p for p in root.glob("run_*") if p.is_dir())
    if run_dirs:
        return [read_embeddings(p) for p in run_dirs]
    return [read_embeddings(root)]


def cmd_eval(args) -> int:
    graph = _load_graph(args.graph)
    embeddings = _load_embedding_runs(args.embeddings)
    if args.task == "classify":
        report = run_classification(
            graph, embeddings,
            SirConfig(args.beta, args.mu, seed=derive_seed(args.seed, "sir")),
            operator=args.operator, n_splits=args.splits,
            seed=derive_seed(args.seed, "splits"),
        )
    else:
        report = run_reconstruction(
            graph, embeddings, operator=args.operator, n_splits=args.splits,
            seed=derive_seed(args.seed, "splits"),
        )
    doc = report.to_dict()
    doc["config"] = _resolved(args)
    Path(args.output).write_text(json.dumps(doc, indent=2, sort_keys=True))
    print(f"{report.task}: macro-F1 {report.macro_f1_mean:.4f} "
          f"± {report.macro_f1_std:.4f} over {len(report.scores)} fits")
    return 0


def cmd_pmi_check(args) -> int:
    graph = _load_graph(args.graph)
    tensor = _build_tensor(graph, args.tensor, args.window)
    embeddings = read_embeddings(args.embeddings)
    _, _, r_squared = reconstruct_spmi(
        embeddings, tensor, kappa=args.kappa, sample_size=args.samples,
        seed=derive_seed(args.seed, "pmi-check"),
    )
    doc = {"r_squared": r_squared, "config": _resolved(args)}
    Path(args.output).write_text(json.dumps(doc, indent=2, sort_keys=True))
    print(f"pmi-check: R^2 = {r_squared:.4f}")
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "eval": cmd_eval,
    "pmi-check": cmd_pmi_check,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    config = _load_config(argv)
    args = build_parser(config).parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (HosgnsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
