"""On-disk formats: factor TSVs, training logs, tensors."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from hosgns.cooccurrence import CooccurrenceTensor
from hosgns.training import EmbeddingSet, LossReport


def write_embeddings(
    e: EmbeddingSet, outdir: Path, kappa: float, seed: int
) -> list[Path]:
    """One TSV per factor: header `#role dim=d kappa=k seed=s`, then rows."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for role, factor in zip(e.roles, e.factors):
        path = outdir / f"{role.replace('-', '_')}.tsv"
        with open(path, "w") as fh:
            fh.write(f"#{role} dim={factor.shape[1]} kappa={kappa:g} seed={seed}\n")
            for idx, row in enumerate(factor):
                fh.write(str(idx) + "\t" + "\t".join(f"{x:.17g}" for x in row) + "\n")
        paths.append(path)
    return paths


def read_embeddings(outdir: Path) -> EmbeddingSet:
    outdir = Path(outdir)
    role_order = ["node", "context", "time", "context-time"]
    factors, roles = [], []
    for role in role_order:
        path = outdir / f"{role.replace('-', '_')}.tsv"
        if not path.exists():
            continue
        rows = []
        with open(path) as fh:
            header = fh.readline()
            if not header.startswith("#"):
                raise ValueError(f"{path}: missing header line")
            for line in fh:
                rows.append([float(x) for x in line.split("\t")[1:]])
        factors.append(np.array(rows))
        roles.append(role)
    if not factors:
        raise FileNotFoundError(f"no factor TSVs found in {outdir}")
    return EmbeddingSet(factors=factors, roles=tuple(roles))


def write_training_log(reports: list[LossReport], cfg, path: Path):
    with open(path, "w") as fh:
        for r in reports:
            lr = cfg.lr_start * (1.0 - r.iteration / cfg.iterations)
            fh.write(json.dumps(
                {"iteration": r.iteration, "loss": r.total, "lr": lr}
            ) + "\n")


def write_tensor(t: CooccurrenceTensor, coo_path: Path, sidecar_path: Path):
    Path(coo_path).write_text(t.export_coo())
    Path(sidecar_path).write_text(t.export_sidecar())


def read_tensor(coo_path: Path, sidecar_path: Path) -> CooccurrenceTensor:
    return CooccurrenceTensor.from_coo(
        Path(coo_path).read_text(), Path(sidecar_path).read_text()
    )
