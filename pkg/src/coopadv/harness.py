"""Seed-by-epsilon experiment sweeps and their CSV artifacts.

A sweep trains one fresh run per (seed, epsilon) cell, appends every
evaluation record to a raw CSV, then aggregates per (epsilon, episode)
into a summary CSV: mean, normal-approximation 95% interval, and the
fraction of seeds whose exact eval return clears the optimal-policy
threshold.  Everything is deterministic, so the raw file is
byte-reproducible and the summary can always be rebuilt from it.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from . import capi
from .attacks import NO_ATTACK, AttackSpec
from .capi import CapiConfig
from .tradecomm import GameConfig

RAW_HEADER = "seed,epsilon,episode,eval_return,attack_kind"
SUMMARY_HEADER = "epsilon,episode,mean_return,ci95_low,ci95_high,optimal_frequency"
OPTIMAL_THRESHOLD = 0.99
Z95 = 1.96


class SchemaError(ValueError):
    """Raw CSV does not match the expected schema."""


@dataclass(frozen=True)
class SweepConfig:
    game: GameConfig = GameConfig(4, 4)
    capi: CapiConfig = CapiConfig()
    epsilons: Tuple[float, ...] = (0.0, 0.3, 0.5, 0.7)
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)
    output_dir: str = "sweep_out"
    perturb_eval: bool = False
    jobs: int = 1

    def __post_init__(self):
        if len(self.epsilons) == 0 or len(self.seeds) == 0:
            raise ValueError("epsilons and seeds must be non-empty")
        if any(e < 0 for e in self.epsilons):
            raise ValueError("epsilons must be non-negative")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


@dataclass(frozen=True)
class SummaryRow:
    epsilon: float
    episode: int
    mean_return: float
    ci95_low: float
    ci95_high: float
    optimal_frequency: float


def cell_seed(seed: int, eps_index: int) -> int:
    """Derived generator seed so cells never share streams across groups."""
    return int(np.random.SeedSequence((seed, eps_index)).generate_state(1)[0])


def run_cell(game, capi_cfg, seed, epsilon, eps_index, perturb_eval=False):
    """Train one (seed, epsilon) cell; returns raw-CSV row tuples."""
    attack = NO_ATTACK if epsilon == 0.0 else AttackSpec("fgsm", epsilon)
    cfg = replace(capi_cfg, seed=cell_seed(seed, eps_index))
    result = capi.run_training(cfg, game, attack, perturb_eval=perturb_eval)
    return [
        (seed, epsilon, r.episode, r.eval_return, r.attack_kind)
        for r in result.records
    ]


def _write_raw(path, cell_rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(RAW_HEADER + "\n")
        for rows in cell_rows:
            for seed, eps, ep, ret, kind in rows:
                f.write(f"{seed},{eps!r},{ep},{ret!r},{kind}\n")


def run_sweep(cfg: SweepConfig):
    """Train every cell and write raw.csv plus summary.csv.

    Returns (raw_path, summary_path).  Output paths are probed before
    any training runs so an unwritable destination fails fast.  Cells
    are independent; ``jobs > 1`` fans them out over processes, and the
    write order (epsilon-major, then seed) is fixed either way.
    """
    os.makedirs(cfg.output_dir, exist_ok=True)
    raw_path = os.path.join(cfg.output_dir, "raw.csv")
    summary_path = os.path.join(cfg.output_dir, "summary.csv")
    for p in (raw_path, summary_path):
        with open(p, "w", encoding="utf-8"):
            pass

    cells = [
        (cfg.game, cfg.capi, seed, eps, ei, cfg.perturb_eval)
        for ei, eps in enumerate(cfg.epsilons)
        for seed in cfg.seeds
    ]
    if cfg.jobs == 1:
        cell_rows = [run_cell(*args) for args in cells]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(run_cell, *args) for args in cells]
            cell_rows = [f.result() for f in futures]

    _write_raw(raw_path, cell_rows)
    summarize(raw_path, summary_path)
    return raw_path, summary_path


# ---------------------------------------------------------------------------
# aggregation


def _parse_raw(path):
    """Parse and validate the raw CSV; returns (epsilon, episode) -> returns."""
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != RAW_HEADER:
        raise SchemaError(f"line 1: expected header {RAW_HEADER!r}")
    groups = {}
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise SchemaError(f"line {ln}: expected 5 fields, got {len(parts)}")
        try:
            eps = float(parts[1])
            ep = int(parts[2])
            ret = float(parts[3])
            int(parts[0])
        except ValueError as exc:
            raise SchemaError(f"line {ln}: {exc}") from None
        if parts[4] == "":
            raise SchemaError(f"line {ln}: empty attack_kind")
        if not 0.0 <= ret <= 1.0:
            raise SchemaError(f"line {ln}: eval_return {ret} outside [0, 1]")
        groups.setdefault((eps, ep), []).append(ret)
    return groups


def summarize(raw_path, out_path=None):
    """Aggregate a raw CSV into summary rows; optionally write them.

    Per (epsilon, episode) cell: mean over seeds, mean +- 1.96 sd/sqrt(n)
    (the single-seed interval collapses to the mean), and the fraction
    of seeds strictly above the optimal-policy threshold.
    """
    rows = []
    for (eps, ep), rets in sorted(_parse_raw(raw_path).items()):
        arr = np.asarray(rets)
        mean = float(arr.mean())
        if arr.size > 1:
            half = Z95 * float(arr.std(ddof=1)) / float(np.sqrt(arr.size))
        else:
            half = 0.0
        rows.append(
            SummaryRow(
                epsilon=eps,
                episode=ep,
                mean_return=mean,
                ci95_low=mean - half,
                ci95_high=mean + half,
                optimal_frequency=float((arr > OPTIMAL_THRESHOLD).mean()),
            )
        )
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(SUMMARY_HEADER + "\n")
            for r in rows:
                f.write(
                    f"{r.epsilon!r},{r.episode},{r.mean_return!r},"
                    f"{r.ci95_low!r},{r.ci95_high!r},{r.optimal_frequency!r}\n"
                )
    return rows
