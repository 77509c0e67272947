"""Run metrics, cross-optimizer comparison and plot-data alignment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from gpbt.errors import ComparisonError, DomainError

WINDOW = 10
APPROX_THRESHOLD = 0.01
OPTIMIZER_ORDER = ("gpbt_pl", "pbt", "rs")


def _score_lists(series) -> dict[int, list[float]]:
    """Accept RunArtifacts, {agent: [PerfRecord]} or {agent: [float]}."""
    series = getattr(series, "series", series)
    if not isinstance(series, Mapping):
        series = dict(enumerate(series))
    out = {}
    for agent, recs in series.items():
        out[agent] = [float(getattr(r, "score", r)) for r in recs]
    return out


def best_mean_reward_with_agent(series, window: int = WINDOW) -> tuple[float, int]:
    scores = {a: s for a, s in _score_lists(series).items() if s}
    if not scores:
        raise DomainError("no recorded scores in run")
    if window < 1:
        raise DomainError(f"window must be >= 1, got {window}")
    best = None
    for agent in sorted(scores):
        tail = scores[agent][-window:]
        value = math.fsum(tail) / len(tail)
        if best is None or value > best[0]:
            best = (value, agent)
    return best


def best_mean_reward(series, window: int = WINDOW) -> float:
    """Mean of the last ``window`` scores of the agent for which that mean is largest."""
    return best_mean_reward_with_agent(series, window)[0]


def format_pct(a: float, b: float, threshold: float = APPROX_THRESHOLD) -> tuple[float, str]:
    """Relative difference ``(a - b) / |b|`` and its table rendering."""
    if b == 0:
        frac = 0.0 if a == 0 else math.copysign(math.inf, a)
    else:
        frac = (a - b) / abs(b)
    if abs(frac) < threshold:
        return frac, "≈"
    if math.isinf(frac):
        return frac, "+inf%" if frac > 0 else "-inf%"
    pct = math.copysign(math.floor(abs(frac) * 100 + 0.5), frac)
    return frac, f"{int(pct):+d}%"


@dataclass(frozen=True)
class OptimizerStats:
    optimizer: str
    seeds: tuple[int, ...]
    max: float
    median: float
    mean: float
    std: float
    q1: float
    q3: float


@dataclass(frozen=True)
class PairDiff:
    optimizer: str
    reference: str
    fraction: float
    rendered: str


@dataclass(frozen=True)
class ComparisonTable:
    stats: list[OptimizerStats]
    diffs: list[PairDiff]

    def render(self) -> str:
        lines = [f"{'optimizer':<12}{'seeds':>6}{'max':>12}{'median':>12}{'mean':>12}{'std':>12}"]
        for s in self.stats:
            lines.append(f"{s.optimizer:<12}{len(s.seeds):>6}{s.max:>12.4g}{s.median:>12.4g}{s.mean:>12.4g}{s.std:>12.4g}")
        lines.append("")
        for d in self.diffs:
            lines.append(f"{d.optimizer} vs. {d.reference}: {d.rendered}")
        return "\n".join(lines)


def _order(names: Iterable[str]) -> list[str]:
    names = set(names)
    known = [o for o in OPTIMIZER_ORDER if o in names]
    return known + sorted(names - set(known))


def compare(rows: Sequence[Mapping]) -> ComparisonTable:
    """Summarize ``best_mean_reward`` per optimizer and diff the maxima pairwise.

    ``rows`` are summary rows with at least ``optimizer``, ``seed`` and
    ``best_mean_reward``.
    """
    by_opt: dict[str, dict[int, float]] = {}
    for row in rows:
        by_opt.setdefault(row["optimizer"], {})[int(row["seed"])] = float(row["best_mean_reward"])
    if len(by_opt) < 2:
        raise ComparisonError(f"need at least two optimizers to compare, got {sorted(by_opt)}")
    seed_sets = {opt: frozenset(v) for opt, v in by_opt.items()}
    if len(set(seed_sets.values())) != 1:
        detail = ", ".join(f"{o}={sorted(s)}" for o, s in sorted(seed_sets.items()))
        raise ComparisonError(f"optimizers were run on different seed sets: {detail}")

    order = _order(by_opt)
    stats = []
    for opt in order:
        seeds = tuple(sorted(by_opt[opt]))
        vals = np.array([by_opt[opt][s] for s in seeds])
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        stats.append(
            OptimizerStats(opt, seeds, float(vals.max()), float(med), float(vals.mean()), float(vals.std()), float(q1), float(q3))
        )
    maxima = {s.optimizer: s.max for s in stats}
    diffs = []
    for i, a in enumerate(order):
        for b in order[i + 1 :]:
            frac, text = format_pct(maxima[a], maxima[b])
            diffs.append(PairDiff(a, b, frac, text))
    return ComparisonTable(stats, diffs)


def best_curve(series: Mapping[int, Sequence[tuple[int, float]]], grid: np.ndarray) -> np.ndarray:
    """Best last-observation-carried-forward score across agents at each grid step."""
    curve = np.full(grid.shape, -np.inf)
    for recs in series.values():
        if not recs:
            continue
        steps = np.array([s for s, _ in recs])
        scores = np.array([v for _, v in recs], dtype=float)
        idx = np.searchsorted(steps, grid, side="right") - 1
        have = idx >= 0
        curve[have] = np.maximum(curve[have], scores[idx[have]])
    return curve


def aligned_curves(runs: Sequence[Mapping[int, Sequence[tuple[int, float]]]], points: int = 100):
    """Put several runs on one uniform step grid.

    The grid starts at the first step where every run has at least one report
    so no cell is missing.
    """
    if not runs:
        raise DomainError("no runs to align")
    firsts, lasts = [], []
    for series in runs:
        steps = [s for recs in series.values() for s, _ in recs]
        if not steps:
            raise DomainError("run without any reports")
        firsts.append(min(steps))
        lasts.append(max(steps))
    lo, hi = max(firsts), max(lasts)
    grid = np.linspace(lo, hi, points) if hi > lo else np.full(points, float(lo))
    curves = np.stack([best_curve(series, grid) for series in runs])
    return grid, curves


def curve_table(runs, points: int = 100) -> list[tuple[float, float, float]]:
    grid, curves = aligned_curves(runs, points)
    mean = curves.mean(axis=0)
    std = curves.std(axis=0)
    return [(float(g), float(m), float(s)) for g, m, s in zip(grid, mean, std)]
