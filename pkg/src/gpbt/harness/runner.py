"""Execute (optimizer x seed) grids and write their CSV/JSONL outputs."""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from gpbt import executor
from gpbt.errors import DomainError, OutputError
from gpbt.harness.config import ExperimentConfig
from gpbt.harness.metrics import best_mean_reward_with_agent, curve_table

log = logging.getLogger(__name__)

SUMMARY_FIELDS = (
    "optimizer",
    "seed",
    "best_mean_reward",
    "best_agent",
    "best_final_score",
    "updates_applied",
    "wall_seconds",
)
INCOMPLETE = "INCOMPLETE"


@dataclass(frozen=True)
class SummaryRow:
    optimizer: str
    seed: int
    best_mean_reward: float
    best_agent: int
    best_final_score: float
    updates_applied: int
    wall_seconds: float


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summarize(optimizer: str, seed: int, art: executor.RunArtifacts, logical_clock: bool) -> SummaryRow:
    bmr, agent = best_mean_reward_with_agent(art)
    final = max(recs[-1].score for recs in art.series.values() if recs)
    return SummaryRow(
        optimizer=optimizer,
        seed=int(seed),
        best_mean_reward=bmr,
        best_agent=agent,
        best_final_score=final,
        updates_applied=art.updates_applied,
        # a logical clock keeps sequential outputs byte-reproducible
        wall_seconds=art.clock_final if logical_clock else round(art.wall_seconds, 6),
    )


def write_series(path: Path, art: executor.RunArtifacts) -> None:
    header = ["wall_order", "agent", "step", "score"] + [f"hp_{n}" for n in art.hp_names] + ["event"]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in art.rows:
            w.writerow([row["wall_order"], row["agent"], row["step"], _fmt(row["score"])] + [_fmt(v) for v in row["hp"]] + [row["event"]])


def write_events(path: Path, art: executor.RunArtifacts) -> None:
    with path.open("w") as fh:
        for ev in art.events:
            rec = ev.as_record()
            rec["hp"] = dict(zip(art.hp_names, rec["hp"]))
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def write_summary(path: Path, rows: Iterable[SummaryRow]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for r in rows:
            d = asdict(r)
            w.writerow([_fmt(d[f]) for f in SUMMARY_FIELDS])


def read_summary(path) -> list[dict]:
    """Rows of a ``summary.csv``; a run directory is resolved to the file inside it."""
    path = Path(path)
    if path.is_dir():
        path = path / "summary.csv"
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read summary {path}: {exc}") from exc
    for row in rows:
        missing = [f for f in ("optimizer", "seed", "best_mean_reward") if f not in row]
        if missing:
            raise DomainError(f"{path}: summary is missing columns {missing}")
    return rows


def read_series(path) -> dict[int, list[tuple[int, float]]]:
    series: dict[int, list[tuple[int, float]]] = {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            series.setdefault(int(row["agent"]), []).append((int(row["step"]), float(row["score"])))
    for recs in series.values():
        recs.sort()
    return series


def _fresh_dir(base: Path) -> Path:
    stamp = dt.datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    candidate = base / stamp
    i = 1
    while candidate.exists():
        candidate = base / f"{stamp}-{i}"
        i += 1
    candidate.mkdir(parents=True)
    return candidate


def run_experiment(
    cfg: ExperimentConfig,
    out: Optional[str] = None,
    seeds: Optional[Sequence[int]] = None,
) -> tuple[list[SummaryRow], Path]:
    """Run every (optimizer, seed) cell into a new run directory.

    Returns the summary rows and the run directory.  The directory carries an
    ``INCOMPLETE`` marker until every cell has been written.
    """
    seeds = list(cfg.seeds if seeds is None else seeds)
    base = Path(out or cfg.output_dir) / cfg.name
    try:
        run_dir = _fresh_dir(base)
        (run_dir / INCOMPLETE).write_text("run in progress or aborted\n")
        if cfg.source_text:
            (run_dir / "config.toml").write_text(cfg.source_text)
    except OSError as exc:
        raise OutputError(f"cannot create run directory under {base}: {exc}") from exc

    logical = cfg.exec.clock == "logical"
    rows: list[SummaryRow] = []
    for optimizer in cfg.optimizers:
        for seed in seeds:
            cell_dir = run_dir / f"{optimizer}_seed{seed}"
            run_cfg = cfg.cell(optimizer, seed)
            if cfg.save_checkpoints:
                run_cfg.checkpoint_dir = str(cell_dir / "checkpoints")
            log.info("running %s seed=%s", optimizer, seed)
            art = executor.run(run_cfg)
            row = summarize(optimizer, seed, art, logical)
            rows.append(row)
            try:
                cell_dir.mkdir(exist_ok=True)
                write_series(cell_dir / "series.csv", art)
                write_events(cell_dir / "events.jsonl", art)
                (cell_dir / "final_population.json").write_text(json.dumps(art.final_population, indent=2, sort_keys=True) + "\n")
                (cell_dir / "cell.json").write_text(json.dumps({"optimizer": optimizer, "seed": seed}) + "\n")
            except OSError as exc:
                raise OutputError(f"failed writing outputs for {cell_dir}: {exc}") from exc
    try:
        write_summary(run_dir / "summary.csv", rows)
        (run_dir / INCOMPLETE).unlink()
    except OSError as exc:
        raise OutputError(f"failed writing summary in {run_dir}: {exc}") from exc
    return rows, run_dir


def find_cells(inputs: Iterable) -> list[tuple[str, int, Path]]:
    """Locate ``(optimizer, seed, series.csv)`` triples below the given paths."""
    cells = []
    for root in inputs:
        root = Path(root)
        if not root.exists():
            raise OutputError(f"input path does not exist: {root}")
        for meta in sorted(root.rglob("cell.json")) if root.is_dir() else []:
            info = json.loads(meta.read_text())
            series = meta.parent / "series.csv"
            if series.exists():
                cells.append((info["optimizer"], int(info["seed"]), series))
    return cells


def emit_plot_data(inputs: Iterable, out_dir, points: int = 100) -> list[Path]:
    """Write ``<optimizer>_curve.csv`` (step, mean_best_score, std_best_score) per optimizer."""
    cells = find_cells(inputs)
    if not cells:
        raise DomainError("no run cells (cell.json + series.csv) found in inputs")
    grouped: dict[str, list] = {}
    for optimizer, _seed, series_path in cells:
        grouped.setdefault(optimizer, []).append(read_series(series_path))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for optimizer, runs in sorted(grouped.items()):
        path = out_dir / f"{optimizer}_curve.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "mean_best_score", "std_best_score"])
            for step, mean, std in curve_table(runs, points):
                w.writerow([_fmt(step), _fmt(mean), _fmt(std)])
        written.append(path)
    return written
