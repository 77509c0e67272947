"""Experiment configuration files (TOML) and their validation."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from gpbt import hyperspace as hs
from gpbt.errors import ConfigError
from gpbt.executor import ExecMode, RunConfig
from gpbt.scheduler import SchedulerConfig
from gpbt.strategies import StrategyConfig
from gpbt.trainables import REGISTRY

OPTIMIZERS = ("gpbt_pl", "pbt", "rs")
OPTIMIZER_STRATEGY = {"gpbt_pl": "pairwise_learning", "pbt": "perturb", "rs": "none"}


@dataclass
class ExperimentConfig:
    name: str
    trainable: str
    space: hs.SearchSpace
    scheduler: SchedulerConfig
    optimizers: list[str]
    seeds: list[int]
    trainable_params: dict = field(default_factory=dict)
    fixed_hyperparams: dict = field(default_factory=dict)
    exec: ExecMode = field(default_factory=ExecMode)
    report_granularity: Optional[int] = None
    output_dir: str = "runs"
    save_checkpoints: bool = False
    source_text: str = ""

    def cell(self, optimizer: str, seed: int) -> RunConfig:
        """Concrete single-run configuration for one (optimizer, seed) pair."""
        if optimizer not in OPTIMIZERS:
            raise ConfigError([("optimizers", f"unknown optimizer {optimizer!r}")])
        strategy = replace(self.scheduler.strategy, kind=OPTIMIZER_STRATEGY[optimizer])
        pairing = self.scheduler.pairing if optimizer == "gpbt_pl" else "quartile_top_bottom"
        sched = replace(self.scheduler, strategy=strategy, pairing=pairing)
        return RunConfig(
            space=self.space,
            scheduler=sched,
            trainable=self.trainable,
            trainable_params=dict(self.trainable_params),
            fixed_hyperparams=dict(self.fixed_hyperparams),
            seed=int(seed),
            report_granularity=self.report_granularity,
            exec=self.exec,
            updates_enabled=optimizer != "rs",
        )


def _get(data: Mapping, key: str, kind, problems: list, path: str, default: Any = ...):
    if key not in data:
        if default is ...:
            problems.append((path, "missing required field"))
            return None
        return default
    value = data[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        problems.append((path, f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}"))
        return None
    return value


def parse_config(data: Mapping, source_text: str = "") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`, reporting every problem found."""
    problems: list[tuple[str, str]] = []

    def collect(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            problems.extend(exc.problems)
        except (KeyError, TypeError, ValueError) as exc:
            problems.append((fn.__name__, str(exc)))
        return None

    name = _get(data, "name", str, problems, "name", default="experiment")

    trainable = data.get("trainable", {})
    kind = _get(trainable, "kind", str, problems, "trainable.kind")
    if kind is not None and kind not in REGISTRY:
        problems.append(("trainable.kind", f"unknown trainable {kind!r}; known: {sorted(REGISTRY)}"))
    params = _get(trainable, "params", dict, problems, "trainable.params", default={}) or {}
    fixed = _get(trainable, "fixed", dict, problems, "trainable.fixed", default={}) or {}

    space = None
    dims = data.get("space")
    if not isinstance(dims, list) or not dims:
        problems.append(("space", "expected a non-empty array of [[space]] tables"))
    else:
        specs = []
        for i, entry in enumerate(dims):
            path = f"space[{i}]"
            if not isinstance(entry, Mapping):
                problems.append((path, "expected a table"))
                continue
            missing = [k for k in ("name", "lower", "upper") if k not in entry]
            if missing:
                problems.append((path, f"missing fields {missing}"))
                continue
            try:
                specs.append(hs.DimensionSpec.from_mapping(entry))
            except ConfigError as exc:
                problems.extend((f"{path}.{p}" if p else path, m) for p, m in exc.problems)
            except (TypeError, ValueError) as exc:
                problems.append((path, str(exc)))
        if len(specs) == len(dims):
            space = collect(hs.SearchSpace, specs)
        overlap = set(fixed) & {e.get("name") for e in dims if isinstance(e, Mapping)}
        if overlap:
            problems.append(("trainable.fixed", f"{sorted(overlap)} are both fixed and searched"))

    strategy = collect(StrategyConfig.from_mapping, data.get("strategy", {}))

    sched_data = data.get("scheduler")
    scheduler = None
    if not isinstance(sched_data, Mapping):
        problems.append(("scheduler", "missing [scheduler] table"))
    elif strategy is not None:
        stop = sched_data.get("stop", {})
        scheduler = collect(
            SchedulerConfig,
            n=sched_data.get("n"),
            delta=sched_data.get("delta"),
            q=float(sched_data.get("q", 0.25)),
            pairing=sched_data.get("pairing", "quartile_top_bottom"),
            strategy=strategy,
            total_steps=stop.get("total_steps"),
            target_score=stop.get("target_score"),
        )

    if "optimizers" in data:
        optimizers = _get(data, "optimizers", list, problems, "optimizers")
    else:
        single = _get(data, "optimizer", str, problems, "optimizer", default=None)
        optimizers = [single] if single else list(OPTIMIZERS)
    for opt in optimizers or []:
        if opt not in OPTIMIZERS:
            problems.append(("optimizers", f"unknown optimizer {opt!r}; expected one of {OPTIMIZERS}"))

    seeds = _get(data, "seeds", list, problems, "seeds")
    if seeds is not None:
        if not seeds:
            problems.append(("seeds", "at least one seed is required"))
        elif not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds):
            problems.append(("seeds", "seeds must be non-negative integers"))

    exec_mode = collect(lambda d: ExecMode(**d), data.get("exec", {}))
    gran = _get(data, "report_granularity", int, problems, "report_granularity", default=None)
    if gran is not None and gran <= 0:
        problems.append(("report_granularity", "must be positive"))
    output_dir = _get(data, "output_dir", str, problems, "output_dir", default="runs")
    save_ckpt = _get(data, "save_checkpoints", bool, problems, "save_checkpoints", default=False)

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        name=name,
        trainable=kind,
        space=space,
        scheduler=scheduler,
        optimizers=list(optimizers),
        seeds=list(seeds),
        trainable_params=dict(params),
        fixed_hyperparams=dict(fixed),
        exec=exec_mode,
        report_granularity=gran,
        output_dir=output_dir,
        save_checkpoints=bool(save_ckpt),
        source_text=source_text,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([(str(path), f"TOML syntax error: {exc}")]) from None
    return parse_config(data, source_text=text)
