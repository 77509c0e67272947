import time

from gpbt import hyperspace as hs
from gpbt.executor import ExecMode, RunConfig
from gpbt.hyperspace import DimensionSpec, SearchSpace
from gpbt.scheduler import SchedulerConfig
from gpbt.strategies import StrategyConfig
from gpbt.trainables import Trainable

QUAD_SPACE = SearchSpace([DimensionSpec("h1", 0.0, 1.0), DimensionSpec("h2", 0.0, 1.0)])


def quad_run(seed=0, n=4, delta=4, total_steps=200, granularity=1, mode="sequential", workers=1, kind="pairwise_learning", **kw):
    return RunConfig(
        space=QUAD_SPACE,
        scheduler=SchedulerConfig(n=n, delta=delta, strategy=StrategyConfig(kind=kind), total_steps=total_steps),
        trainable="surrogate_quadratic",
        seed=seed,
        report_granularity=granularity,
        exec=ExecMode(mode=mode, workers=workers),
        **kw,
    )


class Delayed(Trainable):
    """Wraps a trainable and sleeps ``seconds_per_step`` per trained step."""

    def __init__(self, inner, seconds_per_step):
        super().__init__(inner.rng)
        self.inner = inner
        self.kind = inner.kind
        self.seconds_per_step = seconds_per_step

    def configure(self, hyperparams):
        self.inner.configure(hyperparams)

    def step(self, budget):
        time.sleep(self.seconds_per_step * budget)
        return self.inner.step(budget)

    def save(self):
        return self.inner.save()

    def restore(self, blob):
        self.inner.restore(blob)

    def reseed(self, rng):
        self.inner.reseed(rng)


def event_tuples(events):
    return [
        (e.wall_order, e.timestamp, e.agent, e.kind, e.step, e.score, tuple(e.hp), e.source) for e in events
    ]


def ref_tuples(events):
    return [
        (e["wall_order"], e["timestamp"], e["agent"], e["kind"], e["step"], e["score"], e["hp"], e["source"])
        for e in events
    ]
