"""Brute-force GPBT-PL on the surrogate quadratic, written straight-line.

Shares nothing with the package except the seeding contract (SeedSequence
spawn keys ``(agent, purpose)``) and the order of random draws, so that a
correct scheduler/executor must reproduce this event log exactly.
"""

import math

import numpy as np

TRAINABLE, STRATEGY, SCHEDULER, INIT = 0, 1, 2, 3


def reference_event_log(
    seed: int,
    n: int = 4,
    delta: int = 4,
    total_steps: int = 200,
    granularity: int = 1,
    lower=(0.0, 0.0),
    upper=(1.0, 1.0),
    theta0=(0.9, 0.9),
    eta0: float = 0.01,
    q: float = 0.25,
    resample_prob: float = 0.25,
):
    lower = np.array(lower, dtype=float)
    upper = np.array(upper, dtype=float)
    d = len(lower)
    width = upper - lower
    streams = {}

    def stream(agent, purpose):
        key = (agent, purpose)
        if key not in streams:
            ss = np.random.SeedSequence(entropy=seed, spawn_key=(agent, purpose))
            streams[key] = np.random.Generator(np.random.PCG64(ss))
        return streams[key]

    # Latin-hypercube initialisation
    g = stream(0, INIT)
    u = g.random((n, d))
    strata = np.stack([g.permutation(n) for _ in range(d)], axis=1)
    hp = [np.minimum(lower + width * (strata[i] + u[i]) / n, upper) for i in range(n)]
    vel = [np.zeros(d) for _ in range(n)]

    theta = [np.array(theta0, dtype=float) for _ in range(n)]
    weights_at_last_report = [None] * n
    steps = [0] * n
    last_update = [0] * n
    latest = [None] * n
    events = []
    clock = 0

    def natural(i):
        return tuple(float(min(max(x, lo), hi)) for x, lo, hi in zip(hp[i], lower, upper))

    def emit(agent, kind, step, score, source=None):
        events.append(
            {
                "wall_order": len(events),
                "timestamp": float(clock),
                "agent": agent,
                "kind": kind,
                "step": step,
                "score": score,
                "hp": natural(agent),
                "source": source,
            }
        )

    k = max(1, math.floor(q * n))
    while any(s < total_steps for s in steps):
        for i in range(n):
            if steps[i] >= total_steps:
                continue
            budget = min(granularity, total_steps - steps[i])
            for _ in range(budget):
                theta[i] = theta[i] + eta0 * (-2.0 * hp[i] * theta[i])
            score = float(1.2 - np.sum(theta[i] ** 2))
            steps[i] += budget
            weights_at_last_report[i] = theta[i].copy()
            latest[i] = score
            emit(i, "report", steps[i], score)

            if steps[i] - last_update[i] >= delta:
                emit(i, "ready", steps[i], score)
                if any(s is None for s in latest):
                    emit(i, "continue", steps[i], score)
                else:
                    ranked = sorted(range(n), key=lambda j: (-latest[j], j))
                    top, bottom = ranked[:k], ranked[-k:]
                    if i not in bottom:
                        emit(i, "continue", steps[i], score)
                    else:
                        src = sorted(top)[int(stream(i, SCHEDULER).integers(k))]
                        rs = stream(i, STRATEGY)
                        if rs.random() < resample_prob:
                            new_hp = np.minimum(lower + rs.random(d) * width, upper)
                            new_vel = np.zeros(d)
                            kind = "resample"
                        else:
                            r1, r2 = rs.random(d), rs.random(d)
                            v = r1 * vel[i] + r2 * (hp[src] - hp[i])
                            x = hp[i] + v
                            if np.any(x < lower) or np.any(x > upper):
                                v = np.clip(x, lower, upper) - hp[i]
                                x = hp[i] + v
                                while np.any((x < lower) | (x > upper)):
                                    out = (x < lower) | (x > upper)
                                    v = np.where(out, np.nextafter(v, 0.0), v)
                                    x = hp[i] + v
                            new_hp, new_vel = x, v
                            kind = "exploit_learn"
                        hp[i], vel[i] = new_hp, new_vel
                        theta[i] = weights_at_last_report[src].copy()
                        weights_at_last_report[i] = theta[i].copy()
                        latest[i] = latest[src]
                        last_update[i] = steps[i]
                        emit(i, kind, steps[i], latest[i], source=src)
            clock += 1
            if steps[i] >= total_steps:
                emit(i, "stop", steps[i], latest[i])
    return events
