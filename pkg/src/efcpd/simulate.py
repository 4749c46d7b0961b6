"""Gillespie simulation of the restricted chain and long-run experiments."""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chain import DistVector, build_generator, restricted_pd_distribution
from .eppf import Params
from .partitions import SetPartition, enumerate_set_partitions, merge_blocks, split_block
from .rates import RateTable, build_rate_table
from .samplers import DEFAULT_SEED, pd_stick_batch, split_merge_move


class AbsorbingStateError(RuntimeError):
    pass


@dataclass
class Trajectory:
    initial: SetPartition
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    t_end: float = 0.0

    def state_at(self, t: float) -> SetPartition:
        pos = bisect.bisect_right(self.times, t)
        return self.initial if pos == 0 else self.states[pos - 1]


def _choose(weights: Sequence[float], u: float) -> int:
    cum = list(itertools.accumulate(weights))
    return min(bisect.bisect_right(cum, u * cum[-1]), len(cum) - 1)


def total_rate(state: SetPartition, table: RateTable) -> Fraction:
    ell = len(state)
    coag = table.coag_total(ell) if ell >= 2 else Fraction(0)
    return coag + sum((table.split_totals[len(b)] for b in state.blocks), Fraction(0))


def gillespie_step(state: SetPartition, table: RateTable, rng: np.random.Generator):
    """Draw the holding time and the next state.

    The move is chosen hierarchically: coagulation against splitting by
    their total rates; for a coagulation the number k of merging blocks with
    weight C(l, k) c(l, k), then a uniform k-subset; for a splitting a block
    in proportion to its total split rate, then eta in proportion to its rate.
    """
    ell = len(state)
    coag = float(table.coag_total(ell)) if ell >= 2 else 0.0
    block_rates = [float(table.split_totals[len(b)]) for b in state.blocks]
    total = coag + sum(block_rates)
    if total <= 0:
        raise AbsorbingStateError(f"no move is available from {state}")
    dt = rng.exponential(1.0 / total)
    if rng.random() * total < coag:
        ks = list(range(2, ell + 1))
        k = ks[_choose([math.comb(ell, k) * float(table.coag[ell, k]) for k in ks], rng.random())]
        subset = rng.choice(ell, size=k, replace=False)
        return dt, merge_blocks(state, subset.tolist())
    i = _choose(block_rates, rng.random())
    options = table.split_options(len(state.blocks[i]))
    eta = options[_choose([float(r) for _, r in options], rng.random())][0]
    return dt, split_block(state, i, eta)


def gillespie_run(params: Params, n: int, initial: SetPartition | None, t_end: float,
                  rng: np.random.Generator, table: RateTable | None = None, record: bool = False):
    """Run until time ``t_end`` and return the state occupied then.

    With ``record=True`` the full :class:`Trajectory` is returned as well.
    """
    if table is None:
        table = build_rate_table(params, n)
    state = SetPartition.single_block(n) if initial is None else initial
    if state.n != n:
        raise ValueError(f"initial state partitions [{state.n}], expected [{n}]")
    traj = Trajectory(state, t_end=t_end)
    t = 0.0
    while True:
        try:
            dt, nxt = gillespie_step(state, table, rng)
        except AbsorbingStateError:
            break
        if t + dt > t_end:
            break
        t += dt
        state = nxt
        if record:
            traj.times.append(t)
            traj.states.append(state)
    return (state, traj) if record else state


@dataclass(frozen=True)
class JumpKernel:
    """Float exit rates and cumulative jump probabilities indexed by state."""

    states: tuple
    exit_rates: np.ndarray
    cumulative: np.ndarray

    @classmethod
    def from_params(cls, params: Params, n: int) -> "JumpKernel":
        gen = build_generator(params, n)
        q = gen.to_dense()
        np.fill_diagonal(q, 0.0)
        rates = q.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            probs = np.where(rates[:, None] > 0, q / rates[:, None], 0.0)
        cum = np.cumsum(probs, axis=1)
        cum[:, -1] = np.where(rates > 0, 1.0, 0.0)
        return cls(gen.states, rates, cum)


def simulate_replicas(kernel: JumpKernel, start: int, times: Sequence[float], replicas: int,
                      rng: np.random.Generator) -> np.ndarray:
    """State indices of ``replicas`` independent paths at each of ``times``.

    All paths advance together: at each pass every path whose next jump
    falls before the current grid time makes one jump.  Returns an array of
    shape (len(times), replicas).
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("time grid must be non-decreasing")
    state = np.full(replicas, start, dtype=np.int64)
    with np.errstate(divide="ignore"):
        scale = np.where(kernel.exit_rates > 0, 1.0 / kernel.exit_rates, np.inf)
    clock = rng.exponential(1.0, replicas) * scale[state]
    out = np.empty((len(times), replicas), dtype=np.int64)
    for g, t in enumerate(times):
        active = np.flatnonzero(clock <= t)
        while active.size:
            cum = kernel.cumulative[state[active]]
            u = rng.random(active.size)
            state[active] = (cum <= u[:, None]).sum(axis=1)
            clock[active] += rng.exponential(1.0, active.size) * scale[state[active]]
            active = active[clock[active] <= t]
        out[g] = state
    return out


def geometric_grid(t_end: float, points: int, t_min: float | None = None) -> np.ndarray:
    """0 followed by ``points - 1`` geometrically spaced times ending at t_end."""
    if points < 2:
        return np.array([float(t_end)])
    t_min = t_end / 100 if t_min is None else t_min
    return np.concatenate(([0.0], np.geomspace(t_min, t_end, points - 1)))


@dataclass(frozen=True)
class TVPoint:
    t: float
    tv: float
    se: float


def _tv_with_se(counts: np.ndarray, target: np.ndarray) -> tuple[float, float]:
    total = counts.sum()
    p = counts / total
    tv = 0.5 * float(np.abs(p - target).sum())
    # delta method: TV is locally linear in p with slopes sign(p - target)/2
    s = np.sign(p - target)
    var = (np.sum(s**2 * p) - np.sum(s * p) ** 2) / total
    return tv, 0.5 * float(np.sqrt(max(var, 0.0)))


@dataclass
class EquilibriumConfig:
    alpha: str = "1/2"
    theta: str = "1/2"
    n: int = 4
    t_end: float = 10.0
    grid_points: int = 12
    replicas: int = 200_000
    seed: int = DEFAULT_SEED

    @property
    def params(self) -> Params:
        return Params(self.alpha, self.theta)

    def times(self) -> np.ndarray:
        return geometric_grid(self.t_end, self.grid_points)


def equilibrium_experiment(params: Params, n: int, times: Sequence[float], replicas: int,
                           rng: np.random.Generator, initial: SetPartition | None = None,
                           engine: str = "vectorized") -> list[TVPoint]:
    """Total-variation distance to the restricted PD law along a time grid.

    Each grid time uses the same set of independent replica paths observed
    at that time.  ``engine="loop"`` runs :func:`gillespie_run` once per
    replica and grid time instead; it is slow and meant for cross-checks.
    """
    if initial is None:
        initial = SetPartition.single_block(n)
    target_dist = restricted_pd_distribution(params, n)
    target = np.array([float(p) for p in target_dist.probs])
    states = target_dist.states
    if engine == "vectorized":
        kernel = JumpKernel.from_params(params, n)
        idx = simulate_replicas(kernel, states.index(initial), times, replicas, rng)
        counts = [np.bincount(row, minlength=len(states)) for row in idx]
    elif engine == "loop":
        table = build_rate_table(params, n)
        index = {s: i for i, s in enumerate(states)}
        counts = []
        for t in times:
            c = np.zeros(len(states))
            for _ in range(replicas):
                c[index[gillespie_run(params, n, initial, float(t), rng, table)]] += 1
            counts.append(c)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    out = []
    for t, c in zip(times, counts):
        tv, se = _tv_with_se(np.asarray(c, dtype=float), target)
        out.append(TVPoint(float(t), tv, se))
    return out


def tv_curve_nonincreasing(points: Sequence[TVPoint], z: float = 3.0) -> bool:
    """True when no step up exceeds z combined standard errors."""
    return all(
        b.tv <= a.tv + z * math.hypot(a.se, b.se) for a, b in zip(points, points[1:])
    )


def occupation_distribution(params: Params, n: int, t_end: float, rng: np.random.Generator,
                            initial: SetPartition | None = None, burn_in: float = 0.0) -> DistVector:
    """Fraction of time in each state along one long path after ``burn_in``."""
    table = build_rate_table(params, n)
    states = enumerate_set_partitions(n)
    index = {s: i for i, s in enumerate(states)}
    occupied = np.zeros(len(states))
    state = SetPartition.single_block(n) if initial is None else initial
    t = 0.0
    while t < t_end:
        dt, nxt = gillespie_step(state, table, rng)
        lo, hi = max(t, burn_in), min(t + dt, t_end)
        if hi > lo:
            occupied[index[state]] += hi - lo
        t += dt
        state = nxt
    return DistVector(states, tuple((occupied / occupied.sum()).tolist()))


@dataclass(frozen=True)
class ErgodicMean:
    mean: float
    se: float


@dataclass
class SplitMergeSummary:
    steps: int
    burn_in: int
    thin: int
    p_x1_gt_half: ErgodicMean
    mean_x1: ErgodicMean
    mean_sum_sq: ErgodicMean
    max_mass_error: float
    final_support: int


def batch_means(series: np.ndarray, batches: int = 100) -> ErgodicMean:
    """Mean with a batch-means standard error for a correlated series."""
    series = np.asarray(series, dtype=float)
    size = len(series) // batches
    if size < 1:
        raise ValueError("series too short for the requested number of batches")
    means = series[: size * batches].reshape(batches, size).mean(axis=1)
    return ErgodicMean(float(series.mean()), float(means.std(ddof=1) / np.sqrt(batches)))


@dataclass
class SplitMergeConfig:
    steps: int = 1_000_000
    burn_in: int = 100_000
    thin: int = 10
    seed: int = DEFAULT_SEED


def split_merge_experiment(steps: int, burn_in: int, thin: int, rng: np.random.Generator,
                           initial: Sequence[float] = (1.0,)) -> SplitMergeSummary:
    """Ergodic averages of the split-and-merge chain (whose invariant law is PD(0, 1)).

    ``steps`` counts the recorded steps after ``burn_in``; functionals are
    sampled every ``thin`` steps.  Summation order changes at every move,
    so the total mass drifts by rounding only; its worst deviation from 1 is
    reported.
    """
    if steps <= 0 or burn_in < 0 or thin < 1:
        raise ValueError("need steps > 0, burn_in >= 0 and thin >= 1")
    parts = [float(v) for v in initial if v > 0]
    x1, sq = [], []
    worst = 0.0
    block = 65536
    done, total = 0, burn_in + steps
    while done < total:
        m = min(block, total - done)
        u = rng.random((m, 3))
        for r in range(m):
            split_merge_move(parts, u[r])
            step = done + r
            if step >= burn_in and (step - burn_in) % thin == 0:
                x1.append(max(parts))
                sq.append(math.fsum(p * p for p in parts))
                worst = max(worst, abs(math.fsum(parts) - 1.0))
        done += m
    x1 = np.array(x1)
    return SplitMergeSummary(
        steps, burn_in, thin,
        batch_means((x1 > 0.5).astype(float)),
        batch_means(x1),
        batch_means(np.array(sq)),
        worst,
        len(parts),
    )


def direct_gem_statistics(theta: float, replicas: int, rng: np.random.Generator,
                          n_sticks: int = 200, chunk: int = 20_000) -> dict:
    """P(x1 > 1/2), E x1 and E sum x_i^2 from GEM(theta) sticks, ranked.

    Dust after ``n_sticks`` Beta(1, theta) sticks is of order
    (theta/(1+theta))**n_sticks, far below sampling error at the default.
    """
    x1, sq = [], []
    done = 0
    while done < replicas:
        m = min(chunk, replicas - done)
        sticks, _ = pd_stick_batch(0.0, theta, m, n_sticks, rng)
        x1.append(sticks.max(axis=1))
        sq.append(np.sum(sticks**2, axis=1))
        done += m
    x1, sq = np.concatenate(x1), np.concatenate(sq)

    def mean_se(v):
        return ErgodicMean(float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v))))

    return {
        "p_x1_gt_half": mean_se((x1 > 0.5).astype(float)),
        "mean_x1": mean_se(x1),
        "mean_sum_sq": mean_se(sq),
    }


def agree(a: ErgodicMean, b: ErgodicMean, z: float = 3.0) -> bool:
    return abs(a.mean - b.mean) <= z * math.hypot(a.se, b.se)
