"""Random generation of mass partitions and exchangeable partitions.

Randomness always comes from a :class:`numpy.random.Generator`.  Replicas
that must be independent get their own generator, spawned from the master
seed with :func:`spawn_rngs` (``SeedSequence(seed).spawn``).
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chain import DistVector
from .eppf import Params
from .mass import MassPartition
from .partitions import SetPartition, enumerate_set_partitions

DEFAULT_SEED = 20061031
DEFAULT_STICKS = 10_000
DEFAULT_EPS = 1e-12
_CHUNK = 1024


def make_rng(seed=DEFAULT_SEED) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent per-replica generators derived from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _float_params(alpha, theta) -> tuple[float, float]:
    alpha, theta = float(alpha), float(theta)
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if not theta > -alpha:
        raise ValueError(f"theta must exceed -alpha, got theta={theta}, alpha={alpha}")
    if alpha == 0 and theta <= 0:
        raise ValueError("GEM(theta) needs theta > 0")
    return alpha, theta


def beta_sample(a: float, b: float, rng: np.random.Generator, size=None):
    if not (np.all(np.asarray(a) > 0) and np.all(np.asarray(b) > 0)):
        raise ValueError("beta parameters must be positive")
    x = rng.beta(a, b, size=size)
    # keep draws strictly inside (0, 1); rounding can hit an endpoint for tiny a or b
    return np.clip(x, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class StickBreak:
    """Sticks in size-biased order and the mass that was never broken off."""

    sticks: np.ndarray
    dust: float

    def ranked(self) -> MassPartition:
        return rank(self.sticks, self.dust)


def pd_stick_sample(alpha, theta, rng: np.random.Generator, n_sticks: int = DEFAULT_STICKS,
                    eps: float = DEFAULT_EPS) -> StickBreak:
    """Residual allocation with independent Beta(1-alpha, theta+j*alpha) factors.

    Stops after ``n_sticks`` sticks or as soon as the unbroken remainder
    drops below ``eps``.  The remainder is returned as dust, never
    redistributed.
    """
    alpha, theta = _float_params(alpha, theta)
    pieces = []
    remainder = 1.0
    j = 0
    while j < n_sticks and remainder >= eps:
        m = min(_CHUNK, n_sticks - j)
        idx = np.arange(j + 1, j + m + 1)
        b = beta_sample(1.0 - alpha, theta + idx * alpha, rng)
        left = remainder * np.cumprod(1.0 - b)
        before = np.concatenate(([remainder], left[:-1]))
        sticks = before * b
        stop = np.flatnonzero(left < eps)
        if stop.size:
            cut = stop[0] + 1
            sticks, left = sticks[:cut], left[:cut]
        pieces.append(sticks)
        remainder = float(left[-1])
        j += len(sticks)
    return StickBreak(np.concatenate(pieces) if pieces else np.empty(0), remainder)


def gem_sample(theta, rng: np.random.Generator, n_sticks: int = DEFAULT_STICKS,
               eps: float = DEFAULT_EPS) -> StickBreak:
    return pd_stick_sample(0.0, theta, rng, n_sticks, eps)


def pd_stick_batch(alpha, theta, replicas: int, n_sticks: int, rng: np.random.Generator):
    """``replicas`` independent truncations at exactly ``n_sticks`` sticks.

    Returns (sticks, dust) with shapes (replicas, n_sticks) and (replicas,).
    """
    alpha, theta = _float_params(alpha, theta)
    b = beta_sample(1.0 - alpha, theta + np.arange(1, n_sticks + 1) * alpha, rng,
                    size=(replicas, n_sticks))
    left = np.cumprod(1.0 - b, axis=1)
    before = np.empty_like(left)
    before[:, 0] = 1.0
    before[:, 1:] = left[:, :-1]
    return before * b, left[:, -1]


def rank(seq, dust=None) -> MassPartition:
    arr = np.asarray(seq, dtype=float)
    if np.any(arr < 0):
        raise ValueError("cannot rank negative masses")
    if dust is None:
        dust = max(0.0, 1.0 - float(arr.sum()))
    return MassPartition(tuple(np.sort(arr)[::-1].tolist()), float(dust))


def _paintbox_probs(x) -> np.ndarray:
    if not isinstance(x, MassPartition):
        x = MassPartition.from_sequence(x)
    if not x.proper:
        raise ValueError(f"paint-box needs zero dust, got {x.dust}")
    p = np.array([float(v) for v in x.parts])
    return p / p.sum()


def _labels_to_partition(colours) -> SetPartition:
    blocks: dict = {}
    for element, c in enumerate(colours, start=1):
        blocks.setdefault(c, []).append(element)
    return SetPartition.from_blocks(blocks.values())


def paintbox_sample(x, n: int, rng: np.random.Generator) -> SetPartition:
    """Colour 1..n i.i.d. by ``x`` and group equal colours."""
    p = _paintbox_probs(x)
    return _labels_to_partition(rng.choice(len(p), size=n, p=p))


def _canonical_codes(colours: np.ndarray) -> np.ndarray:
    # relabel each row by order of first appearance -> restricted growth string
    replicas, n = colours.shape
    codes = np.zeros((replicas, n), dtype=np.int64)
    for i in range(1, n):
        match = colours[:, :i] == colours[:, i:i + 1]
        found = match.any(axis=1)
        first = match.argmax(axis=1)
        fresh = codes[:, :i].max(axis=1) + 1
        codes[:, i] = np.where(found, codes[np.arange(replicas), first], fresh)
    return codes


def paintbox_sample_batch(x, n: int, replicas: int, rng: np.random.Generator) -> np.ndarray:
    """Restricted growth strings of ``replicas`` paint-box partitions of [n]."""
    p = _paintbox_probs(x)
    colours = rng.choice(len(p), size=(replicas, n), p=p)
    return _canonical_codes(colours)


def crp_sample(params: Params, n: int, rng: np.random.Generator) -> SetPartition:
    """Seat customers 1..n one at a time with the PD(alpha, theta) prediction rule."""
    alpha, theta = float(params.alpha), float(params.theta)
    sizes: list[int] = []
    labels = []
    for m in range(n):
        if m == 0:
            choice = 0
        else:
            weights = [s - alpha for s in sizes] + [theta + len(sizes) * alpha]
            cum = list(itertools.accumulate(weights))
            choice = bisect.bisect_right(cum, rng.random() * cum[-1])
            choice = min(choice, len(sizes))
        if choice == len(sizes):
            sizes.append(1)
        else:
            sizes[choice] += 1
        labels.append(choice)
    return SetPartition.from_rgs(labels)


def crp_sample_batch(params: Params, n: int, replicas: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorised :func:`crp_sample`; returns restricted growth strings, one row per replica."""
    alpha, theta = float(params.alpha), float(params.theta)
    sizes = np.zeros((replicas, n))
    blocks = np.zeros(replicas, dtype=np.int64)
    codes = np.zeros((replicas, n), dtype=np.int64)
    rows = np.arange(replicas)
    cols = np.arange(n)
    for m in range(n):
        if m == 0:
            choice = np.zeros(replicas, dtype=np.int64)
        else:
            open_ = cols[None, :] < blocks[:, None]
            cum = np.cumsum(np.where(open_, sizes - alpha, 0.0), axis=1)
            u = rng.random(replicas) * (m + theta)
            hit = (cum >= u[:, None]) & open_
            choice = np.where(hit.any(axis=1), hit.argmax(axis=1), blocks)
        sizes[rows, choice] += 1
        blocks = np.maximum(blocks, choice + 1)
        codes[:, m] = choice
    return codes


def codes_to_distribution(codes: np.ndarray, n: int) -> DistVector:
    """Empirical law over partitions of [n] from restricted growth strings."""
    states = enumerate_set_partitions(n)
    base = n + 1
    keys = codes @ (base ** np.arange(n)[::-1])
    state_keys = np.array([sum(c * base ** (n - 1 - i) for i, c in enumerate(s.rgs())) for s in states])
    order = np.argsort(state_keys)
    pos = np.minimum(np.searchsorted(state_keys[order], keys), len(states) - 1)
    if np.any(state_keys[order][pos] != keys):
        raise ValueError("codes contain a non-canonical labelling")
    counts = np.bincount(order[pos], minlength=len(states))
    return DistVector(states, tuple((counts / counts.sum()).tolist()))


def l_estimate(x, alpha, window=None) -> float:
    """Average of j * x_j**alpha over a window of ranked indices.

    ``window`` is a 1-based inclusive (first, last) index range; the default
    is the trailing quarter of the listed parts.  On a truncated sample the
    trailing ranks miss undiscovered parts, which biases the value down by a
    roughly constant factor; ratios between samples are what matter for
    importance weights.
    """
    parts = np.asarray(x.parts if isinstance(x, MassPartition) else x, dtype=float)
    count = len(parts)
    if window is None:
        window = (count - count // 4 + 1, count)
    first, last = window
    if not 1 <= first <= last <= count:
        raise ValueError(f"window {window} not inside the {count} sampled parts")
    idx = np.arange(first, last + 1)
    return float(np.mean(idx * parts[first - 1:last] ** float(alpha)))


def _l_estimate_rows(ranked: np.ndarray, alpha: float, window=None) -> np.ndarray:
    count = ranked.shape[1]
    if window is None:
        window = (count - count // 4 + 1, count)
    first, last = window
    idx = np.arange(first, last + 1)
    return np.mean(idx * ranked[:, first - 1:last] ** alpha, axis=1)


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float
    ess: float


def _ranked_chunks(alpha, theta, replicas, n_sticks, rng, chunk):
    done = 0
    while done < replicas:
        m = min(chunk, replicas - done)
        sticks, _ = pd_stick_batch(alpha, theta, m, n_sticks, rng)
        sticks.sort(axis=1)
        yield sticks[:, ::-1]
        done += m


def importance_estimate(f: Callable[[np.ndarray], np.ndarray], params: Params, replicas: int,
                        rng: np.random.Generator, n_sticks: int = DEFAULT_STICKS,
                        window=None, chunk: int = 500) -> Estimate:
    """Estimate E f under PD(alpha, theta) from PD(alpha, 0) samples.

    Each sample gets weight L**(theta/alpha) with L from :func:`l_estimate`;
    the estimate is self-normalised, so the unknown normalising constant
    never appears.  ``f`` maps a 2-D array of ranked rows to one value per
    row.
    """
    if params.theta == 0:
        raise ValueError("theta = 0 needs no reweighting; sample PD(alpha, 0) directly")
    if replicas < 100:
        raise ValueError("importance sampling needs at least 100 replicas")
    alpha, power = float(params.alpha), float(params.beta)
    values, weights = [], []
    for ranked in _ranked_chunks(alpha, 0.0, replicas, n_sticks, rng, chunk):
        # copy: f may return a view that would keep the whole chunk alive
        values.append(np.array(f(ranked), dtype=float))
        weights.append(_l_estimate_rows(ranked, alpha, window) ** power)
    fx, w = np.concatenate(values), np.concatenate(weights)
    if not np.all(np.isfinite(w)) or w.sum() <= 0:
        raise FloatingPointError("degenerate importance weights")
    mu = float(np.sum(w * fx) / w.sum())
    se = float(np.sqrt(np.sum(w**2 * (fx - mu) ** 2)) / w.sum())
    ess = float(w.sum() ** 2 / np.sum(w**2))
    return Estimate(mu, se, ess)


def direct_estimate(f: Callable[[np.ndarray], np.ndarray], params: Params, replicas: int,
                    rng: np.random.Generator, n_sticks: int = DEFAULT_STICKS,
                    chunk: int = 500) -> Estimate:
    """Plain Monte Carlo mean of ``f`` over PD(alpha, theta) stick-breaking samples."""
    fx = np.concatenate([
        np.array(f(r), dtype=float)
        for r in _ranked_chunks(float(params.alpha), float(params.theta), replicas, n_sticks, rng, chunk)
    ])
    return Estimate(float(fx.mean()), float(fx.std(ddof=1) / np.sqrt(len(fx))), float(len(fx)))


def _pick(cum: list, u: float) -> int:
    return min(bisect.bisect_right(cum, u * cum[-1]), len(cum) - 1)


def split_merge_move(parts: list, rng_uniforms) -> None:
    """One split-and-merge transition applied in place to an unsorted list.

    ``rng_uniforms`` supplies three uniforms: the two size-biased picks and
    the split point.
    """
    u1, u2, u3 = rng_uniforms
    cum = list(itertools.accumulate(parts))
    i, j = _pick(cum, u1), _pick(cum, u2)
    if i != j:
        parts[i] += parts[j]
        parts[j] = parts[-1]
        parts.pop()
    else:
        y = parts[i]
        parts[i] = u3 * y
        parts.append(y - parts[i])


def split_merge_step(x, rng: np.random.Generator) -> MassPartition:
    """Pick two parts by size; merge them if distinct, else split uniformly."""
    if not isinstance(x, MassPartition):
        x = MassPartition.from_sequence(x)
    if not x.proper:
        raise ValueError(f"split-and-merge needs zero dust, got {x.dust}")
    parts = [float(p) for p in x.parts if p > 0]
    split_merge_move(parts, rng.random(3))
    return MassPartition(tuple(sorted(parts, reverse=True)), 0.0)
