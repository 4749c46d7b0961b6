"""Exact analysis of the chain restricted to partitions of [n]."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from .eppf import Params, pd_eppf
from .partitions import (
    ENUMERATION_CAP,
    SetPartition,
    coag_transitions,
    enumerate_set_partitions,
    restrict,
    shape,
    split_transitions,
)
from .rates import coag_rate, split_rate

logger = logging.getLogger(__name__)

# exact elimination is used up to this n; Bell(8) = 4140 states is too many
EXACT_SOLVE_MAX_N = 7
FLOAT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Generator:
    """Sparse rate matrix over the enumerated partitions of [n].

    ``entries`` holds only the nonzero off-diagonal rates, keyed by
    (from-index, to-index); ``moves`` records which split or merge produced
    each entry.
    """

    params: Params
    n: int
    states: tuple
    entries: dict = field(repr=False)
    diagonal: tuple = field(repr=False)
    moves: dict = field(repr=False)

    @property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def rate(self, i: int, j: int):
        if i == j:
            return self.diagonal[i]
        return self.entries.get((i, j), Fraction(0))

    def row_sums(self) -> list:
        sums = list(self.diagonal)
        for (i, _), r in self.entries.items():
            sums[i] += r
        return sums

    def to_sparse(self):
        size = len(self.states)
        keys = list(self.entries) + [(i, i) for i in range(size)]
        vals = [float(r) for r in self.entries.values()] + [float(d) for d in self.diagonal]
        rows, cols = zip(*keys)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))

    def to_dense(self) -> np.ndarray:
        q = np.zeros((len(self.states), len(self.states)))
        for (i, j), r in self.entries.items():
            q[i, j] = float(r)
        for i, d in enumerate(self.diagonal):
            q[i, i] = float(d)
        return q


@dataclass(frozen=True)
class DistVector:
    states: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(self.probs))
        if len(self.states) != len(self.probs):
            raise ValueError("states and probabilities differ in length")

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (Fraction, int)) for p in self.probs)

    def as_dict(self) -> dict:
        return dict(zip(self.states, self.probs))

    def __getitem__(self, state):
        return self.as_dict()[state]

    def total(self):
        return sum(self.probs, Fraction(0) if self.exact else 0.0)


def build_generator(params: Params, n: int, cap: int = ENUMERATION_CAP) -> Generator:
    states = enumerate_set_partitions(n, cap)
    index = {s: i for i, s in enumerate(states)}
    entries: dict = {}
    moves: dict = {}
    for i, gamma in enumerate(states):
        ell = len(gamma)
        for target, subset in coag_transitions(gamma):
            key = (i, index[target])
            if key in entries:
                raise AssertionError(f"two moves lead from {gamma} to {target}")
            entries[key] = coag_rate(params.beta, ell, len(subset))
            moves[key] = ("coag", subset)
        for target, b, eta in split_transitions(gamma, cap):
            key = (i, index[target])
            if key in entries:
                raise AssertionError(f"two moves lead from {gamma} to {target}")
            entries[key] = split_rate(params.alpha, shape(eta))
            moves[key] = ("split", b, eta)
    diagonal = [Fraction(0)] * len(states)
    for (i, _), r in entries.items():
        diagonal[i] -= r
    return Generator(params, n, states, entries, tuple(diagonal), moves)


def restricted_pd_distribution(params: Params, n: int, cap: int = ENUMERATION_CAP) -> DistVector:
    """Image of PD(alpha, theta) under the paint-box restricted to [n]."""
    states = enumerate_set_partitions(n, cap)
    return DistVector(states, tuple(pd_eppf(params, shape(s)) for s in states))


@dataclass
class BalanceReport:
    n: int
    pairs_checked: int
    max_violation: object
    violations: list
    stationary_residual: object
    exact: bool

    @property
    def reversible(self) -> bool:
        return self.max_violation == 0 if self.exact else self.max_violation <= FLOAT_RESIDUAL_TOL

    @property
    def stationary(self) -> bool:
        if self.exact:
            return self.stationary_residual == 0
        return self.stationary_residual <= FLOAT_RESIDUAL_TOL


def _check_same_states(a, b):
    if tuple(a) != tuple(b):
        raise ValueError("state enumerations differ")


def check_detailed_balance(gen: Generator, dist: DistVector) -> BalanceReport:
    """Audit dist(x) q(x, y) = dist(y) q(y, x) over every adjacent pair.

    Global stationarity (dist Q = 0) is checked separately and reported as
    ``stationary_residual``; it is implied by, but weaker than, reversibility.
    """
    _check_same_states(gen.states, dist.states)
    p = dist.probs
    zero = Fraction(0) if dist.exact else 0.0
    worst = zero
    violations = []
    pairs = set()
    for i, j in gen.entries:
        pair = (min(i, j), max(i, j))
        if pair in pairs:
            continue
        pairs.add(pair)
        a, b = pair
        gap = abs(p[a] * gen.rate(a, b) - p[b] * gen.rate(b, a))
        if gap != 0:
            violations.append((gen.states[a], gen.states[b], gap))
        worst = max(worst, gap)

    flux = [p[i] * gen.diagonal[i] for i in range(len(p))]
    for (i, j), r in gen.entries.items():
        flux[j] += p[i] * r
    residual = max((abs(f) for f in flux), default=zero)
    return BalanceReport(gen.n, len(pairs), worst, violations, residual, dist.exact)


class ReducibleChainError(RuntimeError):
    pass


def _solve_exact(gen: Generator) -> list:
    size = len(gen.states)
    # equations: column j of Q (sum_i pi_i Q_ij = 0) and the normalisation row
    rows: list[dict] = [dict() for _ in range(size)]
    for i, d in enumerate(gen.diagonal):
        if d:
            rows[i][i] = d
    for (i, j), r in gen.entries.items():
        rows[j][i] = rows[j].get(i, Fraction(0)) + r
    rhs = [Fraction(0)] * size
    rows.append({i: Fraction(1) for i in range(size)})
    rhs.append(Fraction(1))

    pivots: list[tuple[int, dict, Fraction]] = []
    remaining = list(range(len(rows)))
    for var in range(size):
        cands = [r for r in remaining if rows[r].get(var)]
        if not cands:
            raise ReducibleChainError(f"generator has a rank deficit at variable {var}")
        piv = min(cands, key=lambda r: len(rows[r]))
        remaining.remove(piv)
        prow, pval = rows[piv], rows[piv][var]
        for r in cands:
            if r == piv:
                continue
            factor = rows[r][var] / pval
            row = rows[r]
            for c, v in prow.items():
                nv = row.get(c, Fraction(0)) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs[r] -= factor * rhs[piv]
        pivots.append((var, prow, rhs[piv]))
    for r in remaining:
        if rows[r] or rhs[r]:
            raise ReducibleChainError("inconsistent system: no stationary probability vector")

    sol = [Fraction(0)] * size
    for var, prow, b in reversed(pivots):
        acc = b - sum((v * sol[c] for c, v in prow.items() if c != var), Fraction(0))
        sol[var] = acc / prow[var]
    return sol


def _solve_float(gen: Generator) -> list:
    size = len(gen.states)
    qt = gen.to_sparse().T.tocsc()
    # pin pi_last = 1, drop the last balance equation, renormalise afterwards
    a = qt[:-1, :-1]
    b = -qt[:-1, -1].toarray().ravel()
    # GMRES is far quicker than sparse LU here (fill-in is heavy); LU is the fallback
    head, info = sparse_linalg.gmres(a, b, rtol=1e-14, atol=0.0, restart=200, maxiter=2000)
    if info != 0:
        with warnings.catch_warnings():
            warnings.simplefilter("error", sparse_linalg.MatrixRankWarning)
            try:
                head = sparse_linalg.spsolve(a.tocsc(), b, permc_spec="MMD_AT_PLUS_A")
            except (sparse_linalg.MatrixRankWarning, RuntimeError) as exc:
                raise ReducibleChainError(f"singular balance system: {exc}") from exc
    sol = np.append(np.atleast_1d(head), 1.0)
    sol /= sol.sum()
    residual = float(np.max(np.abs(qt @ sol))) if size else 0.0
    if not np.all(np.isfinite(sol)) or np.any(sol < 0) or residual > FLOAT_RESIDUAL_TOL:
        raise ReducibleChainError(f"float solve residual {residual:.3g} above threshold")
    return sol.tolist()


def stationary_distribution(gen: Generator, exact: bool | None = None) -> DistVector:
    """The unique pi with pi Q = 0 and sum(pi) = 1.

    Exact rational elimination for n <= EXACT_SOLVE_MAX_N by default,
    a sparse floating-point solve otherwise.
    """
    if len(gen.states) == 1:
        return DistVector(gen.states, (Fraction(1),))
    if exact is None:
        exact = gen.n <= EXACT_SOLVE_MAX_N
    if exact:
        probs = _solve_exact(gen)
    else:
        logger.info("n=%d: using floating-point stationary solve", gen.n)
        probs = _solve_float(gen)
    return DistVector(gen.states, tuple(probs))


def tv_distance(d1, d2):
    """Half the L1 distance between two probability vectors on the same states."""
    if isinstance(d1, DistVector) and isinstance(d2, DistVector):
        _check_same_states(d1.states, d2.states)
        d1, d2 = d1.probs, d2.probs
    if len(d1) != len(d2):
        raise ValueError("probability vectors differ in length")
    total = sum(abs(a - b) for a, b in zip(d1, d2))
    return total / 2


def marginal_restriction(dist: DistVector) -> DistVector:
    """Push a law on partitions of [n] forward to partitions of [n-1]."""
    n = dist.states[0].n
    if n < 2:
        raise ValueError("cannot restrict below n = 1")
    states = enumerate_set_partitions(n - 1)
    index = {s: i for i, s in enumerate(states)}
    probs = [Fraction(0) if dist.exact else 0.0] * len(states)
    for s, p in zip(dist.states, dist.probs):
        probs[index[restrict(s, n - 1)]] += p
    return DistVector(states, tuple(probs))


def empirical_distribution(samples: Sequence[SetPartition], n: int) -> DistVector:
    states = enumerate_set_partitions(n)
    index = {s: i for i, s in enumerate(states)}
    counts = np.zeros(len(states))
    for s in samples:
        counts[index[s]] += 1
    return DistVector(states, tuple(counts / counts.sum()))
