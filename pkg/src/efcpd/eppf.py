"""Exchangeable partition probability functions.

``pd_eppf`` is the two-parameter sampling formula, ``paintbox_eppf`` the
EPPF of a paint-box with finitely many colours, and ``crp_weights`` the
prediction rule obtained from ratios of ``pd_eppf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Sequence

from .exact import alpha_weight, as_fraction, format_rational, rising_factorial
from .mass import MassPartition
from .partitions import ENUMERATION_CAP, PartitionShape, as_shape, enumerate_set_partitions, shape

PAINTBOX_MAX_SUPPORT = 12


@dataclass(frozen=True)
class Params:
    """Parameters (alpha, theta) with 0 < alpha < 1 and theta > -alpha."""

    alpha: Fraction
    theta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "theta", as_fraction(self.theta))
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must satisfy 0 < alpha < 1, got {format_rational(self.alpha)}")
        if not self.theta > -self.alpha:
            raise ValueError(
                f"theta must satisfy theta > -alpha, got theta={format_rational(self.theta)}"
                f" with alpha={format_rational(self.alpha)}"
            )

    @cached_property
    def beta(self) -> Fraction:
        """theta / alpha, the exponent of the coagulation measure."""
        return self.theta / self.alpha

    def __str__(self) -> str:
        return f"(alpha={format_rational(self.alpha)}, theta={format_rational(self.theta)})"


@lru_cache(maxsize=65536)
def _pd_eppf(params: Params, sizes: PartitionShape) -> Fraction:
    a, th = params.alpha, params.theta
    k, n = len(sizes), sum(sizes)
    # (theta/alpha)_k / (theta)_n with the common factor theta cancelled;
    # regular at theta = 0 where it equals the limit (k-1)!/(alpha (n-1)!).
    prefactor = rising_factorial(params.beta + 1, k - 1) / (a * rising_factorial(th + 1, n - 1))
    out = prefactor
    for m in sizes:
        out *= alpha_weight(a, m)
    return out


def pd_eppf(params: Params, sizes: Sequence[int]) -> Fraction:
    """Probability that the PD(alpha, theta) partition of [n] equals a given
    partition with block sizes ``sizes``."""
    return _pd_eppf(params, as_shape(sizes))


def _paintbox_support(x) -> tuple:
    if not isinstance(x, MassPartition):
        x = MassPartition.from_sequence(x)
    if not x.proper:
        raise ValueError(f"paint-box needs a proper mass partition (dust={x.dust})")
    support = x.support()
    if len(support) > PAINTBOX_MAX_SUPPORT:
        raise ValueError(f"support size {len(support)} exceeds {PAINTBOX_MAX_SUPPORT}")
    return support


def paintbox_eppf(x, sizes: Sequence[int]):
    """Sum over ordered tuples of distinct colours j_1..j_k of prod x_{j_i}^{n_i}.

    Exact when ``x`` has Fraction entries.
    """
    support = _paintbox_support(x)
    sizes = tuple(sizes)

    @lru_cache(maxsize=None)
    def rec(i: int, used: int):
        if i == len(sizes):
            return 1
        total = 0
        for j, xj in enumerate(support):
            if used >> j & 1:
                continue
            total += xj ** sizes[i] * rec(i + 1, used | (1 << j))
        return total

    return rec(0, 0)


def eppf_normalization(p: Callable[[PartitionShape], object], n: int, cap: int = ENUMERATION_CAP):
    """Sum of ``p(shape(gamma))`` over every partition gamma of [n]."""
    return sum((p(shape(g)) for g in enumerate_set_partitions(n, cap)), Fraction(0))


def crp_weights(params: Params, sizes: Sequence[int]) -> tuple[Fraction, ...]:
    """Seating probabilities for the next customer.

    Entry i < k is the probability of joining block i (of size sizes[i]);
    the last entry is the probability of opening a new block.
    """
    a, th = params.alpha, params.theta
    n, k = sum(sizes), len(sizes)
    if n == 0:
        return (Fraction(1),)
    denom = n + th
    return tuple((m - a) / denom for m in sizes) + ((th + k * a) / denom,)
