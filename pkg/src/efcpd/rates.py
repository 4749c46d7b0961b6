"""Jump rates of the restricted fragmentation-coalescence chain.

Coagulation of k out of l blocks happens at rate

    c(l, k) = int_0^1 u^(k-2) (1-u)^(l-k) (1-u)^beta du,   beta = theta/alpha,

and a block of size m splits into children of sizes (m_1, ..., m_l) at rate

    s(m_1, ..., m_l) = (l-2)! prod_j w(m_j) / w(m),   w(j) = -(-alpha)_j.

Both are symmetric in their arguments, so tables are keyed by shape only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from scipy import integrate

from .eppf import Params, paintbox_eppf
from .exact import alpha_weight, as_fraction, rising_factorial
from .mass import MassPartition
from .partitions import ENUMERATION_CAP, as_shape, enumerate_set_partitions, shape

QUAD_TOL = 1e-10


def _check_coag_args(beta, ell: int, k: int):
    if not 2 <= k <= ell:
        raise ValueError(f"need 2 <= k <= l, got l={ell}, k={k}")
    if not beta > -1:
        raise ValueError(f"beta must exceed -1 for the integral to converge, got {beta}")


@lru_cache(maxsize=4096)
def _coag_rate(beta: Fraction, ell: int, k: int) -> Fraction:
    return math.factorial(k - 2) / rising_factorial(ell - k + 1 + beta, k - 1)


def coag_rate(beta, ell: int, k: int) -> Fraction:
    """Exact Beta integral B(k-1, l-k+beta+1) = (k-2)! / (l-k+1+beta)_(k-1)."""
    beta = as_fraction(beta)
    _check_coag_args(beta, ell, k)
    return _coag_rate(beta, ell, k)


def coag_rate_quadrature(beta: float, ell: int, k: int) -> float:
    """Numerical oracle for :func:`coag_rate`.

    When the exponent e of (1-u) lies in (-1, 0) the substitution
    1-u = t^(1/(e+1)) removes the endpoint singularity.
    """
    _check_coag_args(beta, ell, k)
    a = k - 2
    e = ell - k + float(beta)
    if e < 0:
        def integrand(t):
            s = t ** (1.0 / (e + 1.0))
            return (1.0 - s) ** a / (e + 1.0)
    else:
        def integrand(u):
            return u**a * (1.0 - u) ** e
    value, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    if not err <= QUAD_TOL:
        raise RuntimeError(f"quadrature did not converge: error estimate {err:.3g}")
    return value


@lru_cache(maxsize=65536)
def _split_rate(alpha: Fraction, children: tuple) -> Fraction:
    out = Fraction(math.factorial(len(children) - 2))
    for m in children:
        out *= alpha_weight(alpha, m)
    return out / alpha_weight(alpha, sum(children))


def split_rate(alpha, children: Sequence[int]) -> Fraction:
    """Rate at which a block splits into a given partition with child sizes ``children``."""
    children = as_shape(children)
    if len(children) < 2:
        raise ValueError("a split produces at least two children")
    return _split_rate(as_fraction(alpha), children)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many weighted atoms on mass partitions; a toy dislocation measure."""

    atoms: tuple

    def __post_init__(self):
        atoms = []
        for x, w in self.atoms:
            if not isinstance(x, MassPartition):
                x = MassPartition.from_sequence(x)
            if not x.proper:
                raise ValueError("atoms must be proper mass partitions")
            if x.support() == (1,) or x.support() == (1.0,):
                raise ValueError("the trivial partition (1, 0, ...) must carry no mass")
            if not (w > 0 and math.isfinite(w)):
                raise ValueError(f"atom weight must be positive and finite, got {w}")
            atoms.append((x, w))
        object.__setattr__(self, "atoms", tuple(atoms))


def split_rate_from_measure(nu: DiscreteMeasure, sizes: Sequence[int]):
    """Integrate the paint-box EPPF of ``sizes`` against ``nu``.

    Only shapes with two or more parts are jump rates; a one-part shape is
    accepted and gives the mass of the "no split" outcome under ``nu``.
    """
    return sum(w * paintbox_eppf(x, sizes) for x, w in nu.atoms)


def shape_multiplicity(sizes: Sequence[int]) -> int:
    """Number of set partitions of [sum(sizes)] whose block sizes are ``sizes``."""
    sizes = as_shape(sizes)
    out = math.factorial(sum(sizes))
    for m in sizes:
        out //= math.factorial(m)
    for m in set(sizes):
        out //= math.factorial(sizes.count(m))
    return out


@lru_cache(maxsize=256)
def _total_split_rate(alpha: Fraction, k: int) -> Fraction:
    return sum(
        (shape_multiplicity(s) * split_rate(alpha, s) for s in _shapes_upto(k) if sum(s) == k),
        Fraction(0),
    )


def total_split_rate(alpha, k: int, cap: int = ENUMERATION_CAP) -> Fraction:
    """Total rate at which a block of size k splits, summed over all non-trivial eta.

    Partitions eta of the same shape share a rate, so the sum is grouped by
    shape with the count of partitions per shape.
    """
    if k < 1:
        raise ValueError("block size must be >= 1")
    if k > cap:
        raise ValueError(f"block size {k} exceeds the enumeration cap {cap}")
    return _total_split_rate(as_fraction(alpha), k)


@dataclass(frozen=True, eq=False)
class RateTable:
    params: Params
    n: int
    coag: dict = field(repr=False)
    split: dict = field(repr=False)
    split_totals: dict = field(repr=False)

    def coag_total(self, ell: int) -> Fraction:
        """Total coagulation rate out of a state with ``ell`` blocks."""
        return sum((math.comb(ell, k) * self.coag[ell, k] for k in range(2, ell + 1)), Fraction(0))

    def split_options(self, k: int) -> tuple:
        """(eta, rate) for every non-trivial partition eta of a size-k block."""
        return _split_options(self, k)


@lru_cache(maxsize=256)
def _split_options(table: RateTable, k: int) -> tuple:
    return tuple(
        (eta, table.split[shape(eta)]) for eta in enumerate_set_partitions(k) if len(eta) > 1
    )


def _shapes_upto(total: int):
    # all integer partitions of 2..total with at least two parts
    def parts(m, largest):
        if m == 0:
            yield ()
            return
        for p in range(min(m, largest), 0, -1):
            for rest in parts(m - p, p):
                yield (p,) + rest

    for m in range(2, total + 1):
        for s in parts(m, m):
            if len(s) >= 2:
                yield s


def build_rate_table(params: Params, n: int, cap: int = ENUMERATION_CAP) -> RateTable:
    if not 1 <= n <= cap:
        raise ValueError(f"n={n} outside [1, {cap}]")
    coag = {(ell, k): coag_rate(params.beta, ell, k) for ell in range(2, n + 1) for k in range(2, ell + 1)}
    split = {s: split_rate(params.alpha, s) for s in _shapes_upto(n)}
    totals = {k: total_split_rate(params.alpha, k, cap) for k in range(1, n + 1)}
    return RateTable(params, n, coag, split, totals)
