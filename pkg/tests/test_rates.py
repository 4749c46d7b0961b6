import math
from fractions import Fraction as F

import pytest
import sympy as sp

from efcpd.eppf import Params
from efcpd.exact import rising_factorial
from efcpd.mass import MassPartition
from efcpd.partitions import enumerate_set_partitions, shape
from efcpd.rates import (
    DiscreteMeasure,
    build_rate_table,
    coag_rate,
    coag_rate_quadrature,
    shape_multiplicity,
    split_rate,
    split_rate_from_measure,
    total_split_rate,
)

BETAS = [F(-1, 2), F(0), F(1, 2), F(1), F(4)]


def gamma_oracle(beta, ell, k):
    """B(k-1, l-k+beta+1) through sympy's Gamma function."""
    b = sp.Rational(beta.numerator, beta.denominator)
    val = sp.gammasimp(sp.gamma(k - 1) * sp.gamma(ell - k + b + 1) / sp.gamma(ell + b))
    val = sp.nsimplify(val)
    assert val.is_Rational
    return F(int(val.p), int(val.q))


@pytest.mark.parametrize(
    "beta, ell, k, expected",
    [(F(0), 2, 2, F(1)), (F(1), 2, 2, F(1, 2)), (F(0), 3, 2, F(1, 2)), (F(-1, 2), 3, 3, F(4, 3))],
)
def test_coag_examples(beta, ell, k, expected):
    assert coag_rate(beta, ell, k) == expected


@pytest.mark.parametrize("beta", BETAS, ids=str)
def test_coag_matches_gamma_function(beta):
    for ell in range(2, 8):
        for k in range(2, ell + 1):
            assert coag_rate(beta, ell, k) == gamma_oracle(beta, ell, k)


@pytest.mark.parametrize("beta, ell, k", [(F(0), 3, 2), (F(1, 2), 4, 3), (F(-1, 2), 2, 2)])
def test_coag_matches_symbolic_integral(beta, ell, k):
    u = sp.symbols("u", positive=True)
    b = sp.Rational(beta.numerator, beta.denominator)
    val = sp.nsimplify(sp.integrate(u ** (k - 2) * (1 - u) ** (ell - k + b), (u, 0, 1)))
    assert coag_rate(beta, ell, k) == F(int(val.p), int(val.q))


@pytest.mark.parametrize("beta, ell, k, expected", [(0.0, 2, 2, 1.0), (1.0, 2, 2, 0.5), (-0.5, 3, 3, 4 / 3)])
def test_quadrature_examples(beta, ell, k, expected):
    assert coag_rate_quadrature(beta, ell, k) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("beta", BETAS, ids=str)
def test_quadrature_agrees_with_closed_form(beta):
    for ell in range(2, 13):
        for k in range(2, ell + 1):
            assert abs(float(coag_rate(beta, ell, k)) - coag_rate_quadrature(float(beta), ell, k)) <= 1e-8


def test_quadrature_singular_endpoint():
    # exponent -0.9 on (1-u): 1/(0.1) for l = k = 2
    assert coag_rate_quadrature(-0.9, 2, 2) == pytest.approx(10.0, abs=1e-8)


@pytest.mark.parametrize("beta", [F(-1, 2), F(1, 2), F(1), F(4), F(7, 3)], ids=str)
def test_proof_step_identity(beta):
    for k in range(1, 6):
        for ell in range(2, 6):
            lhs = coag_rate(beta, k + ell - 1, ell)
            rhs = math.factorial(ell - 2) * rising_factorial(beta, k) / rising_factorial(beta, k + ell - 1)
            assert lhs == rhs


def test_proof_step_identity_at_beta_zero():
    for k in range(1, 6):
        for ell in range(2, 6):
            assert coag_rate(F(0), k + ell - 1, ell) == math.factorial(ell - 2) / rising_factorial(F(k), ell - 1)


def test_coag_decreasing_in_beta():
    for ell in range(2, 8):
        for k in range(2, ell + 1):
            rates = [coag_rate(b, ell, k) for b in BETAS]
            assert all(x > y for x, y in zip(rates, rates[1:]))


@pytest.mark.parametrize("beta, ell, k", [(F(0), 2, 1), (F(0), 2, 3), (F(-1), 2, 2), (F(-2), 3, 2)])
def test_coag_rejects(beta, ell, k):
    with pytest.raises(ValueError):
        coag_rate(beta, ell, k)


@pytest.mark.parametrize(
    "children, expected", [((1, 1), F(1)), ((2, 1), F(1, 3)), ((1, 1, 1), F(1, 3))]
)
def test_split_examples(children, expected):
    assert split_rate(F(1, 2), children) == expected


def test_split_rejects_single_child():
    with pytest.raises(ValueError):
        split_rate(F(1, 2), (3,))


def shapes_with_two_parts(total):
    for n in range(2, total + 1):
        yield from sorted({shape(p) for p in enumerate_set_partitions(n) if len(p) >= 2})


@pytest.mark.parametrize("alpha", [F(1, 3), F(1, 2), F(2, 3)], ids=str)
def test_split_addition_rule(alpha):
    for sizes in shapes_with_two_parts(7):
        grown = [sizes[:j] + (sizes[j] + 1,) + sizes[j + 1:] for j in range(len(sizes))]
        assert split_rate(alpha, sizes) == sum(split_rate(alpha, s) for s in grown) + split_rate(alpha, sizes + (1,))


def test_split_addition_worked_instance():
    a = F(1, 2)
    assert split_rate(a, (1, 1)) == split_rate(a, (2, 1)) + split_rate(a, (1, 2)) + split_rate(a, (1, 1, 1)) == 1


@pytest.mark.parametrize("alpha", [F(1, 3), F(1, 2)], ids=str)
@pytest.mark.parametrize("children", [(1, 1), (2, 1), (1, 1, 1), (3, 2), (2, 2, 1), (1, 1, 1, 1)])
def test_split_rate_is_limit_of_eppf(alpha, children):
    # s = lim_{theta -> -alpha} p_{alpha,theta}(children) / (theta/alpha + 1)
    t = sp.symbols("t", positive=True)
    a = sp.Rational(alpha.numerator, alpha.denominator)
    theta = -a + t
    k, n = len(children), sum(children)
    p = sp.rf(theta / a, k) / sp.rf(theta, n)
    for m in children:
        p *= -sp.rf(-a, m)
    limit = sp.limit(sp.simplify(p / (theta / a + 1)), t, 0)
    assert split_rate(alpha, children) == F(int(limit.p), int(limit.q))


def test_split_rate_from_measure_examples():
    half = MassPartition((F(1, 2), F(1, 2)))
    assert split_rate_from_measure(DiscreteMeasure(((half, 1),)), (1, 1)) == F(1, 2)
    assert split_rate_from_measure(DiscreteMeasure(((half, 2),)), (1, 1)) == 1
    nu = DiscreteMeasure(((MassPartition((F(2, 3), F(1, 3))), 1),))
    assert split_rate_from_measure(nu, (2,)) == F(5, 9)
    assert split_rate_from_measure(nu, (2, 1)) == F(2, 3) ** 2 * F(1, 3) + F(1, 3) ** 2 * F(2, 3)


def test_split_rate_from_measure_satisfies_addition_rule():
    nu = DiscreteMeasure(
        ((MassPartition((F(1, 2), F(1, 2))), F(3)), (MassPartition((F(1, 2), F(1, 3), F(1, 6))), F(1, 2)))
    )
    for sizes in shapes_with_two_parts(6):
        grown = [sizes[:j] + (sizes[j] + 1,) + sizes[j + 1:] for j in range(len(sizes))]
        rhs = sum(split_rate_from_measure(nu, s) for s in grown) + split_rate_from_measure(nu, sizes + (1,))
        assert split_rate_from_measure(nu, sizes) == rhs


def test_discrete_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure(((MassPartition((F(1),)), 1),))
    with pytest.raises(ValueError):
        DiscreteMeasure(((MassPartition((F(1, 2), F(1, 2))), 0),))
    with pytest.raises(ValueError):
        DiscreteMeasure(((MassPartition((F(1, 2), F(1, 4))), 1),))


@pytest.mark.parametrize("k, expected", [(1, F(0)), (2, F(1)), (3, F(4, 3))])
def test_total_split_rate_examples(k, expected):
    assert total_split_rate(F(1, 2), k) == expected


@pytest.mark.parametrize("alpha", [F(1, 3), F(1, 2), F(2, 3)], ids=str)
def test_total_split_rate_equals_enumerated_sum(alpha):
    for k in range(1, 8):
        direct = sum((split_rate(alpha, shape(e)) for e in enumerate_set_partitions(k) if len(e) > 1), F(0))
        assert total_split_rate(alpha, k) == direct


def test_total_split_rate_cap():
    with pytest.raises(ValueError):
        total_split_rate(F(1, 2), 11)


def test_shape_multiplicity_counts():
    for n in range(1, 8):
        counts = {}
        for p in enumerate_set_partitions(n):
            counts[shape(p)] = counts.get(shape(p), 0) + 1
        for s, c in counts.items():
            assert shape_multiplicity(s) == c


def test_build_rate_table_examples():
    t = build_rate_table(Params(F(1, 2), F(1, 2)), 2)
    assert t.coag[2, 2] == F(1, 2)
    assert t.split[(1, 1)] == 1
    assert build_rate_table(Params(F(1, 2), F(0)), 2).coag[2, 2] == 1


def test_rate_table_entries_nonnegative_and_consistent():
    params = Params(F(1, 3), F(-1, 4))
    t = build_rate_table(params, 6)
    assert all(v > 0 for v in t.coag.values())
    assert all(v > 0 for v in t.split.values())
    assert all(v >= 0 for v in t.split_totals.values())
    for (ell, k), v in t.coag.items():
        assert v == coag_rate(params.beta, ell, k)
    for s, v in t.split.items():
        assert v == split_rate(params.alpha, s)
    for k in range(1, 7):
        assert sum((r for _, r in t.split_options(k)), F(0)) == t.split_totals[k]
