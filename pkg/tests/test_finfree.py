import math

import numpy as np
import pytest

from freezing_dyson.elemsym import MonicPolynomial, RootTuple, elementary_symmetric
from freezing_dyson.errors import DimensionMismatch, InvalidParameter, NotRealRooted
from freezing_dyson.finfree import (
    FFFOperator,
    boxplus,
    convolve_esp,
    fff,
    fff_invert,
    fff_product_convolution,
    hermite_roots,
    laguerre_roots,
    markov_krein_lift,
    markov_krein_project,
)

SQRT2 = math.sqrt(2)
SQRT3 = math.sqrt(3)


def direct_convolution_oracle(a, b):
    # literal double sum over the defining coefficient formula, using the
    # enumeration-backed elementary symmetric values
    n = len(a)
    ea = elementary_symmetric(RootTuple.from_values(a))
    eb = elementary_symmetric(RootTuple.from_values(b))
    out = [1.0]
    for k in range(1, n + 1):
        acc = 0.0
        for i in range(0, k + 1):
            w = (
                math.factorial(n - i)
                * math.factorial(n - (k - i))
                / (math.factorial(n) * math.factorial(n - k))
            )
            acc += w * ea[i] * eb[k - i]
        out.append(acc)
    return np.array(out)


def test_boxplus_basic_example():
    c = boxplus(RootTuple((-1.0, 1.0)), RootTuple((-1.0, 1.0)))
    assert np.allclose(c.roots, [-SQRT2, SQRT2], atol=1e-12)


def test_boxplus_zero_tuple_is_identity():
    a = RootTuple((-2.0, 0.5, 3.0))
    z = RootTuple((0.0, 0.0, 0.0))
    assert np.allclose(boxplus(a, z).roots, a.roots, atol=1e-12)


def test_boxplus_constant_tuple_shifts():
    c = boxplus(RootTuple((1.0, 3.0)), RootTuple((2.0, 2.0)))
    assert np.allclose(c.roots, [3.0, 5.0], atol=1e-12)
    # oracle: direct formula evaluation plus shift check on random input
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        a = np.sort(rng.uniform(-4, 4, n))
        s = float(rng.uniform(-2, 2))
        shifted = boxplus(RootTuple(tuple(a)), RootTuple((s,) * n))
        assert np.allclose(shifted.roots, a + s, atol=1e-10)


def test_boxplus_matches_direct_formula_oracle():
    rng = np.random.default_rng(4)
    for _ in range(15):
        n = int(rng.integers(2, 8))
        a = np.sort(rng.uniform(-5, 5, n))
        b = np.sort(rng.uniform(-5, 5, n))
        ec = convolve_esp(
            elementary_symmetric(RootTuple(tuple(a))),
            elementary_symmetric(RootTuple(tuple(b))),
        )
        assert np.allclose(ec, direct_convolution_oracle(a, b), rtol=1e-12, atol=1e-12)


def test_boxplus_commutative_and_shift_equivariant():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        a = RootTuple(tuple(np.sort(rng.uniform(-5, 5, n))))
        b = RootTuple(tuple(np.sort(rng.uniform(-5, 5, n))))
        eab = convolve_esp(elementary_symmetric(a), elementary_symmetric(b))
        eba = convolve_esp(elementary_symmetric(b), elementary_symmetric(a))
        assert np.array_equal(eab, eba)  # exact in coefficient space
        s = 0.75
        lhs = boxplus(a.shifted(s), b).as_array()
        rhs = boxplus(a, b).as_array() + s
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_boxplus_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        boxplus(RootTuple((0.0,)), RootTuple((0.0, 1.0)))


def test_fff_examples():
    # x^2 - 1 -> 1 - D^2/2
    op = fff(MonicPolynomial((1.0, 0.0, -1.0)))
    assert np.allclose(op.coeffs, [1.0, 0.0, -0.5])
    # degree 1: x - a -> 1 - aD, and applying to x reproduces x - a
    op1 = fff(MonicPolynomial((1.0, 1.5)))
    assert np.allclose(op1.coeffs, [1.0, -1.5])
    assert np.allclose(op1.apply_to_power(), [1.0, -1.5])


def test_fff_constant_shift_truncated_exponential():
    # (x - s)^N has c_k = (-s)^k / k!
    n, s = 5, 0.8
    p = MonicPolynomial.from_roots(RootTuple((s,) * n))
    op = fff(p)
    expect = [(-s) ** k / math.factorial(k) for k in range(n + 1)]
    assert np.allclose(op.coeffs, expect, rtol=1e-12)
    # symbolic application to x^N reproduces the polynomial
    assert np.allclose(op.apply_to_power(), p.monomial_coefficients(), rtol=1e-12)


def test_fff_round_trip_symbolic():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 10))
        p = MonicPolynomial.from_roots(RootTuple(tuple(np.sort(rng.uniform(-3, 3, n)))))
        op = fff(p)
        assert np.allclose(op.apply_to_power(), p.monomial_coefficients(), rtol=1e-11, atol=1e-11)
        assert np.allclose(fff_invert(op).alpha, p.alpha, rtol=1e-12, atol=1e-12)


def test_fff_product_convolution_examples():
    c = fff_product_convolution(RootTuple((-1.0, 1.0)), RootTuple((-1.0, 1.0)))
    assert np.allclose(c.roots, [-SQRT2, SQRT2], atol=1e-12)
    a = RootTuple((-2.0, 0.5, 3.0))
    z = RootTuple((0.0, 0.0, 0.0))
    assert np.allclose(fff_product_convolution(a, z).roots, a.roots, atol=1e-12)


def test_fff_product_agrees_with_boxplus():
    # cross-implementation agreement on random pairs
    rng = np.random.default_rng(10)
    for _ in range(200):
        n = int(rng.integers(2, 11))
        a = RootTuple(tuple(np.sort(rng.uniform(-5, 5, n))))
        b = RootTuple(tuple(np.sort(rng.uniform(-5, 5, n))))
        r1 = boxplus(a, b).as_array()
        r2 = fff_product_convolution(a, b).as_array()
        assert np.max(np.abs(r1 - r2)) < 1e-9


def test_hermite_roots_examples():
    assert np.allclose(hermite_roots(2, 1.0).roots, [-1.0, 1.0], atol=1e-13)
    assert np.allclose(hermite_roots(3, 1.0).roots, [-SQRT3, 0.0, SQRT3], atol=1e-13)
    assert hermite_roots(3, 0.0).roots == (0.0, 0.0, 0.0)
    assert hermite_roots(1, 4.0).roots == (0.0,)
    with pytest.raises(InvalidParameter):
        hermite_roots(0, 1.0)
    with pytest.raises(InvalidParameter):
        hermite_roots(3, -0.5)


def test_hermite_semigroup_identity():
    # scale arguments are squared scales: t^2 and s^2 convolve to t^2 + s^2
    for n in range(2, 13):
        for t in (0.25, 1.0, 4.0):
            for s in (0.25, 1.0, 4.0):
                lhs = boxplus(hermite_roots(n, t * t), hermite_roots(n, s * s)).as_array()
                rhs = hermite_roots(n, t * t + s * s).as_array()
                assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_laguerre_roots_examples():
    assert np.allclose(laguerre_roots(1, 2.0, 1.0).roots, [2.0])
    assert np.allclose(
        laguerre_roots(2, 1.0, 1.0).roots, [2 - SQRT2, 2 + SQRT2], atol=1e-13
    )
    assert np.allclose(laguerre_roots(2, 3.0, 1.0).roots, [2.0, 6.0], atol=1e-12)
    with pytest.raises(InvalidParameter):
        laguerre_roots(2, 0.0, 1.0)


def test_laguerre_convolution_identity():
    for n in range(2, 11):
        for a1 in (0.5, 1.0, 2.5):
            for a2 in (0.5, 1.0, 2.5):
                lhs = boxplus(
                    laguerre_roots(n, a1, 1.0), laguerre_roots(n, a2, 1.0)
                ).as_array()
                rhs = laguerre_roots(n, n + a1 + a2 - 1.0, 1.0).as_array()
                assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_hermite_fff_scaling_identity():
    # Hermite zeros scaled by 1 and 1 convolve to scale sqrt(2), via the
    # operator route
    lhs = fff_product_convolution(hermite_roots(3, 1.0), hermite_roots(3, 1.0)).as_array()
    rhs = hermite_roots(3, 2.0).as_array()
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_markov_krein_lift_trivial():
    lift = markov_krein_lift(RootTuple((0.0, 0.0, 0.0)))
    assert np.allclose(np.abs(lift.s), 0.0, atol=1e-10)
    # constant tuple: s is the N-fold root at c; float arithmetic can pin a
    # multiplicity-4 cluster only to (eps*scale)^(1/4), but the multiset
    # moments stay sharp
    lift_c = markov_krein_lift(RootTuple((2.5, 2.5, 2.5, 2.5)))
    assert np.allclose(lift_c.s, 2.5, atol=1e-3)
    assert abs(np.mean(lift_c.s) - 2.5) < 1e-5  # cluster errors cancel to O(r^2)


def test_markov_krein_lift_pm_one():
    # a = (-1, 1): expand (1/2)[(z-i)^2 + (z+i)^2] = z^2 - 1, so s = (-i, i)
    lift = markov_krein_lift(RootTuple((-1.0, 1.0)))
    got = sorted(lift.s, key=lambda z: z.imag)
    assert abs(got[0] - (-1j)) < 1e-10
    assert abs(got[1] - 1j) < 1e-10


def test_markov_krein_lift_moment_invariant():
    rng = np.random.default_rng(12)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        a = RootTuple(tuple(np.sort(rng.uniform(-3, 3, n))))
        lift = markov_krein_lift(a)
        e = elementary_symmetric(a)
        ps = lift.power_sums()
        for k in range(1, n + 1):
            lhs = math.comb(n, k) * ps[k - 1] / n
            assert abs(lhs - e[k]) < 1e-8 * max(1.0, abs(e[k]))


def test_markov_krein_project_examples():
    from freezing_dyson.finfree import MKLift

    assert np.allclose(
        markov_krein_project(MKLift((0.0, 0.0), 2)).roots, [0.0, 0.0], atol=1e-12
    )
    back = markov_krein_project(MKLift((-1j, 1j), 2))
    assert np.allclose(back.roots, [-1.0, 1.0], atol=1e-10)
    with pytest.raises(NotRealRooted):
        markov_krein_project(MKLift((1j, 2j), 2))


def test_markov_krein_round_trip():
    rng = np.random.default_rng(14)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        a = RootTuple(tuple(np.sort(rng.uniform(-4, 4, n))))
        back = markov_krein_project(markov_krein_lift(a))
        assert np.max(np.abs(back.as_array() - a.as_array())) < 1e-6


def test_fff_operator_multiply_mismatch():
    with pytest.raises(DimensionMismatch):
        FFFOperator((1.0, 0.0)).multiply(FFFOperator((1.0, 0.0, 0.0)))
