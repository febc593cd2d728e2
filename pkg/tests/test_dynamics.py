import math

import numpy as np
import pytest

from freezing_dyson.dynamics import (
    gaussian_gk,
    gaussian_limit_closed,
    laguerre_gk,
    laguerre_limit_closed,
    limit_roots,
    moment_sequence,
    symmetric_square_map,
)
from freezing_dyson.elemsym import RootTuple, elementary_symmetric
from freezing_dyson.errors import InvalidParameter, NotSymmetric
from freezing_dyson.finfree import hermite_roots, laguerre_roots
from freezing_dyson.orthopoly import eigen_tridiag, hermite_jacobi

SQRT2 = math.sqrt(2)
SQRT3 = math.sqrt(3)


def poly_deriv(coeffs):
    c = np.asarray(coeffs)
    return c[1:] * np.arange(1, len(c))


def test_gaussian_gk_zero_init_closed_form():
    # zero start: g_(2m)(t) = t^m (-1)^m / 2^m * N!/(m!(N-2m)!), odd g vanish
    for n in (2, 3, 5, 8):
        traj = gaussian_gk(RootTuple((0.0,) * n))
        for t in (0.3, 1.0, 2.7):
            for k in range(n + 1):
                if k % 2 == 1:
                    assert traj.value(k, t) == 0.0
                else:
                    m = k // 2
                    expect = (
                        t**m
                        * (-1) ** m
                        / 2**m
                        * math.factorial(n)
                        / (math.factorial(m) * math.factorial(n - 2 * m))
                    )
                    assert traj.value(k, t) == pytest.approx(expect, rel=1e-13)


def test_gaussian_gk_n2_example():
    traj = gaussian_gk(RootTuple((0.0, 0.0)))
    assert traj.value(2, 1.5) == pytest.approx(-1.5)
    traj2 = gaussian_gk(RootTuple((1.0, 2.0)))
    assert traj2.value(1, 9.9) == pytest.approx(3.0)
    assert traj2.value(2, 0.7) == pytest.approx(2.0 - 0.7)


def test_gaussian_gk_ode_identity():
    # d g_k/dt = -(N-k+1)(N-k+2)/2 g_(k-2) as exact polynomial identity
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(2, 9))
        traj = gaussian_gk(RootTuple(tuple(np.sort(rng.uniform(-3, 3, n)))))
        for k in range(2, n + 1):
            lhs = poly_deriv(traj.coeff_polys[k])
            rate = (n - k + 1) * (n - k + 2) / 2.0
            rhs = -rate * np.asarray(traj.coeff_polys[k - 2])
            assert np.allclose(lhs, rhs, rtol=1e-14, atol=1e-14)


def test_laguerre_gk_zero_init_closed_form():
    # g_k(t) = t^k/k! prod_(j<k) (N-j)(N-j+alpha-1)
    for n, alpha in [(2, 1.0), (4, 0.5), (6, 2.5)]:
        traj = laguerre_gk(RootTuple((0.0,) * n), alpha)
        for t in (0.4, 1.0, 3.1):
            for k in range(1, n + 1):
                prod = 1.0
                for j in range(k):
                    prod *= (n - j) * (n - j + alpha - 1)
                expect = t**k / math.factorial(k) * prod
                assert traj.value(k, t) == pytest.approx(expect, rel=1e-13)
    traj = laguerre_gk(RootTuple((0.0, 0.0)), 1.0)
    assert traj.value(1, 0.9) == pytest.approx(4 * 0.9)
    assert traj.value(2, 0.9) == pytest.approx(2 * 0.81)


def test_laguerre_gk_single_particle():
    traj = laguerre_gk(RootTuple((1.0,)), 2.0)
    assert traj.value(1, 0.5) == pytest.approx(1.0 + 2.0 * 0.5)


def test_laguerre_gk_ode_identity():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(1, 9))
        alpha = float(rng.uniform(0.2, 3.0))
        traj = laguerre_gk(RootTuple(tuple(np.sort(rng.uniform(0, 4, n)))), alpha)
        for k in range(1, n + 1):
            lhs = poly_deriv(traj.coeff_polys[k])
            rate = (n - k + 1) * (n - k + alpha)
            rhs = rate * np.asarray(traj.coeff_polys[k - 1])
            assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


def test_laguerre_gk_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        laguerre_gk(RootTuple((0.0, 1.0)), 0.0)
    with pytest.raises(InvalidParameter):
        laguerre_gk(RootTuple((-1.0, 1.0)), 1.0)


def test_limit_roots_examples():
    traj = gaussian_gk(RootTuple((0.0, 0.0)))
    assert np.allclose(limit_roots(traj, 1.0).roots, [-1.0, 1.0], atol=1e-12)
    # any N: sqrt(t) * Hermite zeros
    for n in (3, 5):
        traj = gaussian_gk(RootTuple((0.0,) * n))
        for t in (0.5, 2.0):
            got = limit_roots(traj, t).as_array()
            assert np.allclose(got, hermite_roots(n, t).as_array(), atol=1e-10)
    ltraj = laguerre_gk(RootTuple((0.0, 0.0)), 1.0)
    assert np.allclose(
        limit_roots(ltraj, 1.0).roots, [2 - SQRT2, 2 + SQRT2], atol=1e-10
    )
    with pytest.raises(InvalidParameter):
        limit_roots(traj, -0.1)


def test_gaussian_limit_closed_examples():
    got = gaussian_limit_closed(RootTuple((0.0, 0.0, 0.0)), 4.0).as_array()
    assert np.allclose(got, [-2 * SQRT3, 0.0, 2 * SQRT3], atol=1e-10)
    a = RootTuple((-1.5, 0.2, 2.0))
    assert np.allclose(gaussian_limit_closed(a, 0.0).roots, a.roots, atol=1e-12)
    got2 = gaussian_limit_closed(RootTuple((-1.0, 1.0)), 1.0).as_array()
    assert np.allclose(got2, [-SQRT2, SQRT2], atol=1e-12)


def test_gaussian_routes_agree():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(2, 9))
        a = RootTuple(tuple(np.sort(rng.uniform(-4, 4, n))))
        traj = gaussian_gk(a)
        for t in (0.1, 1.0, 4.0):
            ode = limit_roots(traj, t).as_array()
            closed = gaussian_limit_closed(a, t).as_array()
            assert np.max(np.abs(ode - closed)) < 1e-8


def test_gaussian_additivity_in_time():
    rng = np.random.default_rng(9)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        a = RootTuple(tuple(np.sort(rng.uniform(-3, 3, n))))
        s, t = 0.6, 1.7
        two_step = gaussian_limit_closed(gaussian_limit_closed(a, s), t).as_array()
        one_step = gaussian_limit_closed(a, s + t).as_array()
        assert np.max(np.abs(two_step - one_step)) < 1e-8


def test_symmetry_preserved_by_gaussian_limit():
    rng = np.random.default_rng(11)
    for _ in range(10):
        half = rng.uniform(0.1, 3.0, int(rng.integers(1, 5)))
        sym = RootTuple.from_values(np.concatenate([-half, half]))
        for t in (0.5, 2.0):
            out = gaussian_limit_closed(sym, t)
            e = elementary_symmetric(out)
            scale = max(1.0, float(np.max(np.abs(e))))
            assert all(abs(e[k]) < 1e-10 * scale for k in range(1, out.n + 1, 2))


def test_symmetric_square_map_examples():
    assert np.allclose(
        symmetric_square_map(RootTuple((-2.0, -1.0, 1.0, 2.0))).roots, [0.5, 2.0]
    )
    # odd size: middle excluded
    assert np.allclose(symmetric_square_map(RootTuple((-1.0, 0.0, 1.0))).roots, [0.5])
    assert symmetric_square_map(RootTuple((0.0, 0.0, 0.0, 0.0))).roots == (0.0, 0.0)
    with pytest.raises(NotSymmetric):
        symmetric_square_map(RootTuple((-1.0, 2.0)))


def test_laguerre_limit_closed_zero_init():
    for n, alpha in [(2, 2.0), (3, 3.5), (4, 4.0)]:
        for t in (0.5, 1.0, 2.0):
            got = laguerre_limit_closed(RootTuple((0.0,) * n), alpha, t).as_array()
            expect = laguerre_roots(n, alpha, t).as_array()
            assert np.max(np.abs(got - expect)) < 1e-9


def test_laguerre_limit_closed_t0_and_routes():
    a = RootTuple((1.0, 4.0))
    alpha = 2.0
    assert np.allclose(laguerre_limit_closed(a, alpha, 0.0).roots, a.roots, atol=1e-10)
    # dual-route cross-check: ODE oracle
    traj = laguerre_gk(a, alpha)
    for t in (0.3, 1.0):
        ode = limit_roots(traj, t).as_array()
        closed = laguerre_limit_closed(a, alpha, t).as_array()
        assert np.max(np.abs(ode - closed)) < 1e-8


def test_laguerre_routes_agree_random():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        alpha = n - 0.5 + float(rng.uniform(0.1, 3.0))
        a = RootTuple(tuple(np.sort(rng.uniform(0, 4, n))))
        traj = laguerre_gk(a, alpha)
        for t in (0.1, 1.0, 4.0):
            ode = limit_roots(traj, t).as_array()
            closed = laguerre_limit_closed(a, alpha, t).as_array()
            assert np.max(np.abs(ode - closed)) < 1e-8


def test_laguerre_limit_closed_rejects_small_alpha():
    with pytest.raises(InvalidParameter):
        laguerre_limit_closed(RootTuple((0.0, 0.0)), 1.5, 1.0)  # alpha = N - 1/2


def test_laguerre_parameter_addition_zero_start():
    # convolving the alpha1- and alpha2-limits gives the (alpha1+alpha2+N-1)-limit
    from freezing_dyson.finfree import boxplus

    for n in (2, 3, 5):
        for a1, a2 in [(0.5, 1.0), (1.0, 2.5), (2.5, 2.5)]:
            for t in (0.5, 1.0, 2.0):
                lhs = boxplus(
                    laguerre_roots(n, a1, t), laguerre_roots(n, a2, t)
                ).as_array()
                rhs = laguerre_roots(n, a1 + a2 + n - 1.0, t).as_array()
                assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_moment_sequence_examples():
    for n in (2, 3, 4, 8):
        ms = moment_sequence(n, 6)
        assert ms.u[0] == 1.0
        assert ms.u[1] == 0.0 and ms.u[3] == 0.0 and ms.u[5] == 0.0
        assert ms.u[2] == pytest.approx(n - 1)
    assert moment_sequence(3, 4).u[4] == pytest.approx(6.0)  # (9+0+9)/3 oracle


def test_moment_sequence_matches_spectral_oracle():
    # u_k = (1/N) sum_i z_i^k over Hermite zeros
    for n in range(2, 9):
        ms = moment_sequence(n, 10)
        z = eigen_tridiag(hermite_jacobi(n)).as_array()
        for k in range(11):
            expect = float(np.mean(z**k))
            assert abs(ms.u[k] - expect) <= 1e-9 * max(1.0, abs(expect))
    assert moment_sequence(4, 2).moment_at(2, 2.5) == pytest.approx(3 * 2.5)


def test_moment_sequence_guards():
    with pytest.raises(InvalidParameter):
        moment_sequence(0, 4)
    with pytest.raises(InvalidParameter):
        moment_sequence(3, 62)
