"""Deterministic freezing-limit dynamics.

In elementary symmetric coordinates the limiting particle systems obey
lower-triangular linear ODEs whose solutions are exact polynomials in time,
so the trajectories are built by iterated term-by-term integration; no
numerical ODE stepper appears anywhere.  Two independent routes to the limit
positions exist: evaluating the polynomial system and recovering roots, or a
closed form through finite free convolution with classical polynomial zeros.
Their agreement is one of the central correctness checks of the library.
"""

from dataclasses import dataclass

import numpy as np

from .elemsym import MonicPolynomial, RootTuple, elementary_symmetric, roots_of_monic
from .errors import InvalidParameter, NotSymmetric
from .finfree import boxplus, hermite_roots, laguerre_roots

__all__ = [
    "GkTrajectory",
    "MomentSequence",
    "gaussian_gk",
    "laguerre_gk",
    "limit_roots",
    "gaussian_limit_closed",
    "laguerre_limit_closed",
    "symmetric_square_map",
    "moment_sequence",
]

GAUSSIAN = "gaussian"
LAGUERRE = "laguerre"


def _integrate(coeffs) -> np.ndarray:
    """Antiderivative with zero constant term, ascending coefficients."""
    c = np.asarray(coeffs, dtype=float)
    out = np.zeros(len(c) + 1)
    out[1:] = c / np.arange(1, len(c) + 1)
    return out


@dataclass(frozen=True)
class GkTrajectory:
    """Exact polynomial trajectories of the elementary symmetric coordinates.

    ``coeff_polys[k]`` holds the ascending t-coefficients of ``g_k(t)``,
    k = 0..N.  ``g_0`` is identically 1 and ``g_k(0) = e_k(initial)``.
    """

    coeff_polys: tuple
    kind: str
    initial: RootTuple
    alpha: float | None = None

    @property
    def n(self) -> int:
        return len(self.coeff_polys) - 1

    def value(self, k: int, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.coeff_polys[k]))

    def coefficients_at(self, t: float) -> np.ndarray:
        """The signed elementary symmetric vector ``(g_0(t), ..., g_N(t))``."""
        return np.array([self.value(k, t) for k in range(self.n + 1)])


def gaussian_gk(initial: RootTuple) -> GkTrajectory:
    """Trajectories of the freezing Dyson system:
    ``g_k' = -(N-k+1)(N-k+2)/2 g_(k-2)`` with ``g_1' = 0``."""
    n = initial.n
    e = elementary_symmetric(initial)
    polys = [np.array([1.0]), np.array([e[1]])]
    for k in range(2, n + 1):
        rate = (n - k + 1) * (n - k + 2) / 2.0
        integ = _integrate(polys[k - 2])
        poly = -rate * integ
        poly[0] = e[k]
        polys.append(poly)
    return GkTrajectory(tuple(tuple(p) for p in polys[: n + 1]), GAUSSIAN, initial)


def laguerre_gk(initial: RootTuple, alpha: float) -> GkTrajectory:
    """Trajectories of the freezing Laguerre system:
    ``g_k' = (N-k+1)(N-k+alpha) g_(k-1)``."""
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    if initial.roots[0] < 0.0:
        raise InvalidParameter("Laguerre initial data must be nonnegative")
    n = initial.n
    e = elementary_symmetric(initial)
    polys = [np.array([1.0])]
    for k in range(1, n + 1):
        rate = (n - k + 1) * (n - k + alpha)
        poly = rate * _integrate(polys[k - 1])
        poly[0] = e[k]
        polys.append(poly)
    return GkTrajectory(tuple(tuple(p) for p in polys), LAGUERRE, initial, alpha)


def limit_roots(traj: GkTrajectory, t: float, tol: float | None = None) -> RootTuple:
    """Ordered limit positions at time t: the roots of the polynomial whose
    signed elementary symmetric coefficients are ``g_k(t)``."""
    if t < 0.0:
        raise InvalidParameter("time must be >= 0")
    return roots_of_monic(MonicPolynomial(tuple(traj.coefficients_at(t))), tol=tol)


def gaussian_limit_closed(initial: RootTuple, t: float) -> RootTuple:
    """Closed form of the freezing Dyson limit: the finite free convolution of
    the initial tuple with sqrt(t)-scaled Hermite zeros.  Must agree with the
    polynomial-ODE route."""
    if t < 0.0:
        raise InvalidParameter("time must be >= 0")
    return boxplus(initial, hermite_roots(initial.n, t))


def symmetric_square_map(y: RootTuple) -> RootTuple:
    """Halved squares of the upper half of a symmetric tuple.

    For even size 2N, returns the sorted ``(y_(N+1)^2/2, ..., y_(2N)^2/2)``;
    for odd size 2N+1 the middle coordinate must vanish and is excluded.
    Raises :class:`NotSymmetric` when ``y_i != -y_(size-i+1)`` within 1e-9.
    """
    vals = y.as_array()
    size = len(vals)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(vals))) if size else 1.0)
    if np.max(np.abs(vals + vals[::-1])) > tol:
        raise NotSymmetric("tuple is not symmetric about zero within 1e-9")
    half = size // 2
    if size % 2 == 1 and size > 1 and abs(vals[half]) > tol:
        raise NotSymmetric("middle coordinate of an odd symmetric tuple must vanish")
    if size == 1:
        raise InvalidParameter("need at least two coordinates")
    top = vals[size - half :]
    return RootTuple.from_values(0.5 * top**2)


def laguerre_limit_closed(initial: RootTuple, alpha: float, t: float) -> RootTuple:
    """Closed form of the freezing Laguerre limit for ``alpha > N - 1/2``.

    Lifts the initial tuple to the symmetric 2N-tuple ``(+-sqrt(2 a_i))``,
    runs the size-2N Gaussian closed form, halves the squared top half, and
    convolves with ``t``-scaled Laguerre zeros of parameter
    ``alpha - N + 1/2``.  Must agree with the polynomial-ODE route.

    The symmetric lift uses ``sqrt(2 a_i)`` so that the squared-half map
    reproduces the initial data exactly at t = 0.
    """
    n = initial.n
    if alpha <= n - 0.5:
        raise InvalidParameter(
            f"closed form needs alpha > N - 1/2 (got alpha={alpha}, N={n}); "
            "the ODE route has no such restriction"
        )
    if initial.roots[0] < 0.0:
        raise InvalidParameter("Laguerre initial data must be nonnegative")
    if t < 0.0:
        raise InvalidParameter("time must be >= 0")
    up = np.sqrt(2.0 * initial.as_array())
    sym = RootTuple(tuple(np.concatenate([-up[::-1], up])))
    y = gaussian_limit_closed(sym, t)
    half = symmetric_square_map(y)
    return boxplus(half, laguerre_roots(n, alpha - n + 0.5, t))


@dataclass(frozen=True)
class MomentSequence:
    """Scale-free moments ``u_0..u_max`` of the zero-start freezing limit;
    the time-t moments are ``m_k(t) = u_k t^(k/2)``."""

    u: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(v) for v in self.u))

    def moment_at(self, k: int, t: float) -> float:
        return self.u[k] * t ** (k / 2.0)


def moment_sequence(n_sys: int, max_order: int) -> MomentSequence:
    """The self-convolutive recurrence
    ``u_(2m) = -(2m-1) u_(2m-2) + N sum_(j<m) u_(2j) u_(2m-2-2j)``,
    odd entries zero.  ``u_k`` equals the k-th moment of the uniform measure
    on the degree-N Hermite zeros."""
    if n_sys < 1:
        raise InvalidParameter("system size must be >= 1")
    if max_order < 0 or max_order > 60:
        raise InvalidParameter("max_order must lie in 0..60 (growth control)")
    u = [0.0] * (max_order + 1)
    u[0] = 1.0
    for m in range(1, max_order // 2 + 1):
        acc = -(2 * m - 1) * u[2 * m - 2]
        for j in range(0, m):
            acc += n_sys * u[2 * j] * u[2 * m - 2 - 2 * j]
        u[2 * m] = acc
    return MomentSequence(tuple(u), n_sys)
