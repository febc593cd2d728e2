"""Finite free convolution, its Fourier-operator form, and the Markov-Krein lift.

The convolution of two N-tuples is defined coefficient-wise on elementary
symmetric values and preserves real-rootedness; roots are recovered once at
the end.  A second, independent implementation multiplies the associated
truncated differential operators (the finite free Fourier transform) and is
kept as a cross-check.  The Markov-Krein lift trades an N-tuple of reals for
an N-tuple of complex numbers whose moment sequence reproduces the signed
elementary symmetric coefficients.
"""

import math
from dataclasses import dataclass

import numpy as np

from .elemsym import (
    MonicPolynomial,
    RootTuple,
    elementary_symmetric,
    newton_esp_from_power_sums,
    roots_of_monic,
)
from .errors import DimensionMismatch, InvalidParameter, NoConvergence, NotRealRooted
from .orthopoly import eigen_tridiag, hermite_jacobi, laguerre_jacobi

__all__ = [
    "FFFOperator",
    "MKLift",
    "boxplus",
    "convolve_esp",
    "fff",
    "fff_invert",
    "fff_product_convolution",
    "hermite_roots",
    "laguerre_roots",
    "markov_krein_lift",
    "markov_krein_project",
]


def _ratio(n: int, i: int, j: int) -> float:
    """(n-i)! (n-j)! / (n! (n-k)!) for k = i + j, as a correctly rounded float.

    Evaluated as a quotient of exact integers, which never overflows and
    avoids the log-space roundoff of a lgamma formulation.
    """
    k = i + j
    num = math.factorial(n - i) * math.factorial(n - j)
    den = math.factorial(n) * math.factorial(n - k)
    return num / den


def convolve_esp(ea: np.ndarray, eb: np.ndarray) -> np.ndarray:
    """Elementary symmetric coefficients of the finite free convolution.

    ``e_k(c) = sum_{i+j=k} (n-i)!(n-j)! / (n!(n-k)!) e_i(a) e_j(b)``.
    """
    n = len(ea) - 1
    if len(eb) - 1 != n:
        raise DimensionMismatch("coefficient sequences must share a degree")
    out = np.zeros(n + 1)
    out[0] = 1.0
    for k in range(1, n + 1):
        # pair the symmetric (i, k-i) terms so accumulation order, hence the
        # rounded result, is identical under swapping a and b
        acc = 0.0
        for i in range(0, (k + 1) // 2):
            w = _ratio(n, i, k - i)
            acc += w * (ea[i] * eb[k - i] + ea[k - i] * eb[i])
        if k % 2 == 0:
            acc += _ratio(n, k // 2, k // 2) * (ea[k // 2] * eb[k // 2])
        out[k] = acc
    return out


def boxplus(a: RootTuple, b: RootTuple, tol: float | None = None) -> RootTuple:
    """Finite free convolution of two N-tuples, sorted ascending.

    Computed entirely in elementary symmetric coordinates; roots are recovered
    once at the end.  ``tol`` is passed through to the root solver.
    """
    if a.n != b.n:
        raise DimensionMismatch(f"tuple sizes differ: {a.n} vs {b.n}")
    ec = convolve_esp(elementary_symmetric(a), elementary_symmetric(b))
    return roots_of_monic(MonicPolynomial(tuple(ec)), tol=tol)


@dataclass(frozen=True)
class FFFOperator:
    """Differential operator ``sum_k c_k D^k`` truncated at order N.

    Built from a monic polynomial through
    ``c_k = (-1)^k alpha_k / (k! binom(N, k))``; equality of operators means
    coefficient-wise equality up to order N.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def apply_to_power(self) -> np.ndarray:
        """Apply the operator to x^N symbolically; descending coefficients.

        ``D^k x^N = N!/(N-k)! x^(N-k)``, so the result's coefficient of
        ``x^(N-k)`` is ``c_k N!/(N-k)!``.
        """
        n = self.degree
        return np.array(
            [self.coeffs[k] * math.factorial(n) / math.factorial(n - k) for k in range(n + 1)]
        )

    def multiply(self, other: "FFFOperator") -> "FFFOperator":
        """Operator product truncated at order N."""
        n = self.degree
        if other.degree != n:
            raise DimensionMismatch("operator degrees differ")
        out = [0.0] * (n + 1)
        for i, ci in enumerate(self.coeffs):
            for j in range(0, n + 1 - i):
                out[i + j] += ci * other.coeffs[j]
        return FFFOperator(tuple(out))


def fff(p: MonicPolynomial) -> FFFOperator:
    """Finite free Fourier transform: the operator reproducing p from x^N."""
    n = p.degree
    coeffs = tuple(
        (-1.0) ** k * p.alpha[k] / (math.factorial(k) * math.comb(n, k))
        for k in range(n + 1)
    )
    return FFFOperator(coeffs)


def fff_invert(op: FFFOperator) -> MonicPolynomial:
    """Inverse transform: ``alpha_k = (-1)^k k! binom(N, k) c_k``."""
    n = op.degree
    alpha = tuple(
        (-1.0) ** k * math.factorial(k) * math.comb(n, k) * op.coeffs[k]
        for k in range(n + 1)
    )
    return MonicPolynomial(alpha)


def fff_product_convolution(a: RootTuple, b: RootTuple, tol: float | None = None) -> RootTuple:
    """Finite free convolution via truncated operator multiplication.

    Independent of :func:`boxplus` (different arithmetic path); the two must
    agree and are cross-validated against each other in the test suite.
    """
    if a.n != b.n:
        raise DimensionMismatch(f"tuple sizes differ: {a.n} vs {b.n}")
    op = fff(MonicPolynomial.from_roots(a)).multiply(fff(MonicPolynomial.from_roots(b)))
    return roots_of_monic(fff_invert(op), tol=tol)


def hermite_roots(n: int, t: float) -> RootTuple:
    """``sqrt(t)`` times the zeros of the degree-n probabilist Hermite polynomial.

    Zeros come from the Jacobi matrix spectrum (the coefficient formula
    overflows for large n) and are symmetrized exactly about zero.
    """
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    if t < 0.0:
        raise InvalidParameter("scale t must be >= 0")
    if n == 1:
        return RootTuple((0.0,))
    z = eigen_tridiag(hermite_jacobi(n)).as_array()
    z = 0.5 * (z - z[::-1])  # the spectrum is exactly symmetric
    return RootTuple(tuple(math.sqrt(t) * z))


def laguerre_roots(n: int, alpha: float, t: float) -> RootTuple:
    """``t`` times the zeros of the degree-n monic Laguerre polynomial."""
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    if t < 0.0:
        raise InvalidParameter("scale t must be >= 0")
    z = eigen_tridiag(laguerre_jacobi(n, alpha)).as_array()
    return RootTuple(tuple(t * z))


@dataclass(frozen=True)
class MKLift:
    """Complex N-tuple s with ``binom(N,k) mean(s^k) = e_k(a)`` for the source a.

    The labeling of the s_i is not canonical; the tuple is stored sorted by
    (real, imaginary) parts purely for determinism and is treated as a
    multiset.
    """

    s: tuple
    n: int

    def __post_init__(self):
        if len(self.s) != self.n:
            raise InvalidParameter("lift needs exactly n entries")
        object.__setattr__(self, "s", tuple(complex(v) for v in self.s))

    def power_sums(self) -> np.ndarray:
        sv = np.asarray(self.s)
        return np.array([np.sum(sv**k) for k in range(1, self.n + 1)])


def _durand_kerner(coeffs_desc, tol, max_iter=500, restarts=5):
    """All complex roots of a monic polynomial by simultaneous iteration.

    Converges when the largest per-root step drops below tol, or when every
    residual |p(z_i)| sits at the float evaluation-noise floor (root clusters
    of multiplicity m cannot be pinned tighter than (eps*scale)^(1/m) by any
    double-precision method).  Retries with randomly perturbed starting
    circles (deterministic generator) up to ``restarts`` times.
    """
    c = np.asarray(coeffs_desc, dtype=complex)
    d = len(c) - 1
    radius = 1.0 + max(abs(v) for v in c[1:]) if d > 0 else 1.0
    rng = np.random.default_rng(0x5EED)
    step_tol = tol * max(1.0, radius)
    cabs = np.abs(c)
    for attempt in range(restarts + 1):
        if attempt == 0:
            angles = 2.0 * np.pi * (np.arange(d) + 0.25) / d
            z = radius * np.exp(1j * angles)
        else:
            angles = 2.0 * np.pi * rng.random(d)
            z = radius * rng.uniform(0.3, 1.0, d) * np.exp(1j * angles)
        for _ in range(max_iter):
            pvals = np.polyval(c, z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            denom = np.prod(diff, axis=1)
            if np.any(np.abs(denom) < 1e-280):
                break
            delta = pvals / denom
            z = z - delta
            if np.max(np.abs(delta)) < step_tol:
                return z
            noise_floor = 8.0 * np.finfo(float).eps * np.polyval(cabs, np.abs(z))
            if np.all(np.abs(np.polyval(c, z)) <= noise_floor):
                return z
    raise NoConvergence(
        f"simultaneous root iteration failed after {restarts + 1} attempts"
    )


def markov_krein_lift(a: RootTuple, tol: float = 1e-12) -> MKLift:
    """Complex tuple s with ``(1/N) sum_i (z - s_i)^N = prod_i (z - a_i)``.

    Solves ``binom(N,k) mean(s^k) = e_k(a)`` for the power sums of s, converts
    to elementary symmetric values by Newton's identities, then finds the
    complex roots by simultaneous iteration.
    """
    n = a.n
    e = elementary_symmetric(a)
    psums = np.array([n * e[k] / math.comb(n, k) for k in range(1, n + 1)])
    es = newton_esp_from_power_sums(psums, n)
    coeffs = [(-1.0) ** k * es[k] for k in range(n + 1)]
    roots = _durand_kerner(coeffs, tol)
    order = np.lexsort((roots.imag, roots.real))
    return MKLift(tuple(roots[order]), n)


def markov_krein_project(lift: MKLift, tol: float = 1e-8) -> RootTuple:
    """Inverse of the lift: rebuild ``e_k = binom(N,k) mean(s^k)`` and solve.

    Imaginary residues below ``tol`` (relative to the coefficient scale) are
    dropped; anything larger, or a non-real-rooted reconstruction, raises
    :class:`NotRealRooted`.
    """
    n = lift.n
    psums = lift.power_sums()
    e = np.empty(n + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = math.comb(n, k) * psums[k - 1] / n
    scale = max(1.0, float(np.max(np.abs(e))))
    if float(np.max(np.abs(e.imag))) > tol * scale:
        raise NotRealRooted("reconstructed coefficients are not real within tol")
    return roots_of_monic(MonicPolynomial(tuple(e.real)))
