"""Jacobi matrices, tridiagonal eigensolving, spectral measures and dual polynomials.

A Jacobi matrix (symmetric tridiagonal, positive off-diagonal) encodes a
three-term recurrence and a discrete spectral measure.  The classical Hermite
and Laguerre families enter through explicit finite Jacobi matrices whose
spectra are the polynomial zeros; their *duals* (index-reversed matrices)
carry the orthogonal systems used by the fluctuation statistics.

Eigenvalues are computed by Sturm-sequence bisection on the sign count of the
LDL^T pivots (the ratios of consecutive leading principal characteristic
minors), which guarantees containment and ordering without any external
eigensolver.  A batched variant shares the same algorithm across many
matrices at once for Monte Carlo work.
"""

import math
from dataclasses import dataclass

import numpy as np

from .elemsym import RootTuple
from .errors import InvalidParameter

__all__ = [
    "JacobiMatrix",
    "SpectralMeasure",
    "OrthogonalSystem",
    "hermite_jacobi",
    "laguerre_jacobi",
    "laguerre_freezing_matrix",
    "dual",
    "eigen_tridiag",
    "spectral_measure",
    "christoffel_darboux_weights",
    "dual_spectral_weights_cd",
    "dual_hermite_system",
    "dual_laguerre_system",
    "primitive",
    "scaled_primitive",
]

_SAFMIN = np.finfo(float).tiny


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal matrix with strictly positive off-diagonal."""

    diag: tuple
    offdiag: tuple

    def __post_init__(self):
        diag = tuple(float(a) for a in self.diag)
        off = tuple(float(b) for b in self.offdiag)
        if len(diag) < 1:
            raise InvalidParameter("Jacobi matrix needs at least one row")
        if len(off) != len(diag) - 1:
            raise InvalidParameter("off-diagonal length must be n - 1")
        if any(b <= 0.0 for b in off):
            raise InvalidParameter("off-diagonal entries must be strictly positive")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def n(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        m = np.diag(np.asarray(self.diag))
        off = np.asarray(self.offdiag)
        if len(off):
            m += np.diag(off, 1) + np.diag(off, -1)
        return m


@dataclass(frozen=True)
class SpectralMeasure:
    """Finitely supported probability measure: atoms with nonnegative weights."""

    atoms: RootTuple
    weights: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != self.atoms.n:
            raise InvalidParameter("one weight per atom required")
        if any(v < -1e-12 for v in w):
            raise InvalidParameter("weights must be nonnegative")
        if abs(sum(w) - 1.0) > 1e-10:
            raise InvalidParameter("weights must sum to 1 within 1e-10")
        object.__setattr__(self, "weights", w)

    def moment(self, order: int) -> float:
        atoms = self.atoms.as_array()
        return float(np.sum(np.asarray(self.weights) * atoms**order))


def hermite_jacobi(n: int) -> JacobiMatrix:
    """Finite Jacobi matrix with zero diagonal and off-diagonal sqrt(1..n-1).

    Its characteristic polynomial is the degree-n probabilist Hermite
    polynomial, so its eigenvalues are the Hermite zeros.
    """
    if n < 2:
        raise InvalidParameter("hermite_jacobi needs n >= 2")
    return JacobiMatrix((0.0,) * n, tuple(math.sqrt(i) for i in range(1, n)))


def laguerre_jacobi(n: int, alpha: float) -> JacobiMatrix:
    """Jacobi matrix of the gamma-weight orthogonal (Laguerre) recurrence.

    diag ``(alpha, alpha+2, ..., alpha+2(n-1))``, off-diagonal
    ``sqrt(i)*sqrt(alpha+i-1)`` for ``i = 1..n-1``; eigenvalues are the zeros
    of the degree-n monic Laguerre polynomial with parameter alpha.
    """
    if n < 1:
        raise InvalidParameter("laguerre_jacobi needs n >= 1")
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    diag = tuple(alpha + 2.0 * i for i in range(n))
    off = tuple(math.sqrt(i) * math.sqrt(alpha + i - 1.0) for i in range(1, n))
    return JacobiMatrix(diag, off)


def laguerre_freezing_matrix(n: int, alpha: float) -> JacobiMatrix:
    """Deterministic freezing limit of the Laguerre matrix model, as B B^T.

    B is the lower bidiagonal matrix with diagonal
    ``(sqrt(alpha+n-1), ..., sqrt(alpha))`` and subdiagonal
    ``(sqrt(n-1), ..., 1)``.  The product is tridiagonal with the same
    spectrum as :func:`laguerre_jacobi` (the Laguerre zeros).
    """
    if n < 1:
        raise InvalidParameter("laguerre_freezing_matrix needs n >= 1")
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    bdiag = [math.sqrt(alpha + n - 1.0 - i) for i in range(n)]
    bsub = [math.sqrt(n - 1.0 - i) for i in range(n - 1)]
    diag = tuple(
        bdiag[i] ** 2 + (bsub[i - 1] ** 2 if i > 0 else 0.0) for i in range(n)
    )
    off = tuple(bsub[i] * bdiag[i] for i in range(n - 1))
    return JacobiMatrix(diag, off)


def dual(j: JacobiMatrix) -> JacobiMatrix:
    """Index-reversed Jacobi matrix (both sequences reversed)."""
    return JacobiMatrix(j.diag[::-1], j.offdiag[::-1])


def _count_below(diag, off2, x, pivmin):
    """Number of eigenvalues strictly below x, per batch lane.

    Counts negative pivots of the LDL^T factorization of (J - x I); the pivots
    are the ratios of consecutive leading principal characteristic minors.
    """
    q = diag[:, 0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0.0).astype(np.int64)
    for i in range(1, diag.shape[1]):
        q = diag[:, i] - x - off2[:, i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0.0
    return count


def eigen_tridiag_batch(diag: np.ndarray, offdiag: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Eigenvalues of a batch of Jacobi matrices, ascending per row.

    ``diag`` is (M, n), ``offdiag`` is (M, n-1).  Bisection runs per
    eigenvalue index across all lanes simultaneously.
    """
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    m, n = diag.shape
    if n == 1:
        return diag.copy()
    offdiag = np.atleast_2d(np.asarray(offdiag, dtype=float))
    off2 = offdiag**2
    rad = np.zeros((m, n))
    rad[:, :-1] += np.abs(offdiag)
    rad[:, 1:] += np.abs(offdiag)
    lo0 = np.min(diag - rad, axis=1)
    hi0 = np.max(diag + rad, axis=1)
    scale = np.maximum(np.maximum(np.abs(lo0), np.abs(hi0)), 1e-300)
    width_tol = np.maximum(tol, 4.0 * np.finfo(float).eps) * scale
    pivmin = _SAFMIN * max(1.0, float(np.max(off2)))
    out = np.empty((m, n))
    for k in range(n):
        lo = lo0.copy()
        hi = hi0.copy()
        for _ in range(130):
            mid = 0.5 * (lo + hi)
            below = _count_below(diag, off2, mid, pivmin) <= k
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= width_tol):
                break
        out[:, k] = 0.5 * (lo + hi)
    return out


def eigen_tridiag(j: JacobiMatrix, tol: float = 1e-14) -> RootTuple:
    """All eigenvalues, ascending, each within ``tol * (matrix norm)`` of exact."""
    evals = eigen_tridiag_batch(
        np.asarray(j.diag)[None, :], np.asarray(j.offdiag)[None, :], tol=tol
    )[0]
    return RootTuple(tuple(evals))


def _orthonormal_values(j: JacobiMatrix, points: np.ndarray) -> np.ndarray:
    """Values of the orthonormal recurrence polynomials, shape (n, len(points)).

    Rescales every 10 steps if magnitudes pass 1e100 (squared norms grow
    factorially); returns values together with a per-point log correction.
    """
    a = np.asarray(j.diag)
    b = np.asarray(j.offdiag)
    x = np.asarray(points, dtype=float)
    n = j.n
    vals = np.empty((n, len(x)))
    logcorr = np.zeros(len(x))
    prev = np.zeros(len(x))
    cur = np.ones(len(x))
    vals[0] = cur
    for m in range(1, n):
        nxt = ((x - a[m - 1]) * cur - (b[m - 2] * prev if m >= 2 else 0.0)) / b[m - 1]
        prev, cur = cur, nxt
        if m % 10 == 0:
            mag = np.maximum(np.abs(prev), np.abs(cur))
            big = mag > 1e100
            if np.any(big):
                factor = np.where(big, 1.0 / mag, 1.0)
                prev = prev * factor
                cur = cur * factor
                logcorr += np.log(np.where(big, mag, 1.0))
        vals[m] = cur
    return vals, logcorr


def spectral_measure(j: JacobiMatrix, tol: float = 1e-14) -> SpectralMeasure:
    """Spectral measure of J: atoms are the eigenvalues, weights the squared
    first eigenvector components ``w_i = 1 / sum_m ptilde_m(lambda_i)^2``."""
    atoms = eigen_tridiag(j, tol=tol)
    if j.n == 1:
        return SpectralMeasure(atoms, (1.0,))
    vals, logcorr = _orthonormal_values(j, atoms.as_array())
    ssum = np.sum(vals**2, axis=0)
    weights = np.exp(-2.0 * logcorr) / ssum
    return SpectralMeasure(atoms, tuple(weights))


def christoffel_darboux_weights(j: JacobiMatrix, atoms: RootTuple | None = None) -> np.ndarray:
    """Spectral weights via the Christoffel-Darboux form
    ``w_i = h_(n-1) / (p_(n-1)(lambda_i) p_n'(lambda_i))``.

    Evaluated through the orthonormal recurrence (with the ``b_n := 1``
    bookkeeping for the last step), where the formula reads
    ``w_i = 1 / (ptilde_(n-1)(lambda_i) ptilde_n'(lambda_i))``; monic values
    grow like ``lambda^n`` and would lose the small weights to cancellation.
    """
    if atoms is None:
        atoms = eigen_tridiag(j)
    x = atoms.as_array()
    a = np.asarray(j.diag)
    b = np.concatenate([np.asarray(j.offdiag), [1.0]])
    n = j.n
    if n == 1:
        return np.ones(1)
    p_prev = np.zeros_like(x)
    p_cur = np.ones_like(x)
    d_prev = np.zeros_like(x)
    d_cur = np.zeros_like(x)
    for m in range(n):
        p_nxt = ((x - a[m]) * p_cur - (b[m - 1] * p_prev if m >= 1 else 0.0)) / b[m]
        d_nxt = (p_cur + (x - a[m]) * d_cur - (b[m - 1] * d_prev if m >= 1 else 0.0)) / b[m]
        p_prev, p_cur = p_cur, p_nxt
        d_prev, d_cur = d_cur, d_nxt
    return 1.0 / (p_prev * d_cur)


def dual_spectral_weights_cd(j: JacobiMatrix, atoms: RootTuple | None = None) -> np.ndarray:
    """Weights of the spectral measure of ``dual(j)`` via the
    Christoffel-Darboux route ``w*_i = p_(n-1)(lambda_i) / p_n'(lambda_i)``.

    Expressed in the *primal* matrix's polynomials, whose roots interlace the
    spectrum with healthy gaps; applying the plain weight formula to the dual
    matrix itself is exponentially ill-conditioned at spectrum edges carrying
    small primal weights.  Evaluated through the orthonormal recurrence
    (``w*_i = ptilde_(n-1) / ptilde_n'`` with the ``b_n := 1`` bookkeeping).
    """
    if atoms is None:
        atoms = eigen_tridiag(j)
    x = atoms.as_array()
    a = np.asarray(j.diag)
    b = np.concatenate([np.asarray(j.offdiag), [1.0]])
    n = j.n
    if n == 1:
        return np.ones(1)
    p_prev = np.zeros_like(x)
    p_cur = np.ones_like(x)
    d_prev = np.zeros_like(x)
    d_cur = np.zeros_like(x)
    for m in range(n):
        p_nxt = ((x - a[m]) * p_cur - (b[m - 1] * p_prev if m >= 1 else 0.0)) / b[m]
        d_nxt = (p_cur + (x - a[m]) * d_cur - (b[m - 1] * d_prev if m >= 1 else 0.0)) / b[m]
        p_prev, p_cur = p_cur, p_nxt
        d_prev, d_cur = d_cur, d_nxt
    return p_prev / d_cur


@dataclass(frozen=True)
class OrthogonalSystem:
    """Monic orthogonal polynomials of a Jacobi matrix, with squared norms.

    ``source`` drives the three-term recurrence
    ``q_(m+1) = (x - a_(m+1)) q_m - b_m^2 q_(m-1)``; ``squared_norms`` holds
    ``h_m = b_1^2 ... b_m^2`` (``h_0 = 1``), which equal the squared norms
    under the source's spectral measure.
    """

    source: JacobiMatrix
    squared_norms: tuple

    @classmethod
    def from_jacobi(cls, j: JacobiMatrix) -> "OrthogonalSystem":
        h = [1.0]
        for b in j.offdiag:
            h.append(h[-1] * b * b)
        return cls(j, tuple(h))

    @property
    def n(self) -> int:
        return self.source.n

    def value(self, m: int, x):
        """q_m evaluated at x (scalar or array) by the recurrence."""
        self._check_index(m)
        a = self.source.diag
        b = self.source.offdiag
        xv = np.asarray(x, dtype=float)
        prev = np.zeros_like(xv)
        cur = np.ones_like(xv)
        for i in range(m):
            nxt = (xv - a[i]) * cur - ((b[i - 1] ** 2) * prev if i >= 1 else 0.0)
            prev, cur = cur, nxt
        return cur if cur.shape else float(cur)

    def orthonormal_value(self, m: int, x):
        return self.value(m, x) / math.sqrt(self.squared_norms[m])

    def coefficients(self, m: int) -> np.ndarray:
        """Dense coefficients of q_m in ascending powers."""
        self._check_index(m)
        a = self.source.diag
        b = self.source.offdiag
        prev = np.zeros(1)
        cur = np.ones(1)
        for i in range(m):
            nxt = np.zeros(i + 2)
            nxt[1:] += cur
            nxt[: i + 1] -= a[i] * cur
            if i >= 1:
                nxt[:i] -= (b[i - 1] ** 2) * prev
            prev, cur = cur, nxt
        return cur

    def _check_index(self, m: int):
        if not 0 <= m <= self.n - 1:
            raise InvalidParameter(f"polynomial order {m} out of range 0..{self.n - 1}")


def dual_hermite_system(n: int) -> OrthogonalSystem:
    """Duals of the first n Hermite polynomials.

    Recurrence ``q_(m+1) = x q_m - (n - m) q_(m-1)``; orthogonal under the
    uniform measure on the Hermite zeros, with squared norms
    ``prod_(i=1..m) (n - i)``.
    """
    if n < 2:
        raise InvalidParameter("dual_hermite_system needs n >= 2")
    return OrthogonalSystem.from_jacobi(dual(hermite_jacobi(n)))


def dual_laguerre_system(n: int, alpha: float) -> OrthogonalSystem:
    """Duals of the first n Laguerre polynomials (parameter alpha).

    Orthogonal under the zero-weighted measure with weights
    ``z_i / (n (alpha + n - 1))`` on the Laguerre zeros.
    """
    if n < 1:
        raise InvalidParameter("dual_laguerre_system needs n >= 1")
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    return OrthogonalSystem.from_jacobi(dual(laguerre_jacobi(n, alpha)))


def primitive(sys: OrthogonalSystem, m: int, orthonormal: bool = False) -> np.ndarray:
    """Antiderivative of q_m (or of the orthonormal qhat_m) with zero constant
    term, as ascending coefficients."""
    coeffs = sys.coefficients(m)
    if orthonormal:
        coeffs = coeffs / math.sqrt(sys.squared_norms[m])
    out = np.zeros(len(coeffs) + 1)
    out[1:] = coeffs / np.arange(1, len(coeffs) + 1)
    return out


def scaled_primitive(sys: OrthogonalSystem, m: int, t: float, x):
    """Time-scaled primitive ``t^((m+1)/2) Q_m(x / sqrt(t))``, for t > 0."""
    if t <= 0.0:
        raise InvalidParameter("scaled_primitive needs t > 0")
    q = primitive(sys, m)
    xv = np.asarray(x, dtype=float) / math.sqrt(t)
    val = t ** ((m + 1) / 2.0) * np.polynomial.polynomial.polyval(xv, q)
    return val if np.ndim(x) else float(val)
