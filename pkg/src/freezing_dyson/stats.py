"""Statistical verification harness for the freezing-limit predictions.

Every Monte Carlo report carries standard errors, and one rule decides all
pass/fail questions in this module: an estimate matches its target when
``|estimate - target| <= max(3 * stderr, rel_tol * |target|)``.

The central objects are the orthogonal rotation matrices built from dual
orthonormal polynomials evaluated at classical zeros: the fluctuation
covariance of the static ensembles diagonalizes to ``diag(1/(n+1))`` in those
coordinates, and the time-indexed primitive statistics of the Dyson process
have covariance ``<q_n, q_n>/(n+1) (s ^ t)^(n+1)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import GAUSSIAN, LAGUERRE, gaussian_gk, laguerre_gk
from .elemsym import esp_rows
from .errors import InvalidParameter
from .orthopoly import (
    dual_hermite_system,
    dual_laguerre_system,
    eigen_tridiag,
    hermite_jacobi,
    laguerre_jacobi,
    primitive,
    scaled_primitive,
)
from .stochastic import PathEnsemble, sample_ble_batch, sample_gbe_batch

__all__ = [
    "CovarianceReport",
    "MomentProcessEstimate",
    "PrimitiveCltReport",
    "EkDriftReport",
    "ProcessCltReport",
    "within_tolerance",
    "build_q_matrix_gaussian",
    "build_q_matrix_laguerre",
    "clt_covariance_gaussian",
    "clt_covariance_laguerre",
    "primitive_clt_check",
    "moment_process_estimate",
    "ek_drift_report",
    "process_clt_check",
]


def within_tolerance(estimate: float, target: float, stderr: float, rel_tol: float = 0.0) -> bool:
    """The uniform acceptance rule for Monte Carlo estimates."""
    return abs(estimate - target) <= max(3.0 * stderr, rel_tol * abs(target))


def build_q_matrix_gaussian(n: int) -> np.ndarray:
    """Orthogonal matrix ``Q[m, i] = qhat_m(z_i) / sqrt(N)`` over Hermite zeros.

    Rows are polynomial orders 0..N-1, columns zeros ascending; QQ^T = I
    because the dual orthonormal system is orthonormal under the uniform
    measure on the zeros.
    """
    if n < 2:
        raise InvalidParameter("need n >= 2")
    z = eigen_tridiag(hermite_jacobi(n)).as_array()
    sys = dual_hermite_system(n)
    return np.array([sys.orthonormal_value(m, z) / math.sqrt(n) for m in range(n)])


def build_q_matrix_laguerre(n: int, alpha: float) -> np.ndarray:
    """Orthogonal matrix ``Q[m, i] = sqrt(z_i / (N(N+alpha-1))) qhat_m(z_i)``
    over Laguerre zeros."""
    if n < 1:
        raise InvalidParameter("need n >= 1")
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    z = eigen_tridiag(laguerre_jacobi(n, alpha)).as_array()
    sys = dual_laguerre_system(n, alpha)
    w = np.sqrt(z / (n * (alpha + n - 1)))
    return np.array([w * sys.orthonormal_value(m, z) for m in range(n)])


@dataclass(frozen=True)
class CovarianceReport:
    """Estimated fluctuation covariance and its rotation diagnostics.

    ``rotated = Q sigma_hat Q^T`` should approach ``diag(target_diag)``;
    ``mc_stderr`` holds delta-method standard errors of the rotated entries
    (fourth-moment plug-in).  ``beta`` and ``kind`` record the calibration
    point the report was run at.
    """

    sigma_hat: np.ndarray
    rotated: np.ndarray
    target_diag: np.ndarray
    off_diag_max: float
    diag_rel_err: np.ndarray
    mc_stderr: np.ndarray
    samples: int
    beta: float
    kind: str

    def diag_pass(self, rel_tol: float = 0.05) -> bool:
        return bool(np.all(self.diag_rel_err <= rel_tol))

    def offdiag_pass(self) -> bool:
        n = len(self.target_diag)
        ok = True
        for a in range(n):
            for b in range(a + 1, n):
                ok &= within_tolerance(self.rotated[a, b], 0.0, self.mc_stderr[a, b])
        return bool(ok)


def _covariance_report(v: np.ndarray, q: np.ndarray, beta: float, kind: str) -> CovarianceReport:
    m, n = v.shape
    sigma = np.cov(v.T, ddof=1)
    sigma = 0.5 * (sigma + sigma.T)
    rotated = q @ sigma @ q.T
    u = v @ q.T
    cu = u - np.mean(u, axis=0)
    # delta-method stderr of covariance entries: sqrt((E[u_a^2 u_b^2] - c_ab^2)/M)
    m22 = (cu**2).T @ (cu**2) / m
    cab = cu.T @ cu / (m - 1)
    var_entries = np.maximum(m22 - cab**2, 0.0) / m
    stderr = np.sqrt(var_entries)
    target = 1.0 / np.arange(1, n + 1)
    diag_rel = np.abs(np.diag(rotated) - target) / target
    off = rotated - np.diag(np.diag(rotated))
    return CovarianceReport(
        sigma_hat=sigma,
        rotated=rotated,
        target_diag=target,
        off_diag_max=float(np.max(np.abs(off))) if n > 1 else 0.0,
        diag_rel_err=diag_rel,
        mc_stderr=stderr,
        samples=m,
        beta=beta,
        kind=kind,
    )


def clt_covariance_gaussian(beta: float, n: int, samples: int, seed: int) -> CovarianceReport:
    """Covariance of ``sqrt(beta/2) (lambda - z^H)`` over GbE samples, rotated
    by the Hermite-dual Q; the diagonal targets ``1/(n+1)``."""
    if samples < 2:
        raise InvalidParameter("need at least 2 samples")
    rng = np.random.default_rng(seed)
    evs = sample_gbe_batch(beta, n, samples, rng)
    z = eigen_tridiag(hermite_jacobi(n)).as_array()
    v = math.sqrt(beta / 2.0) * (evs - z)
    return _covariance_report(v, build_q_matrix_gaussian(n), beta, GAUSSIAN)


def clt_covariance_laguerre(
    beta: float, n: int, alpha: float, samples: int, seed: int
) -> CovarianceReport:
    """Covariance of ``sqrt(2 beta) (sqrt(lambda) - sqrt(z))`` over Laguerre
    beta ensemble samples, rotated by the Laguerre-dual Q."""
    if samples < 2:
        raise InvalidParameter("need at least 2 samples")
    rng = np.random.default_rng(seed)
    evs = sample_ble_batch(beta, alpha, n, samples, rng)
    z = eigen_tridiag(laguerre_jacobi(n, alpha)).as_array()
    v = math.sqrt(2.0 * beta) * (np.sqrt(evs) - np.sqrt(z))
    return _covariance_report(v, build_q_matrix_laguerre(n, alpha), beta, LAGUERRE)


@dataclass(frozen=True)
class PrimitiveCltReport:
    """Variances of the primitive statistics against their limit targets."""

    variances: np.ndarray
    targets: np.ndarray
    var_stderr: np.ndarray
    correlations: np.ndarray
    corr_stderr: float
    samples: int
    beta: float
    kind: str

    def variance_pass(self, rel_tol: float = 0.05) -> bool:
        return bool(
            np.all(
                [
                    within_tolerance(v, t, s, rel_tol)
                    for v, t, s in zip(self.variances, self.targets, self.var_stderr)
                ]
            )
        )

    def independence_pass(self) -> bool:
        n = len(self.variances)
        return all(
            within_tolerance(self.correlations[a, b], 0.0, self.corr_stderr)
            for a in range(n)
            for b in range(a + 1, n)
        )


def primitive_clt_check(
    beta: float,
    n: int,
    samples: int,
    seed: int,
    kind: str,
    alpha: float = 1.0,
) -> PrimitiveCltReport:
    """Fluctuations of ``sqrt(beta N / 2) (<L_N, Q_m> - <limit, Q_m>)``.

    Gaussian kind: GbE samples, centering measure uniform on Hermite zeros,
    variance targets ``<q_m, q_m> / (m+1)``.  Laguerre kind: Laguerre beta
    ensemble samples with parameter ``alpha``, centering measure uniform on
    the Laguerre zeros, targets ``(alpha + N - 1) <q_m, q_m> / (m+1)``.
    Cross-order covariances target zero.
    """
    rng = np.random.default_rng(seed)
    if kind == GAUSSIAN:
        evs = sample_gbe_batch(beta, n, samples, rng)
        z = eigen_tridiag(hermite_jacobi(n)).as_array()
        sys = dual_hermite_system(n)
        targets = np.array([sys.squared_norms[m] / (m + 1) for m in range(n)])
    elif kind == LAGUERRE:
        evs = sample_ble_batch(beta, alpha, n, samples, rng)
        z = eigen_tridiag(laguerre_jacobi(n, alpha)).as_array()
        sys = dual_laguerre_system(n, alpha)
        targets = np.array(
            [(alpha + n - 1) * sys.squared_norms[m] / (m + 1) for m in range(n)]
        )
    else:
        raise InvalidParameter(f"unknown kind {kind!r}")
    scale = math.sqrt(beta * n / 2.0)
    stats = np.empty((samples, n))
    for m in range(n):
        qm = primitive(sys, m)
        pv = np.polynomial.polynomial.polyval
        stats[:, m] = scale * (np.mean(pv(evs, qm), axis=1) - np.mean(pv(z, qm)))
    variances = np.var(stats, axis=0, ddof=1)
    centered = stats - np.mean(stats, axis=0)
    m4 = np.mean(centered**4, axis=0)
    var_stderr = np.sqrt(np.maximum(m4 - variances**2, 0.0) / samples)
    corr = np.corrcoef(stats.T) if n > 1 else np.ones((1, 1))
    return PrimitiveCltReport(
        variances=variances,
        targets=targets,
        var_stderr=var_stderr,
        correlations=corr,
        corr_stderr=1.0 / math.sqrt(samples),
        samples=samples,
        beta=beta,
        kind=kind,
    )


@dataclass(frozen=True)
class MomentProcessEstimate:
    """Per-time, per-order moment estimates ``S_n(t) = (1/N) sum lambda_i^n``."""

    times: tuple
    s_hat: np.ndarray  # (times, orders+1)
    stderr: np.ndarray

    def order(self, n: int) -> np.ndarray:
        return self.s_hat[:, n]


def moment_process_estimate(ensemble: PathEnsemble, max_order: int) -> MomentProcessEstimate:
    """Ensemble means and standard errors of the empirical moment processes."""
    data = ensemble.data
    m, r, _ = data.shape
    s_hat = np.empty((r, max_order + 1))
    stderr = np.empty((r, max_order + 1))
    for order in range(max_order + 1):
        per_path = np.mean(data**order, axis=2)  # (M, R)
        s_hat[:, order] = np.mean(per_path, axis=0)
        stderr[:, order] = np.std(per_path, axis=0, ddof=1) / math.sqrt(m) if m > 1 else 0.0
    return MomentProcessEstimate(ensemble.config.record_times, s_hat, stderr)


@dataclass(frozen=True)
class EkDriftReport:
    """Ensemble-mean elementary symmetric coordinates against the exact g_k(t).

    The tolerance per entry is ``3 * stderr + bias_factor * dt * max(1, |g_k|)``,
    the Monte Carlo band plus an explicit Euler weak-bias budget.
    """

    times: tuple
    ek_mean: np.ndarray  # (times, N+1)
    ek_stderr: np.ndarray
    gk_target: np.ndarray
    tolerance: np.ndarray
    passed: np.ndarray

    def all_passed(self) -> bool:
        return bool(np.all(self.passed))


def ek_drift_report(ensemble: PathEnsemble, bias_factor: float = 5.0) -> EkDriftReport:
    """Compare simulated ``E[e_k(lambda(t))]`` with the deterministic g_k(t).

    The drift of e_k is beta-independent, so this is the sharpest desk-level
    check of both simulators.
    """
    cfg = ensemble.config
    if ensemble.kind == "dyson":
        traj = gaussian_gk(cfg.initial)
    else:
        traj = laguerre_gk(cfg.initial, cfg.alpha)
    m, r, n = ensemble.data.shape
    ek_mean = np.empty((r, n + 1))
    ek_stderr = np.empty((r, n + 1))
    gk = np.empty((r, n + 1))
    for slot in range(r):
        ek = esp_rows(ensemble.data[:, slot, :])
        ek_mean[slot] = np.mean(ek, axis=0)
        ek_stderr[slot] = np.std(ek, axis=0, ddof=1) / math.sqrt(m) if m > 1 else 0.0
        gk[slot] = traj.coefficients_at(cfg.record_times[slot])
    tol = 3.0 * ek_stderr + bias_factor * cfg.dt * np.maximum(1.0, np.abs(gk))
    passed = np.abs(ek_mean - gk) <= tol
    return EkDriftReport(cfg.record_times, ek_mean, ek_stderr, gk, tol, passed)


@dataclass(frozen=True)
class ProcessCltReport:
    """Covariance of the time-indexed primitive fluctuation statistics.

    Entry (n, a, b) estimates ``E[eta_n(t_a) eta_n(t_b)]`` with target
    ``<q_n, q_n>/(n+1) (t_a ^ t_b)^(n+1)``.
    """

    times: tuple
    covariances: np.ndarray  # (orders, times, times)
    targets: np.ndarray
    stderr: np.ndarray
    samples: int

    def all_passed(self) -> bool:
        return bool(
            np.all(np.abs(self.covariances - self.targets) <= 3.0 * self.stderr)
        )


def process_clt_check(ensemble: PathEnsemble, max_order: int) -> ProcessCltReport:
    """Estimate the process-level fluctuation covariance from a zero-start
    Dyson ensemble at large beta, at the record-time marginals.

    The statistic at order n and time t is
    ``sqrt(beta N / 2)(<mu_t^(beta), Qtilde_n> - <mu_t, Qtilde_n>)`` with
    ``Qtilde_n(t, x) = t^((n+1)/2) Q_n(x / sqrt(t))``.
    """
    cfg = ensemble.config
    if ensemble.kind != "dyson":
        raise InvalidParameter("process-level statistics are defined for the Dyson engine")
    if any(abs(v) > 0.0 for v in cfg.initial.roots):
        raise InvalidParameter("process-level statistics assume the zero initial condition")
    if max_order > cfg.n - 1:
        raise InvalidParameter("order must be <= N - 1")
    n = cfg.n
    sys = dual_hermite_system(n)
    z = eigen_tridiag(hermite_jacobi(n)).as_array()
    m, r, _ = ensemble.data.shape
    times = cfg.record_times
    scale = math.sqrt(cfg.beta * n / 2.0)
    stats = np.empty((max_order + 1, r, m))
    for order in range(max_order + 1):
        for slot, t in enumerate(times):
            if t <= 0.0:
                raise InvalidParameter("record times must be positive for this check")
            limit = float(np.mean(scaled_primitive(sys, order, t, math.sqrt(t) * z)))
            emp = np.mean(scaled_primitive(sys, order, t, ensemble.data[:, slot, :]), axis=1)
            stats[order, slot] = scale * (emp - limit)
    covs = np.empty((max_order + 1, r, r))
    stderr = np.empty((max_order + 1, r, r))
    targets = np.empty((max_order + 1, r, r))
    for order in range(max_order + 1):
        x = stats[order] - np.mean(stats[order], axis=1, keepdims=True)
        covs[order] = x @ x.T / (m - 1)
        prod_sq = (x[:, None, :] ** 2 * x[None, :, :] ** 2).mean(axis=2)
        stderr[order] = np.sqrt(np.maximum(prod_sq - covs[order] ** 2, 0.0) / m)
        h = sys.squared_norms[order]
        for a in range(r):
            for b in range(r):
                targets[order, a, b] = h / (order + 1) * min(times[a], times[b]) ** (order + 1)
    return ProcessCltReport(times, covs, targets, stderr, m)
