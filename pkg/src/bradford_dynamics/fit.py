"""Least-squares estimators for the forecasting pipeline.

* straight lines (shared OLS kernel) and power laws in log-log space
* the entry-rate law T(A) = alpha_s A - k A^2 / 2 (no intercept)
* logistic growth A(t) = K / (1 + exp(-r (t - t0))), fitted by a damped
  Gauss-Newton (Levenberg-Marquardt) iteration

All fits are unweighted.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .curve import InfeasibleError
from .model import DomainError


class DegenerateError(ValueError):
    """The design matrix is rank deficient (e.g. all x equal)."""


class FitConvergenceError(RuntimeError):
    """Iteration limit hit; ``best`` holds the best parameters seen."""

    def __init__(self, msg: str, best):
        super().__init__(msg)
        self.best = best


class LinearFit(NamedTuple):
    intercept: float
    slope: float
    residual_rms: float


def _xy(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("points must be a sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def _rms(res: np.ndarray) -> float:
    return float(np.sqrt(np.mean(res * res)))


def fit_linear(points) -> LinearFit:
    """Ordinary least squares line through ``points``."""
    x, y = _xy(points)
    if x.size < 2 or np.all(x == x[0]):
        raise DegenerateError("need at least two distinct x values")
    X = np.column_stack([np.ones_like(x), x])
    (c0, c1), *_ = np.linalg.lstsq(X, y, rcond=None)
    return LinearFit(float(c0), float(c1), _rms(y - (c0 + c1 * x)))


@dataclass(frozen=True)
class LogLogFit:
    """ln Y = a_rho + b_rho ln A (natural logarithms)."""

    a_rho: float
    b_rho: float
    residual_rms: float

    def predict(self, A):
        return np.exp(self.a_rho) * np.asarray(A, dtype=float) ** self.b_rho

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def fit_loglog(points) -> LogLogFit:
    A, Y = _xy(points)
    if np.any(A <= 0) or np.any(Y <= 0):
        raise DomainError("log-log fit needs strictly positive A and Y")
    line = fit_linear(np.column_stack([np.log(A), np.log(Y)]))
    return LogLogFit(line.intercept, line.slope, line.residual_rms)


@dataclass(frozen=True)
class EntryRateFit:
    """Linearly decreasing entry rate recovered from (A, T) pairs.

    ``T(A) = alpha_s A - k_lin A**2 / 2``; ``alpha_f`` is the rate reached
    at ``A_f``.
    """

    alpha_s: float
    alpha_f: float
    A_f: float
    k_lin: float
    residual_rms: float = 0.0
    model: str = "quadratic"

    @property
    def alpha_bar(self) -> float:
        return 0.5 * (self.alpha_s + self.alpha_f)

    def journals(self, A):
        A = np.asarray(A, dtype=float)
        return self.alpha_s * A - 0.5 * self.k_lin * A * A

    def rate(self, A):
        return self.alpha_s - self.k_lin * np.asarray(A, dtype=float)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["alpha_bar"] = self.alpha_bar
        return d


def _positive_distinct(A: np.ndarray, minimum: int) -> None:
    if A.size < minimum or np.unique(A).size < minimum:
        raise DegenerateError(f"need at least {minimum} distinct A values")
    if np.any(A <= 0):
        raise DomainError("paper counts must be positive")


def fit_entry_quadratic(points, horizon: float | None = None) -> EntryRateFit:
    """Fit ``T = c1 A + c2 A**2`` and read off alpha_s = c1, k_lin = -2 c2."""
    A, T = _xy(points)
    _positive_distinct(A, 2)
    X = np.column_stack([A, A * A])
    (c1, c2), *_ = np.linalg.lstsq(X, T, rcond=None)
    A_f = float(A.max() if horizon is None else horizon)
    k_lin = -2.0 * float(c2)
    # Round-off around an exactly linear law.
    if k_lin < 0 and abs(k_lin) * A_f <= 1e-9 * abs(c1):
        k_lin = 0.0
    alpha_s = float(c1)
    alpha_f = alpha_s - k_lin * A_f
    if not 0.0 < alpha_s < 1.0 or alpha_f <= 0.0 or k_lin < 0:
        raise InfeasibleError(
            f"recovered entry rates alpha_s={alpha_s:.6g}, alpha_f={alpha_f:.6g} "
            "do not describe a decreasing rate in (0, 1)")
    return EntryRateFit(alpha_s, alpha_f, A_f, k_lin, _rms(T - X @ np.array([c1, c2])))


def fit_entry_linear(points) -> EntryRateFit:
    """Constant entry rate ``T = alpha A`` through the origin."""
    A, T = _xy(points)
    _positive_distinct(A, 1)
    alpha = float(np.dot(A, T) / np.dot(A, A))
    if not 0.0 < alpha < 1.0:
        raise InfeasibleError(f"entry rate {alpha:.6g} outside (0, 1)")
    return EntryRateFit(alpha, alpha, float(A.max()), 0.0, _rms(T - alpha * A), model="linear")


@dataclass(frozen=True)
class LogisticFit:
    K: float
    r: float
    t0: float
    residual_rms: float = 0.0
    iterations: int = 0
    converged: bool = True

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        # exp overflow at very negative r(t - t0) correctly yields 0.
        with np.errstate(over="ignore"):
            out = self.K / (1.0 + np.exp(-self.r * (t - self.t0)))
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _logistic_init(t: np.ndarray, A: np.ndarray) -> np.ndarray:
    K0 = 2.0 * A.max()
    logit = np.log(A / (K0 - A))
    r0 = (logit[-1] - logit[0]) / (t[-1] - t[0])
    return np.array([K0, max(r0, 1e-6), float(np.median(t))])


def fit_logistic(points, max_iter: int = 200, step_tol: float = 1e-8) -> LogisticFit:
    """Least-squares logistic growth curve through (t, A) observations."""
    t, A = _xy(points)
    if t.size < 3:
        raise DegenerateError("logistic fit needs at least 3 points")
    if np.any(A <= 0):
        raise DomainError("paper counts must be positive")
    order = np.argsort(t)
    t, A = t[order], A[order]
    if np.any(np.diff(A) <= 0) or np.any(np.diff(t) <= 0):
        raise DomainError("A must be strictly increasing in t")

    def residuals(p):
        K, r, t0 = p
        with np.errstate(over="ignore"):
            s = 1.0 / (1.0 + np.exp(-r * (t - t0)))
        return A - K * s, s

    def jacobian(p, s):
        K, r, t0 = p
        ds = s * (1.0 - s)
        return np.column_stack([s, K * ds * (t - t0), -K * ds * r])

    p = _logistic_init(t, A)
    res, s = residuals(p)
    sse = float(res @ res)
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        J = jacobian(p, s)
        JtJ = J.T @ J
        g = J.T @ res
        try:
            delta = np.linalg.solve(JtJ + lam * np.diag(np.diag(JtJ)), g)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = p + delta
        if trial[0] <= 0 or trial[1] <= 0:
            lam *= 10.0
            continue
        res_t, s_t = residuals(trial)
        sse_t = float(res_t @ res_t)
        if sse_t <= sse:
            small = np.linalg.norm(delta) <= step_tol * np.linalg.norm(trial)
            p, res, s, sse = trial, res_t, s_t, sse_t
            lam = max(lam / 10.0, 1e-12)
            if small or sse == 0.0:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e16:
                # No descent direction left: we sit at a stationary point.
                converged = True
                break

    fit = LogisticFit(float(p[0]), float(p[1]), float(p[2]), _rms(res), it, converged)
    if not converged:
        raise FitConvergenceError(f"logistic fit did not converge in {max_iter} iterations",
                                  dataclasses.replace(fit, converged=False))
    return fit
