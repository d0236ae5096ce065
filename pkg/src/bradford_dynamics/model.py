"""Closed-form Simon-Yule steady state quantities.

Everything here is a pure function of the entry rate ``alpha`` (or the Yule
exponent ``rho = 1/(1 - alpha)``) and the paper count ``A``:

* the productivity distribution f(n) = rho * B(n, rho + 1)
* the zone boundary y_m where the expected journal count drops to one
* the core-zone totals T0, A0 and the top productivity X1
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


@dataclass(frozen=True)
class ZoneParams:
    """Parameter bundle splitting a bibliography into core and normal zones.

    ``T0`` stays real valued (it is compared against ``1/b`` when deciding
    the normal-zone curvature); ``T0_int`` is the journal count used whenever
    T0 indexes a sum over ranks.
    """

    alpha: float
    rho: float
    y_m: float
    T0: float
    A0: float
    X1: float
    k: float | None = None

    @property
    def T0_int(self) -> int:
        return max(1, int(round(self.T0)))


def _check_rho(rho: float, name: str = "rho") -> None:
    if not rho > 1.0:
        raise DomainError(f"{name} must exceed 1 (got {rho!r}); the factor rho-1 vanishes")


def rho_from_alpha(alpha: float) -> float:
    """Yule exponent for entry rate ``alpha``: ``1 / (1 - alpha)``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"entry rate must lie in (0, 1), got {alpha!r}")
    return 1.0 / (1.0 - alpha)


def alpha_from_rho(rho: float) -> float:
    _check_rho(rho)
    return 1.0 - 1.0 / rho


def yule_pmf(n, rho: float, power_law: bool = False):
    """Steady-state share of journals with exactly ``n`` papers.

    The default is the exact beta form ``rho * B(n, rho + 1)``. With
    ``power_law=True`` the large-n approximation
    ``rho * Gamma(rho + 1) * n**-(rho + 1)`` is returned instead.
    Accepts scalars or arrays of ``n``.
    """
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho!r}")
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 1):
        raise DomainError("productivity n must be >= 1")
    if power_law:
        out = rho * math.gamma(rho + 1.0) * n_arr ** (-(rho + 1.0))
    else:
        out = rho * np.exp(gammaln(n_arr) + gammaln(rho + 1.0) - gammaln(n_arr + rho + 1.0))
    return float(out) if out.ndim == 0 else out


def yule_survival(n, rho: float):
    """P(X >= n) = Gamma(n) Gamma(rho+1) / Gamma(n+rho) for the Yule law."""
    n_arr = np.asarray(n, dtype=float)
    out = np.exp(gammaln(n_arr) + gammaln(rho + 1.0) - gammaln(n_arr + rho))
    return float(out) if out.ndim == 0 else out


def yule_moment_sum(rho: float, moment: int = 0, rel_tol: float = 1e-8,
                    chunk: int = 1 << 16, max_terms: int = 1 << 26) -> float:
    """Numerically sum ``n**moment * yule_pmf(n, rho)`` over n >= 1.

    Terms are added chunk by chunk until the last term falls below
    ``rel_tol`` times the running total. The remainder past the cutoff N is
    then added from the power-law tail integral over [N + 1/2, inf), which is
    what makes the first moment usable for rho close to 1 (its tail decays
    only like N**(1 - rho)).
    """
    if moment not in (0, 1):
        raise ValueError("only moments 0 and 1 are supported")
    if moment == 1:
        _check_rho(rho)
    total = 0.0
    start = 1
    while True:
        n = np.arange(start, start + chunk, dtype=float)
        terms = n ** moment * yule_pmf(n, rho)
        total += float(np.sum(terms[::-1]))
        start += chunk
        if terms[-1] < rel_tol * total or start > max_terms:
            break
    cutoff = start - 1
    # Power-law tail: rho*Gamma(rho+1) * int x**(moment - rho - 1) dx.
    expo = rho - moment
    tail = rho * math.gamma(rho + 1.0) * (cutoff + 0.5) ** (-expo) / expo
    return total + tail


def ym_analytic(A: float, rho: float) -> float:
    """Productivity at which the expected journal count falls to one.

    ``y_m = [A (rho - 1) Gamma(rho + 1)] ** (1 / (rho + 1))``
    """
    _check_rho(rho)
    if A < 1:
        raise DomainError(f"paper count must be >= 1, got {A!r}")
    return (A * (rho - 1.0) * math.gamma(rho + 1.0)) ** (1.0 / (rho + 1.0))


def core_zone_analytic(A: float, rho: float) -> tuple[float, float]:
    """Journal and paper totals of the core zone, ``(y_m / rho, y_m**2 / (rho - 1))``."""
    y_m = ym_analytic(A, rho)
    return y_m / rho, y_m * y_m / (rho - 1.0)


def x1_analytic(A: float, rho: float) -> float:
    """Expected productivity of the top journal, ``[A Gamma(rho + 1)] ** (1 / rho)``."""
    _check_rho(rho)
    if A < 1:
        raise DomainError(f"paper count must be >= 1, got {A!r}")
    return (A * math.gamma(rho + 1.0)) ** (1.0 / rho)


def x1_from_ym(y_m: float, rho: float) -> float:
    """Same quantity as :func:`x1_analytic`, written in terms of ``y_m``."""
    _check_rho(rho)
    return (rho - 1.0) ** (-1.0 / rho) * y_m ** ((rho + 1.0) / rho)


def gumbel_xr(X1: float, r: int, rho: float) -> float:
    """Characteristic-extreme estimate ``X1 * r**(-1/rho)`` of the r-th productivity.

    Only reliable at r = 1; kept for comparison against the core-ratio law.
    """
    if r < 1:
        raise DomainError("rank must be >= 1")
    return X1 * r ** (-1.0 / rho)


def ym_from_core(X1: float, T0_int: int, k: float) -> float:
    """Boundary productivity implied by the core law at its last rank."""
    if T0_int < 1 or k <= 0:
        raise DomainError("need T0_int >= 1 and k > 0")
    return X1 / (k * (T0_int - 1) + 1.0)


def analytic_zone_params(alpha: float, A: float) -> ZoneParams:
    """Zone parameters from the steady-state formulas alone (no k yet)."""
    rho = rho_from_alpha(alpha)
    y_m = ym_analytic(A, rho)
    T0, A0 = core_zone_analytic(A, rho)
    return ZoneParams(alpha=alpha, rho=rho, y_m=y_m, T0=T0, A0=A0, X1=x1_analytic(A, rho))


@dataclass(frozen=True)
class FrequencyTable:
    """Journal count ``count[i]`` at productivity ``n[i]`` (counts may be real means)."""

    n: np.ndarray
    count: np.ndarray

    @classmethod
    def from_sizes(cls, sizes) -> "FrequencyTable":
        sizes = np.asarray(sizes, dtype=np.int64)
        if sizes.size == 0:
            return cls(np.zeros(0, dtype=np.int64), np.zeros(0))
        counts = np.bincount(sizes)
        n = np.nonzero(counts)[0]
        n = n[n > 0]
        return cls(n, counts[n].astype(float))

    @classmethod
    def from_mapping(cls, mapping) -> "FrequencyTable":
        n = np.array(sorted(mapping), dtype=np.int64)
        return cls(n, np.array([float(mapping[i]) for i in n]))

    @property
    def T(self) -> float:
        return float(np.sum(self.count))

    @property
    def A(self) -> float:
        return float(np.sum(self.n * self.count))

    def as_dict(self) -> dict[int, float]:
        return {int(n): float(c) for n, c in zip(self.n, self.count)}

    def to_ranked(self) -> "RankedBibliography":
        if np.any(self.count != np.round(self.count)):
            raise ValueError("only integer frequency tables expand to a ranked list")
        sizes = np.repeat(self.n[::-1], self.count[::-1].astype(np.int64))
        return RankedBibliography(sizes)


@dataclass(frozen=True)
class RankedBibliography:
    """Per-journal productivities sorted in descending order."""

    sizes: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.sizes)
        if sizes.ndim != 1:
            raise ValueError("ranked productivities must be one-dimensional")
        if np.any(np.diff(sizes) > 0):
            sizes = np.sort(sizes)[::-1]
        object.__setattr__(self, "sizes", sizes)

    @property
    def T(self) -> int:
        return int(self.sizes.size)

    @property
    def A(self) -> float:
        return float(np.sum(self.sizes))

    @property
    def X1(self) -> float:
        return float(self.sizes[0])

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.sizes, dtype=float)

    def frequency(self) -> FrequencyTable:
        return FrequencyTable.from_sizes(self.sizes)
