"""Two-zone Bradford curve: core-ratio law for the top journals, shifted
Egghe/Leimkuhler law for the rest, and the curvature-based shape classifier.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, ZoneParams, ym_from_core

EULER_GAMMA = 0.5772156649015329
E_GAMMA = math.exp(EULER_GAMMA)

DENSE_GRID_MAX = 10_000
GEOMETRIC_POINTS = 500


class InfeasibleError(ValueError):
    """No parameter value satisfies the requested constraint."""


class DegenerateCoreError(ValueError):
    """The core zone holds a single journal, so k is undefined."""


class ShapeClass(str, enum.Enum):
    J = "J"
    REVERSED_S = "REVERSED_S"
    S = "S"
    CONCAVE_DOWN = "CONCAVE_DOWN"


@dataclass(frozen=True)
class EggheParams:
    a: float
    b: float
    A1: float
    T1: float
    y_m: float
    euler_gamma: float = EULER_GAMMA


@dataclass(frozen=True)
class CurveModel:
    zone_params: ZoneParams
    egghe: EggheParams
    T: float
    A: float
    r: np.ndarray
    R: np.ndarray
    is_core: np.ndarray
    signs: tuple[int, int]
    shape: ShapeClass

    @property
    def zone(self) -> list[str]:
        return ["core" if c else "normal" for c in self.is_core]

    def rows(self):
        for r, R, c in zip(self.r, self.R, self.is_core):
            yield int(r), float(R), "core" if c else "normal"


def core_curve(X1: float, k: float, r):
    """Cumulative papers of the top ``r`` journals when X1/X_i = k(i-1) + 1."""
    if k <= 0:
        raise DomainError(f"k must be positive, got {k!r}")
    r_arr = np.atleast_1d(np.asarray(r, dtype=np.int64))
    if np.any(r_arr < 1):
        raise DomainError("rank must be >= 1")
    terms = X1 / (k * np.arange(int(r_arr.max()), dtype=float) + 1.0)
    cum = np.cumsum(terms)[r_arr - 1]
    return float(cum[0]) if np.ndim(r) == 0 else cum


def solve_k(X1: float, T0_int: int, A0: float, rel_tol: float = 1e-9) -> float:
    """Find the core-ratio slope k such that the top ``T0_int`` journals sum to ``A0``.

    The partial sum falls monotonically from ``T0_int * X1`` (k -> 0) to ``X1``
    (k -> inf), so plain bisection is used after doubling the upper bracket.
    """
    if T0_int == 1:
        raise DegenerateCoreError("a single core journal leaves k undefined")
    if T0_int < 1:
        raise DomainError("T0_int must be >= 1")
    if not X1 < A0 < T0_int * X1:
        raise InfeasibleError(
            f"A0={A0!r} must lie strictly between X1={X1!r} and T0_int*X1={T0_int * X1!r}")

    idx = np.arange(T0_int, dtype=float)

    def excess(k: float) -> float:
        return float(np.sum(X1 / (k * idx + 1.0))) - A0

    lo, hi = 1e-9, 1.0
    if excess(lo) < 0:
        raise InfeasibleError("A0 too close to T0_int*X1 to resolve k")
    while excess(hi) > 0:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise InfeasibleError("could not bracket k")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        f = excess(mid)
        if abs(f) <= rel_tol * A0:
            return mid
        if f > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def egghe_params(A1: float, T1: float, y_m: float) -> EggheParams:
    """Normal-zone parameters ``a = A1/ln(e^g y_m)`` and ``b = (e^g y_m - 1)/T1``."""
    if not (A1 > 0 and T1 > 0):
        raise DomainError(f"normal zone needs A1 > 0 and T1 > 0 (got A1={A1!r}, T1={T1!r})")
    if not y_m > 1.0 / E_GAMMA:
        raise DomainError(f"y_m={y_m!r} must exceed exp(-euler_gamma) so that a > 0")
    scaled = E_GAMMA * y_m
    return EggheParams(a=A1 / math.log(scaled), b=(scaled - 1.0) / T1, A1=A1, T1=T1, y_m=y_m)


def normal_curve(egghe: EggheParams, T0: float, A0: float, r):
    """Shifted Egghe law ``a ln(1 + b (r - T0)) + A0`` for ranks past the core."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= T0):
        raise DomainError(f"normal zone needs r > T0={T0!r}")
    out = egghe.a * np.log1p(egghe.b * (r_arr - T0)) + A0
    return float(out) if out.ndim == 0 else out


def _sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


def curvature_signs(zone_params: ZoneParams, egghe: EggheParams) -> tuple[int, int]:
    """Signs of d2R/d(ln r)2 in the core zone (1 - k) and normal zone (1 - b T0)."""
    k = 1.0 if zone_params.k is None else zone_params.k
    return _sign(1.0 - k), _sign(1.0 - egghe.b * zone_params.T0)


def classify(signs: tuple[int, int]) -> ShapeClass:
    """Shape class from (core, normal) curvature signs; zero counts as concave up."""
    core_up = signs[0] >= 0
    normal_up = signs[1] >= 0
    if core_up and normal_up:
        return ShapeClass.J
    if normal_up:
        return ShapeClass.REVERSED_S
    if core_up:
        return ShapeClass.S
    return ShapeClass.CONCAVE_DOWN


def sample_ranks(T_end: int, T0_int: int) -> np.ndarray:
    if T_end <= DENSE_GRID_MAX:
        return np.arange(1, T_end + 1, dtype=np.int64)
    grid = np.unique(np.round(np.geomspace(1, T_end, GEOMETRIC_POINTS)).astype(np.int64))
    extra = [T0_int, min(T0_int + 1, T_end), T_end]
    return np.unique(np.concatenate([grid, np.arange(1, T0_int + 1), extra]))


def with_k(zone_params: ZoneParams, degenerate_tol: float = 0.05) -> ZoneParams:
    """Return ``zone_params`` with k solved from the core totals.

    A one-journal core has no k; the sentinel k = 1 is used and X1 is snapped
    to A0, provided the two already agree within ``degenerate_tol``.
    """
    zp = zone_params
    if zp.T0_int == 1:
        if abs(zp.X1 - zp.A0) > degenerate_tol * zp.A0:
            raise DegenerateCoreError(
                f"single-journal core needs X1 ~= A0 (X1={zp.X1!r}, A0={zp.A0!r})")
        return dataclasses.replace(zp, k=1.0, X1=zp.A0)
    return dataclasses.replace(zp, k=solve_k(zp.X1, zp.T0_int, zp.A0))


def assemble_curve(zone_params: ZoneParams, T: float, A: float) -> CurveModel:
    """Build the sampled two-zone curve through (1, X1), (T0, A0) and (T, A)."""
    zp = zone_params
    if not (zp.T0 <= T and zp.A0 <= A):
        raise DomainError(f"core totals exceed bibliography totals (T0={zp.T0}, T={T}, A0={zp.A0}, A={A})")
    zp = with_k(zp)
    y_m = ym_from_core(zp.X1, zp.T0_int, zp.k)
    zp = dataclasses.replace(zp, y_m=y_m)
    egghe = egghe_params(A - zp.A0, T - zp.T0, y_m)

    T_end = max(int(round(T)), zp.T0_int)
    r = sample_ranks(T_end, zp.T0_int)
    is_core = r <= zp.T0_int
    R = np.empty(r.shape, dtype=float)
    R[is_core] = core_curve(zp.X1, zp.k, r[is_core])
    if np.any(~is_core):
        R[~is_core] = normal_curve(egghe, zp.T0, zp.A0, r[~is_core])
    # The integer core boundary hits A0 exactly by construction of k.
    R[r == zp.T0_int] = zp.A0
    for arr in (r, R, is_core):
        arr.setflags(write=False)

    signs = curvature_signs(zp, egghe)
    return CurveModel(zone_params=zp, egghe=egghe, T=float(T), A=float(A), r=r, R=R,
                      is_core=is_core, signs=signs, shape=classify(signs))
