"""Snapshot ingestion and the four-step Bradford-curve forecast.

1. logistic growth fit of A(t)
2. entry-rate fit of T(A) (quadratic, falling back to T = alpha A)
3. log-log fits of T0, A0, X1 against A
4. two-zone curve assembly at the requested time
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .curve import CurveModel, InfeasibleError, assemble_curve
from .fit import (
    EntryRateFit,
    LogisticFit,
    LogLogFit,
    fit_entry_linear,
    fit_entry_quadratic,
    fit_logistic,
    fit_loglog,
)
from .model import (
    DomainError,
    FrequencyTable,
    RankedBibliography,
    ZoneParams,
    analytic_zone_params,
    rho_from_alpha,
    ym_analytic,
)
from .sim import EmptyCoreError, EnsembleResult, empirical_zone_split

ZONE_SPLIT_RULE = "productivity > ym_analytic(A, rho(T/A))"
EXTRAPOLATION_FACTOR = 1.5
# Quadratic term counts as absent when |c2| A_f^2 < 1% of c1 A_f.
QUADRATIC_SIGNIFICANCE = 0.01

FREQUENCY_HEADER = ("n", "count")
RANKED_HEADER = ("rank", "articles")
KEY_PARAMS = ("T0", "A0", "X1")


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class Snapshot:
    """A bibliography at time ``t``.

    ``ranked`` is None for snapshots built straight from totals (analytic or
    ensemble-mean histories). Derived fields stay None until analysis.
    """

    t: float
    A: float
    T: float
    ranked: RankedBibliography | None = None
    T0: float | None = None
    A0: float | None = None
    X1: float | None = None
    y_m: float | None = None
    alpha: float | None = None
    empty_core: bool = False
    source: str | None = None
    checksum: str | None = None

    @property
    def analyzed(self) -> bool:
        return self.X1 is not None

    @classmethod
    def from_ranked(cls, t: float, ranked: RankedBibliography, **kw) -> "Snapshot":
        return cls(t=float(t), A=ranked.A, T=ranked.T, ranked=ranked, **kw)

    @classmethod
    def from_totals(cls, t: float, A: float, T: float, T0: float, A0: float, X1: float) -> "Snapshot":
        alpha = T / A
        return cls(t=float(t), A=float(A), T=float(T), T0=float(T0), A0=float(A0), X1=float(X1),
                   y_m=ym_analytic(A, rho_from_alpha(alpha)), alpha=alpha, empty_core=T0 <= 0)

    @classmethod
    def from_ensemble(cls, t: float, result: EnsembleResult) -> "Snapshot":
        return cls.from_totals(t, result.A, result.mean_T, result.mean_T0, result.mean_A0,
                               result.mean_X1)

    def summary(self) -> dict:
        keys = ("t", "A", "T", "T0", "A0", "X1", "y_m", "alpha", "empty_core", "source", "checksum")
        return {k: getattr(self, k) for k in keys}


def analytic_snapshot(t: float, alpha: float, A: float) -> Snapshot:
    """Noise-free snapshot straight from the steady-state formulas."""
    zp = analytic_zone_params(alpha, A)
    return Snapshot.from_totals(t, A, alpha * A, zp.T0, zp.A0, zp.X1)


# ---------------------------------------------------------------------------
# ingestion


def file_checksum(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _parse_int(text: str, path, lineno: int, column: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: column {column!r} is not a number: {text!r}") from None
    if not math.isfinite(value) or value != int(value):
        raise ValidationError(f"{path}:{lineno}: column {column!r} must be an integer, got {text!r}")
    return int(value)


def read_table(path) -> tuple[str, RankedBibliography]:
    """Parse a frequency (``n,count``) or ranked (``rank,articles``) CSV."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    lineno, header = rows[0]
    header = tuple(c.strip().lower() for c in header)
    if header not in (FREQUENCY_HEADER, RANKED_HEADER):
        raise ParseError(f"{path}:{lineno}: header must be 'n,count' or 'rank,articles', got {','.join(header)!r}")
    body = rows[1:]
    if not body:
        raise ParseError(f"{path}: no data rows")
    pairs = []
    for lineno, row in body:
        if len(row) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
        pairs.append((lineno, _parse_int(row[0].strip(), path, lineno, header[0]),
                      _parse_int(row[1].strip(), path, lineno, header[1])))

    if header == FREQUENCY_HEADER:
        mapping: dict[int, int] = {}
        for lineno, n, count in pairs:
            if n < 1:
                raise ValidationError(f"{path}:{lineno}: productivity n must be >= 1, got {n}")
            if count < 0:
                raise ValidationError(f"{path}:{lineno}: count must be >= 0, got {count}")
            if n in mapping:
                raise ValidationError(f"{path}:{lineno}: duplicate productivity n={n}")
            mapping[n] = count
        mapping = {n: c for n, c in mapping.items() if c > 0}
        if not mapping:
            raise ValidationError(f"{path}: no journals")
        return "frequency", FrequencyTable.from_mapping(mapping).to_ranked()

    seen = set()
    sizes = []
    for lineno, rank, articles in pairs:
        if rank < 1 or rank in seen:
            raise ValidationError(f"{path}:{lineno}: ranks must be distinct positive integers")
        if articles < 1:
            raise ValidationError(f"{path}:{lineno}: articles must be >= 1, got {articles}")
        seen.add(rank)
        sizes.append(articles)
    return "ranked", RankedBibliography(np.sort(np.array(sizes, dtype=np.int64))[::-1])


def ingest_snapshot(source, t: float) -> Snapshot:
    _, ranked = read_table(source)
    return Snapshot.from_ranked(t, ranked, source=str(source), checksum=file_checksum(source))


def analyze_snapshot(s: Snapshot) -> Snapshot:
    """Fill the zone-split fields from the ranked productivities."""
    if s.ranked is None:
        if s.analyzed:
            return s
        raise ValueError("snapshot has neither ranked data nor derived totals")
    alpha = s.T / s.A
    try:
        rho = rho_from_alpha(alpha)
    except DomainError as exc:
        raise DomainError(f"estimated entry rate T/A = {alpha!r} leaves rho undefined: {exc}") from None
    y_m = ym_analytic(s.A, rho)
    try:
        T0, A0, X1 = empirical_zone_split(s.ranked, y_m)
        empty = False
    except EmptyCoreError:
        T0, A0, X1, empty = 0, 0.0, s.ranked.X1, True
    return dataclasses.replace(s, T0=float(T0), A0=A0, X1=X1, y_m=y_m, alpha=alpha, empty_core=empty)


def read_manifest(path) -> list[tuple[float, Path]]:
    """Read a ``t,path`` history manifest; relative paths resolve against its folder."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if r and any(c.strip() for c in r)]
    if not rows or tuple(c.strip().lower() for c in rows[0][1]) != ("t", "path"):
        raise ParseError(f"{path}:1: manifest header must be 't,path'")
    out = []
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 columns")
        try:
            t = float(row[0])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: time {row[0]!r} is not a number") from None
        p = Path(row[1].strip())
        out.append((t, p if p.is_absolute() else path.parent / p))
    return out


def ingest_manifest(path) -> list[Snapshot]:
    snaps = []
    for t, p in read_manifest(path):
        try:
            snaps.append(analyze_snapshot(ingest_snapshot(p, t)))
        except (ParseError, ValidationError, OSError) as exc:
            raise type(exc)(f"while reading {p}: {exc}") from exc
    return snaps


# ---------------------------------------------------------------------------
# history and forecast


@dataclass(frozen=True)
class HistorySeries:
    snapshots: tuple[Snapshot, ...]
    logistic: LogisticFit
    entry: EntryRateFit
    loglog: dict[str, LogLogFit]

    @property
    def t_range(self) -> tuple[float, float]:
        return self.snapshots[0].t, self.snapshots[-1].t

    @property
    def A_max(self) -> float:
        return max(s.A for s in self.snapshots)

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "zone_split_rule": ZONE_SPLIT_RULE,
            "logistic": self.logistic.to_dict(),
            "entry_rate": self.entry.to_dict(),
            "loglog": {k: v.to_dict() for k, v in self.loglog.items()},
            "snapshots": [s.summary() for s in self.snapshots],
            "checksums": {s.source: s.checksum for s in self.snapshots if s.source},
        }


def fit_entry_rate(points) -> EntryRateFit:
    """Quadratic entry law, or the constant-rate line when the curvature is negligible."""
    try:
        quad = fit_entry_quadratic(points)
    except InfeasibleError:
        return fit_entry_linear(points)
    if 0.5 * quad.k_lin * quad.A_f < QUADRATIC_SIGNIFICANCE * quad.alpha_s:
        return fit_entry_linear(points)
    return quad


def build_history(snapshots: Sequence[Snapshot]) -> HistorySeries:
    snaps = sorted((analyze_snapshot(s) for s in snapshots), key=lambda s: s.t)
    if len(snaps) < 3:
        raise InsufficientDataError(f"logistic fit needs at least 3 snapshots, got {len(snaps)}")
    times = [s.t for s in snaps]
    if len(set(times)) != len(times):
        raise ValueError("snapshot times must be distinct")
    if any(b.A < a.A for a, b in zip(snaps, snaps[1:])):
        raise ValueError("paper count A must not decrease over time")

    logistic = fit_logistic([(s.t, s.A) for s in snaps])
    entry = fit_entry_rate([(s.A, s.T) for s in snaps])
    core = [s for s in snaps if not s.empty_core]
    loglog = {}
    for key in KEY_PARAMS:
        pts = [(s.A, getattr(s, key)) for s in core]
        if len({a for a, _ in pts}) < 2:
            raise InsufficientDataError(
                f"log-log fit of {key} needs at least 2 snapshots with a nonempty core, got {len(pts)}")
        loglog[key] = fit_loglog(pts)
    return HistorySeries(tuple(snaps), logistic, entry, loglog)


@dataclass(frozen=True)
class Forecast:
    t_star: float
    A: float
    T: float
    alpha: float
    T0: float
    A0: float
    X1: float
    curve: CurveModel
    extrapolated: bool = False
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def shape(self):
        return self.curve.shape

    def to_dict(self) -> dict:
        zp = self.curve.zone_params
        eg = self.curve.egghe
        return {
            "t_star": self.t_star,
            "predicted": {"A": self.A, "T": self.T, "alpha": self.alpha,
                          "T0": self.T0, "A0": self.A0, "X1": self.X1},
            "core": {"k": zp.k, "T0_int": zp.T0_int, "y_m": zp.y_m},
            "normal": {"a": eg.a, "b": eg.b, "A1": eg.A1, "T1": eg.T1},
            "curvature_signs": list(self.curve.signs),
            "shape": self.curve.shape.value,
            "extrapolated": self.extrapolated,
            "warnings": list(self.warnings),
        }


def forecast(history: HistorySeries, t_star: float) -> Forecast:
    """Predict the two-zone curve at ``t_star`` from a fitted history."""
    notes = []
    A = float(history.logistic(t_star))
    T = float(history.entry.journals(A))
    if not (A > 0 and T > 0):
        raise DomainError(f"predicted totals are not positive (A={A!r}, T={T!r})")
    T0, A0, X1 = (float(history.loglog[k].predict(A)) for k in KEY_PARAMS)

    if T0 > T:
        notes.append(f"clamped T0 from {T0!r} to T={T!r}")
        T0 = T
    if A0 > A:
        notes.append(f"clamped A0 from {A0!r} to A={A!r}")
        A0 = A
    if X1 > A0:
        notes.append(f"clamped X1 from {X1!r} to A0={A0!r}")
        X1 = A0

    t_lo, t_hi = history.t_range
    extrapolated = False
    if not t_lo <= t_star <= t_hi:
        extrapolated = True
        notes.append(f"t_star={t_star!r} outside observed times [{t_lo!r}, {t_hi!r}]")
    if A > EXTRAPOLATION_FACTOR * history.A_max:
        extrapolated = True
        notes.append(f"predicted A={A!r} exceeds {EXTRAPOLATION_FACTOR} x observed maximum")
    for msg in notes:
        warnings.warn(msg, stacklevel=2)

    alpha = T / A
    rho = rho_from_alpha(alpha)
    zp = ZoneParams(alpha=alpha, rho=rho, y_m=ym_analytic(A, rho), T0=T0, A0=A0, X1=X1)
    curve = assemble_curve(zp, T, A)
    return Forecast(t_star=float(t_star), A=A, T=T, alpha=alpha, T0=T0, A0=A0, X1=X1,
                    curve=curve, extrapolated=extrapolated, warnings=tuple(notes))
