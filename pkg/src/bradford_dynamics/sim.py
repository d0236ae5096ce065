"""Monte Carlo engine for the Simon-Yule generating process.

One paper is placed per step. With probability alpha(i) it founds a new
journal; otherwise it joins an existing journal chosen with probability
proportional to that journal's weight. The weight is the geometrically
decayed sum of the journal's past increments (decay factor gamma per step),
so gamma = 1 gives plain cumulative advantage (weight == size).

Weights live in a Fenwick (binary indexed) tree for O(log T) selection and
update. Decay is applied lazily: an increment at step tau is stored as
prod_{i<=tau} 1/gamma_i, so relative proportions stay exact without touching
every journal each step. The whole tree is rescaled before that running
scale overflows.
"""
from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np

from .model import (
    FrequencyTable,
    RankedBibliography,
    rho_from_alpha,
    ym_analytic,
)

RESCALE_THRESHOLD = 1e100


class EmptyCoreError(ValueError):
    """No journal exceeds the zone boundary y_m."""


# ---------------------------------------------------------------------------
# entry-rate schedules and configuration


@dataclass(frozen=True)
class Constant:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    def rates(self, steps: int, horizon: int) -> np.ndarray:
        return np.full(steps, self.alpha)

    def mean_rate(self, upto: int, horizon: int) -> float:
        return self.alpha


@dataclass(frozen=True)
class LinearDecreasing:
    """alpha(i) = alpha_s - k i with k = (alpha_s - alpha_f) / A_f, i = 1..A_f."""

    alpha_s: float
    alpha_f: float

    def __post_init__(self):
        for name in ("alpha_s", "alpha_f"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")
        if self.alpha_s < self.alpha_f:
            raise ValueError("alpha_s must be >= alpha_f for a decreasing schedule")

    def slope(self, horizon: int) -> float:
        return (self.alpha_s - self.alpha_f) / horizon

    def rates(self, steps: int, horizon: int) -> np.ndarray:
        i = np.arange(1, steps + 1, dtype=float)
        return np.clip(self.alpha_s - self.slope(horizon) * i, 0.0, 1.0)

    def mean_rate(self, upto: int, horizon: int) -> float:
        return self.alpha_s - self.slope(horizon) * (upto + 1) / 2.0


@dataclass(frozen=True)
class SimConfig:
    """One simulation setting.

    ``decay_gamma_end`` turns the decay factor into a linear-in-step schedule
    from ``decay_gamma`` (first paper) to ``decay_gamma_end`` (last paper).
    """

    entry_schedule: Constant | LinearDecreasing
    target_A: int
    decay_gamma: float = 1.0
    decay_gamma_end: float | None = None
    replications: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.target_A < 1:
            raise ValueError(f"target_A must be >= 1, got {self.target_A!r}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications!r}")
        for name in ("decay_gamma", "decay_gamma_end"):
            g = getattr(self, name)
            if g is not None and not 0.0 < g <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {g!r}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def gammas(self) -> np.ndarray:
        if self.decay_gamma_end is None:
            return np.full(self.target_A, self.decay_gamma)
        return np.linspace(self.decay_gamma, self.decay_gamma_end, self.target_A)

    def zone_alpha(self, A: int) -> float:
        """Entry rate used to place the zone boundary after ``A`` papers."""
        return self.entry_schedule.mean_rate(A, self.target_A)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["entry_schedule"] = {"kind": type(self.entry_schedule).__name__,
                               **dataclasses.asdict(self.entry_schedule)}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        sched = dict(d.pop("entry_schedule"))
        kind = sched.pop("kind")
        schedule = {"Constant": Constant, "LinearDecreasing": LinearDecreasing}[kind](**sched)
        return cls(entry_schedule=schedule, **d)


# ---------------------------------------------------------------------------
# numba kernels


@numba.njit(cache=True, nogil=True)
def _tree_add(tree, i, v):
    i += 1
    n = tree.shape[0]
    while i < n:
        tree[i] += v
        i += i & (-i)


@numba.njit(cache=True, nogil=True)
def _tree_find(tree, target, top_bit):
    # 0-based index of the first slot whose prefix sum exceeds target.
    pos = 0
    step = top_bit
    n = tree.shape[0]
    while step > 0:
        nxt = pos + step
        if nxt < n and tree[nxt] <= target:
            pos = nxt
            target -= tree[nxt]
        step >>= 1
    return pos


@numba.njit(cache=True, nogil=True)
def _advance_weighted(sizes, tree, state, start, stop, u_entry, u_pick, alpha, gamma, top_bit):
    # state = [journal count, scale, stored total]
    n = int(state[0])
    scale = state[1]
    total = state[2]
    for i in range(start, stop):
        scale = scale / gamma[i]
        if n == 0 or u_entry[i] < alpha[i]:
            j = n
            n += 1
            sizes[j] = 1
        else:
            j = _tree_find(tree, u_pick[i] * total, top_bit)
            if j >= n:
                j = n - 1
            sizes[j] += 1
        _tree_add(tree, j, scale)
        total += scale
        if scale > RESCALE_THRESHOLD:
            inv = 1.0 / scale
            for m in range(tree.shape[0]):
                tree[m] *= inv
            total *= inv
            scale = 1.0
    state[0] = n
    state[1] = scale
    state[2] = total


@numba.njit(cache=True, nogil=True)
def _advance_sizes(sizes, tree, state, start, stop, u_entry, u_pick, alpha, top_bit):
    # Plain cumulative advantage: the tree holds integer sizes.
    n = int(state[0])
    total = int(state[1])
    for i in range(start, stop):
        if n == 0 or u_entry[i] < alpha[i]:
            j = n
            n += 1
            sizes[j] = 1
        else:
            j = _tree_find(tree, u_pick[i] * float(total), top_bit)
            if j >= n:
                j = n - 1
            sizes[j] += 1
        _tree_add(tree, j, 1)
        total += 1
    state[0] = n
    state[1] = total


# ---------------------------------------------------------------------------
# single replication


def replication_seed(master_seed: int, index: int) -> int:
    """64-bit seed for replication ``index``, derived by numpy stream splitting."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


class SimonYuleEngine:
    """Resumable state of one replication.

    ``proportional_to="weight"`` is the decayed-weight engine;
    ``proportional_to="size"`` is the plain size-proportional engine, only
    valid when no decay is configured.
    """

    def __init__(self, config: SimConfig, seed: int, proportional_to: str = "weight"):
        if proportional_to not in ("weight", "size"):
            raise ValueError("proportional_to must be 'weight' or 'size'")
        A = config.target_A
        self.config = config
        self.proportional_to = proportional_to
        rng = np.random.Generator(np.random.PCG64(seed))
        self._u_entry = rng.random(A)
        self._u_pick = rng.random(A)
        self._alpha = config.entry_schedule.rates(A, A)
        self._gamma = config.gammas()
        self._sizes = np.zeros(A, dtype=np.int64)
        self._top_bit = 1 << (A.bit_length() - 1)
        self.step = 0
        if proportional_to == "weight":
            self._tree = np.zeros(A + 1, dtype=np.float64)
            self._state = np.array([0.0, 1.0, 0.0])
        else:
            if np.any(self._gamma != 1.0):
                raise ValueError("the size-proportional engine has no decay")
            self._tree = np.zeros(A + 1, dtype=np.int64)
            self._state = np.zeros(2, dtype=np.int64)

    @property
    def n_journals(self) -> int:
        return int(self._state[0])

    @property
    def total_weight(self) -> float:
        """Un-scaled total weight W_k (equals the paper count when gamma = 1)."""
        if self.proportional_to == "size":
            return float(self._state[1])
        return float(self._state[2] / self._state[1])

    def advance(self, stop: int) -> None:
        if not self.step <= stop <= self.config.target_A:
            raise ValueError(f"cannot advance from step {self.step} to {stop}")
        if self.proportional_to == "weight":
            _advance_weighted(self._sizes, self._tree, self._state, self.step, stop,
                              self._u_entry, self._u_pick, self._alpha, self._gamma,
                              self._top_bit)
        else:
            _advance_sizes(self._sizes, self._tree, self._state, self.step, stop,
                           self._u_entry, self._u_pick, self._alpha, self._top_bit)
        self.step = stop

    def sizes(self) -> np.ndarray:
        return self._sizes[: self.n_journals].copy()

    def ranked(self) -> RankedBibliography:
        return RankedBibliography(np.sort(self.sizes())[::-1])


def _checkpoints(config: SimConfig, checkpoints: Sequence[int] | None) -> list[int]:
    if not checkpoints:
        return [config.target_A]
    out = sorted(set(int(c) for c in checkpoints))
    if out[0] < 1 or out[-1] > config.target_A:
        raise ValueError("checkpoints must lie in [1, target_A]")
    return out


def run_replication(config: SimConfig, replication_seed: int, checkpoints: Sequence[int] | None = None,
                    proportional_to: str = "weight"):
    """Simulate ``config.target_A`` papers and return (FrequencyTable, RankedBibliography).

    With ``checkpoints`` a list of such pairs is returned, one per checkpoint.
    """
    engine = SimonYuleEngine(config, replication_seed, proportional_to)
    out = []
    for stop in _checkpoints(config, checkpoints):
        engine.advance(stop)
        ranked = engine.ranked()
        out.append((ranked.frequency(), ranked))
    return out if checkpoints else out[0]


def empirical_zone_split(ranked: RankedBibliography, y_m: float) -> tuple[int, float, float]:
    """Core totals of a ranked bibliography: (T0, A0, X1) for productivities above ``y_m``."""
    sizes = np.asarray(ranked.sizes)
    if sizes.size == 0:
        raise ValueError("ranked bibliography is empty")
    core = sizes[sizes > y_m]
    if core.size == 0:
        raise EmptyCoreError(f"no journal exceeds y_m={y_m!r}")
    return int(core.size), float(np.sum(core)), float(sizes[0])


# ---------------------------------------------------------------------------
# ensembles


def _mean_std(s: np.ndarray, s2: np.ndarray, n: int):
    mean = s / n
    if n < 2:
        return mean, np.zeros_like(mean)
    var = np.maximum(s2 - s * mean, 0.0) / (n - 1)
    return mean, np.sqrt(var)


class _Accumulator:
    # Every per-rank and per-level vector has length A: no replication can
    # hold more than A journals or a journal more than A papers.
    SCALARS = ("T", "T0", "A0", "X1")
    VECTORS = ("freq", "share", "ranked", "cum")

    def __init__(self, A: int, y_m: float):
        self.A = A
        self.y_m = y_m
        self.n = 0
        self.empty_core = 0
        self.max_T = 0
        self.max_size = 0
        self.vec = {k: (np.zeros(A), np.zeros(A)) for k in self.VECTORS}
        self.sc = {k: [0.0, 0.0] for k in self.SCALARS}

    def add(self, ranked: RankedBibliography) -> None:
        A = self.A
        T = ranked.T
        ranked_vec = np.zeros(A)
        ranked_vec[:T] = ranked.sizes
        freq = np.bincount(ranked.sizes, minlength=A + 1)[1:].astype(float)
        cum = np.cumsum(ranked_vec)
        try:
            T0, A0, X1 = empirical_zone_split(ranked, self.y_m)
        except EmptyCoreError:
            T0, A0, X1 = 0, 0.0, ranked.X1
            self.empty_core += 1
        for key, v in zip(self.VECTORS, (freq, freq / T, ranked_vec, cum)):
            s, s2 = self.vec[key]
            s += v
            s2 += v * v
        for key, v in zip(self.SCALARS, (T, T0, A0, X1)):
            self.sc[key][0] += v
            self.sc[key][1] += v * v
        self.max_T = max(self.max_T, T)
        self.max_size = max(self.max_size, int(ranked.sizes[0]))
        self.n += 1

    def result(self) -> "EnsembleResult":
        n = self.n
        vm = {k: _mean_std(*self.vec[k], n) for k in self.VECTORS}
        sm = {k: _mean_std(np.array(s), np.array(s2), n) for k, (s, s2) in self.sc.items()}
        nl, nr = self.max_size, self.max_T
        return EnsembleResult(
            A=self.A, y_m=self.y_m, replications=n, empty_core=self.empty_core,
            mean_frequency=FrequencyTable(np.arange(1, nl + 1), vm["freq"][0][:nl]),
            frequency_std=vm["freq"][1][:nl],
            mean_share=vm["share"][0][:nl], share_std=vm["share"][1][:nl],
            mean_ranked=vm["ranked"][0][:nr], ranked_std=vm["ranked"][1][:nr],
            mean_cumulative=vm["cum"][0][:nr], cumulative_std=vm["cum"][1][:nr],
            **{f"mean_{k}": float(sm[k][0]) for k in self.SCALARS},
            **{f"std_{k}": float(sm[k][1]) for k in self.SCALARS},
        )


@dataclass(frozen=True)
class EnsembleResult:
    """Replication-averaged outputs at one paper count ``A``.

    ``mean_share[n-1]`` is the mean over replications of f(n)/T. Per-rank
    vectors are averaged after zero-padding shorter realizations.
    """

    A: int
    y_m: float
    replications: int
    empty_core: int
    mean_frequency: FrequencyTable
    frequency_std: np.ndarray
    mean_share: np.ndarray
    share_std: np.ndarray
    mean_ranked: np.ndarray
    ranked_std: np.ndarray
    mean_cumulative: np.ndarray
    cumulative_std: np.ndarray
    mean_T: float
    mean_T0: float
    mean_A0: float
    mean_X1: float
    std_T: float
    std_T0: float
    std_A0: float
    std_X1: float
    config: dict | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        d = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, FrequencyTable):
                v = {"n": v.n.tolist(), "count": v.count.tolist()}
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            d[f.name] = v
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleResult":
        kw = dict(d)
        mf = kw["mean_frequency"]
        kw["mean_frequency"] = FrequencyTable(np.array(mf["n"], dtype=np.int64),
                                              np.array(mf["count"], dtype=float))
        for f in dataclasses.fields(cls):
            if f.type == "np.ndarray":
                kw[f.name] = np.array(kw[f.name], dtype=float)
        return cls(**kw)


def run_ensemble(config: SimConfig, checkpoints: Sequence[int] | None = None, threads: int = 1,
                 proportional_to: str = "weight"):
    """Average ``config.replications`` independent replications.

    Replication r is seeded with :func:`replication_seed` (master_seed, r) and
    results are reduced in replication order, so the output does not depend
    on ``threads``. Returns one :class:`EnsembleResult`, or a list of them
    (one per checkpoint) when ``checkpoints`` is given.
    """
    stops = _checkpoints(config, checkpoints)
    accs = []
    for A in stops:
        alpha = config.zone_alpha(A)
        accs.append(_Accumulator(A, ym_analytic(A, rho_from_alpha(alpha))))

    def one(index: int):
        engine = SimonYuleEngine(config, replication_seed(config.master_seed, index), proportional_to)
        snaps = []
        for stop in stops:
            engine.advance(stop)
            snaps.append(engine.ranked())
        return snaps

    def reduce(results: Iterable):
        for snaps in results:
            for acc, ranked in zip(accs, snaps):
                acc.add(ranked)

    indices = range(config.replications)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reduce(pool.map(one, indices))
    else:
        reduce(map(one, indices))

    cfg = config.to_dict()
    out = [dataclasses.replace(acc.result(), config=cfg) for acc in accs]
    return out if checkpoints else out[0]


def expected_journal_count(config: SimConfig, A: int | None = None) -> float:
    """Closed-form journal count sum of alpha(i) over the first A papers.

    For a linear schedule this is alpha_s A - k A**2 / 2 (first paper not
    forced); used as a check on simulated means.
    """
    A = config.target_A if A is None else A
    sched = config.entry_schedule
    if isinstance(sched, Constant):
        return sched.alpha * A
    k = sched.slope(config.target_A)
    return sched.alpha_s * A - 0.5 * k * A * A


def total_weight_fixed_point(gamma: float) -> float:
    """Limit of W_{k+1} = gamma W_k + 1 for gamma < 1."""
    if not 0.0 < gamma < 1.0:
        return math.inf
    return 1.0 / (1.0 - gamma)
