import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bradford_dynamics.model import RankedBibliography, rho_from_alpha, x1_analytic, yule_pmf
from bradford_dynamics.sim import (
    Constant,
    EmptyCoreError,
    EnsembleResult,
    LinearDecreasing,
    SimConfig,
    SimonYuleEngine,
    empirical_zone_split,
    expected_journal_count,
    replication_seed,
    run_ensemble,
    run_replication,
)


def brute_force_sizes(config: SimConfig, seed: int) -> np.ndarray:
    """Direct simulation: explicit weights, decayed every step, linear search."""
    A = config.target_A
    rng = np.random.Generator(np.random.PCG64(seed))
    u_entry, u_pick = rng.random(A), rng.random(A)
    alpha = config.entry_schedule.rates(A, A)
    gamma = config.gammas()
    sizes, weights = [], []
    for i in range(A):
        if not sizes or u_entry[i] < alpha[i]:
            j = len(sizes)
            sizes.append(0)
            weights.append(0.0)
        else:
            cum = np.cumsum(weights)
            j = min(int(np.searchsorted(cum, u_pick[i] * cum[-1], side="right")), len(sizes) - 1)
        weights = [w * gamma[i] for w in weights]
        weights[j] += 1.0
        sizes[j] += 1
    return np.array(sizes)


class TestConfig:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, 1.2])
    def test_constant_rejects(self, alpha):
        with pytest.raises(ValueError):
            Constant(alpha)

    def test_linear_rejects_increasing(self):
        with pytest.raises(ValueError):
            LinearDecreasing(0.1, 0.3)

    @pytest.mark.parametrize("kw", [dict(decay_gamma=0.0), dict(decay_gamma=1.1),
                                    dict(target_A=0), dict(replications=0), dict(master_seed=-1)])
    def test_config_rejects(self, kw):
        with pytest.raises(ValueError):
            SimConfig(**{"entry_schedule": Constant(0.1), "target_A": 10, **kw})

    def test_linear_schedule(self):
        rates = LinearDecreasing(0.3, 0.1).rates(10_000, 10_000)
        assert rates[0] == pytest.approx(0.3 - 2e-5)
        assert rates[-1] == pytest.approx(0.1)

    def test_dict_round_trip(self):
        cfg = SimConfig(LinearDecreasing(0.3, 0.1), 500, decay_gamma=0.95, decay_gamma_end=1.0,
                        replications=3, master_seed=7)
        assert SimConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


class TestReplication:
    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 0.99), st.integers(1, 3000), st.sampled_from([1.0, 0.9, 0.5]),
           st.integers(0, 2**64 - 1))
    def test_conservation(self, alpha, A, gamma, seed):
        cfg = SimConfig(Constant(alpha), A, decay_gamma=gamma)
        freq, ranked = run_replication(cfg, seed)
        assert freq.A == A == ranked.A
        assert freq.T == ranked.T
        assert np.all(np.diff(ranked.sizes) <= 0)

    def test_first_paper_founds_a_journal(self):
        freq, ranked = run_replication(SimConfig(Constant(0.001), 1), 3)
        assert ranked.T == 1 and freq.as_dict() == {1: 1.0}

    def test_near_pure_innovation(self):
        _, ranked = run_replication(SimConfig(Constant(0.999), 100), 5)
        assert ranked.T >= 97
        assert ranked.X1 <= 2

    @pytest.mark.parametrize("config", [
        SimConfig(Constant(0.1), 400),
        SimConfig(Constant(0.2), 400, decay_gamma=0.9),
        SimConfig(LinearDecreasing(0.4, 0.1), 400, decay_gamma=0.8, decay_gamma_end=1.0),
    ])
    def test_matches_brute_force(self, config):
        for seed in (1, 2, 3):
            _, ranked = run_replication(config, seed)
            engine = SimonYuleEngine(config, seed)
            engine.advance(config.target_A)
            np.testing.assert_array_equal(engine.sizes(), brute_force_sizes(config, seed))

    def test_size_engine_is_bit_identical_at_gamma_one(self):
        cfg = SimConfig(Constant(0.1), 5000)
        for rep in range(5):
            seed = replication_seed(99, rep)
            a = SimonYuleEngine(cfg, seed, "weight")
            b = SimonYuleEngine(cfg, seed, "size")
            a.advance(5000)
            b.advance(5000)
            np.testing.assert_array_equal(a.sizes(), b.sizes())
            assert a.total_weight == b.total_weight == 5000

    def test_size_engine_refuses_decay(self):
        with pytest.raises(ValueError):
            SimonYuleEngine(SimConfig(Constant(0.1), 10, decay_gamma=0.9), 1, "size")

    def test_total_weight_recursion_and_fixed_point(self):
        gamma = 0.95
        engine = SimonYuleEngine(SimConfig(Constant(0.1), 10_000, decay_gamma=gamma), 17)
        W = 0.0
        for k in range(1, 51):
            engine.advance(k)
            W = gamma * W + 1.0
            assert engine.total_weight == pytest.approx(W, rel=1e-12)
        engine.advance(500)
        assert engine.total_weight == pytest.approx(20.0, abs=1e-6)
        # Past ~4490 steps the running scale passes 1e100 and is renormalised.
        engine.advance(10_000)
        assert engine.total_weight == pytest.approx(20.0, abs=1e-6)
        assert engine._state[1] < 1e100

    def test_checkpoints_are_prefixes_of_one_run(self):
        cfg = SimConfig(Constant(0.2), 2000)
        snaps = run_replication(cfg, 8, checkpoints=[500, 2000])
        assert [r.A for _, r in snaps] == [500, 2000]
        final = run_replication(cfg, 8)
        np.testing.assert_array_equal(snaps[-1][1].sizes, final[1].sizes)


class TestZoneSplit:
    def test_split(self):
        assert empirical_zone_split(RankedBibliography(np.array([50, 20, 8, 3, 1, 1])), 10) == (2, 70.0, 50.0)

    def test_empty_core(self):
        with pytest.raises(EmptyCoreError):
            empirical_zone_split(RankedBibliography(np.array([5, 4, 3])), 10)


class TestEnsemble:
    def test_single_member_equals_replication(self):
        cfg = SimConfig(Constant(0.15), 3000, replications=1, master_seed=5)
        res = run_ensemble(cfg)
        freq, ranked = run_replication(cfg, replication_seed(5, 0))
        np.testing.assert_array_equal(res.mean_ranked, ranked.sizes)
        assert {n: c for n, c in res.mean_frequency.as_dict().items() if c} == freq.as_dict()
        assert res.mean_T == ranked.T
        assert res.mean_X1 == ranked.X1

    def test_deterministic_and_thread_independent(self):
        cfg = SimConfig(Constant(0.1), 2000, decay_gamma=0.97, replications=40, master_seed=123)
        a = run_ensemble(cfg)
        b = run_ensemble(cfg, threads=3)
        assert a.to_json() == b.to_json()

    def test_replication_seeds_differ(self):
        seeds = {replication_seed(0, r) for r in range(1000)}
        assert len(seeds) == 1000

    def test_summary_invariants(self):
        res = run_ensemble(SimConfig(Constant(0.1), 3000, replications=50, master_seed=3))
        assert np.all(np.diff(res.mean_ranked) <= 1e-12)
        assert res.mean_cumulative[0] == pytest.approx(res.mean_X1)
        assert res.mean_cumulative[-1] == pytest.approx(3000)
        assert res.mean_frequency.A == pytest.approx(3000)
        assert res.mean_frequency.T == pytest.approx(res.mean_T)

    def test_json_round_trip(self):
        res = run_ensemble(SimConfig(Constant(0.3), 500, replications=5, master_seed=1))
        back = EnsembleResult.from_dict(json.loads(res.to_json()))
        assert back.to_json() == res.to_json()

    @pytest.mark.slow
    def test_constant_rate_statistics(self):
        res = run_ensemble(SimConfig(Constant(0.1), 10_000, replications=1000, master_seed=77))
        assert res.mean_T == pytest.approx(1000, rel=0.02)
        share1 = res.mean_frequency.count[0] / res.mean_T
        assert share1 == pytest.approx(yule_pmf(1, rho_from_alpha(0.1)), rel=0.02)
        assert res.mean_X1 == pytest.approx(x1_analytic(1e4, rho_from_alpha(0.1)), rel=0.20)

    @pytest.mark.slow
    def test_aging_shrinks_top_journal(self):
        base = dict(entry_schedule=Constant(0.1), target_A=10_000, replications=100, master_seed=4)
        aged = run_ensemble(SimConfig(decay_gamma=0.95, **base))
        plain = run_ensemble(SimConfig(**base))
        assert aged.mean_X1 < 0.5 * plain.mean_X1

    @pytest.mark.slow
    def test_decreasing_rate_journal_count(self):
        cfg = SimConfig(LinearDecreasing(0.3, 0.1), 10_000, replications=200, master_seed=6)
        assert expected_journal_count(cfg) == pytest.approx(2000)
        assert run_ensemble(cfg).mean_T == pytest.approx(2000, rel=0.03)
