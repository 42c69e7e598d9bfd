import numpy as np
import pytest

from lvsweep import bdp, genealogy, ssa
from lvsweep.errors import InsufficientSampleError
from lvsweep.model import EcologyParams, PopState, ScalingParams
from lvsweep.stats import percentile_bootstrap, wilson_interval

from oracles import coalescence_by_enumeration, m_recombination_by_enumeration


class TestCoalescenceFormula:
    def test_single_parent_always_coalesces(self, sweep_params):
        # r=0, one a-individual: the sampled pair must be newborn+donor
        p = genealogy.coalescence_probability(sweep_params, 0.0, 5, 1, "a", "a")
        assert p == pytest.approx(1.0, rel=1e-12)

    def test_hand_evaluated_symmetric(self):
        params = EcologyParams(f_A=1.0, f_a=1.0)
        p_aa = genealogy.coalescence_probability(params, 1.0, 1, 1, "a", "a")
        p_aA = genealogy.coalescence_probability(params, 1.0, 1, 1, "a", "A")
        assert p_aa == pytest.approx(0.5, rel=1e-12)
        assert p_aA == pytest.approx(0.25, rel=1e-12)

    def test_three_individual_enumeration(self):
        params = EcologyParams(f_A=1.3, f_a=0.7)
        pop = [("A", "b1"), ("A", "b2"), ("a", "b1")]
        for r in (0.0, 0.37, 1.0):
            for a1, a2 in (("A", "A"), ("A", "a"), ("a", "a"), ("a", "A")):
                want = coalescence_by_enumeration(pop, 1.3, 0.7, r, a1, a2)
                got = genealogy.coalescence_probability(params, r, 2, 1, a1, a2)
                assert got == pytest.approx(want, abs=1e-12)

    def test_randomized_enumeration(self):
        rng = np.random.default_rng(424242)
        for _ in range(40):
            f_A = float(rng.uniform(0.2, 3.0))
            f_a = float(rng.uniform(0.2, 3.0))
            r = float(rng.uniform(0.0, 1.0))
            n_A = int(rng.integers(1, 5))
            n_a = int(rng.integers(1, 5))
            pop = [("A", "b1")] * n_A + [("a", "b1")] * n_a
            params = EcologyParams(f_A=f_A, f_a=f_a)
            for a1, a2 in (("A", "A"), ("a", "a"), ("A", "a"), ("a", "A")):
                want = coalescence_by_enumeration(pop, f_A, f_a, r, a1, a2)
                got = genealogy.coalescence_probability(params, r, n_A, n_a, a1, a2)
                assert got == pytest.approx(want, abs=1e-12)


class TestMRecombinationFormula:
    def test_zero_recombination(self, sweep_params):
        assert genealogy.m_recombination_probability(sweep_params, 0.0, 3, 4, "a") == 0.0

    def test_hand_evaluated(self):
        params = EcologyParams(f_A=1.0, f_a=1.0)
        got = genealogy.m_recombination_probability(params, 1.0, 1, 1, "a")
        assert got == pytest.approx(0.25, rel=1e-12)

    def test_randomized_enumeration(self):
        rng = np.random.default_rng(515151)
        for _ in range(40):
            f_A = float(rng.uniform(0.2, 3.0))
            f_a = float(rng.uniform(0.2, 3.0))
            r = float(rng.uniform(0.0, 1.0))
            n_A = int(rng.integers(1, 5))
            n_a = int(rng.integers(1, 5))
            pop = [("A", "b1")] * n_A + [("a", "b2")] * n_a
            params = EcologyParams(f_A=f_A, f_a=f_a)
            for alpha in ("A", "a"):
                want = m_recombination_by_enumeration(pop, f_A, f_a, r, alpha)
                got = genealogy.m_recombination_probability(params, r, n_A, n_a, alpha)
                assert got == pytest.approx(want, abs=1e-12)

    def test_resident_band_sandwich(self, sweep_params):
        # with n_A = nbar_A K and f_A n_A dominating, p_a^r ~ r/(k+1)
        K = 100_000
        n_A = K  # nbar_A = 1
        r = 0.37
        for k in (1, 10, 100):
            got = genealogy.m_recombination_probability(sweep_params, r, n_A, k, "a")
            assert got <= r / (k + 1) + 1e-15
            assert got >= (1.0 - 0.01) * r / (k + 1) * (
                1.0 - 2.0 * k / K
            )  # crude lower bound for f_a k << f_A n_A


class TestTaggedSweep:
    def test_clonal_inheritance_without_recombination(self, sweep_params):
        scaling = ScalingParams(K=200, r_K=0.0)
        hits = 0
        for i in range(30):
            cfg = ssa.SimConfig(
                initial_state=ssa.hard_initial_state(sweep_params, 200, 0.5),
                seed=ssa.replicate_seed(2600, i),
            )
            res = genealogy.run_tagged_sweep(sweep_params, scaling, cfg)
            assert res.tag_violations == 0
            if res.stats_eps is not None:
                hits += 1
                assert res.stats_eps.frac_zero_mrec == 1.0
                assert res.stats_eps.frac_b1 == 1.0
        assert hits >= 5

    def test_count_projection_matches_count_kernel(self, sweep_params):
        scaling = ScalingParams(K=150, r_K=0.4)
        init = ssa.hard_initial_state(sweep_params, 150, 0.5)
        for i in range(10):
            seed = ssa.replicate_seed(880, i)
            cfg = ssa.SimConfig(initial_state=init, seed=seed, stop_at_eps=True)
            out, _ = ssa.run_sweep(sweep_params, scaling, cfg)
            res = genealogy.run_tagged_sweep(sweep_params, scaling, cfg,
                                             stop_at_eps=True)
            assert res.outcome.final_state == out.final_state
            assert res.outcome.t_final == out.t_final
            assert res.outcome.events_used == out.events_used
            assert res.outcome.status == out.status

    def test_per_birth_m_recombination_frequency(self, sweep_params):
        # one event from a frozen state; a fresh pool has all-zero counts,
        # so a nonzero total after an a-birth marks an m-recombination
        n_A, n_a = 12, 4
        r = 0.6
        init = PopState(6, 6, 2, 2)
        scaling = ScalingParams(K=50, r_K=r)
        den = sweep_params.f_A * n_A + sweep_params.f_a * n_a
        want = n_A * r * sweep_params.f_A / den  # P(m-rec | a-birth)
        hits = trials = 0
        for i in range(4000):
            cfg = ssa.SimConfig(initial_state=init,
                                seed=ssa.replicate_seed(1190, i), max_events=1)
            res = genealogy.run_tagged_sweep(sweep_params, scaling, cfg,
                                             stop_at_eps=False)
            state = res.outcome.final_state
            if state.n_a == n_a + 1:  # the single event was an a-birth
                trials += 1
                frac_nonzero = 1.0 - res.stats_final.frac_zero_mrec
                hits += round(frac_nonzero * (n_a + 1))
        assert trials > 800
        lo, hi = wilson_interval(hits, trials)
        assert lo <= want <= hi

    def test_zero_mrec_fraction_decreases_with_recombination(self, sweep_params):
        # nonincreasing in r_K over a fixed seed ensemble, at 95% bootstrap
        K = 400
        intervals = {}
        for r in (0.05, 0.5):
            scaling = ScalingParams(K=K, r_K=r)
            vals = []
            for i in range(60):
                cfg = ssa.SimConfig(
                    initial_state=ssa.hard_initial_state(sweep_params, K, 0.5),
                    seed=ssa.replicate_seed(7771, i),
                )
                res = genealogy.run_tagged_sweep(sweep_params, scaling, cfg)
                if res.stats_eps is not None:
                    vals.append(res.stats_eps.frac_zero_mrec)
            intervals[r] = percentile_bootstrap(vals, seed=1441)
        assert intervals[0.5][1] < intervals[0.05][0]


@pytest.fixture(scope="module")
def stats(sweep_params):
    scaling = ScalingParams(K=400, r_K=0.1)
    return genealogy.jump_statistics(sweep_params, scaling, 0.1, 200, seed_base=5202)


class TestJumpStatistics:
    def test_every_conditioned_path_upcrosses_each_level(self, stats):
        M = stats.threshold
        assert np.all(stats.U[:, 1:M] >= 1)

    def test_final_upcrossing_is_single(self, stats):
        assert np.all(stats.U[:, stats.threshold - 1] == 1)

    def test_downcrossing_identities(self, stats):
        M = stats.threshold
        assert np.all(stats.D[:, 1] == 0)
        for k in range(2, M):
            assert np.all(stats.D[:, k] == stats.U[:, k - 1] - 1)

    def test_mean_upcrossings_bounded(self, stats, sweep_params):
        rates = bdp.coupling_rates(sweep_params, stats.eps)
        bound = 2.0 / rates.s_minus**2
        assert np.all(stats.U_mean[1:stats.threshold] <= bound)

    def test_refuses_insufficient_sample(self, sweep_params):
        scaling = ScalingParams(K=400, r_K=0.1)
        with pytest.raises(InsufficientSampleError):
            genealogy.jump_statistics(sweep_params, scaling, 0.1, 10, seed_base=1)


class TestSplitUpcrossings:
    def test_split_sums_to_total(self, sweep_params):
        scaling = ScalingParams(K=100, r_K=0.1)
        cfg = ssa.SimConfig(
            initial_state=ssa.hard_initial_state(sweep_params, 100, 0.5),
            seed=ssa.replicate_seed(31007, 3), record_mode="full",
            max_events=200_000, stop_at_eps=True, collect_jumps=True,
        )
        out, traj = ssa.run_sweep(sweep_params, scaling, cfg)
        if out.status != "eps_hit":
            pytest.skip("path did not condition; seed choice")
        na = traj.n[:, 2] + traj.n[:, 3]
        levels = [int(na[0])] + [int(v) for i, v in enumerate(na[1:]) if v != na[i]]
        j = 2
        zeta, U1, U2 = genealogy.split_upcrossing_counts(levels, j)
        total = [u1 + u2 for u1, u2 in zip(U1, U2)]
        M = ssa.eps_threshold(scaling, 0.1)
        for k in range(1, M):
            assert total[k] == out.jump_u[k]
        # before the last visit to j, no upcrossing from any level >= j can
        # have happened without a later downcrossing; sanity: U2 counts the
        # final ascent, so U2[k] >= 1 for k >= j
        for k in range(j, M):
            assert U2[k] >= 1
