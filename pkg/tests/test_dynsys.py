import numpy as np
import pytest

from lvsweep import dynsys
from lvsweep.errors import ParameterError
from lvsweep.model import derived_ecology

Z_GENERIC = dynsys.DenseState(0.5, 0.1, 0.1, 0.3)


class TestLv2:
    def test_invariant_axis(self, sweep_params):
        sol = dynsys.integrate_lv2(sweep_params, 0.4, 0.0, 30.0,
                                   t_eval=np.linspace(0, 30, 200))
        assert np.all(sol.y[1] == 0.0)
        # n_A relaxes monotonically toward nbar_A = 1 from below
        # (up to integrator wiggle at the plateau)
        assert np.all(np.diff(sol.y[0]) > -1e-8)
        assert sol.y[0, -1] == pytest.approx(1.0, abs=1e-6)

    def test_attracting_equilibrium(self, sweep_params):
        d = derived_ecology(sweep_params)
        sol = dynsys.integrate_lv2(sweep_params, 1.0, 0.05, 60.0)
        assert abs(sol.y[0, -1]) < 1e-4
        assert sol.y[1, -1] == pytest.approx(d.nbar_a, abs=1e-4)

    def test_fixed_point_stays(self, sweep_params):
        sol = dynsys.integrate_lv2(sweep_params, 1.0, 0.0, 50.0,
                                   t_eval=np.linspace(0, 50, 100))
        assert np.max(np.abs(sol.y[0] - 1.0)) < 1e-6
        assert np.max(np.abs(sol.y[1])) < 1e-6


class TestLv4:
    def test_marginals_match_lv2(self, sweep_params):
        te = np.linspace(0, 25, 120)
        sol4 = dynsys.integrate_lv4(sweep_params, 0.4, Z_GENERIC, 25.0, t_eval=te)
        sol2 = dynsys.integrate_lv2(sweep_params, Z_GENERIC.n_A, Z_GENERIC.n_a,
                                    25.0, t_eval=te)
        nA4 = sol4.y[0] + sol4.y[1]
        na4 = sol4.y[2] + sol4.y[3]
        assert np.max(np.abs(nA4 - sol2.y[0])) < 1e-6
        assert np.max(np.abs(na4 - sol2.y[1])) < 1e-6

    def test_r_zero_freezes_proportions(self, sweep_params):
        te = np.linspace(0, 20, 80)
        sol = dynsys.integrate_lv4(sweep_params, 0.0, Z_GENERIC, 20.0, t_eval=te)
        pA = sol.y[0] / (sol.y[0] + sol.y[1])
        pa = sol.y[2] / (sol.y[2] + sol.y[3])
        assert np.max(np.abs(pA - pA[0])) < 1e-8
        assert np.max(np.abs(pa - pa[0])) < 1e-8

    def test_equal_proportions_invariant(self, sweep_params):
        z = dynsys.DenseState(0.18, 0.42, 0.12, 0.28)  # both pools 30% b1
        te = np.linspace(0, 20, 80)
        sol = dynsys.integrate_lv4(sweep_params, 0.7, z, 20.0, t_eval=te)
        pa = sol.y[2] / (sol.y[2] + sol.y[3])
        assert np.max(np.abs(pa - 0.3)) < 1e-8

    def test_direct_integration_identity(self, sweep_params):
        # p_ab1(t) = p_ab1(0) - (p_ab1(0) - p_Ab1(0)) F(z, r, t)
        r = 0.35
        for t_end in (3.0, 10.0, 25.0):
            sol = dynsys.integrate_lv4(sweep_params, r, Z_GENERIC, t_end,
                                       rtol=1e-11, atol=1e-14)
            pa_t = sol.y[2, -1] / (sol.y[2, -1] + sol.y[3, -1])
            F = dynsys.compute_F(sweep_params, r, (Z_GENERIC.n_A, Z_GENERIC.n_a), t_end)
            p0 = Z_GENERIC.n_ab1 / Z_GENERIC.n_a
            pA0 = Z_GENERIC.n_Ab1 / Z_GENERIC.n_A
            assert pa_t == pytest.approx(p0 - (p0 - pA0) * F, abs=1e-6)


class TestChangeOfVariables:
    def test_round_trip(self):
        c = dynsys.to_change_vars(Z_GENERIC)
        back = dynsys.from_change_vars(c)
        for name in ("n_Ab1", "n_Ab2", "n_ab1", "n_ab2"):
            assert getattr(back, name) == pytest.approx(
                getattr(Z_GENERIC, name), abs=1e-10
            )

    def test_dynamics_agree_with_lv4(self, sweep_params):
        r = 0.5
        te = np.linspace(0, 15, 60)
        sol4 = dynsys.integrate_lv4(sweep_params, r, Z_GENERIC, 15.0,
                                    t_eval=te, rtol=1e-11, atol=1e-14)
        c0 = dynsys.to_change_vars(Z_GENERIC)
        solc = dynsys.integrate_change_vars(sweep_params, r, c0, 15.0,
                                            t_eval=te, rtol=1e-11, atol=1e-14)
        pa4 = sol4.y[2] / (sol4.y[2] + sol4.y[3])
        g4 = sol4.y[0] / (sol4.y[0] + sol4.y[1]) - pa4
        assert np.max(np.abs(pa4 - solc.y[3])) < 1e-8
        assert np.max(np.abs(g4 - solc.y[2])) < 1e-8

    def test_requires_positive_marginals(self):
        with pytest.raises(ParameterError):
            dynsys.to_change_vars(dynsys.DenseState(0.0, 0.0, 0.1, 0.2))


class TestFQuadrature:
    def test_zero_recombination(self, sweep_params):
        assert dynsys.compute_F(sweep_params, 0.0, (0.6, 0.4), 20.0) == 0.0
        lim = dynsys.compute_F_limit(sweep_params, 0.0, (0.6, 0.4))
        assert lim.value == 0.0

    def test_monotone_and_bounded(self, sweep_params):
        vals = [
            dynsys.compute_F(sweep_params, 0.4, (0.6, 0.4), t)
            for t in (0.5, 1.0, 2.0, 5.0, 10.0, 30.0)
        ]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_limit_dominates_finite_times(self, sweep_params):
        lim = dynsys.compute_F_limit(sweep_params, 0.4, (0.6, 0.4), tol=1e-9)
        f30 = dynsys.compute_F(sweep_params, 0.4, (0.6, 0.4), 30.0)
        assert 0.0 <= lim.value <= 1.0
        assert lim.value >= f30 - 1e-9
        assert lim.value == pytest.approx(f30, abs=1e-6)
        assert lim.tail_bound <= 1e-9

    def test_no_standing_A_means_no_mixing(self, sweep_params):
        lim = dynsys.compute_F_limit(sweep_params, 0.8, (0.0, 0.4))
        assert lim.value == 0.0

    def test_augmented_lv4_matches_quadrature(self, sweep_params):
        sol = dynsys.integrate_lv4_with_F(sweep_params, 0.4, Z_GENERIC, 12.0,
                                          rtol=1e-11, atol=1e-14)
        direct = dynsys.compute_F(sweep_params, 0.4,
                                  (Z_GENERIC.n_A, Z_GENERIC.n_a), 12.0)
        assert sol.y[5, -1] == pytest.approx(direct, abs=1e-9)


class TestRelaxationTime:
    def test_already_inside(self, sweep_params):
        res = dynsys.relaxation_time(sweep_params, (0.001, 2.0), 0.1)
        assert res.t_eps == 0.0
        assert res.trailing_window == pytest.approx(10.0 / 0.8, rel=1e-12)

    def test_finite_for_generic_start(self, sweep_params):
        res = dynsys.relaxation_time(sweep_params, (0.6, 0.4), 0.1)
        assert 0.0 < res.t_eps < 100.0

    def test_shrinking_eps_grows_time(self, sweep_params):
        t1 = dynsys.relaxation_time(sweep_params, (0.6, 0.4), 0.1).t_eps
        t2 = dynsys.relaxation_time(sweep_params, (0.6, 0.4), 0.05).t_eps
        assert t2 >= t1

    def test_eps_precondition(self, sweep_params):
        with pytest.raises(ParameterError):
            dynsys.relaxation_time(sweep_params, (0.6, 0.4), 5.0)

    def test_solution_stays_inside_after(self, sweep_params):
        eps = 0.1
        res = dynsys.relaxation_time(sweep_params, (0.6, 0.4), eps)
        sol = dynsys.integrate_lv2(sweep_params, 0.6, 0.4, res.t_eps + 30.0)
        ts = np.linspace(res.t_eps, res.t_eps + 30.0, 500)
        ys = sol(ts)
        assert np.all(ys[0] <= eps * eps / 2 + 1e-9)
        assert np.all(ys[1] >= 2.0 - eps / 2 - 1e-9)


class TestCsv(object):
    def test_roundtrip(self, sweep_params, tmp_path):
        sol = dynsys.integrate_lv4_with_F(sweep_params, 0.3, Z_GENERIC, 5.0,
                                          t_eval=np.linspace(0, 5, 20))
        path = tmp_path / "traj.csv"
        dynsys.trajectory_csv(path, sol)
        rows = path.read_text().strip().split("\n")
        assert rows[0] == "t,n_Ab1,n_Ab2,n_ab1,n_ab2,h,F"
        assert len(rows) == 21
        got = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
        assert np.array_equal(got[:, 1:].T, sol.y)
