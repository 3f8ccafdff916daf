import numpy as np
import pytest

from helpers import random_system
from oracles import svd_rank
from pelemma import (
    LtiSystem,
    counterexample_run,
    image_equality_check,
    parametrize,
    rank_condition_check,
    simulate,
    trajectory_space_basis,
)
from pelemma.fundamental import io_data_matrix


def uncontrollable_system():
    # second mode is unreachable from u but visible in y
    A = np.diag([0.5, -0.3])
    B = np.array([[1.0], [0.0]])
    C = np.array([[1.0, 1.0]])
    return LtiSystem(A, B, C, [[0.0]])


class TestRankCondition:
    def test_pe_input_controllable(self, rng):
        for seed in range(10):
            sys = random_system(seed, n=3, m=2, p=2)
            L = 3
            u = rng.standard_normal((60, 2))
            x, _ = simulate(sys, rng.standard_normal(3), u)
            ok, smin = rank_condition_check(x, u, L)
            assert ok and smin > 0

    def test_wide_matrix_fails(self, chain):
        u = np.ones((4, 1))
        x, _ = simulate(chain, [0, 0], u)
        ok, smin = rank_condition_check(x, u, 3)
        assert not ok and smin == 0.0


class TestImageEquality:
    def test_basis_shape(self, chain):
        B = trajectory_space_basis(chain, 3)
        assert B.W.shape == (3 + 6, 3 + 2)
        u_bar, x_bar = B.split(np.arange(5.0))
        assert u_bar.shape == (3, 1) and x_bar.shape == (2,)

    def test_basis_generates_trajectories(self, rng):
        sys = random_system(3, n=2, m=1, p=2)
        B = trajectory_space_basis(sys, 4)
        u = rng.standard_normal((4, 1))
        x0 = rng.standard_normal(2)
        _, y = simulate(sys, x0, u)
        np.testing.assert_allclose(B.W @ np.concatenate([u.ravel(), x0]),
                                   np.concatenate([u.ravel(), y.ravel()]), atol=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_rank_condition_implies_equality(self, seed):
        rng = np.random.default_rng(seed)
        sys = random_system(seed, n=3, m=2, p=2)
        u = rng.standard_normal((80, 2))
        x0 = rng.standard_normal(3)
        x, _ = simulate(sys, x0, u)
        for L in (2, 4):
            assert rank_condition_check(x, u, L)[0]
            assert image_equality_check(sys, x0, u, L)

    def test_uncontrollable_fails(self, rng):
        sys = uncontrollable_system()
        u = rng.standard_normal((50, 1))
        x0 = np.array([1.0, 0.0])
        L = 3
        assert not image_equality_check(sys, x0, u, L)
        x, y = simulate(sys, x0, u)
        assert not rank_condition_check(x, u, L)[0]
        # the data never moves the unreachable mode, so its free response is missing
        H = io_data_matrix(u, y, L)
        assert svd_rank(H) == 1 * L + 1


class TestParametrize:
    def test_recovers_new_trajectory(self, rng):
        sys = random_system(5, n=2, m=1, p=1)
        u = rng.standard_normal((40, 1))
        _, y = simulate(sys, rng.standard_normal(2), u)
        L = 4
        ut = rng.standard_normal((L, 1))
        _, yt = simulate(sys, rng.standard_normal(2), ut)
        g, resid = parametrize(u, y, L, ut, yt)
        assert resid <= 1e-9
        assert g.shape == (40 - L + 1,)

    def test_non_trajectory_has_residual(self, rng):
        sys = random_system(6, n=2, m=1, p=1)
        u = rng.standard_normal((40, 1))
        _, y = simulate(sys, np.zeros(2), u)
        L = 5
        # L > n free outputs cannot all be matched
        _, resid = parametrize(u, y, L, np.zeros((L, 1)), rng.standard_normal((L, 1)))
        assert resid > 1e-3

    def test_bad_target(self, rng):
        with pytest.raises(ValueError):
            parametrize(np.ones((10, 1)), np.ones((10, 1)), 2, np.ones(3), np.ones(2))


class TestCounterexample:
    def test_exact_values(self):
        rep = counterexample_run()
        assert rep.falsified and rep.verdict == "necessity claim falsified"
        np.testing.assert_array_equal(rep.d, [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(rep.M, [[0, 1, 0], [1, 0, 0]])
        np.testing.assert_array_equal(rep.Mu_first, [0.0, 1.0])
        assert rep.Mu_rest_max == 0.0
        assert rep.mu_gram_rank == 1
        assert [p["rank"] for p in rep.probes] == [2, 2, 2]
        assert rep.observability_rank == 1
        assert rep.realization_order == 1
        assert rep.reduced_outputs == (0.0, 1.0)

    def test_probe_outputs(self):
        rep = counterexample_run()
        H = np.array(rep.probes[1]["H1_y"])
        np.testing.assert_array_equal(H[:, :3], [[1, 1, 0], [2, 1, 1]])

    def test_record_and_table(self):
        rep = counterexample_run(N=8)
        rec = rep.to_record()
        assert rec["N"] == 8 and "note" in rec
        text = rep.table()
        assert "necessity claim falsified" in text
        rows = [ln for ln in text.splitlines() if ln.rstrip().endswith("|           2")]
        assert len(rows) == 3

    def test_short(self):
        with pytest.raises(ValueError):
            counterexample_run(N=3)
