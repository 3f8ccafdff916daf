import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_system
from oracles import (
    charpoly_via_eigs,
    markov_by_impulse,
    pbh_controllable,
    poly_residual,
    recurrence,
    svd_rank,
)
from pelemma import (
    LtiSystem,
    annihilating_polynomial,
    controllability_matrix,
    delay_input,
    extend_to_state_output,
    is_controllable,
    is_output_reachable,
    markov_parameters,
    relative_degree,
    simulate,
)
from pelemma.sweep import RandomModelSpec, generate_system


def impulse(N, m=1):
    u = np.zeros((N, m))
    u[0, 0] = 1.0
    return u


class TestLtiSystem:
    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            LtiSystem(np.eye(2), np.ones((3, 1)), np.eye(2), np.zeros((2, 1)))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            LtiSystem([[np.nan]], [[1.0]], [[1.0]], [[0.0]])

    def test_static_system(self, static_identity):
        assert static_identity.dims == (0, 2, 2)

    def test_matrices_are_read_only(self, chain):
        with pytest.raises(ValueError):
            chain.A[0, 0] = 3.0


class TestSimulate:
    @pytest.mark.parametrize("a,b", [(0.0, 0.0), (1.0, 2.0), (-3.0, 5.0)])
    def test_chain_impulse_output(self, chain, a, b):
        _, y = simulate(chain, [a, b], impulse(6))
        expected = np.array([[a, b], [1, a], [0, 1], [0, 0], [0, 0], [0, 0]], dtype=float)
        np.testing.assert_array_equal(y, expected)

    def test_zero_dynamics(self):
        sys = random_system(3)
        x, y = simulate(sys, np.zeros(3), np.zeros((15, 2)))
        assert not np.any(x) and not np.any(y)

    def test_matches_recurrence(self, rng):
        sys = random_system(11, n=3, m=2, p=2)
        x0, u = rng.standard_normal(3), rng.standard_normal((20, 2))
        _, y = simulate(sys, x0, u)
        ref = recurrence(sys.A, sys.B, sys.C, sys.D, x0, u)
        np.testing.assert_allclose(y, ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))

    def test_deterministic(self, rng):
        sys = random_system(5)
        x0, u = rng.standard_normal(3), rng.standard_normal((30, 2))
        a = simulate(sys, x0, u)
        b = simulate(sys, x0, u)
        assert a[1].tobytes() == b[1].tobytes()

    def test_rejects_bad_input_dim(self, chain):
        with pytest.raises(ValueError):
            simulate(chain, [0, 0], np.zeros((5, 2)))
        with pytest.raises(ValueError):
            simulate(chain, [0, 0, 0], np.zeros((5, 1)))


class TestMarkov:
    def test_chain(self, chain):
        G = markov_parameters(chain)
        np.testing.assert_array_equal(G[0], np.zeros((2, 1)))
        np.testing.assert_array_equal(G[1], [[1.0], [0.0]])
        np.testing.assert_array_equal(G[2], [[0.0], [1.0]])
        assert G.stacked.shape == (2, 3)

    def test_static(self):
        D = np.array([[1.0, 2.0]])
        sys = LtiSystem(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((1, 0)), D)
        np.testing.assert_array_equal(markov_parameters(sys).stacked, D)

    def test_against_impulse_response(self):
        sys = random_system(2, n=4, m=2, p=3, require_output_reachable=False)
        ref = markov_by_impulse(sys.A, sys.B, sys.C, sys.D, 5)
        for got, want in zip(markov_parameters(sys).blocks, ref):
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


class TestAnnihilatingPolynomial:
    def test_chain(self, chain):
        np.testing.assert_array_equal(annihilating_polynomial(chain), [0.0, 0.0, 1.0])

    def test_scalar_zero(self):
        np.testing.assert_array_equal(annihilating_polynomial(np.zeros((1, 1))), [0.0, 1.0])

    def test_static_convention(self, static_identity):
        np.testing.assert_array_equal(annihilating_polynomial(static_identity), [1.0])

    def test_random_residual(self, rng):
        A = rng.standard_normal((4, 4))
        d = annihilating_polynomial(A)
        assert abs(np.linalg.norm(d) - 1) <= 1e-12
        assert np.linalg.norm(poly_residual(d, A)) <= 1e-8 * np.linalg.norm(A) ** 4
        assert d[-1] != 0

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_matches_eigenvalue_charpoly(self, n, seed):
        A = np.random.default_rng(seed).standard_normal((n, n))
        c = charpoly_via_eigs(A)
        np.testing.assert_allclose(annihilating_polynomial(A), c / np.linalg.norm(c), atol=1e-9)


class TestControllability:
    def test_chain(self, chain):
        np.testing.assert_array_equal(controllability_matrix(chain), np.eye(2))
        assert is_controllable(chain)

    def test_zero_input_matrix(self):
        sys = LtiSystem(np.eye(2), np.zeros((2, 1)), np.eye(2), np.zeros((2, 1)))
        assert not is_controllable(sys)

    def test_against_pbh(self):
        rng = np.random.default_rng(3)
        for trial in range(40):
            A = rng.standard_normal((3, 3))
            B = rng.standard_normal((3, 1))
            if trial % 2:
                # make one mode unreachable
                A[2, :2] = 0.0
                B[2] = 0.0
            sys = LtiSystem(A, B, np.ones((1, 3)), np.zeros((1, 1)))
            assert is_controllable(sys) == pbh_controllable(A, B)


class TestOutputReachability:
    def test_chain(self, chain):
        assert svd_rank(markov_parameters(chain).stacked) == 2
        assert is_output_reachable(chain)

    def test_zero_output(self):
        sys = LtiSystem(np.eye(2), np.ones((2, 1)), np.zeros((2, 2)), np.zeros((2, 1)))
        assert not is_output_reachable(sys)

    def test_too_many_outputs(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            sys = LtiSystem(
                0.5 * rng.standard_normal((1, 1)),
                rng.standard_normal((1, 1)),
                rng.standard_normal((3, 1)),
                rng.standard_normal((3, 1)),
            )
            assert not is_output_reachable(sys)


class TestExtension:
    def test_chain_markov(self, chain):
        G = markov_parameters(extend_to_state_output(chain))
        np.testing.assert_array_equal(G[0], [[0], [0], [1]])
        np.testing.assert_array_equal(G[1], [[1], [0], [0]])
        np.testing.assert_array_equal(G[2], [[0], [1], [0]])

    def test_markov_structure(self):
        sys = random_system(9, n=3, m=2, p=1)
        ext = extend_to_state_output(sys)
        stacked = markov_parameters(ext).stacked
        n, m = 3, 2
        np.testing.assert_allclose(stacked[:n, m:], controllability_matrix(sys), atol=1e-14)
        np.testing.assert_array_equal(stacked[:n, :m], 0)
        np.testing.assert_array_equal(stacked[n:, :m], np.eye(m))
        np.testing.assert_array_equal(stacked[n:, m:], 0)

    def test_rejects_static(self, static_identity):
        with pytest.raises(ValueError):
            extend_to_state_output(static_identity)

    def test_reachable_iff_controllable(self):
        rng = np.random.default_rng(50)
        for trial in range(50):
            A = rng.standard_normal((3, 3))
            B = rng.standard_normal((3, 1))
            if trial % 3 == 0:
                A[2, :2] = 0.0
                B[2] = 0.0
            sys = LtiSystem(A, B, np.ones((1, 3)), np.zeros((1, 1)))
            assert is_output_reachable(extend_to_state_output(sys)) == is_controllable(sys)


class TestRelativeDegree:
    def test_chain(self, chain):
        assert relative_degree(chain) == 1

    def test_feedthrough(self):
        sys = random_system(1, zero_feedthrough_prob=0.0)
        assert relative_degree(sys) == 0

    def test_all_zero(self):
        sys = LtiSystem(np.eye(2), np.ones((2, 1)), np.zeros((1, 2)), np.zeros((1, 1)))
        assert relative_degree(sys) == 3

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_delay_composition(self, r):
        base = generate_system(RandomModelSpec(2, 2, 2, zero_feedthrough_prob=0.0), r)
        sys = delay_input(base, r)
        assert sys.n == 2 + 2 * r
        assert relative_degree(sys) == r
        G = markov_parameters(sys)
        for i in range(r):
            assert not np.any(G[i])
        np.testing.assert_array_equal(G[r], base.D)
