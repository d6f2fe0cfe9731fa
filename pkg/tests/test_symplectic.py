from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from gaussnogo import symplectic as sy

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def eig_oracle(gamma):
    """Symplectic eigenvalues from the non-symmetric spectrum of i Omega gamma."""
    omega = sy.symplectic_form(sy.n_modes(gamma))
    ev = np.linalg.eigvals(1j * omega @ gamma)
    return np.sort(np.abs(ev.real))[0::2]


class TestSymplecticForm:
    def test_single_mode(self):
        assert np.array_equal(sy.symplectic_form(1), [[0, 1], [-1, 0]])

    def test_two_modes_block_diagonal(self):
        omega = sy.symplectic_form(2)
        expected = np.zeros((4, 4))
        expected[:2, :2] = [[0, 1], [-1, 0]]
        expected[2:, 2:] = [[0, 1], [-1, 0]]
        assert np.array_equal(omega, expected)

    def test_squares_to_minus_identity(self):
        omega = sy.symplectic_form(3)
        assert np.array_equal(omega @ omega, -np.eye(6))

    @pytest.mark.parametrize("n", [0, -1, 1.5])
    def test_rejects_bad_mode_count(self, n):
        with pytest.raises(ValueError):
            sy.symplectic_form(n)


class TestElementaryGates:
    def test_phase_shifter_zero(self):
        assert np.array_equal(sy.phase_shifter(0.0), np.eye(2))

    def test_phase_shifter_quarter_turn(self):
        np.testing.assert_allclose(sy.phase_shifter(np.pi / 2), [[0, 1], [-1, 0]], atol=1e-15)

    def test_phase_shifter_group_law(self):
        np.testing.assert_allclose(
            sy.phase_shifter(0.3) @ sy.phase_shifter(0.4), sy.phase_shifter(0.7), atol=1e-15
        )

    @pytest.mark.parametrize("theta", [np.inf, np.nan])
    def test_phase_shifter_rejects_non_finite(self, theta):
        with pytest.raises(ValueError):
            sy.phase_shifter(theta)

    def test_squeezer_values(self):
        assert np.array_equal(sy.squeezer(0.0), np.eye(2))
        np.testing.assert_allclose(np.diag(sy.squeezer(1.0)), [0.36788, 2.71828], atol=1e-5)

    def test_squeezer_inverse_pair(self):
        np.testing.assert_allclose(sy.squeezer(0.7) @ sy.squeezer(-0.7), np.eye(2), atol=1e-15)

    def test_squeezer_cap(self):
        with pytest.raises(sy.SqueezingRangeError):
            sy.squeezer(20.5)
        with pytest.raises(sy.SqueezingRangeError):
            sy.squeezer(3.0, r_cap=2.0)

    @pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2, 2.0])
    def test_gates_are_symplectic(self, theta):
        assert sy.is_symplectic(sy.phase_shifter(theta))
        assert sy.is_symplectic(sy.squeezer(theta))
        assert np.linalg.det(sy.squeezer(theta)) == pytest.approx(1.0, abs=1e-9)


class TestTMSV:
    def test_zero_squeezing_is_two_vacua(self):
        assert np.array_equal(sy.tmsv_covariance(0.0), np.eye(4))

    def test_blocks_at_r1(self):
        gamma = sy.tmsv_covariance(1.0)
        np.testing.assert_allclose(gamma[:2, :2], 3.76220 * np.eye(2), atol=1e-5)
        np.testing.assert_allclose(gamma[2:, 2:], 3.76220 * np.eye(2), atol=1e-5)
        np.testing.assert_allclose(gamma[:2, 2:], 3.62686 * np.diag([1, -1]), atol=1e-5)
        np.testing.assert_allclose(gamma[2:, :2], 3.62686 * np.diag([1, -1]), atol=1e-5)

    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_pure(self, r):
        gamma = sy.tmsv_covariance(r)
        np.testing.assert_allclose(sy.symplectic_eigenvalues(gamma), [1, 1], atol=1e-8)
        np.testing.assert_allclose(eig_oracle(gamma), [1, 1], atol=1e-8)

    @pytest.mark.parametrize("r", np.linspace(0, 4, 9))
    def test_pure_up_to_r4(self, r):
        np.testing.assert_allclose(sy.symplectic_eigenvalues(sy.tmsv_covariance(r)), [1, 1], atol=1e-8)

    @pytest.mark.parametrize("r", [6.0, 8.0])
    def test_float64_cannot_store_a_pure_tmsv_at_large_r(self, r):
        # exact rational arithmetic on the stored entries: cosh^2 - sinh^2 is far from 1
        gamma = sy.tmsv_covariance(r)
        c, s = Fraction(gamma[0, 0]), Fraction(gamma[0, 2])
        assert abs(float(c * c - s * s) - 1) > 1e-7

    @pytest.mark.xfail(strict=True, reason="float64 entries of cosh(2r), sinh(2r) are not pure past r~5")
    @pytest.mark.parametrize("r", [6.0, 8.0])
    def test_pure_at_large_r(self, r):
        np.testing.assert_allclose(sy.symplectic_eigenvalues(sy.tmsv_covariance(r)), [1, 1], atol=1e-8)

    @pytest.mark.parametrize("r", [0.0, 1.0, 4.0, 8.0, 12.0])
    def test_physical(self, r):
        assert sy.is_physical(sy.tmsv_covariance(r))

    def test_cap(self):
        with pytest.raises(sy.SqueezingRangeError):
            sy.tmsv_covariance(21.0)


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        np.testing.assert_allclose(sy.symplectic_eigenvalues(np.eye(2)), [1.0])

    def test_thermal(self):
        np.testing.assert_allclose(sy.symplectic_eigenvalues(np.diag([3.0, 3.0])), [3.0])

    def test_partial_transpose_of_tmsv(self):
        pt = np.diag([1, 1, 1, -1]) @ sy.tmsv_covariance(1.0) @ np.diag([1, 1, 1, -1])
        assert sy.symplectic_eigenvalues(pt)[0] == pytest.approx(0.13534, abs=1e-5)
        assert sy.symplectic_eigenvalues(pt)[0] == pytest.approx(np.exp(-2), abs=1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sy.symplectic_eigenvalues(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_indefinite_input_raises(self):
        with pytest.raises(sy.NumericalError):
            sy.symplectic_eigenvalues(np.diag([1.0, 1.0, -0.5, 2.0]))

    def test_unphysical_partial_transpose(self):
        pt = np.diag([1, 1, 1, -1]) @ sy.tmsv_covariance(0.5) @ np.diag([1, 1, 1, -1])
        np.testing.assert_allclose(sy.symplectic_eigenvalues(pt), eig_oracle(pt), atol=1e-12)

    @given(seed=seeds, n=st.integers(1, 3))
    def test_matches_eig_oracle(self, seed, n):
        gamma = sy.random_physical_state(n, seed=seed)
        np.testing.assert_allclose(sy.symplectic_eigenvalues(gamma), eig_oracle(gamma), atol=1e-8)

    @given(seed=seeds, n=st.integers(1, 3))
    def test_invariant_under_symplectic_action(self, seed, n):
        rng = np.random.default_rng(seed)
        gamma = sy.random_physical_state(n, seed=rng)
        s = sy.random_symplectic(n, 1.0, seed=rng)
        np.testing.assert_allclose(
            sy.symplectic_eigenvalues(sy.apply_symplectic(s, gamma)),
            sy.symplectic_eigenvalues(gamma),
            atol=1e-8,
        )


class TestTensorAndTrace:
    def test_tensor_vacua(self):
        assert np.array_equal(sy.tensor(sy.vacuum(), sy.vacuum()), np.eye(4))

    def test_tensor_mode_count(self):
        assert sy.n_modes(sy.tensor(sy.tmsv_covariance(0.5), sy.vacuum())) == 3

    def test_round_trip(self):
        a = sy.tmsv_covariance(0.5)
        assert np.array_equal(sy.partial_trace(sy.tensor(a, sy.vacuum()), [0, 1]), a)

    def test_keep_all(self):
        a = sy.tmsv_covariance(0.5)
        assert np.array_equal(sy.partial_trace(a, {0, 1}), a)

    @pytest.mark.parametrize("keep", [{0}, {1}])
    def test_reduced_tmsv_is_thermal(self, keep):
        np.testing.assert_allclose(sy.partial_trace(sy.tmsv_covariance(1.0), keep), 3.76220 * np.eye(2), atol=1e-5)

    @pytest.mark.parametrize("keep", [set(), {2}, {-1}])
    def test_bad_keep(self, keep):
        with pytest.raises(ValueError):
            sy.partial_trace(sy.tmsv_covariance(0.5), keep)

    @given(seed=seeds)
    def test_operations_preserve_physicality(self, seed):
        rng = np.random.default_rng(seed)
        a = sy.random_physical_state(2, seed=rng)
        b = sy.random_physical_state(1, seed=rng)
        joint = sy.tensor(a, b)
        assert sy.is_physical(joint)
        assert sy.is_physical(sy.partial_trace(joint, {0, 2}))
        assert sy.is_physical(sy.partial_trace(a, {1}))
        assert sy.is_physical(sy.apply_symplectic(sy.random_symplectic(3, 1.5, seed=rng), joint))


class TestApplySymplectic:
    def test_identity(self):
        gamma = sy.tmsv_covariance(0.3)
        assert np.array_equal(sy.apply_symplectic(np.eye(4), gamma), gamma)

    def test_squeezed_vacuum(self):
        r = 0.8
        np.testing.assert_allclose(
            sy.apply_symplectic(sy.squeezer(r), sy.vacuum()), np.diag([np.exp(-2 * r), np.exp(2 * r)])
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sy.apply_symplectic(np.eye(2), np.eye(4))


class TestRandomSymplectic:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_symplectic_over_seeds(self, n):
        for seed in range(100):
            s = sy.random_symplectic(n, 1.5, seed=seed)
            assert sy.is_symplectic(s, atol=1e-9)
            assert np.linalg.det(s) == pytest.approx(1.0, abs=1e-9)

    def test_deterministic(self):
        a = sy.random_symplectic(3, 2.0, seed=42)
        b = sy.random_symplectic(3, 2.0, seed=42)
        assert a.tobytes() == b.tobytes()

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_passive_limit(self, n):
        s = sy.random_symplectic(n, 1e-13, seed=7)
        np.testing.assert_allclose(s.T @ s, np.eye(2 * n), atol=1e-9)

    @pytest.mark.parametrize("bad", [dict(n=0, r_max=1.0), dict(n=2, r_max=0.0)])
    def test_preconditions(self, bad):
        with pytest.raises(ValueError):
            sy.random_symplectic(seed=0, **bad)

    def test_passive_symplectic_of_haar_unitary(self):
        from scipy.stats import unitary_group

        u = unitary_group.rvs(4, random_state=3)
        k = sy.passive_symplectic(u)
        assert sy.is_symplectic(k)
        np.testing.assert_allclose(k @ k.T, np.eye(8), atol=1e-12)

    def test_ordering_permutation(self):
        perm = sy.xxpp_to_xpxp(3)
        xxpp = np.arange(6)
        assert list(perm @ xxpp) == [0, 3, 1, 4, 2, 5]


def test_two_by_two_determinant_shift_identity():
    a, b, c, d, lam = sympy.symbols("a b c d lambda")
    mat = sympy.Matrix([[a, b], [c, d]])
    lhs = (mat + lam * sympy.eye(2)).det()
    rhs = mat.det() + lam * mat.trace() + lam**2
    assert sympy.expand(lhs - rhs) == 0


def test_two_by_two_determinant_shift_identity_numeric(rng):
    for _ in range(50):
        mat = rng.normal(size=(2, 2))
        lam = rng.normal()
        assert np.linalg.det(mat + lam * np.eye(2)) == pytest.approx(
            np.linalg.det(mat) + lam * np.trace(mat) + lam**2, abs=1e-12
        )


def test_check_covariance_rejects_unphysical():
    with pytest.raises(sy.UnphysicalStateError):
        sy.check_covariance(np.diag([0.5, 0.5]))
    with pytest.raises(ValueError):
        sy.check_covariance(np.array([[1.0, 0.2], [0.0, 1.0]]))
