import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussent import (
    CharacteristicEntanglement,
    DomainError,
    GaussianState,
    NotSymplecticError,
    SymplecticOp,
    apply_symplectic,
    beamsplitter,
    euler_compose,
    euler_decompose,
    partial_trace,
    rotation,
    squeeze_r,
    squeeze_u,
    symplectic_eigenvalues,
    symplectic_generator,
    tensor,
    thermal_state,
    tmss_state,
    vacuum,
)
from gaussent.core import embed, is_symplectic, omega
from gaussent.fock import cm_from_fock, tmss_fock

from conftest import random_single_mode

angles = st.floats(-math.pi, math.pi)
squeezes = st.floats(-1.0, 1.0)
amplitudes = st.floats(-0.95, 0.95)


def local_op(t1, r1, s1, t2, r2, s2):
    S = np.zeros((4, 4))
    S[:2, :2] = euler_compose(t1, r1, s1)
    S[2:, 2:] = euler_compose(t2, r2, s2)
    return SymplecticOp(S)


class TestTMSS:
    def test_vacuum_limit(self):
        s = tmss_state(0.0)
        np.testing.assert_allclose(s.cov, 0.5 * np.eye(4), atol=1e-15)
        np.testing.assert_array_equal(s.mean, np.zeros(4))

    def test_half_amplitude_blocks(self):
        s = tmss_state(0.5)
        assert s.cov[0, 0] == pytest.approx(5 / 6, abs=1e-14)
        assert s.cov[0, 2] == pytest.approx(2 / 3, abs=1e-14)
        assert s.cov[1, 3] == pytest.approx(-2 / 3, abs=1e-14)
        assert s.det_A() == pytest.approx(25 / 36, abs=1e-14)

    def test_pure(self):
        assert symplectic_eigenvalues(tmss_state(0.9).cov)[0] == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("q", [1.0, -1.0, 1.5])
    def test_unnormalisable(self, q):
        with pytest.raises(DomainError):
            tmss_state(q)

    @given(amplitudes)
    def test_detA_formula(self, q):
        expected = 0.25 * ((1 + q * q) / (1 - q * q)) ** 2
        assert tmss_state(q).det_A() == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("q", [0.0, 0.2, 0.5, -0.6])
    def test_matches_fock_moments(self, q):
        fock = cm_from_fock(tmss_fock(q, 40))
        np.testing.assert_allclose(fock.cov, tmss_state(q).cov, atol=1e-8)


class TestGenerators:
    def test_squeeze_u_block(self):
        np.testing.assert_allclose(squeeze_u(3).matrix, np.diag([3, 1 / 3]))

    def test_beamsplitter_zero_is_identity(self):
        np.testing.assert_allclose(beamsplitter(0.0).matrix, np.eye(4))

    def test_squeeze_r_matches_u(self):
        np.testing.assert_allclose(squeeze_r(0.3).matrix, squeeze_u(math.exp(0.6)).matrix, atol=1e-15)
        assert math.exp(0.6) == pytest.approx(1.8221188, abs=1e-7)

    def test_rotation_block(self):
        c, s = math.cos(0.4), math.sin(0.4)
        np.testing.assert_allclose(rotation(0.4, 1, 2).matrix[2:, 2:], [[c, s], [-s, c]])
        np.testing.assert_allclose(rotation(0.4, 1, 2).matrix[:2, :2], np.eye(2))

    def test_beamsplitter_quadrature_pairs(self):
        c, s = math.cos(0.3), math.sin(0.3)
        M = beamsplitter(0.3).matrix
        np.testing.assert_allclose(M[np.ix_([0, 2], [0, 2])], [[c, -s], [s, c]])
        np.testing.assert_allclose(M[np.ix_([1, 3], [1, 3])], [[c, -s], [s, c]])

    @pytest.mark.parametrize("u", [0.0, -2.0])
    def test_nonpositive_u(self, u):
        with pytest.raises(DomainError):
            squeeze_u(u)

    def test_bad_modes(self):
        with pytest.raises(IndexError):
            rotation(0.1, 2, 2)
        with pytest.raises(IndexError):
            beamsplitter(0.1, (0, 0), 2)
        with pytest.raises(IndexError):
            beamsplitter(0.1, (0, 3), 3)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            symplectic_generator("shear", 1.0)

    def test_params_recorded(self):
        op = symplectic_generator("squeeze_u", {"u": 2.0})
        assert op.kind == "squeeze_u" and op.params == {"u": 2.0}

    @given(st.sampled_from(["rotation", "squeeze_r", "beamsplitter"]), st.floats(-1.5, 1.5))
    def test_all_generators_symplectic(self, kind, val):
        modes = (0, 2) if kind == "beamsplitter" else (1,)
        op = symplectic_generator(kind, val, modes, 3)
        om = omega(3)
        assert np.max(np.abs(op.matrix @ om @ op.matrix.T - om)) < 1e-10

    def test_non_symplectic_rejected(self):
        with pytest.raises(NotSymplecticError):
            SymplecticOp(np.diag([2.0, 2.0]))

    def test_compose_and_inverse(self):
        op = rotation(0.3) @ squeeze_u(2.0)
        np.testing.assert_allclose((op @ op.inverse()).matrix, np.eye(2), atol=1e-14)


class TestStates:
    def test_symmetry_enforced(self):
        with pytest.raises(DomainError):
            GaussianState(np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_uncertainty_enforced(self):
        with pytest.raises(DomainError):
            GaussianState(0.4 * np.eye(2))

    def test_immutable(self):
        s = vacuum(1)
        with pytest.raises(ValueError):
            s.cov[0, 0] = 3.0

    def test_characteristic_range(self):
        assert CharacteristicEntanglement(0.25).value == 0.25
        with pytest.raises(DomainError):
            CharacteristicEntanglement(1.2)

    def test_thermal_eigenvalue(self):
        assert symplectic_eigenvalues(thermal_state(1.0).cov) == pytest.approx([1.0])
        with pytest.raises(DomainError):
            thermal_state(0.3)

    def test_vacuum_eigenvalues(self):
        np.testing.assert_allclose(symplectic_eigenvalues(vacuum(2).cov), [0.5, 0.5])

    def test_tmss_eigenvalues(self):
        np.testing.assert_allclose(symplectic_eigenvalues(tmss_state(0.5).cov), [0.5, 0.5], atol=1e-12)

    def test_non_pd_rejected(self):
        with pytest.raises(DomainError):
            symplectic_eigenvalues(np.diag([1.0, -1.0]))

    def test_squeezed_vacuum(self):
        out = apply_symplectic(vacuum(1), squeeze_u(3))
        np.testing.assert_allclose(out.cov, np.diag([4.5, 1 / 18]), atol=1e-15)

    def test_identity_leaves_state(self):
        s = tmss_state(0.4)
        np.testing.assert_allclose(apply_symplectic(s, SymplecticOp(np.eye(4))).cov, s.cov)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            apply_symplectic(vacuum(1), beamsplitter(0.2))

    def test_tensor_and_trace(self):
        np.testing.assert_allclose(tensor(vacuum(1), vacuum(1)).cov, vacuum(2).cov)
        s = tmss_state(0.5)
        red = partial_trace(s, [0])
        np.testing.assert_allclose(red.cov, (5 / 6) * np.eye(2), atol=1e-14)
        back = partial_trace(tensor(s, vacuum(1)), [0, 1])
        np.testing.assert_allclose(back.cov, s.cov)
        with pytest.raises(DomainError):
            partial_trace(s, [])

    def test_reduced_moments_match_fock(self):
        red = partial_trace(cm_from_fock(tmss_fock(0.5, 40)), [0])
        np.testing.assert_allclose(red.cov, partial_trace(tmss_state(0.5), [0]).cov, atol=1e-8)

    def test_mean_transforms(self):
        s = GaussianState(0.5 * np.eye(2), np.array([1.0, 0.0]))
        out = apply_symplectic(s, squeeze_u(2.0))
        np.testing.assert_allclose(out.mean, [2.0, 0.0])

    @given(amplitudes, angles, squeezes, angles, angles, squeezes, angles)
    def test_local_symplectic_keeps_eigenvalues(self, q, t1, r1, s1, t2, r2, s2):
        s = tmss_state(q)
        S = local_op(t1, r1, s1, t2, r2, s2)
        before = symplectic_eigenvalues(s.cov)
        after = apply_symplectic(s, S).symplectic_eigenvalues()
        np.testing.assert_allclose(after, before, atol=1e-9 * max(1.0, np.max(np.abs(S.matrix)) ** 2))
        assert after[0] >= 0.5 - 1e-9

    @given(amplitudes, angles, angles)
    def test_rotations_keep_detA(self, q, a, b):
        s = tmss_state(q)
        out = apply_symplectic(apply_symplectic(s, rotation(a, 0, 2)), rotation(b, 1, 2))
        assert out.det_A() == pytest.approx(s.det_A(), abs=1e-10 * max(1.0, s.det_A()))


class TestEuler:
    def test_identity(self):
        assert euler_decompose(np.eye(2)) == (0.0, 0.0, 0.0)

    def test_pure_squeeze(self):
        t_out, r, t_in = euler_decompose(np.diag([3.0, 1 / 3]))
        assert (t_out, t_in) == (0.0, 0.0)
        assert r == pytest.approx(math.log(3) / 2, abs=1e-14)

    def test_antisqueeze_made_positive(self):
        t_out, r, t_in = euler_decompose(squeeze_u(0.5))
        assert r == pytest.approx(math.log(2) / 2)
        np.testing.assert_allclose(euler_compose(t_out, r, t_in), squeeze_u(0.5).matrix, atol=1e-12)

    def test_non_symplectic(self):
        with pytest.raises(NotSymplecticError):
            euler_decompose(np.diag([2.0, 1.0]))

    @pytest.mark.parametrize("seed", range(100))
    def test_round_trip_seeded(self, seed):
        rng = np.random.default_rng(seed)
        S = np.eye(2)
        for _ in range(3):
            S = S @ random_single_mode(rng, 1.5)
        t_out, r, t_in = euler_decompose(S)
        assert r >= 0
        assert np.max(np.abs(euler_compose(t_out, r, t_in) - S)) < 1e-10

    @given(angles, squeezes, angles)
    def test_round_trip_property(self, a, r, b):
        S = euler_compose(a, r, b)
        assert np.max(np.abs(euler_compose(*euler_decompose(S)) - S)) < 1e-10


def test_embed_places_block():
    M = embed(np.array([[1.0, 2.0], [3.0, 4.0]]), (1,), 3)
    assert M[2, 3] == 2.0 and M[0, 0] == 1.0 and M[4, 4] == 1.0
    assert is_symplectic(embed(squeeze_u(2).matrix, (2,), 3))
