import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussent import (
    DomainError,
    FilterOp,
    GaussianChannel,
    QuadExpState,
    apply_filter_tmss,
    apply_oneside_channel,
    beamsplitter_channel,
    channel_output,
    cm_from_quadexp,
    detA_closed_form,
    filtered_coeffs,
    identity_channel,
    log_negativity,
    pre_process,
    rotation,
    squeeze_r,
    squeeze_u,
    symplectic_eigenvalues,
    tmss_state,
)
from gaussent.channels import cp_margin, filter_output
from gaussent.core import SymplecticOp, euler_compose
from gaussent.fock import cm_from_fock, filter_fock, tmss_fock

from conftest import random_single_mode


def fd_detA(q0, q1, r):
    return cm_from_quadexp(filtered_coeffs(q0, r, q1)).det_A()


class TestFilteredCoeffs:
    def test_no_squeezing(self):
        c = filtered_coeffs(0.6, 0.0, 0.4)
        assert (c.f1, c.f2) == (0.0, 0.0)
        assert c.f3 == pytest.approx(0.24)

    @pytest.mark.parametrize("args, expected", [
        # tanh 0.6 = 0.5370496, cosh 0.6 = 1.1854652
        ((0.5, 0.3, 1.0), (-0.0671312, 0.2685248, 0.4217753)),
        # tanh 1 = 0.7615942, cosh 1 = 1.5430806
        ((0.5, 0.5, 0.5), (-0.0951993, 0.0951993, 0.1620136)),
    ])
    def test_frozen_values(self, args, expected):
        c = filtered_coeffs(*args)
        np.testing.assert_allclose((c.f1, c.f2, c.f3), expected, atol=1e-7)

    def test_normalisability_guard(self):
        with pytest.raises(DomainError):
            QuadExpState(0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            filtered_coeffs(1.0, 0.0, 1.0)

    def test_filter_range(self):
        for q in (0.0, -0.2, 1.1):
            with pytest.raises(DomainError):
                FilterOp(q)


class TestQuadExpCovariance:
    def test_vacuum(self):
        np.testing.assert_allclose(cm_from_quadexp(QuadExpState(0, 0, 0)).cov, 0.5 * np.eye(4))

    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9, -0.7])
    def test_tmss(self, q):
        np.testing.assert_allclose(cm_from_quadexp(QuadExpState(0, 0, q)).cov, tmss_state(q).cov, atol=1e-12)

    def test_pure(self):
        s = cm_from_quadexp(filtered_coeffs(0.7, 0.4, 0.6))
        np.testing.assert_allclose(symplectic_eigenvalues(s.cov), [0.5, 0.5], atol=1e-12)

    @pytest.mark.parametrize("q0, q1, r", [(0.5, 0.5, 0.3), (0.6, 0.3, -0.5), (0.4, 0.6, 0.5)])
    def test_matches_fock_oracle(self, q0, q1, r):
        from gaussent.fock import squeezed_filtered_fock
        oracle = cm_from_fock(squeezed_filtered_fock(q0, r, q1, 40))
        np.testing.assert_allclose(oracle.cov, cm_from_quadexp(filtered_coeffs(q0, r, q1)).cov, atol=1e-6)


class TestDetAClosedForm:
    def test_no_squeezing(self):
        assert detA_closed_form(0.5, 0.5, 0.0) == pytest.approx(0.25 + (1 / 16) / (15 / 16) ** 2, abs=1e-14)
        assert detA_closed_form(0.5, 0.5, 0.0) == pytest.approx(0.3211111, abs=1e-7)

    def test_unfiltered_is_tmss(self):
        assert detA_closed_form(0.5, 1.0, 0.0) == pytest.approx(25 / 36, abs=1e-14)

    def test_squeezed_filtered(self):
        # 0.25 + 0.125 / 4.1855011; the value agrees with the covariance pipeline
        assert detA_closed_form(0.5, 0.5, 0.5) == pytest.approx(0.27986484207, abs=1e-10)
        assert fd_detA(0.5, 0.5, 0.5) == pytest.approx(detA_closed_form(0.5, 0.5, 0.5), abs=1e-12)

    @given(st.floats(-0.9, 0.9), st.floats(0.01, 1.0), st.floats(-1.5, 1.5))
    def test_pipeline_agreement(self, q0, q1, r):
        assert fd_detA(q0, q1, r) == pytest.approx(detA_closed_form(q0, q1, r), abs=1e-10)

    @given(st.floats(0.05, 0.9), st.floats(0.05, 0.99), st.floats(0.0, 1.45))
    def test_decreasing_in_squeezing(self, q0, q1, r):
        assert detA_closed_form(q0, q1, r + 0.05) < detA_closed_form(q0, q1, r)
        assert detA_closed_form(q0, q1, -r) == pytest.approx(detA_closed_form(q0, q1, r), rel=1e-14)

    def test_unfiltered_flat(self):
        # with no filter the squeezing is a local unitary and cannot change det A
        vals = [detA_closed_form(0.5, 1.0, r) for r in np.arange(0, 1.55, 0.05)]
        np.testing.assert_allclose(vals, 25 / 36, rtol=1e-12)


class TestFilterOnTMSS:
    def test_product_amplitude(self):
        np.testing.assert_allclose(apply_filter_tmss(0.5, 0.5).cov, tmss_state(0.25).cov)

    def test_trivial_cases(self):
        np.testing.assert_allclose(apply_filter_tmss(0.7, 1.0).cov, tmss_state(0.7).cov)
        np.testing.assert_allclose(apply_filter_tmss(0.0, 0.3).cov, 0.5 * np.eye(4))

    @pytest.mark.parametrize("q0, qa", [(0.5, 0.5), (0.6, 0.9), (0.3, 0.2)])
    def test_matches_fock(self, q0, qa):
        oracle = cm_from_fock(filter_fock(tmss_fock(q0, 40), qa, 1))
        np.testing.assert_allclose(oracle.cov, apply_filter_tmss(q0, qa).cov, atol=1e-8)

    @given(st.floats(0.05, 0.9), st.floats(0.05, 0.95), st.floats(-math.pi, math.pi),
           st.floats(-1.0, 1.0), st.floats(-math.pi, math.pi))
    def test_filter_output_pure(self, q, q1, a, r, b):
        V = SymplecticOp(euler_compose(a, r, b))
        out = filter_output(q, V, FilterOp(q1))
        np.testing.assert_allclose(symplectic_eigenvalues(out.cov), [0.5, 0.5], atol=1e-9)

    def test_filter_output_rotation_only(self):
        # a rotation before the filter does not change the output entanglement
        out = filter_output(0.6, rotation(0.8), FilterOp(0.5))
        assert log_negativity(out) == pytest.approx(log_negativity(tmss_state(0.3)), abs=1e-12)


class TestBeamsplitterChannel:
    def test_zero_angle_is_identity(self):
        ch = beamsplitter_channel(0.0, 2.0, 1.0)
        np.testing.assert_allclose(ch.X, np.eye(2))
        np.testing.assert_allclose(ch.Y, np.zeros((2, 2)))

    def test_reference_channel(self, reference_channel):
        np.testing.assert_allclose(reference_channel.X, math.sqrt(3) / 2 * np.eye(2), atol=1e-15)
        np.testing.assert_allclose(reference_channel.Y, np.diag([9 / 4, 1 / 36]), atol=1e-15)

    def test_full_swap(self):
        ch = beamsplitter_channel(math.pi / 2, 1.0, 0.5)
        np.testing.assert_allclose(ch.X, 0, atol=1e-15)
        np.testing.assert_allclose(ch.Y, 0.5 * np.eye(2), atol=1e-15)
        out = apply_oneside_channel(tmss_state(0.5), ch)
        expected = np.diag([5 / 6, 5 / 6, 0.5, 0.5])
        np.testing.assert_allclose(out.cov, expected, atol=1e-15)
        assert log_negativity(out) == 0.0

    def test_unphysical_ancilla(self):
        with pytest.raises(DomainError):
            beamsplitter_channel(0.3, 1.0, 0.4)
        with pytest.raises(DomainError):
            beamsplitter_channel(0.3, -1.0, 1.0)

    def test_non_cp_rejected(self):
        with pytest.raises(DomainError):
            GaussianChannel(np.eye(2) * 2, np.zeros((2, 2)))

    @given(st.floats(0, math.pi / 2), st.floats(1 / 3, 3), st.floats(0.5, 2.0))
    def test_cp_holds(self, theta, u3, b3):
        ch = beamsplitter_channel(theta, u3, b3)
        assert cp_margin(ch.X, ch.Y) >= -1e-10

    @given(st.floats(0, math.pi / 2), st.floats(1 / 3, 3), st.floats(0.5, 2.0),
           st.floats(-0.95, 0.95), st.integers(0, 10_000))
    def test_output_physical(self, theta, u3, b3, q, seed):
        rng = np.random.default_rng(seed)
        ch = beamsplitter_channel(theta, u3, b3)
        st_in = pre_process(tmss_state(q), SymplecticOp(random_single_mode(rng)), 1)
        out = apply_oneside_channel(st_in, ch, 1)
        assert out.symplectic_eigenvalues()[0] >= 0.5 - 1e-9

    def test_identity_channel(self):
        s = tmss_state(0.4)
        np.testing.assert_allclose(apply_oneside_channel(s, identity_channel()).cov, s.cov)

    def test_mode_zero(self):
        ch = beamsplitter_channel(math.pi / 2, 1.0, 0.5)
        out = apply_oneside_channel(tmss_state(0.5), ch, 0)
        np.testing.assert_allclose(out.cov[:2, :2], 0.5 * np.eye(2), atol=1e-15)


class TestPreProcess:
    def test_identity(self):
        s = tmss_state(0.3)
        np.testing.assert_allclose(pre_process(s, SymplecticOp(np.eye(2))).cov, s.cov)

    def test_squeezed_block(self):
        q, u = 2 / 3, 1.7
        a = 0.5 * (1 + q * q) / (1 - q * q)
        out = pre_process(tmss_state(q), squeeze_u(u), 1)
        np.testing.assert_allclose(out.A, a * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(out.B, np.diag([u * u * a, a / (u * u)]), atol=1e-13)

    def test_rotation_keeps_detA(self):
        s = tmss_state(0.6)
        assert pre_process(s, rotation(1.1), 1).det_A() == pytest.approx(s.det_A(), abs=1e-12)

    def test_rejects_two_mode_operator(self):
        with pytest.raises(DomainError):
            pre_process(tmss_state(0.3), SymplecticOp(np.eye(4)))


def test_channel_output_filter_dispatch():
    out = channel_output(FilterOp(0.5), squeeze_r(0.3), 0.5)
    assert out.det_A() == pytest.approx(detA_closed_form(0.5, 0.5, 0.3), abs=1e-12)
