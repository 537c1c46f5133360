import itertools
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from su11interf.core import BargmannIndex, generator_matrix
from su11interf.errors import DimensionError, InvalidAmplitude, TruncationLeak
from su11interf.interferometer import (
    InterferometerConfig,
    apply_interferometer,
    boost_matrix,
    convention_signs,
    edge_mass,
    fwm_unitary,
    k3_out_coefficients,
    overall_transform,
    phase_unitary,
    propagate,
    rotation_matrix,
    total_photons,
    total_photons_from_moments,
)
from su11interf.states import TruncatedState, coherent_state, fock_state, moments

HALF = BargmannIndex(1)
betas = st.floats(-2, 2)
phis = st.floats(-math.pi, math.pi)


def _third_row_symbolic():
    b, p = sp.symbols("beta phi", real=True)
    ch, sh = sp.cosh(b), sp.sinh(b)
    boost = lambda s: sp.Matrix([[1, 0, 0], [0, ch, s * sh], [0, s * sh, ch]])  # noqa: E731
    rot = sp.Matrix([[sp.cos(p), -sp.sin(p), 0], [sp.sin(p), sp.cos(p), 0], [0, 0, 1]])
    row = (boost(1) * rot * boost(-1))[2, :]
    return sp.lambdify((b, p), [sp.simplify(e) for e in row])


THIRD_ROW = _third_row_symbolic()


class TestThreeByThree:
    def test_identities_at_zero(self):
        np.testing.assert_array_equal(boost_matrix(0).matrix, np.eye(3))
        np.testing.assert_array_equal(rotation_matrix(0).matrix, np.eye(3))

    def test_opposite_boosts_cancel(self):
        np.testing.assert_allclose((boost_matrix(1.3) @ boost_matrix(-1.3)).matrix, np.eye(3),
                                   atol=1e-14)

    def test_first_mixer_entries(self):
        m = boost_matrix(-1).matrix
        assert m[1, 2] == pytest.approx(-1.1752011936438014, abs=1e-15)
        assert m[2, 2] == pytest.approx(1.5430806348152437, abs=1e-15)

    def test_quarter_rotation(self):
        m = rotation_matrix(math.pi / 2).matrix
        assert m[0, 0] == pytest.approx(0, abs=1e-16)
        assert m[0, 1] == -1
        assert m[1, 0] == 1

    def test_rotation_closure(self):
        np.testing.assert_allclose((rotation_matrix(0.3) @ rotation_matrix(0.4)).matrix,
                                   rotation_matrix(0.7).matrix, atol=1e-15)

    @pytest.mark.parametrize("beta", np.linspace(0, 3, 7))
    def test_zero_phase_is_identity(self, beta):
        m = overall_transform(InterferometerConfig.from_phi(beta, 0)).matrix
        np.testing.assert_allclose(m, np.eye(3), atol=1e-14)

    def test_metric_preserved_example(self):
        assert overall_transform(InterferometerConfig.from_phi(2, 1.1)).metric_defect() < 1e-12

    @given(beta=betas, phi=phis)
    @settings(max_examples=100, deadline=None)
    def test_metric_preserved(self, beta, phi):
        cfg = InterferometerConfig.from_phi(beta, phi)
        for t in (boost_matrix(beta), rotation_matrix(phi), overall_transform(cfg)):
            assert t.metric_defect() < 1e-12

    def test_third_row_example(self):
        cfg = InterferometerConfig.from_phi(1, 0.7)
        np.testing.assert_allclose(overall_transform(cfg).matrix[2], THIRD_ROW(1, 0.7), atol=1e-14)

    @given(beta=betas, phi=phis)
    @settings(max_examples=100, deadline=None)
    def test_third_row_matches_coefficients(self, beta, phi):
        cfg = InterferometerConfig.from_phi(beta, phi)
        coeffs, _ = k3_out_coefficients(cfg)
        np.testing.assert_allclose(overall_transform(cfg).matrix[2], coeffs, atol=1e-12)
        np.testing.assert_allclose(coeffs, THIRD_ROW(beta, phi), atol=1e-12)

    def test_coefficients_reference(self):
        c, d = k3_out_coefficients(InterferometerConfig.from_phi(1, math.pi / 2))
        np.testing.assert_allclose(c, [1.1752011936438014, -1.8134302039235094, 2.3810978455418157],
                                   rtol=1e-14)
        c0, d0 = k3_out_coefficients(InterferometerConfig.from_phi(0.8, 0))
        np.testing.assert_allclose(c0, [0, 0, 1], atol=1e-15)
        np.testing.assert_allclose(d0, [math.sinh(0.8), 0, 0], atol=1e-15)

    @given(beta=betas, phi=st.floats(-3, 3))
    @settings(max_examples=50, deadline=None)
    def test_derivative_triple_by_finite_difference(self, beta, phi):
        h = 1e-6
        _, d = k3_out_coefficients(InterferometerConfig.from_phi(beta, phi))
        up, _ = k3_out_coefficients(InterferometerConfig.from_phi(beta, phi + h))
        dn, _ = k3_out_coefficients(InterferometerConfig.from_phi(beta, phi - h))
        np.testing.assert_allclose(d, (up - dn) / (2 * h), atol=1e-7 * math.cosh(beta) ** 2)


class TestConfig:
    def test_net_phase(self):
        cfg = InterferometerConfig(1.0, 0.2, 0.5)
        assert cfg.phi == -(0.2 + 0.5)
        assert InterferometerConfig.from_phi(1.0, 0.3).phi == 0.3


class TestUnitaries:
    def test_convention_signs_are_signs(self):
        assert set(convention_signs()) <= {1, -1}

    def test_zero_parameters_give_identity(self):
        np.testing.assert_allclose(fwm_unitary(0, HALF, 16).entries, np.eye(16), atol=1e-14)
        np.testing.assert_array_equal(phase_unitary(0, HALF, 16).entries, np.eye(16))

    def test_eigendecomposition_matches_expm(self):
        k, dim, beta = BargmannIndex(3), 40, 0.7
        k1 = generator_matrix("K1", k, dim).entries
        ref = expm(convention_signs()[0] * 1j * beta * k1)
        np.testing.assert_allclose(fwm_unitary(beta, k, dim).entries, ref, atol=1e-11)

    def test_unitarity(self):
        u = fwm_unitary(1.0, HALF, 128).entries
        defect = u.conj().T @ u - np.eye(128)
        assert np.max(np.abs(defect[:-1, :-1])) < 1e-10

    def test_mixer_on_vacuum(self):
        u = fwm_unitary(0.8, HALF, 96)
        out = coherent_state((HALF, 0), dim=96).coefficients
        m = moments(TruncatedState(HALF, u @ out))
        assert m.mean[2] == pytest.approx(0.6687174731524223, abs=1e-12)
        # L(-beta) acting on (0, 0, k)
        np.testing.assert_allclose(m.mean, boost_matrix(-0.8).matrix @ [0, 0, 0.5], atol=1e-12)

    def test_phase_pi_flips_k1(self):
        s = coherent_state((HALF, 0.5))
        out = TruncatedState(HALF, phase_unitary(math.pi, HALF, s.dim) @ s.coefficients)
        assert moments(out).mean[0] == pytest.approx(-moments(s).mean[0], abs=1e-12)
        np.testing.assert_allclose(np.abs(out.coefficients), np.abs(s.coefficients), atol=1e-15)

    def test_dimension_checks(self):
        with pytest.raises(DimensionError):
            fwm_unitary(0.1, HALF, 4)
        with pytest.raises(DimensionError):
            phase_unitary(0.1, HALF, 1)


class TestEvolution:
    def test_zero_phase_restores_moments(self):
        s = coherent_state((BargmannIndex(3), 0.4))
        out = apply_interferometer(s, InterferometerConfig.from_phi(1.0, 0))
        np.testing.assert_allclose(moments(out).mean, moments(s).mean, atol=1e-8)

    def test_vacuum_output_k3(self):
        out = apply_interferometer(fock_state(HALF, 0, 32), InterferometerConfig.from_phi(1, 0.5))
        assert moments(out).mean[2] == pytest.approx(0.5845352300149774, abs=1e-10)

    def test_second_moment_transport(self):
        cfg = InterferometerConfig.from_phi(0.8, 0.6)
        s = coherent_state((HALF, 0.3))
        out = moments(apply_interferometer(s, cfg))
        m = overall_transform(cfg).matrix
        np.testing.assert_allclose(out.second, m @ moments(s).second @ m.T, atol=1e-7)

    @pytest.mark.parametrize(
        "twice_k, zeta, beta, phi",
        list(itertools.product([1, 2, 4], [0, 0.3, 0.5], [0.5, 1], [0, 0.3, 1.0])),
    )
    def test_heisenberg_schrodinger_agreement(self, twice_k, zeta, beta, phi):
        cfg = InterferometerConfig.from_phi(beta, phi)
        s = coherent_state((BargmannIndex(twice_k), zeta))
        out = moments(apply_interferometer(s, cfg))
        pred = overall_transform(cfg).apply(moments(s))
        np.testing.assert_allclose(out.mean, pred.mean, atol=1e-7)
        np.testing.assert_allclose(out.second, pred.second, atol=1e-6)

    def test_flipped_mixer_sign_is_detected(self):
        cfg = InterferometerConfig.from_phi(0.5, 1.0)
        s = coherent_state((HALF, 0.3))
        out = moments(apply_interferometer(s, cfg, flip_fwm_sign=True))
        pred = overall_transform(cfg).apply(moments(s))
        assert np.max(np.abs(out.mean - pred.mean)) > 1e-2

    def test_leak_detected_on_small_truncation(self):
        s = coherent_state((HALF, 0.5))
        with pytest.raises(TruncationLeak):
            apply_interferometer(s, InterferometerConfig.from_phi(2.0, 1.0), dim=s.dim)

    def test_auto_truncation_grows(self):
        s = coherent_state((HALF, 0.5))
        st_ = propagate(s, InterferometerConfig.from_phi(2.0, 1.0))
        assert st_.output.dim > s.dim
        assert st_.leak < 1e-15

    def test_edge_mass(self):
        c = np.zeros(100)
        c[-1] = 0.1
        assert edge_mass(c) == pytest.approx(0.01)


class TestPhotonNumber:
    def test_vacuum_values(self):
        assert total_photons((HALF, 0), math.acosh(2)) == pytest.approx(1, abs=1e-14)
        assert total_photons((HALF, 0), 0) == 0

    def test_reference_value(self):
        assert total_photons((BargmannIndex(3), 0.5), 1) == pytest.approx(6.715403174076219,
                                                                          rel=1e-14)

    @pytest.mark.parametrize("twice_k", [1, 3, 6])
    @pytest.mark.parametrize("zeta", [0.0, 0.3, -0.5])
    @pytest.mark.parametrize("beta", [0.0, 0.7, 1.5])
    def test_matches_moment_route(self, twice_k, zeta, beta):
        k = BargmannIndex(twice_k)
        m = moments(coherent_state((k, zeta)))
        assert total_photons((k, zeta), beta) == pytest.approx(
            total_photons_from_moments(m, beta), rel=1e-8, abs=1e-12)

    def test_moment_route_equals_mean_output_photons(self):
        # <K3> after the first mixer gives (N + 1)/2
        s = coherent_state((BargmannIndex(2), 0.2 + 0.3j))
        mid = propagate(s, InterferometerConfig.from_phi(0.9, 0)).after_fwm1
        n = 2 * moments(mid).mean[2] - 1
        assert total_photons_from_moments(moments(s), 0.9) == pytest.approx(n, rel=1e-10)

    def test_closed_form_needs_real_zeta(self):
        with pytest.raises(InvalidAmplitude):
            total_photons((HALF, 0.3j), 1.0)
