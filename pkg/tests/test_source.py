import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qiupsim import config
from qiupsim.errors import TruncationError
from qiupsim.source import (
    C,
    GaussianSincModel,
    PhotonMomentum,
    normalized_kernel,
    phase_mismatch,
    transition_amplitude,
)


def model_for(name="setup1", waist=None):
    cfg = config.preset(name)
    if waist is not None:
        import dataclasses
        cfg = dataclasses.replace(cfg, pump_waist=waist)
    return config.build_setup(cfg).model1


def test_momentum_requires_forward_propagation():
    with pytest.raises(ValueError):
        PhotonMomentum(0.0, 0.0, -1.0, 1e15)


def test_from_transverse_norm():
    omega = 2 * math.pi * C / 810e-9
    k = PhotonMomentum.from_transverse(1e4, -2e4, omega)
    assert k.norm_error() < 1e-12
    assert k.kz > 0


def test_idler_wavelength_from_energy_conservation():
    m = model_for("setup1")
    assert m.idler_wavelength == pytest.approx(1550.0719e-9, rel=1e-5)
    m2 = model_for("setup2")
    assert m2.idler_wavelength == pytest.approx(780.3432e-9, rel=1e-5)


def test_energy_conservation_enforced():
    m = model_for()
    k_s = PhotonMomentum.from_transverse(0.0, 0.0, m.omega_signal)
    k_bad = PhotonMomentum.from_transverse(0.0, 0.0, m.omega_idler * 1.01)
    with pytest.raises(ValueError):
        transition_amplitude(m, k_s, k_bad)


@pytest.mark.parametrize("name", ["setup1", "setup2"])
def test_collinear_pair_phase_matched(name):
    m = model_for(name)
    k_s = PhotonMomentum.from_transverse(0.0, 0.0, m.omega_signal)
    k_i = PhotonMomentum.from_transverse(0.0, 0.0, m.omega_idler)
    assert abs(phase_mismatch(m, k_s, k_i)) < 1e3


def test_amplitude_matches_formula():
    m = model_for()
    qs = np.array([3e3, -1e3])
    qi = np.array([-1e3, 2e3])
    qp = qs + qi
    dkz = m.delta_kz_q(qs, qi)
    expected = math.exp(-np.dot(qp, qp) * m.pump.waist**2 / 4.0) * np.sinc(
        dkz * m.crystal.length_z / 2.0 / math.pi
    )
    assert m.amplitude_q(qs, qi) == pytest.approx(expected, rel=1e-12)


def test_amplitude_symmetric_under_joint_mirror():
    m = model_for()
    rng = np.random.default_rng(0)
    qs = rng.normal(0, 3e3, size=(50, 2))
    qi = rng.normal(0, 3e3, size=(50, 2))
    np.testing.assert_array_equal(m.amplitude_q(qs, qi), m.amplitude_q(-qs, -qi))


def test_collinear_amplitude_is_peak():
    m = model_for()
    zero = np.zeros(2)
    peak = m.amplitude_q(zero, zero)
    assert peak == pytest.approx(m.amplitude_scale)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2e4, 2e4), st.floats(-2e4, 2e4), st.floats(-2e4, 2e4), st.floats(-2e4, 2e4))
def test_amplitude_bounded_by_scale(ax, ay, bx, by):
    m = model_for()
    val = m.amplitude_q(np.array([ax, ay]), np.array([bx, by]))
    assert abs(val) <= m.amplitude_scale + 1e-12


def test_kernel_normalized():
    grid = normalized_kernel(model_for())
    assert grid.values.sum() * grid.cell_area == pytest.approx(1.0, abs=1e-9)
    assert np.all(grid.values >= 0)


def test_kernel_truncation_guard():
    with pytest.raises(TruncationError):
        normalized_kernel(model_for(), extent=1.0 / 300e-6)  # one envelope sigma


def test_kernel_odd_counts_required():
    with pytest.raises(ValueError):
        normalized_kernel(model_for(), nx=128)


def test_kernel_interpolation_at_nodes_and_outside():
    grid = normalized_kernel(model_for(), nx=33, ny=33)
    gx, gy = np.meshgrid(grid.qx, grid.qy)
    np.testing.assert_allclose(grid.interpolate(gx, gy), grid.values, rtol=1e-12)
    far = grid.extent * 3
    assert grid.interpolate(np.array([far]), np.array([0.0]))[0] == 0.0


def test_domain_halfwidth_covers_mass():
    m = model_for()
    assert m.coverage(m.domain_halfwidth()) > 1.0 - 1e-4


def test_halved_waist_doubles_kernel_width():
    def half_max_radius(waist):
        grid = normalized_kernel(model_for(waist=waist))
        row = grid.values[grid.qy.size // 2]
        peak = row.max()
        above = grid.qx[row >= peak / 2]
        return above[-1] - above[0]

    r300 = half_max_radius(300e-6)
    r150 = half_max_radius(150e-6)
    assert r150 == pytest.approx(2 * r300, rel=0.02)
