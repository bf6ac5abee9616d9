import dataclasses
import math

import numpy as np
import pytest

from qiupsim import config
from qiupsim.analysis import (
    R_THRESHOLD,
    measure_magnification,
    resolution_limit,
    slit_ratio,
    stripe_period,
    waist_sweep,
)
from qiupsim.errors import FeatureNotFound, NoBracket
from qiupsim.source import normalized_kernel


def setup1():
    return config.build_setup(config.preset("setup1"))


def kernel_sigma(setup):
    """Gaussian width of the momentum kernel (rad/m)."""
    return math.sqrt(2.0) / setup.model1.pump.waist


def test_wide_slits_resolved():
    setup = setup1()
    # slits much wider than the kernel footprint in the object plane
    d = 5.0 * kernel_sigma(setup) * setup.focal_length_idler / setup.k_idler_vac
    assert slit_ratio(setup, d) < 0.1


def test_narrow_slits_unresolved():
    setup = setup1()
    blur = kernel_sigma(setup) * setup.focal_length_idler / setup.k_idler_vac
    d = 0.25 * blur
    try:
        r = slit_ratio(setup, d)
    except FeatureNotFound:
        return
    assert r > 0.9


def test_slit_ratio_matches_1d_quadrature():
    """Cross-check R against a dense 1d convolution done from scratch.

    The kernel is separable, so the central row of the pattern is the slit
    profile convolved with the marginal kernel along x.
    """
    setup = setup1()
    d = 140e-6
    kernel = normalized_kernel(setup.model1)
    wx = kernel.values.sum(axis=0)
    fine = np.linspace(kernel.qx[0], kernel.qx[-1], 40001)
    wx = np.interp(fine, kernel.qx, wx)
    wx = wx / wx.sum()
    # kernel momentum offsets map to object-plane positions
    scale = setup.focal_length_idler / setup.k_idler_vac
    ux = fine * scale
    x_fine = np.linspace(-3.5 * d, 3.5 * d, 30001)

    def t_o(x):
        t = np.zeros_like(x)
        for xc in (-2 * d, 0.0, 2 * d):
            t[(x >= xc - d / 2) & (x <= xc + d / 2)] = 1.0
        return t

    prof = np.array([
        float(np.dot(wx, t_o(x + ux))) for x in
        np.linspace(-1.6 * d, 1.6 * d, 1601)
    ])
    xs = np.linspace(-1.6 * d, 1.6 * d, 1601)
    vmax = prof[np.abs(xs) <= 0.75 * d].max()
    right = prof[(xs >= 0.5 * d) & (xs <= 1.5 * d)].min()
    left = prof[(xs >= -1.5 * d) & (xs <= -0.5 * d)].min()
    r_ref = 0.5 * (left + right) / vmax

    assert slit_ratio(setup, d) == pytest.approx(r_ref, abs=5e-3)


def test_ratio_decreases_with_slit_width():
    setup = setup1()
    assert slit_ratio(setup, 110e-6) > slit_ratio(setup, 160e-6) > slit_ratio(setup, 260e-6)


def test_resolution_limit_bracket_and_threshold():
    setup = setup1()
    res = resolution_limit(setup)
    assert 70e-6 < res.d_limit < 110e-6
    assert res.waist == setup.model1.pump.waist
    assert not res.deconvolved and res.iterations == 0
    # the search terminates on the threshold or on a tight bracket; pixel
    # quantization keeps R within a couple of percent of the threshold
    d_final, r_final = res.samples[-1]
    assert d_final == res.d_limit
    assert abs(r_final - R_THRESHOLD) < 0.02


def test_resolution_limit_improves_with_narrower_pump():
    import qiupsim.analysis as analysis

    setup = setup1()
    narrow = analysis._with_waist(setup, 150e-6)
    wide = analysis._with_waist(setup, 300e-6)
    assert resolution_limit(narrow).d_limit > resolution_limit(wide).d_limit


def test_no_bracket_when_dmax_too_small():
    setup = setup1()
    with pytest.raises(NoBracket):
        resolution_limit(setup, d_max=60e-6)


def test_measure_magnification_synthetic():
    m = 2.0
    pitch = 5e-6
    nx, ny = 1201, 4
    xs = (np.arange(nx) - (nx - 1) / 2.0) * pitch
    vis = np.ones((ny, nx))
    for xc in (-600e-6 * m, 600e-6 * m):
        vis[:, np.abs(xs - xc) < 100e-6 * m] = 0.2
    assert measure_magnification(vis, pitch, expected_m=m) == pytest.approx(m, abs=0.01)


def test_measure_magnification_window_out_of_range():
    vis = np.ones((4, 20))
    with pytest.raises(FeatureNotFound):
        measure_magnification(vis, 5e-6, expected_m=2.0)


def test_stripe_period_synthetic():
    pitch = 10e-6
    xs = np.arange(512) * pitch
    period = 405.3e-6
    row = 0.5 + 0.4 * np.cos(2 * np.pi * xs / period + 0.7)
    assert stripe_period(row, pitch) == pytest.approx(period, rel=1e-3)


def test_waist_sweep_collects_failures():
    setup = setup1()
    # at a 2 mm waist the limit drops below d_min, so that entry fails
    out = waist_sweep(setup, [300e-6, 2e-3])
    assert len(out) == 2
    assert out[0].d_limit == pytest.approx(86e-6, abs=5e-6)
    assert isinstance(out[1], (NoBracket, FeatureNotFound))
    with pytest.raises(ValueError):
        waist_sweep(setup, [])
