import numpy as np
import pytest
from scipy.signal import fftconvolve

from qiupsim.detection import VisibilityMap
from qiupsim.errors import DimensionMismatch, KernelMismatch
from qiupsim.restore import richardson_lucy, rmse


def vmap(values, pitch=5e-6):
    values = np.asarray(values, dtype=float)
    return VisibilityMap(values=values, clipped=np.zeros(values.shape, dtype=bool),
                         pitch=pitch)


def gaussian_psf(n=15, sigma=2.0):
    ax = np.arange(n) - n // 2
    gx, gy = np.meshgrid(ax, ax)
    p = np.exp(-(gx**2 + gy**2) / (2 * sigma**2))
    return p / p.sum()


def bar_scene(shape=(48, 96)):
    truth = np.ones(shape)
    truth[:, 30:38] = 0.0
    truth[:, 58:66] = 0.0
    return truth


def test_zero_iterations_is_identity():
    rng = np.random.default_rng(3)
    img = vmap(rng.uniform(0, 1, (20, 20)))
    out = richardson_lucy(img, gaussian_psf(), 0)
    np.testing.assert_array_equal(out.values, img.values)
    assert out.pitch == img.pitch


def test_delta_kernel_fixed_point():
    rng = np.random.default_rng(4)
    img = vmap(rng.uniform(0.1, 1, (20, 20)))
    delta = np.zeros((5, 5))
    delta[2, 2] = 1.0
    out = richardson_lucy(img, delta, 10)
    np.testing.assert_allclose(out.values, img.values, atol=1e-10)


def test_deconvolution_reduces_rmse():
    truth = bar_scene()
    psf = gaussian_psf()
    pad = psf.shape[0] // 2
    blurred = fftconvolve(np.pad(truth, pad, mode="reflect"), psf, mode="valid")
    img = vmap(blurred)
    restored = richardson_lucy(img, psf, 50)
    assert rmse(restored, vmap(truth)) < 0.75 * rmse(img, vmap(truth))
    deeper = richardson_lucy(img, psf, 100)
    assert rmse(deeper, vmap(truth)) < rmse(restored, vmap(truth))


def test_output_non_negative_and_flux_preserving():
    truth = bar_scene()
    psf = gaussian_psf()
    pad = psf.shape[0] // 2
    blurred = fftconvolve(np.pad(truth, pad, mode="reflect"), psf, mode="valid")
    img = vmap(blurred)
    restored = richardson_lucy(img, psf, 50)
    assert restored.values.min() >= 0.0
    assert restored.values.sum() == pytest.approx(img.values.sum(), rel=0.01)


def test_kernel_larger_than_image_rejected():
    img = vmap(np.ones((10, 10)))
    with pytest.raises(KernelMismatch):
        richardson_lucy(img, gaussian_psf(n=11), 1)


def test_even_kernel_rejected():
    img = vmap(np.ones((20, 20)))
    with pytest.raises(KernelMismatch):
        richardson_lucy(img, np.full((4, 4), 1 / 16), 1)


def test_negative_image_rejected():
    vals = np.ones((10, 10))
    vals[0, 0] = -0.1
    img = VisibilityMap(values=vals, clipped=np.zeros_like(vals, dtype=bool), pitch=5e-6)
    with pytest.raises(ValueError):
        richardson_lucy(img, gaussian_psf(n=5), 1)


def test_negative_iterations_rejected():
    img = vmap(np.ones((10, 10)))
    with pytest.raises(ValueError):
        richardson_lucy(img, gaussian_psf(n=5), -1)


def test_rmse_values():
    a = vmap(np.ones((8, 8)))
    assert rmse(a, a) == 0.0
    b = vmap(np.ones((8, 8)) + 0.1)
    assert rmse(a, b) == pytest.approx(0.1)


def test_rmse_region():
    a = vmap(np.zeros((8, 8)))
    vals = np.zeros((8, 8))
    vals[0:4, 0:4] = 1.0
    b = vmap(vals)
    assert rmse(a, b, region=(0, 4, 0, 4)) == pytest.approx(1.0)
    assert rmse(a, b, region=(4, 8, 4, 8)) == 0.0
    with pytest.raises(DimensionMismatch):
        rmse(a, b, region=(0, 9, 0, 4))
    with pytest.raises(DimensionMismatch):
        rmse(a, vmap(np.zeros((8, 9))))
