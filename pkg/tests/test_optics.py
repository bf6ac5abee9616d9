import math

import numpy as np
import pytest

from qiupsim import config
from qiupsim.errors import NoSolution, ParaxialError
from qiupsim.optics import (
    ArmPath,
    Gap,
    LensElement,
    detector_point,
    magnification,
    match_signal_momentum,
    object_point,
    total_phase_difference,
    trace_ray,
)
from qiupsim.source import C, PhotonMomentum


def setup_for(name="setup1", **updates):
    import dataclasses
    cfg = config.preset(name)
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return config.build_setup(cfg)


def signal_momentum(setup, theta_x, theta_y=0.0):
    omega = setup.model1.omega_signal
    k = omega / C
    return PhotonMomentum.from_transverse(theta_x * k, theta_y * k, omega)


def idler_momentum(setup, theta_x, theta_y=0.0):
    omega = setup.model1.omega_idler
    k = omega / C
    return PhotonMomentum.from_transverse(theta_x * k, theta_y * k, omega)


def test_gap_and_lens_validation():
    with pytest.raises(ValueError):
        Gap(-1e-3)
    with pytest.raises(ValueError):
        LensElement(0.0)
    with pytest.raises(ValueError):
        ArmPath((Gap(0.1),), transmittance=1.5)


def test_far_field_stage_maps_angle_to_position():
    setup = setup_for()
    k = signal_momentum(setup, 1e-3)
    pos = detector_point(setup, k, which_source=2)
    assert abs(pos[0]) == pytest.approx(150e-6, rel=1e-6)
    assert pos[1] == pytest.approx(0.0, abs=1e-12)


def test_object_plane_position():
    setup = setup_for()
    k = idler_momentum(setup, 1e-3)
    pos = object_point(setup, k)
    assert pos[0] == pytest.approx(75e-6, rel=1e-6)


def test_magnification_presets():
    assert magnification(setup_for("setup1")) == pytest.approx(1.045, abs=0.001)
    assert magnification(setup_for("setup2")) == pytest.approx(2.158, abs=0.001)


def test_paraxial_bound_enforced():
    setup = setup_for()
    omega = setup.model1.omega_signal
    k = omega / C
    steep = PhotonMomentum.from_transverse(0.3 * k, 0.0, omega)
    with pytest.raises(ParaxialError):
        trace_ray(setup.arm_s2, steep)


def test_matched_momenta_are_mirrored():
    setup = setup_for()
    qs = np.array([[4e3, -2e3]])
    np.testing.assert_allclose(setup.match_signal_q(qs), -qs, atol=1e-9)
    qi = np.array([[1e3, 5e3]])
    np.testing.assert_allclose(setup.match_idler_q(qi), -qi, atol=1e-9)


def test_matched_momentum_lands_on_same_detector_point():
    setup = setup_for()
    k1 = signal_momentum(setup, 2e-3, -1e-3)
    k2 = match_signal_momentum(setup, k1)
    p1 = detector_point(setup, k1, which_source=1)
    p2 = detector_point(setup, k2, which_source=2)
    np.testing.assert_allclose(p1, p2, atol=1e-12)


def test_pixel_momentum_inverse():
    setup = setup_for()
    qs = setup.signal_pixel_to_q(np.array([3e-4]), np.array([-2e-4]))
    k = PhotonMomentum.from_transverse(qs[0, 0], qs[0, 1], setup.model1.omega_signal)
    pos = detector_point(setup, k, which_source=1)
    # the pixel map is linear in q while the traced slope is q / k_z, so the
    # inverse holds to paraxial (theta^2) accuracy
    assert pos[0] == pytest.approx(3e-4, rel=1e-5)
    assert pos[1] == pytest.approx(-2e-4, rel=1e-5)


def test_aligned_phase_is_object_phase():
    setup = setup_for()
    k_s = signal_momentum(setup, 1.5e-3)
    k_i = idler_momentum(setup, -0.7e-3)
    assert total_phase_difference(setup, k_s, k_i, phi_o=0.4) == pytest.approx(0.4, abs=1e-15)


def test_shifted_lens_on_axis_phase():
    # shifted thin lens hit on axis: phase difference pi * t^2 / (f * lambda)
    t = 0.3e-3
    f = 75e-3
    lam = 1550e-9
    arm = ArmPath((LensElement(f, transverse_shift=(t, 0.0)),))
    omega = 2 * math.pi * C / lam
    k = PhotonMomentum.from_transverse(0.0, 0.0, omega)
    diff = (trace_ray(arm, k).path_length - trace_ray(arm.aligned(), k).path_length)
    phase = omega / C * float(diff)
    assert phase == pytest.approx(math.pi * t**2 / (f * lam), rel=1e-9)
    assert phase == pytest.approx(2.432, abs=5e-3)


@pytest.mark.parametrize("x_l", [-1e-3, 0.0, 0.4e-3])
def test_shifted_lens_phase_formula(x_l):
    # ray reaching the lens at x_l: difference pi (t^2 - 2 x_l t) / (f lambda)
    t = 0.2e-3
    f = 100e-3
    lam = 810e-9
    d = 50e-3
    theta = x_l / d
    arm = ArmPath((Gap(d), LensElement(f, transverse_shift=(t, 0.0), axial_position=d)))
    omega = 2 * math.pi * C / lam
    k = PhotonMomentum.from_transverse(theta * omega / C, 0.0, omega)
    x_hit = d * k.slope[0]  # traced slope is q / k_z, not q / k
    diff = trace_ray(arm, k).path_length - trace_ray(arm.aligned(), k).path_length
    assert omega / C * float(diff) == pytest.approx(
        math.pi * (t**2 - 2 * x_hit * t) / (f * lam), rel=1e-9
    )


def test_misaligned_idler_phase_linear_in_momentum():
    setup = setup_for(lens_shift_i1=(0.3e-3, 0.0))
    qi = np.array([[0.0, 0.0], [2e3, 0.0], [4e3, 0.0]])
    phases = setup.idler_phase(qi)
    # equal steps in q produce equal phase steps
    assert phases[2] - phases[1] == pytest.approx(phases[1] - phases[0], rel=1e-9)
    assert phases[1] != phases[0]


def test_singular_arm_raises():
    setup = setup_for()
    import dataclasses
    broken = dataclasses.replace(setup, arm_s1=ArmPath((Gap(0.0),)))
    with pytest.raises(NoSolution):
        broken.signal_pixel_to_q(np.array([1e-4]), np.array([0.0]))


def test_aligned_copy_strips_shifts():
    setup = setup_for(lens_shift_i1=(0.3e-3, 0.0))
    assert not setup.is_aligned
    assert setup.aligned_copy().is_aligned
