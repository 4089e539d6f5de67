import math

import numpy as np
import pytest

from nfcrb import (Target, d_steering_location, d_steering_velocity,
                   doppler_shift, fd_steering, make_scene, pathloss,
                   steering_stack, steering_vector, ula)

from util import canonical_scene, small_scene, target_at


def test_single_element_entry_frozen_value():
    # one element at the origin, static target 100 m up, lambda = 0.02 m:
    # the range is an integer number of wavelengths so the phase winds to ~0
    s = make_scene(targets=[Target(x=0.0, y=100.0)],
                   tx=ula(1, 0.01), rx=ula(1, 0.01), snapshots=1)
    entry = steering_vector(s, "tx", 1, 0)[0]
    g = 1.5915494309189534e-05
    assert abs(entry) == pytest.approx(g, rel=1e-12)
    expected = g * np.exp(-1j * (2 * np.pi / 0.02) * 100.0)
    assert entry == pytest.approx(expected, rel=1e-12)


def test_entry_magnitude_equals_pathloss_everywhere():
    s = small_scene(n=8, m=4)
    t = s.targets[0]
    for side in ("tx", "rx"):
        geom = getattr(s, side)
        stack = steering_stack(s, side, 0)
        per_element = np.array([pathloss((t.x, t.y), pos, s.wavelength_m)
                                for pos in geom.positions])
        np.testing.assert_allclose(np.abs(stack.a),
                                   np.broadcast_to(per_element, stack.a.shape),
                                   rtol=1e-13)


def test_static_target_steering_identical_across_snapshots():
    s = small_scene(v=(0.0, 0.0))
    stack = steering_stack(s, "rx", 0)
    np.testing.assert_array_equal(stack.a, np.broadcast_to(stack.a[0], stack.a.shape))


def test_snapshot_phase_progression_matches_doppler():
    s = small_scene(n=4, m=3)
    t = s.targets[0]
    stack = steering_stack(s, "tx", 0)
    ratio = stack.a[1:] / stack.a[:-1]
    # one-way shift of each element path = half the monostatic two-way shift
    shift = np.array([doppler_shift(t, pos, pos, s.carrier_hz, s.lightspeed) / 2
                      for pos in s.tx.positions])
    expected = np.exp(1j * 2 * np.pi * shift * s.t_sym_s)
    # ratios inherit ~eps*k*r relative noise from the large common carrier phase
    np.testing.assert_allclose(ratio, np.broadcast_to(expected, ratio.shape), rtol=1e-10)


def test_velocity_derivative_linear_in_slow_time():
    s = small_scene(m=8, v=(0.0, 0.0))
    base = d_steering_velocity(s, "rx", 1, 0, "x")
    for m in (2, 5, 8):
        np.testing.assert_allclose(d_steering_velocity(s, "rx", m, 0, "x"),
                                   m * base, rtol=1e-13)


def test_velocity_derivative_magnitude_factor():
    s = small_scene(n=4, m=4)
    m = 3
    d = d_steering_velocity(s, "tx", m, 0, "x")
    a = steering_vector(s, "tx", m, 0)
    t = s.targets[0]
    dx = t.x - s.tx.positions[:, 0]
    dy = t.y - s.tx.positions[:, 1]
    r = np.hypot(dx, dy)
    k = 2 * np.pi * s.carrier_hz / s.lightspeed
    np.testing.assert_allclose(np.abs(d), k * m * s.t_sym_s * np.abs(dx) / r * np.abs(a),
                               rtol=1e-13)


def test_broadside_element_kills_x_derivatives():
    # static target directly above the only element
    s = make_scene(targets=[Target(x=0.0, y=50.0)],
                   tx=ula(1, 0.01), rx=ula(1, 0.01), snapshots=2)
    assert d_steering_velocity(s, "tx", 1, 0, "x")[0] == 0
    assert d_steering_location(s, "tx", 1, 0, "x")[0] == 0


def test_static_location_factor_reduces_to_two_terms():
    s = small_scene(n=4, m=4, v=(0.0, 0.0))
    m = 2
    d = d_steering_location(s, "rx", m, 0, "x")
    a = steering_vector(s, "rx", m, 0)
    t = s.targets[0]
    dx = t.x - s.rx.positions[:, 0]
    r = np.hypot(dx, t.y - s.rx.positions[:, 1])
    k = 2 * np.pi * s.carrier_hz / s.lightspeed
    factor = -1j * k * dx / r - dx / r ** 2
    np.testing.assert_allclose(d, factor * a, rtol=1e-13)


def test_stack_derivative_lookup_matches_functions():
    s = small_scene(n=4, m=3)
    stack = steering_stack(s, "tx", 0)
    np.testing.assert_array_equal(stack.derivative("vx")[1],
                                  d_steering_velocity(s, "tx", 2, 0, "x"))
    np.testing.assert_array_equal(stack.derivative("y")[2],
                                  d_steering_location(s, "tx", 3, 0, "y"))


@pytest.mark.parametrize("kind", ["x", "y", "vx", "vy"])
def test_derivatives_match_finite_differences(kind):
    s = canonical_scene()
    for side in ("tx", "rx"):
        for m in (2, 8, 16):
            if kind in ("x", "y"):
                ana = d_steering_location(s, side, m, 0, kind)
            else:
                ana = d_steering_velocity(s, side, m, 0, kind[1])
            ref = fd_steering(s, side, m, 0, kind)
            err = np.linalg.norm(ana - ref) / np.linalg.norm(ref)
            assert err < 1e-6, (side, m, kind, err)


def test_fd_rejects_underflowing_step():
    s = small_scene()
    with pytest.raises(ValueError):
        fd_steering(s, "tx", 1, 0, "x", steps={"x": 1e-22})
