"""Fisher information assembly: structure, oracles, and scaling laws."""

import math

import numpy as np
import pytest

from nfcrb import (Target, channel_matrix, d_channel, fd_fim, fim, gain_terms,
                   make_scene, monte_carlo_isotropic, target_indices, ula)
from nfcrb.fim import EXPLICIT, ISOTROPIC

from util import canonical_scene, small_scene, target_at


def two_target_scene(n=8, m=8):
    return make_scene(targets=[target_at(100.0, 20.0),
                               target_at(150.0, -45.0, v=(4.0, 3.0), alpha=(0.8, -0.2))],
                      tx=ula(n, 0.01), rx=ula(n, 0.01), snapshots=m)


def rel_fro(a, b):
    return np.linalg.norm(a - b, "fro") / np.linalg.norm(b, "fro")


def test_fim_shape_and_metadata():
    s = two_target_scene()
    info = fim(s)
    assert info.matrix.shape == (12, 12)
    assert info.q_count == 2
    assert info.power_w == s.power_w
    assert info.noise_var_w == s.noise_var_w
    assert info.snapshots == s.snapshots


def test_fim_symmetric():
    info = fim(canonical_scene())
    np.testing.assert_array_equal(info.matrix, info.matrix.T)


def test_fim_positive_semidefinite():
    f = fim(canonical_scene()).matrix
    w = np.linalg.eigvalsh(f)
    assert w.min() >= -1e-8 * np.linalg.norm(f, 2)


@pytest.mark.parametrize("builder", [canonical_scene, two_target_scene])
def test_fim_matches_finite_differences(builder):
    s = builder()
    analytic = fim(s).matrix
    numeric = fd_fim(s).matrix
    assert rel_fro(analytic, numeric) < 1e-5


def test_explicit_fim_matches_finite_differences():
    s = canonical_scene()
    rng = np.random.default_rng(3)
    x = math.sqrt(s.power_w / 2.0) * (rng.standard_normal((s.tx.count, s.snapshots))
                                      + 1j * rng.standard_normal((s.tx.count, s.snapshots)))
    analytic = fim(s, transmit_mode=EXPLICIT, symbols=x).matrix
    numeric = fd_fim(s, transmit_mode=EXPLICIT, symbols=x).matrix
    assert rel_fro(analytic, numeric) < 1e-5


def test_isotropic_equals_explicit_for_constant_modulus_single_tx():
    # with one transmit element, unit-modulus symbols make x_m x_m^H = P exactly
    s = make_scene(targets=[target_at(100.0, 20.0)],
                   tx=ula(1, 0.01), rx=ula(16, 0.01), snapshots=8)
    rng = np.random.default_rng(11)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(1, s.snapshots))
    x = math.sqrt(s.power_w) * np.exp(1j * phases)
    ideal = fim(s).matrix
    concrete = fim(s, transmit_mode=EXPLICIT, symbols=x).matrix
    assert rel_fro(concrete, ideal) < 1e-12


def test_monte_carlo_average_converges_to_isotropic():
    s = make_scene(targets=[target_at(100.0, 20.0)],
                   tx=ula(4, 0.01), rx=ula(4, 0.01), snapshots=8)
    report = monte_carlo_isotropic(s, draws=1000, seed=0)
    assert report.passed
    assert report.rel_err <= report.tol
    # same seed, same draw sequence, same number
    again = monte_carlo_isotropic(s, draws=1000, seed=0)
    assert again.rel_err == report.rel_err


def test_monte_carlo_rejects_small_sample():
    with pytest.raises(ValueError):
        monte_carlo_isotropic(small_scene(), draws=400)


def test_fim_scales_linearly_with_power():
    base = small_scene(n=16, m=8)
    doubled = make_scene(targets=base.targets, tx=base.tx, rx=base.rx,
                         snapshots=base.snapshots, power_w=2.0 * base.power_w,
                         noise_var_w=base.noise_var_w)
    np.testing.assert_allclose(fim(doubled).matrix, 2.0 * fim(base).matrix, rtol=1e-12)


def test_fim_scales_inversely_with_noise():
    base = small_scene(n=16, m=8)
    noisier = make_scene(targets=base.targets, tx=base.tx, rx=base.rx,
                         snapshots=base.snapshots, power_w=base.power_w,
                         noise_var_w=2.0 * base.noise_var_w)
    np.testing.assert_allclose(fim(noisier).matrix, 0.5 * fim(base).matrix, rtol=1e-12)


def test_diagonal_blocks_equal_single_target_fims():
    # entry (i, j) with both parameters on target q only touches q's steering
    # stacks, so the q-block of a multi-target FIM is the single-target FIM
    s = two_target_scene()
    f = fim(s).matrix
    for q in range(2):
        alone = make_scene(targets=[s.targets[q]], tx=s.tx, rx=s.rx,
                           snapshots=s.snapshots, power_w=s.power_w,
                           noise_var_w=s.noise_var_w)
        idx = target_indices(q, 2)
        np.testing.assert_array_equal(f[np.ix_(idx, idx)], fim(alone).matrix)


def test_reflectivity_block_is_scaled_identity():
    s = small_scene(n=8, m=4)
    f = fim(s).matrix
    g = gain_terms(s, 0)
    expected = 2.0 * s.power_w * s.snapshots / s.noise_var_w * g.big_g_tx * g.big_g_rx
    i_re, i_im = 4, 5  # rcs_re and rcs_im rows of a single-target layout
    np.testing.assert_allclose(f[i_re, i_re], expected, rtol=1e-12)
    np.testing.assert_allclose(f[i_im, i_im], expected, rtol=1e-12)
    assert f[i_re, i_im] == 0.0


def test_zero_reflectivity_kills_kinematic_information():
    t = target_at(100.0, 20.0, alpha=(0.0, 0.0))
    s = make_scene(targets=[t], tx=ula(8, 0.01), rx=ula(8, 0.01), snapshots=4)
    f = fim(s).matrix
    assert np.all(f[:4, :] == 0.0)
    assert np.all(f[:, :4] == 0.0)
    assert f[4, 4] > 0.0 and f[5, 5] > 0.0


def test_target_order_permutes_blocks():
    s = two_target_scene()
    swapped = make_scene(targets=[s.targets[1], s.targets[0]], tx=s.tx, rx=s.rx,
                         snapshots=s.snapshots, power_w=s.power_w,
                         noise_var_w=s.noise_var_w)
    f, g = fim(s).matrix, fim(swapped).matrix
    perm = np.empty(12, dtype=int)
    for q in (0, 1):
        perm[target_indices(q, 2)] = target_indices(1 - q, 2)
    np.testing.assert_array_equal(g, f[np.ix_(perm, perm)])


def test_explicit_mode_validates_symbols():
    s = small_scene(n=4, m=4)
    with pytest.raises(ValueError, match="needs a symbols matrix"):
        fim(s, transmit_mode=EXPLICIT)
    with pytest.raises(ValueError, match="shape"):
        fim(s, transmit_mode=EXPLICIT, symbols=np.ones((4, 3)))


def test_unknown_transmit_mode_rejected():
    with pytest.raises(ValueError, match="transmit mode"):
        fim(small_scene(), transmit_mode="beamformed")


def test_channel_matrix_is_rank_one_outer_product():
    s = small_scene(n=4, m=4)
    h = channel_matrix(s, 2, 0)
    assert h.shape == (4, 4)
    assert np.linalg.matrix_rank(h) == 1
    # reflectivity derivative channels reproduce the bare outer product
    np.testing.assert_allclose(d_channel(s, 2, 0, "rcs_re") * s.targets[0].rcs, h,
                               rtol=1e-15)
    np.testing.assert_allclose(d_channel(s, 2, 0, "rcs_im"),
                               1j * d_channel(s, 2, 0, "rcs_re"), rtol=1e-15)


def test_d_channel_rejects_unknown_kind():
    with pytest.raises(ValueError, match="unknown parameter"):
        d_channel(small_scene(), 1, 0, "z")
