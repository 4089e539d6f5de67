"""Independent numeric ground truth for the analytic machinery.

Everything here recomputes quantities the other modules obtain analytically,
by a deliberately different route: central finite differences for
derivatives, brute-force element sums for gains, and Monte Carlo symbol
averaging for the isotropic-transmission idealization. Intended for desk
scale scenes; the finite-difference path materializes (M, N_r, N_t) stacks.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .fim import EXPLICIT, ISOTROPIC, FisherInfo, _assemble, _stack_table, fim
from .scene import BLOCKS
from .steering import steering_stack, steering_vector

REL_ERR_FLOOR = 1e-30

# central-difference steps sized against the carrier wavelength (phase varies
# at that scale, so position steps must sit far below it)
DEFAULT_STEPS = {"x": 1e-6, "y": 1e-6, "vx": 1e-4, "vy": 1e-4,
                 "rcs_re": 1e-6, "rcs_im": 1e-6}

BRUTE_KINDS = ("g", "gdot_x", "gdot_y", "cross_x", "cross_y")


@dataclass(frozen=True)
class OracleReport:
    """One analytic-versus-oracle comparison with its verdict."""

    name: str
    analytic: float
    oracle: float
    rel_err: float
    steps: tuple
    tol: float
    passed: bool


def relative_difference(analytic, oracle, floor=REL_ERR_FLOOR):
    return abs(analytic - oracle) / max(abs(oracle), floor)


def make_report(name, analytic, oracle, tol, steps=()):
    err = relative_difference(analytic, oracle)
    return OracleReport(name=name, analytic=float(analytic), oracle=float(oracle),
                        rel_err=float(err), steps=tuple(steps), tol=float(tol),
                        passed=bool(err <= tol))


def _check_step(step, value):
    if step < 10.0 * np.finfo(float).eps * max(1.0, abs(value)):
        raise ValueError(f"finite-difference step {step} underflows at value {value}")


def _perturbed(scene, q, kind, delta):
    target = scene.targets[q]
    shifted = dataclasses.replace(target, **{kind: getattr(target, kind) + delta})
    targets = list(scene.targets)
    targets[q] = shifted
    return dataclasses.replace(scene, targets=tuple(targets))


def fd_steering(scene, side, m, q, kind, steps=None):
    """Central finite difference of one steering vector w.r.t. one parameter."""
    steps = {**DEFAULT_STEPS, **(steps or {})}
    h = steps[kind]
    _check_step(h, getattr(scene.targets[q], kind))
    plus = steering_vector(_perturbed(scene, q, kind, +h), side, m, q)
    minus = steering_vector(_perturbed(scene, q, kind, -h), side, m, q)
    return (plus - minus) / (2.0 * h)


def _channel_stack(scene):
    """Full multi-target channel for every snapshot, (M, N_r, N_t)."""
    out = np.zeros((scene.snapshots, scene.rx.count, scene.tx.count), dtype=complex)
    for q in range(scene.q_count):
        a_t = steering_stack(scene, "tx", q).a
        a_r = steering_stack(scene, "rx", q).a
        out += scene.targets[q].rcs * np.einsum("mr,mt->mrt", a_r, a_t)
    return out


def fd_fim(scene, steps=None, transmit_mode=ISOTROPIC, symbols=None):
    """Fisher information with mean derivatives from central finite differences.

    Only the derivative source differs from the analytic path: each channel
    derivative stack is (A(theta + h) - A(theta - h)) / 2h, and the same
    trace (or symbol projection) reduction is applied afterwards.
    """
    steps = {**DEFAULT_STEPS, **(steps or {})}
    n_par = 6 * scene.q_count
    derivs = []
    for kind in BLOCKS:
        for q in range(scene.q_count):
            h = steps[kind]
            _check_step(h, getattr(scene.targets[q], kind))
            plus = _channel_stack(_perturbed(scene, q, kind, +h))
            minus = _channel_stack(_perturbed(scene, q, kind, -h))
            derivs.append((plus - minus) / (2.0 * h))

    if transmit_mode == EXPLICIT:
        if symbols is None:
            raise ValueError("explicit-symbols mode needs a symbols matrix")
        x = np.asarray(symbols, dtype=complex)
        # mean derivative per snapshot, (M, N_r)
        mu = [np.einsum("mrt,tm->mr", d, x) for d in derivs]
        f = np.zeros((n_par, n_par))
        for i in range(n_par):
            for j in range(i, n_par):
                val = (2.0 / scene.noise_var_w
                       * np.einsum("mr,mr->", mu[i].conj(), mu[j]).real)
                f[i, j] = val
                f[j, i] = val
    else:
        f = np.zeros((n_par, n_par))
        for i in range(n_par):
            for j in range(i, n_par):
                val = (2.0 * scene.power_w / scene.noise_var_w
                       * np.einsum("mrt,mrt->", derivs[i].conj(), derivs[j]).real)
                f[i, j] = val
                f[j, i] = val
    return FisherInfo(matrix=f, q_count=scene.q_count, power_w=scene.power_w,
                      noise_var_w=scene.noise_var_w, snapshots=scene.snapshots)


def brute_gain(geom, target, kind):
    """Exact element sums behind the gain expansions.

    g:       sum 1/r^2          gdot_x:  sum (x_q - x_n)^2 / r^4
    cross_x: sum (x_q - x_n) / r^3       (y kinds likewise)
    """
    if kind not in BRUTE_KINDS:
        raise ValueError(f"kind must be one of {BRUTE_KINDS}, got {kind!r}")
    dx = target.x - geom.positions[:, 0]
    dy = target.y - geom.positions[:, 1]
    r2 = dx ** 2 + dy ** 2
    if r2.min() <= 0.0:
        raise ValueError("target coincides with an array element")
    if kind == "g":
        return float((1.0 / r2).sum())
    if kind == "gdot_x":
        return float((dx ** 2 / r2 ** 2).sum())
    if kind == "gdot_y":
        return float((dy ** 2 / r2 ** 2).sum())
    r3 = r2 ** 1.5
    off = dx if kind == "cross_x" else dy
    return float((off / r3).sum())


def monte_carlo_isotropic(scene, draws=1000, seed=0):
    """Average explicit-symbol FIMs over random draws against the ideal FIM.

    Symbols are i.i.d. complex Gaussian with per-entry variance power_w, so
    the per-snapshot covariance is power_w * I in expectation. The tolerance
    is the usual 3 / sqrt(draws) Monte Carlo scale.
    """
    if draws < 1000:
        raise ValueError("draws must be at least 1000 for a meaningful average")
    rng = np.random.default_rng(seed)
    reference = fim(scene).matrix
    table = _stack_table(scene)
    mean = np.zeros_like(reference)
    shape = (scene.tx.count, scene.snapshots)
    scale = math.sqrt(scene.power_w / 2.0)
    for i in range(draws):
        x = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        mean += _assemble(scene, table, EXPLICIT, x)
    mean /= draws
    err = (np.linalg.norm(mean - reference, "fro")
           / max(np.linalg.norm(reference, "fro"), REL_ERR_FLOOR))
    tol = 3.0 / math.sqrt(draws)
    return OracleReport(name="monte-carlo-isotropic", analytic=float(np.linalg.norm(reference, "fro")),
                        oracle=float(np.linalg.norm(mean, "fro")), rel_err=float(err),
                        steps=(draws, seed), tol=tol, passed=bool(err <= tol))
