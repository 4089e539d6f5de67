"""Fisher information assembly for the 6Q real parameters of a scene.

For a complex Gaussian observation whose covariance is parameter-free, the
information reduces to Gram products of mean derivatives. Every derivative of
the per-snapshot channel is a sum of rank-1 terms c * a_r a_t^T, so each FIM
entry collapses to products of length-N inner products:

    tr((u v^T)^H (w z^T)) = (u^H w) (v^H z)

and no N_r x N_t matrix is ever materialized during assembly. That keeps the
cost at O(M N) per inner product and makes 256-element arrays cheap.
"""

from dataclasses import dataclass

import numpy as np

from .scene import BLOCKS
from .steering import steering_stack

ISOTROPIC = "isotropic-ideal"
EXPLICIT = "explicit-symbols"


@dataclass(frozen=True)
class FisherInfo:
    """Real symmetric 6Q x 6Q information matrix plus its scale context."""

    matrix: np.ndarray
    q_count: int
    power_w: float
    noise_var_w: float
    snapshots: int


def _terms(kind, alpha):
    """Rank-1 decomposition of one derivative channel matrix.

    Each term (c, rx_key, tx_key) contributes c * rx[rx_key] tx[tx_key]^T,
    with keys into a SteeringStack. The reflectivity derivatives are the bare
    steering outer product (times j for the imaginary part); the kinematic
    derivatives follow the product rule over both sides.
    """
    if kind == "rcs_re":
        return ((1.0 + 0.0j, "a", "a"),)
    if kind == "rcs_im":
        return ((1.0j, "a", "a"),)
    if kind in ("x", "y", "vx", "vy"):
        key = "d_" + kind
        return ((alpha, key, "a"), (alpha, "a", key))
    raise ValueError(f"unknown parameter kind {kind!r}")


def channel_matrix(scene, m, q):
    """Rank-1 channel of target q at snapshot m: rcs * a_rx a_tx^T, (N_r, N_t)."""
    a_t = steering_stack(scene, "tx", q, m_values=[m]).a[0]
    a_r = steering_stack(scene, "rx", q, m_values=[m]).a[0]
    return scene.targets[q].rcs * np.outer(a_r, a_t)


def d_channel(scene, m, q, kind):
    """Derivative of the target-q channel w.r.t. one real parameter, (N_r, N_t)."""
    tx = steering_stack(scene, "tx", q, m_values=[m])
    rx = steering_stack(scene, "rx", q, m_values=[m])
    stacks = {"tx": {"a": tx.a[0], "d_x": tx.d_x[0], "d_y": tx.d_y[0],
                     "d_vx": tx.d_vx[0], "d_vy": tx.d_vy[0]},
              "rx": {"a": rx.a[0], "d_x": rx.d_x[0], "d_y": rx.d_y[0],
                     "d_vx": rx.d_vx[0], "d_vy": rx.d_vy[0]}}
    out = np.zeros((scene.rx.count, scene.tx.count), dtype=complex)
    for c, rkey, tkey in _terms(kind, scene.targets[q].rcs):
        out += c * np.outer(stacks["rx"][rkey], stacks["tx"][tkey])
    return out


def _stack_table(scene):
    """Per-side, per-target steering stacks keyed by (side, q, vector kind)."""
    table = {}
    for q in range(scene.q_count):
        for side in ("tx", "rx"):
            s = steering_stack(scene, side, q)
            table[side, q, "a"] = s.a
            table[side, q, "d_x"] = s.d_x
            table[side, q, "d_y"] = s.d_y
            table[side, q, "d_vx"] = s.d_vx
            table[side, q, "d_vy"] = s.d_vy
    return table


def _assemble(scene, table, transmit_mode, symbols):
    """FIM entries from the stack table; see fim() for the two modes."""
    q_count = scene.q_count
    n_par = 6 * q_count
    # one rank-1 term list per parameter, in block order
    params = []
    for kind in BLOCKS:
        for q in range(q_count):
            params.append([(c, q, rk, tk) for c, rk, tk in _terms(kind, scene.targets[q].rcs)])

    gram_cache = {}

    def gram(side, q1, k1, q2, k2):
        # u^H v summed over elements, one value per snapshot, size (M,)
        key = (side, q1, k1, q2, k2)
        if key not in gram_cache:
            swap = (side, q2, k2, q1, k1)
            if swap in gram_cache:
                gram_cache[key] = gram_cache[swap].conj()
            else:
                gram_cache[key] = np.einsum(
                    "mn,mn->m", table[side, q1, k1].conj(), table[side, q2, k2])
        return gram_cache[key]

    if transmit_mode == EXPLICIT:
        if symbols is None:
            raise ValueError("explicit-symbols mode needs a symbols matrix")
        x = np.asarray(symbols, dtype=complex)
        if x.shape != (scene.tx.count, scene.snapshots):
            raise ValueError(
                f"symbols must have shape (N_t, M) = "
                f"({scene.tx.count}, {scene.snapshots}), got {x.shape}")
        proj_cache = {}

        def proj(q, k):
            # tx vector applied to the symbol of each snapshot, size (M,)
            if (q, k) not in proj_cache:
                proj_cache[q, k] = np.einsum("mn,nm->m", table["tx", q, k], x)
            return proj_cache[q, k]

    f = np.zeros((n_par, n_par))
    for i in range(n_par):
        for j in range(i, n_par):
            acc = 0.0
            for ci, qi, rki, tki in params[i]:
                for cj, qj, rkj, tkj in params[j]:
                    rx_ip = gram("rx", qi, rki, qj, rkj)
                    if transmit_mode == EXPLICIT:
                        tx_ip = proj(qi, tki).conj() * proj(qj, tkj)
                    else:
                        tx_ip = gram("tx", qi, tki, qj, tkj)
                    acc += (np.conj(ci) * cj * (rx_ip * tx_ip).sum()).real
            f[i, j] = acc
            f[j, i] = acc

    if transmit_mode == EXPLICIT:
        f *= 2.0 / scene.noise_var_w
    else:
        f *= 2.0 * scene.power_w / scene.noise_var_w
    return f


def fim(scene, transmit_mode=ISOTROPIC, symbols=None):
    """Fisher information of all 6Q real parameters.

    Parameters
    ----------
    scene : Scene
    transmit_mode : str
        'isotropic-ideal' treats the per-snapshot symbol covariance as
        power_w * I, which resolves the expectation analytically through the
        trace identity. 'explicit-symbols' evaluates the information of one
        concrete symbol matrix instead.
    symbols : ndarray (N_t, M), optional
        Required in explicit-symbols mode.

    Returns
    -------
    FisherInfo
        Rows ordered [x_1..x_Q, y.., vx.., vy.., rcs_re.., rcs_im..].
    """
    if transmit_mode not in (ISOTROPIC, EXPLICIT):
        raise ValueError(f"unknown transmit mode {transmit_mode!r}")
    table = _stack_table(scene)
    f = _assemble(scene, table, transmit_mode, symbols)
    return FisherInfo(matrix=f, q_count=scene.q_count, power_w=scene.power_w,
                      noise_var_w=scene.noise_var_w, snapshots=scene.snapshots)
