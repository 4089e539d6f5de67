"""Estimation bounds: inverse-information extraction and single-target closed forms.

Bounds that are analytically infinite (zero information, e.g. the broadside
divergence of the far-field model) are reported as float('inf'), never raised;
divergence is a result, not a failure.
"""

import math
from dataclasses import dataclass

import numpy as np

from .scene import BLOCKS, target_indices
from .steering import steering_stack

CONDITION_LIMIT = 1e12

METHOD_FULL = "exact-full"
METHOD_SCHUR = "exact-schur"
METHOD_CLOSED = "closed-form"


class SingularFimError(np.linalg.LinAlgError):
    """The information matrix (or a nuisance block of it) is not invertible."""


@dataclass(frozen=True)
class TargetBounds:
    """Variance lower bounds for the six parameters of one target."""

    crb_x: float
    crb_y: float
    crb_vx: float
    crb_vy: float
    crb_alpha_r: float
    crb_alpha_i: float

    @property
    def crb_alpha(self):
        """Summed reflectivity bound (real plus imaginary part)."""
        return self.crb_alpha_r + self.crb_alpha_i

    def by_name(self, name):
        return {"x": self.crb_x, "y": self.crb_y, "vx": self.crb_vx,
                "vy": self.crb_vy, "alpha_r": self.crb_alpha_r,
                "alpha_i": self.crb_alpha_i, "rcs": self.crb_alpha}[name]


@dataclass(frozen=True)
class CrbReport:
    targets: tuple
    method: str
    condition_number: float | None = None
    status: str = "ok"


def _bounds_from_diag(diag, q, q_count):
    idx = {kind: BLOCKS.index(kind) * q_count + q for kind in BLOCKS}
    return TargetBounds(crb_x=diag[idx["x"]], crb_y=diag[idx["y"]],
                        crb_vx=diag[idx["vx"]], crb_vy=diag[idx["vy"]],
                        crb_alpha_r=diag[idx["rcs_re"]], crb_alpha_i=diag[idx["rcs_im"]])


def full_crb(info):
    """Invert the full FIM through a symmetric eigendecomposition.

    Returns (crb_matrix, CrbReport). An eigenvalue at machine-zero raises
    SingularFimError; a condition number above 1e12 is reported as status
    'ill-conditioned' with the entries left in place but unreliable.
    """
    f = info.matrix
    w, v = np.linalg.eigh(f)
    scale = abs(w).max()
    if scale == 0.0 or w.min() <= scale * np.finfo(float).eps:
        raise SingularFimError("information matrix is singular")
    cond = float(w.max() / w.min())
    status = "ok" if cond <= CONDITION_LIMIT else "ill-conditioned"
    crb = (v / w) @ v.T
    diag = np.diag(crb)
    targets = tuple(_bounds_from_diag(diag, q, info.q_count) for q in range(info.q_count))
    return crb, CrbReport(targets=targets, method=METHOD_FULL,
                          condition_number=cond, status=status)


def conditional_crb(info, indices):
    """Bound matrix for a parameter subset with the rest treated as nuisance.

    Computes (F_ss - F_sn F_nn^-1 F_ns)^-1, which equals the corresponding
    sub-block of the full inverse; doing it this way stays cheap when only a
    few parameters are of interest.
    """
    f = info.matrix
    sel = np.asarray(indices, dtype=int)
    nui = np.setdiff1d(np.arange(f.shape[0]), sel)
    f_ss = f[np.ix_(sel, sel)]
    if nui.size == 0:
        schur = f_ss
    else:
        f_sn = f[np.ix_(sel, nui)]
        f_nn = f[np.ix_(nui, nui)]
        try:
            schur = f_ss - f_sn @ np.linalg.solve(f_nn, f_sn.T)
        except np.linalg.LinAlgError as e:
            raise SingularFimError("nuisance block is singular") from e
    try:
        return np.linalg.inv(schur)
    except np.linalg.LinAlgError as e:
        raise SingularFimError("conditioned information block is singular") from e


def schur_target_report(info, q):
    """Per-target bounds with every other parameter treated as nuisance."""
    sub = conditional_crb(info, target_indices(q, info.q_count))
    return CrbReport(targets=(_bounds_from_diag(np.diag(sub), 0, 1),),
                     method=METHOD_SCHUR, condition_number=float(np.linalg.cond(sub)))


def closed_form_single(scene, q):
    """Single-target bounds with all other parameters of the target known.

    Each bound is the reciprocal of one Fisher diagonal entry, evaluated from
    exact steering norms and inner products:

        crb_alpha_r = crb_alpha_i
                    = sigma^2 / (2 P sum_m ||a_rx||^2 ||a_tx||^2)
        crb_p       = sigma^2 / (2 |rcs|^2 P sum_m S_p(m))

    with S_p(m) = ||da_rx||^2 ||a_tx||^2
                + 2 Re{(da_rx^H a_rx)(a_tx^H da_tx)}
                + ||a_rx||^2 ||da_tx||^2
    for each kinematic parameter p. Zero information (rcs = 0) yields inf.
    Inter-target coupling is ignored by construction.
    """
    tx = steering_stack(scene, "tx", q)
    rx = steering_stack(scene, "rx", q)
    half = 2.0 * scene.power_w / scene.noise_var_w
    alpha2 = abs(scene.targets[q].rcs) ** 2

    norm_at = np.einsum("mn,mn->m", tx.a.conj(), tx.a).real  # (M,)
    norm_ar = np.einsum("mn,mn->m", rx.a.conj(), rx.a).real
    f_alpha = half * (norm_ar * norm_at).sum()
    crb_alpha_part = 1.0 / f_alpha if f_alpha > 0.0 else math.inf

    def kinematic(kind):
        d_t = tx.derivative(kind)
        d_r = rx.derivative(kind)
        s = (np.einsum("mn,mn->m", d_r.conj(), d_r).real * norm_at
             + 2.0 * (np.einsum("mn,mn->m", d_r.conj(), rx.a)
                      * np.einsum("mn,mn->m", tx.a.conj(), d_t)).real
             + norm_ar * np.einsum("mn,mn->m", d_t.conj(), d_t).real)
        f = half * alpha2 * s.sum()
        return 1.0 / f if f > 0.0 else math.inf

    bounds = TargetBounds(crb_x=kinematic("x"), crb_y=kinematic("y"),
                          crb_vx=kinematic("vx"), crb_vy=kinematic("vy"),
                          crb_alpha_r=crb_alpha_part, crb_alpha_i=crb_alpha_part)
    return CrbReport(targets=(bounds,), method=METHOD_CLOSED)
