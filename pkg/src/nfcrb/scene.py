"""Scenario assembly: waveform constants, arrays, targets, and the parameter vector.

The estimation parameter vector stacks the real unknowns of all Q targets
block-wise as [x_1..x_Q, y_1..y_Q, vx_1..vx_Q, vy_1..vy_Q, aR_1..aR_Q,
aI_1..aI_Q], i.e. six blocks of length Q.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry, ula

# block order of the real parameter vector; names match Target fields
BLOCKS = ("x", "y", "vx", "vy", "rcs_re", "rcs_im")

# rounded propagation speed keeps the 15 GHz default at exactly lambda = 0.02 m
LIGHTSPEED = 3.0e8

MIN_ELEMENT_CLEARANCE = 1e-6  # m, targets may not sit on array elements


class DegenerateGeometryError(ValueError):
    """Target coincides with an array element or sits at a zero-range point."""


@dataclass(frozen=True)
class Target:
    """Point scatterer with constant complex reflectivity over one CPI."""

    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0
    rcs_re: float = 1.0
    rcs_im: float = 0.0

    @property
    def rcs(self):
        return complex(self.rcs_re, self.rcs_im)

    @property
    def position(self):
        return np.array([self.x, self.y])

    @property
    def velocity(self):
        return np.array([self.vx, self.vy])


@dataclass(frozen=True)
class Scene:
    """Validated physical scenario for one coherent processing interval.

    noise_var_w is the per-sample complex noise variance in watts; power_w
    is the transmit power constraint applied across the Tx array.
    """

    carrier_hz: float
    wavelength_m: float
    t_sym_s: float
    snapshots: int
    power_w: float
    noise_var_w: float
    tx: ArrayGeometry
    rx: ArrayGeometry
    targets: tuple
    lightspeed: float = LIGHTSPEED

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.carrier_hz <= 0 or self.t_sym_s <= 0:
            raise ValueError("carrier_hz and t_sym_s must be positive")
        if self.snapshots < 1 or int(self.snapshots) != self.snapshots:
            raise ValueError(f"snapshots must be a positive integer, got {self.snapshots!r}")
        if self.power_w <= 0 or self.noise_var_w <= 0:
            raise ValueError("power_w and noise_var_w must be positive")
        if len(self.targets) < 1:
            raise ValueError("scene needs at least one target")
        if abs(self.wavelength_m * self.carrier_hz - self.lightspeed) > 1e-12 * self.lightspeed:
            raise ValueError("wavelength_m * carrier_hz must equal the configured lightspeed")

        min_range = math.inf
        for q, t in enumerate(self.targets):
            for geom in (self.tx, self.rx):
                d = np.hypot(t.x - geom.positions[:, 0], t.y - geom.positions[:, 1])
                if d.min() <= MIN_ELEMENT_CLEARANCE:
                    raise DegenerateGeometryError(
                        f"target {q} is within {MIN_ELEMENT_CLEARANCE} m of an array element"
                    )
                min_range = min(min_range, float(d.min()))
        # constant-velocity small-displacement assumption: the CPI-long travel
        # must stay far below the closest range or the static-phase model drifts
        for q, t in enumerate(self.targets):
            travel = math.hypot(t.vx, t.vy) * self.snapshots * self.t_sym_s
            if travel / min_range > 1e-2:
                warnings.warn(
                    f"target {q} moves {travel:.3g} m over the CPI at minimum range "
                    f"{min_range:.3g} m; the small-displacement model is strained",
                    stacklevel=3,
                )

    @property
    def q_count(self):
        return len(self.targets)


def make_scene(targets=None, tx=None, rx=None, carrier_hz=15.0e9, wavelength_m=None,
               t_sym_s=1e-4, snapshots=256, power_w=0.1, noise_var_w=None,
               lightspeed=LIGHTSPEED):
    """Build a validated Scene, filling canonical defaults for omitted pieces.

    Defaults follow the reference configuration: 15 GHz carrier, 256
    snapshots, 256-element half-wavelength monostatic ULAs, 0.1 W transmit
    power, -114 dBm noise, and a single target at 100 m range, 20 deg from
    broadside, velocity (1, 4) m/s, reflectivity 1 + 0.1j.
    """
    if wavelength_m is None:
        wavelength_m = lightspeed / carrier_hz
    if noise_var_w is None:
        noise_var_w = dbm_to_watts(-114.0)
    if tx is None:
        tx = ula(256, wavelength_m / 2.0)
    if rx is None:
        rx = ula(256, wavelength_m / 2.0)
    if targets is None:
        r, theta = 100.0, math.radians(20.0)
        targets = [Target(x=r * math.sin(theta), y=r * math.cos(theta),
                          vx=1.0, vy=4.0, rcs_re=1.0, rcs_im=0.1)]
    return Scene(carrier_hz=carrier_hz, wavelength_m=wavelength_m, t_sym_s=t_sym_s,
                 snapshots=snapshots, power_w=power_w, noise_var_w=noise_var_w,
                 tx=tx, rx=rx, targets=tuple(targets), lightspeed=lightspeed)


@dataclass(frozen=True)
class ParamVector:
    """Real parameter vector of length 6Q in the BLOCKS ordering."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0 or v.size % 6 != 0:
            raise ValueError(f"parameter vector length must be a positive multiple of 6, got {v.size}")
        object.__setattr__(self, "values", v)

    @property
    def q_count(self):
        return self.values.size // 6


def pack(targets):
    """Stack target parameters into a ParamVector (block-wise ordering)."""
    targets = list(targets)
    cols = [[getattr(t, name) for t in targets] for name in BLOCKS]
    return ParamVector(np.concatenate(cols))


def unpack(params, q_count=None):
    """Inverse of pack. Accepts a ParamVector or a raw value sequence."""
    values = params.values if isinstance(params, ParamVector) else np.asarray(params, dtype=float)
    if values.size % 6 != 0:
        raise ValueError(f"parameter vector length must be a multiple of 6, got {values.size}")
    q = values.size // 6
    if q_count is not None and q_count != q:
        raise ValueError(f"expected {q_count} targets, vector holds {q}")
    blocks = values.reshape(6, q)
    return tuple(Target(**{name: float(blocks[b, i]) for b, name in enumerate(BLOCKS)})
                 for i in range(q))


def param_index(block, q, q_count):
    """Row index of one scalar parameter in the 6Q ordering."""
    return BLOCKS.index(block) * q_count + q


def target_indices(q, q_count):
    """The six parameter rows belonging to target q, in BLOCKS order."""
    return [b * q_count + q for b in range(len(BLOCKS))]


def polar_of(target, geom):
    """Range and broadside angle of a target relative to an array's centroid.

    The angle is measured from the array normal (y-axis for x-axis ULAs), so
    x = centroid_x + r*sin(theta) and y = r*cos(theta).
    """
    if geom.centroid_x is not None:
        cx, cy = geom.centroid_x, 0.0
    else:
        cx, cy = geom.centroid
    dx, dy = target.x - cx, target.y - cy
    r = math.hypot(dx, dy)
    if r <= MIN_ELEMENT_CLEARANCE:
        raise DegenerateGeometryError("target sits at the array centroid")
    return r, math.atan2(dx, dy)


def dbm_to_watts(level_dbm):
    return 10.0 ** ((level_dbm - 30.0) / 10.0)
