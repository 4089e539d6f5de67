"""Antenna array geometry: centered uniform linear arrays and field-region boundaries."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ArrayGeometry:
    """Element layout of one antenna array.

    Parameters
    ----------
    positions : ndarray, shape (N, 2)
        Element coordinates in meters.
    spacing : float or None
        Inter-element pitch in meters. None for free-form layouts, where
        pitch is not defined.
    centroid_x : float or None
        Phase-center x coordinate for arrays built on the x-axis. None for
        free-form layouts (the centroid is then the mean element position).
    """

    positions: np.ndarray
    spacing: float | None = None
    centroid_x: float | None = None

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (N, 2), got {pos.shape}")
        if pos.shape[0] < 1:
            raise ValueError("array needs at least one element")
        object.__setattr__(self, "positions", pos)

    @property
    def count(self):
        return self.positions.shape[0]

    @property
    def centroid(self):
        """Mean element position, shape (2,)."""
        return self.positions.mean(axis=0)

    def aperture(self):
        """Array aperture D in meters.

        (count - 1) * spacing for uniform arrays, otherwise the largest
        pairwise element separation.
        """
        if self.spacing is not None:
            return (self.count - 1) * self.spacing
        # free layout: max pairwise distance, N is small enough for O(N^2)
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())

    def region_boundaries(self, wavelength):
        """Reactive and Fraunhofer boundary ranges (meters) for this aperture.

        Returns (0.62*sqrt(D^3/wavelength), 2*D^2/wavelength); both are 0 for
        a single-element array.
        """
        if wavelength <= 0:
            raise ValueError("wavelength must be positive")
        d = self.aperture()
        if d == 0.0:
            return 0.0, 0.0
        return 0.62 * np.sqrt(d ** 3 / wavelength), 2.0 * d ** 2 / wavelength

    def moment_sums(self):
        """First and second moments of element x offsets about the centroid.

        For a centered ULA with pitch d the closed forms are 0 and
        N*(N^2-1)*d^2/12; both are evaluated by direct summation here.
        """
        cx = self.centroid_x if self.centroid_x is not None else self.centroid[0]
        off = self.positions[:, 0] - cx
        return float(off.sum()), float((off ** 2).sum())


def ula(count, spacing, centroid_x=0.0):
    """Uniform linear array on the x-axis, centered at centroid_x.

    Element n sits at centroid_x + (n - (count+1)/2)*spacing for n = 1..count,
    so element offsets are symmetric about the phase center.
    """
    if int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    count = int(count)
    n = np.arange(1, count + 1)
    x = centroid_x + (n - (count + 1) / 2.0) * spacing
    pos = np.column_stack([x, np.zeros(count)])
    return ArrayGeometry(pos, spacing=float(spacing), centroid_x=float(centroid_x))


def from_positions(positions):
    """Free-form planar array from explicit (x, y) element coordinates.

    Intended for testing (rotated scenes and irregular layouts); the ULA
    constructor is the canonical path.
    """
    return ArrayGeometry(np.asarray(positions, dtype=float))
