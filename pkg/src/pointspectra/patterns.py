"""Observation windows, point patterns, and the pattern file format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Window", "PointPattern", "read_pattern", "write_pattern"]


@dataclass(frozen=True)
class Window:
    """Axis-aligned box [-R_1, R_1] x ... x [-R_d, R_d]."""

    half_widths: tuple

    def __post_init__(self):
        hw = tuple(float(h) for h in np.atleast_1d(self.half_widths))
        if len(hw) == 0 or any(h <= 0 for h in hw):
            raise ValueError("window half-widths must be positive")
        object.__setattr__(self, "half_widths", hw)

    @classmethod
    def square(cls, half_width, d=2):
        return cls((float(half_width),) * d)

    @property
    def d(self):
        return len(self.half_widths)

    @property
    def volume(self):
        return float(np.prod([2.0 * h for h in self.half_widths]))

    def contains(self, points):
        """Boolean mask of the rows of ``points`` lying in the box."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.d)
        hw = np.asarray(self.half_widths)
        return np.all(np.abs(pts) <= hw, axis=1)


class PointPattern:
    """A finite point configuration observed in a window.

    Points are stored as a read-only (n, d) float array; every point must
    lie inside the window.
    """

    def __init__(self, points, window):
        if not isinstance(window, Window):
            window = Window(window)
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            pts = np.empty((0, window.d))
        pts = pts.reshape(-1, window.d).copy()
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if pts.shape[0] and not np.all(window.contains(pts)):
            raise ValueError("all points must lie inside the window")
        pts.setflags(write=False)
        self.points = pts
        self.window = window

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.window.d

    def intensity_estimate(self):
        """Plug-in intensity, observed count divided by window volume."""
        return self.n / self.window.volume

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"PointPattern(n={self.n}, window={self.window.half_widths})"


def write_pattern(path, pattern):
    """Write a pattern file: header ``# window R_1 ... R_d``, one point per line."""
    with open(path, "w") as fh:
        fh.write("# window " + " ".join(repr(h) for h in pattern.window.half_widths) + "\n")
        for row in pattern.points:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_pattern(path):
    """Read a pattern file written by :func:`write_pattern`."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# window"):
            raise ValueError(f"{path}: missing '# window' header line")
        half_widths = tuple(float(tok) for tok in header.split()[2:])
        if not half_widths:
            raise ValueError(f"{path}: header lists no half-widths")
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    window = Window(half_widths)
    points = np.array(rows, dtype=float) if rows else np.empty((0, window.d))
    return PointPattern(points, window)
