"""Covariance functions for the Gaussian fields driving the Cox models."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

__all__ = ["ExponentialCovariance", "BumpCovariance", "bump_profile"]


@dataclass(frozen=True)
class ExponentialCovariance:
    """c(x) = sigma2 * exp(-|x| / alpha)."""

    sigma2: float
    alpha: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")

    @property
    def at_zero(self):
        return self.sigma2

    def at_radius(self, s):
        s = np.asarray(s, dtype=float)
        return self.sigma2 * np.exp(-s / self.alpha)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.at_radius(np.linalg.norm(np.atleast_2d(x), axis=-1))


@lru_cache(maxsize=1)
def bump_profile():
    """Radial profile of the normalized self-convolution bump c0.

    c0 = (phi * phi) / max(phi * phi) with phi(x) = exp(-1/(1 - |4x|^2))
    supported in the ball B(0, 1/4); the convolution is supported in
    B(0, 1/2), takes values in [0, 1], equals 1 at the origin and is
    positive definite by construction.  Returns a cubic spline of the
    radial profile on [0, 1/2].
    """
    nodes, weights = leggauss(90)
    # tensor rule on the support square of phi
    z = 0.25 * nodes
    wz = 0.25 * weights
    z1, z2 = np.meshgrid(z, z, indexing="ij")
    w2 = np.outer(wz, wz)

    def phi(u1, u2):
        rr = 16.0 * (u1 * u1 + u2 * u2)
        out = np.zeros_like(rr)
        inside = rr < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - rr[inside]))
        return out

    base = phi(z1, z2)
    radii = np.linspace(0.0, 0.5, 101)
    prof = np.empty_like(radii)
    for j, s in enumerate(radii):
        prof[j] = np.sum(w2 * base * phi(s - z1, -z2))
    prof /= prof[0]
    prof[-1] = 0.0
    return CubicSpline(radii, prof, bc_type="clamped")


@dataclass(frozen=True)
class BumpCovariance:
    """c(x) = sigma2 * c0(x / rho) with the compactly supported bump c0.

    The support of c is the ball of radius rho/2.
    """

    sigma2: float
    rho: float

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if self.rho <= 0:
            raise ValueError("rho must be > 0")

    @property
    def at_zero(self):
        return self.sigma2

    @property
    def support_radius(self):
        return 0.5 * self.rho

    def at_radius(self, s):
        s = np.asarray(s, dtype=float)
        scaled = s / self.rho
        out = np.zeros_like(scaled)
        inside = scaled < 0.5
        if np.any(inside):
            out[inside] = np.clip(bump_profile()(scaled[inside]), 0.0, 1.0)
        return self.sigma2 * out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.at_radius(np.linalg.norm(np.atleast_2d(x), axis=-1))
