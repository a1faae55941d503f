"""Samplers for the benchmark point-process models, plinning and seeding.

All randomness flows through :class:`SeedStream`, a splittable wrapper
around the counter-based Philox generator: the same (seed, path) always
reproduces the same pattern, and distinct paths give independent streams,
so replicates, cross-validation pairs and purposes can be simulated in
any order or in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.stats import levy_stable

from .covariance import BumpCovariance, ExponentialCovariance
from .patterns import PointPattern, Window

__all__ = [
    "SeedStream",
    "sample_poisson",
    "sample_thomas",
    "sample_matern_cluster",
    "sample_neyman_scott",
    "sample_lgcp",
    "sample_perturbed_lattice",
    "sample_ginibre",
    "sample_arcsin_cox",
    "sample_model",
    "thin",
]

MAX_FIELD_CELLS = 128 * 128  # dense Cholesky cap for grid Gaussian fields


@dataclass(frozen=True)
class SeedStream:
    """A named random stream: master seed plus a path of integers."""

    seed: int
    path: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *path):
        """Independent sub-stream addressed by extending the path."""
        return SeedStream(self.seed, self.path + tuple(int(p) for p in path))

    def generator(self):
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


def _as_stream(seed):
    if isinstance(seed, SeedStream):
        return seed
    return SeedStream(int(seed))


def _uniform_in_window(rng, n, window):
    hw = np.asarray(window.half_widths)
    return rng.uniform(-hw, hw, size=(n, window.d))


def sample_poisson(intensity, window, seed):
    """Homogeneous Poisson pattern of the given intensity."""
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    rng = _as_stream(seed).generator()
    n = rng.poisson(intensity * window.volume)
    return PointPattern(_uniform_in_window(rng, n, window), window)


# ---------------------------------------------------------------------------
# Neyman-Scott cluster models
# ---------------------------------------------------------------------------

def _neyman_scott(alpha, mu, window, seed, guard, offspring):
    if alpha <= 0 or mu < 0:
        raise ValueError("alpha must be > 0 and mu >= 0")
    rng = _as_stream(seed).generator()
    hw = np.asarray(window.half_widths)
    grown = hw + guard
    volume = float(np.prod(2.0 * grown))
    n_parents = rng.poisson(mu * volume)
    parents = rng.uniform(-grown, grown, size=(n_parents, window.d))
    counts = rng.poisson(alpha, size=n_parents)
    total = int(counts.sum())
    if total == 0:
        return PointPattern(np.empty((0, window.d)), window)
    centers = np.repeat(parents, counts, axis=0)
    pts = centers + offspring(rng, total)
    pts = pts[window.contains(pts)]
    return PointPattern(pts, window)


def sample_thomas(alpha, sigma2, mu, window, seed, guard=None):
    """Thomas cluster process: Gaussian(0, sigma2 Id) offspring displacements.

    Parents are Poisson(mu) on the window grown by a 6-sigma guard margin;
    each parent gets Poisson(alpha) offspring.  Resulting intensity is
    alpha * mu.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be > 0")
    sigma = math.sqrt(sigma2)
    if guard is None:
        guard = 6.0 * sigma
    disp = lambda rng, n: sigma * rng.standard_normal((n, window.d))
    return _neyman_scott(alpha, mu, window, seed, guard, disp)


def sample_matern_cluster(alpha, rho, mu, window, seed, guard=None):
    """Matern cluster process: offspring uniform on the disk B(0, rho)."""
    if rho <= 0:
        raise ValueError("rho must be > 0")
    if window.d != 2:
        raise ValueError("Matern cluster sampling is implemented for d = 2")
    if guard is None:
        guard = rho

    def disp(rng, n):
        radius = rho * np.sqrt(rng.uniform(size=n))
        angle = rng.uniform(0.0, 2.0 * math.pi, size=n)
        return np.column_stack((radius * np.cos(angle), radius * np.sin(angle)))

    return _neyman_scott(alpha, mu, window, seed, guard, disp)


def sample_neyman_scott(kind, scale, alpha, mu, window, seed, guard=None):
    """Dispatcher: kind 'thomas' (scale = sigma2) or 'matern' (scale = rho)."""
    if kind == "thomas":
        return sample_thomas(alpha, scale, mu, window, seed, guard)
    if kind == "matern":
        return sample_matern_cluster(alpha, scale, mu, window, seed, guard)
    raise ValueError(f"unknown Neyman-Scott kind {kind!r}")


# ---------------------------------------------------------------------------
# Grid Gaussian fields and the Cox models
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _field_factor(cov, half_widths, shape):
    """Cell centers and Cholesky factor of the grid covariance (cached)."""
    hw = np.asarray(half_widths)
    axes = [
        -hw[s] + (np.arange(shape[s]) + 0.5) * (2.0 * hw[s] / shape[s])
        for s in range(len(shape))
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.column_stack([m.ravel() for m in mesh])
    dist_sq = np.zeros((len(centers), len(centers)))
    for s in range(centers.shape[1]):
        dist_sq += (centers[:, s, None] - centers[None, :, s]) ** 2
    cmat = cov.at_radius(np.sqrt(dist_sq))
    jitter = 1e-10 * max(cov.at_zero, 1e-30)
    cmat[np.diag_indices_from(cmat)] += jitter
    chol = np.linalg.cholesky(cmat)
    return centers, chol


def _grid_geometry(window, h):
    if h <= 0:
        raise ValueError("grid spacing h must be > 0")
    shape = tuple(int(math.ceil(2.0 * hw / h)) for hw in window.half_widths)
    cells = int(np.prod(shape))
    if cells > MAX_FIELD_CELLS:
        raise ValueError(
            f"field grid of {cells} cells exceeds the dense-Cholesky cap "
            f"({MAX_FIELD_CELLS}); increase h"
        )
    return shape


def _sample_grid_field(cov, window, h, rng):
    """Centered Gaussian field on the cell centers of a grid tiling W."""
    shape = _grid_geometry(window, h)
    centers, chol = _field_factor(cov, window.half_widths, shape)
    values = chol @ rng.standard_normal(len(centers))
    return shape, centers, values


def _cell_index(points, window, shape):
    hw = np.asarray(window.half_widths)
    spacing = 2.0 * hw / np.asarray(shape)
    idx = np.floor((points + hw) / spacing).astype(int)
    idx = np.clip(idx, 0, np.asarray(shape) - 1)
    flat = idx[:, 0]
    for s in range(1, len(shape)):
        flat = flat * shape[s] + idx[:, s]
    return flat


def sample_lgcp(mu, sigma2, alpha, window, h, seed):
    """Log-Gaussian Cox process with exponential field covariance.

    A centered Gaussian field with covariance sigma2 * exp(-|x|/alpha) is
    sampled on a grid of spacing ``h`` tiling the window; the pattern is an
    inhomogeneous Poisson draw with the piecewise-constant intensity
    exp(mu + N(x)).  Expected intensity is exp(mu + sigma2/2).
    """
    cov = ExponentialCovariance(sigma2, alpha)
    rng = _as_stream(seed).generator()
    shape, centers, field = _sample_grid_field(cov, window, h, rng)
    cell_volume = window.volume / len(centers)
    rates = np.exp(mu + field) * cell_volume
    counts = rng.poisson(rates)
    total = int(counts.sum())
    if total == 0:
        return PointPattern(np.empty((0, window.d)), window)
    cell_centers = np.repeat(centers, counts, axis=0)
    spacing = 2.0 * np.asarray(window.half_widths) / np.asarray(shape)
    offs = rng.uniform(-0.5, 0.5, size=(total, window.d)) * spacing
    return PointPattern(cell_centers + offs, window)


def sample_arcsin_cox(sigma, rho, window, h, seed):
    """Cox process with random intensity 1 + sin(N(x)), unit intensity.

    N is a centered Gaussian field with covariance sigma^2 c0(x / rho)
    for the compactly supported bump c0; the pattern is drawn by thinning
    a Poisson of intensity 2 with retention (1 + sin N)/2 evaluated on the
    piecewise-constant grid field.
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    cov = BumpCovariance(sigma * sigma, rho)
    rng = _as_stream(seed).generator()
    shape, _, field = _sample_grid_field(cov, window, h, rng)
    n = rng.poisson(2.0 * window.volume)
    proposals = _uniform_in_window(rng, n, window)
    cells = _cell_index(proposals, window, shape)
    retain = 0.5 * (1.0 + np.sin(field[cells]))
    keep = rng.uniform(size=n) < retain
    return PointPattern(proposals[keep], window)


# ---------------------------------------------------------------------------
# Perturbed lattice
# ---------------------------------------------------------------------------

def _symmetric_stable(rng, alpha, scale, size):
    """Chambers-Mallows-Stuck draw of a symmetric alpha-stable variable."""
    u = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=size)
    e = rng.exponential(1.0, size=size)
    x = (
        np.sin(alpha * u)
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    )
    return scale * x

# coordinate characteristic function exp(-sqrt(|t|/2)/2) corresponds to the
# standard symmetric 1/2-stable scaled by (1/(2 sqrt 2))^2 = 1/8
_STABLE_COORD_SCALE = 0.125

_TRI_NODES, _TRI_WEIGHTS = leggauss(48)


@lru_cache(maxsize=8)
def _lattice_far_mass(half_widths, guard):
    """Expected number of window points whose lattice site is beyond the guard.

    The process has unit intensity exactly, so this is |W| minus the summed
    landing probabilities of the enumerated core sites.  Landing
    probabilities factor per axis; the displacement per coordinate is
    triangular([-1,1]) from the two uniforms plus the scaled stable jump.
    """
    axis_sums = []
    for hw in half_widths:
        L = int(math.floor(hw + guard))
        t = np.arange(-L, L + 1, dtype=float)
        u = _TRI_NODES
        wu = _TRI_WEIGHTS * (1.0 - np.abs(_TRI_NODES))
        hi = (hw - t[:, None] - u[None, :]) / _STABLE_COORD_SCALE
        lo = (-hw - t[:, None] - u[None, :]) / _STABLE_COORD_SCALE
        args = np.concatenate([hi.ravel(), lo.ravel()])
        cdf = levy_stable.cdf(args, 0.5, 0.0)
        n = hi.size
        prob = (cdf[:n] - cdf[n:]).reshape(hi.shape)
        axis_sums.append(float(np.sum(prob @ wu)))
    volume = float(np.prod([2.0 * hw for hw in half_widths]))
    return max(volume - float(np.prod(axis_sums)), 0.0)


def sample_perturbed_lattice(window, seed, guard=50.0, compensate=True):
    """Lattice Z^2 with i.i.d. uniform + heavy-tailed stable perturbations.

    Each site is displaced by U_x ~ Uniform[-1/2,1/2]^2, a common shift
    U ~ Uniform[-1/2,1/2]^2 and a stable jump V_x with i.i.d. symmetric
    1/2-stable coordinates (coordinate characteristic function
    exp(-sqrt(|t|/2)/2)), giving a unit-intensity point process.

    Sites within ``guard`` of the window are simulated explicitly.  The
    1/2-stable tail is so heavy that sites arbitrarily far away still land
    in the window with non-negligible total mass, so (by default) the
    missing far-site contribution is added back as a Poisson number of
    uniform points whose expectation makes the mean count exact; far
    contributions are near-independent and near-uniform, which this
    matches.  ``compensate=False`` gives the plainly truncated lattice.
    """
    if window.d != 2:
        raise ValueError("the perturbed lattice is defined for d = 2")
    if guard <= 1.0:
        raise ValueError("guard must exceed the bounded part of the displacement")
    rng = _as_stream(seed).generator()
    hw = window.half_widths
    ls = [int(math.floor(h + guard)) for h in hw]
    ax = [np.arange(-L, L + 1, dtype=float) for L in ls]
    sites = np.column_stack([m.ravel() for m in np.meshgrid(*ax, indexing="ij")])
    n = len(sites)

    common = rng.uniform(-0.5, 0.5, size=2)
    jitter = rng.uniform(-0.5, 0.5, size=(n, 2))
    stable = _symmetric_stable(rng, 0.5, _STABLE_COORD_SCALE, (n, 2))
    pts = sites + common[None, :] + jitter + stable
    pts = pts[window.contains(pts)]

    if compensate:
        mass = _lattice_far_mass(hw, float(guard))
        extra = rng.poisson(mass)
        if extra:
            pts = np.vstack([pts, _uniform_in_window(rng, extra, window)])
    return PointPattern(pts, window)


# ---------------------------------------------------------------------------
# Ginibre
# ---------------------------------------------------------------------------

def sample_ginibre(window, seed, margin=1.5):
    """Ginibre-type pattern from the eigenvalues of a complex Gaussian matrix.

    The matrix size n is chosen so the bulk disk of radius sqrt(n) covers
    the window corner with the given margin factor; eigenvalues restricted
    to the window have intensity approximately 1/pi.
    """
    if window.d != 2:
        raise ValueError("the Ginibre process lives in d = 2")
    if margin < 1.0:
        raise ValueError("margin must be >= 1")
    rng = _as_stream(seed).generator()
    corner = math.hypot(*window.half_widths)
    n = int(math.ceil((margin * corner) ** 2))
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    ev = np.linalg.eigvals(g)
    pts = np.column_stack((ev.real, ev.imag))
    return PointPattern(pts[window.contains(pts)], window)


# ---------------------------------------------------------------------------
# Thinning and model dispatch
# ---------------------------------------------------------------------------

def thin(pattern, p, seed):
    """Independent p-thinning; returns (kept, complement) partitioning the input."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("retention probability p must lie in [0, 1]")
    rng = _as_stream(seed).generator()
    keep = rng.uniform(size=pattern.n) < p
    kept = PointPattern(pattern.points[keep], pattern.window)
    rest = PointPattern(pattern.points[~keep], pattern.window)
    return kept, rest


def sample_model(model, window, seed, h=None):
    """Draw a pattern from a :mod:`pointspectra.models` specification."""
    name = model.name
    p = dict(model.params)
    if name == "poisson":
        return sample_poisson(p["intensity"], window, seed)
    if name == "thomas":
        return sample_thomas(p["alpha"], p["sigma2"], p["mu"], window, seed)
    if name == "matern":
        return sample_matern_cluster(p["alpha"], p["rho"], p["mu"], window, seed)
    if name == "exp_lgcp":
        if h is None:
            h = default_grid_spacing(window, p["alpha"])
        return sample_lgcp(p["mu"], p["sigma2"], p["alpha"], window, h, seed)
    if name == "ginibre":
        return sample_ginibre(window, seed)
    if name == "perturbed_lattice":
        return sample_perturbed_lattice(window, seed)
    if name == "arcsin_cox":
        if h is None:
            h = default_grid_spacing(window, p["rho"])
        return sample_arcsin_cox(p["sigma"], p["rho"], window, h, seed)
    if name == "bessel_dpp":
        raise ValueError("no sampler for the Bessel-type determinantal model "
                         "(its theoretical structure factor is available)")
    raise ValueError(f"unknown model {name!r}")


def default_grid_spacing(window, scale):
    """Field grid spacing: fine against the correlation scale, capped at 64 cells/axis."""
    h = min(0.25, scale / 10.0)
    coarsest = max(2.0 * hw / 64.0 for hw in window.half_widths)
    return max(h, coarsest)
