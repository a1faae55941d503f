"""Closed-form and numeric reference structure factors for the benchmark models.

Every model is identified by a :class:`ModelSpec`; :func:`structure_factor`
evaluates its theoretical S(k).  These curves are the ground truth the
estimators are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import j0, j1

from .covariance import BumpCovariance

__all__ = [
    "ModelSpec",
    "make_model",
    "model_names",
    "intensity",
    "structure_factor",
    "pair_correlation_arcsin",
    "thinned_structure_factor",
    "chi_square_bound",
    "theory_table",
]


@dataclass(frozen=True)
class ModelSpec:
    """A point-process model: variant name plus parameter values."""

    name: str
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "params", tuple((str(k), float(v)) for k, v in self.params)
        )

    def get(self, key):
        return dict(self.params)[key]


# canonical parameter lists and Table-style default instances
_MODEL_PARAMS = {
    "poisson": (("intensity", 1.0),),
    "thomas": (("alpha", 5.0), ("sigma2", 0.25), ("mu", 0.2)),
    "matern": (("alpha", 5.0), ("rho", 1.5), ("mu", 0.2)),
    "exp_lgcp": (("mu", 0.0), ("sigma2", 0.5), ("alpha", 1.0)),
    "ginibre": (),
    "bessel_dpp": (("rho", 0.3), ("alpha", 1.0)),
    "perturbed_lattice": (),
    "arcsin_cox": (("sigma", 0.5), ("rho", 1.0)),
}


def model_names():
    return tuple(_MODEL_PARAMS)


def make_model(name, **params):
    """Build a validated ModelSpec; unspecified parameters take the defaults."""
    if name not in _MODEL_PARAMS:
        raise ValueError(f"unknown model {name!r}; choose from {model_names()}")
    defaults = dict(_MODEL_PARAMS[name])
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"model {name!r} does not take parameters {sorted(unknown)}")
    values = {**defaults, **{k: float(v) for k, v in params.items()}}
    spec = ModelSpec(name, tuple(values.items()))
    _validate_model(spec)
    return spec


def _validate_model(model):
    p = dict(model.params)
    name = model.name
    if name == "poisson" and p["intensity"] < 0:
        raise ValueError("poisson intensity must be >= 0")
    if name in ("thomas", "matern"):
        if p["alpha"] <= 0 or p["mu"] <= 0:
            raise ValueError(f"{name}: alpha and mu must be > 0")
        if name == "thomas" and p["sigma2"] <= 0:
            raise ValueError("thomas: sigma2 must be > 0")
        if name == "matern" and p["rho"] <= 0:
            raise ValueError("matern: rho must be > 0")
    if name == "exp_lgcp" and (p["sigma2"] < 0 or p["alpha"] <= 0):
        raise ValueError("exp_lgcp: sigma2 must be >= 0 and alpha > 0")
    if name == "bessel_dpp":
        if p["rho"] <= 0 or p["alpha"] <= 0:
            raise ValueError("bessel_dpp: rho and alpha must be > 0")
        if p["rho"] >= 1.0 / (math.pi * p["alpha"] ** 2):
            raise ValueError("bessel_dpp requires rho < 1 / (pi alpha^2)")
    if name == "arcsin_cox":
        if not 0.0 < p["sigma"] < 1.0:
            raise ValueError("arcsin_cox: sigma must lie in (0, 1)")
        if p["rho"] <= 0:
            raise ValueError("arcsin_cox: rho must be > 0")


def intensity(model):
    """Theoretical intensity of the model."""
    p = dict(model.params)
    return {
        "poisson": lambda: p["intensity"],
        "thomas": lambda: p["alpha"] * p["mu"],
        "matern": lambda: p["alpha"] * p["mu"],
        "exp_lgcp": lambda: math.exp(p["mu"] + p["sigma2"] / 2.0),
        "ginibre": lambda: 1.0 / math.pi,
        "bessel_dpp": lambda: p["rho"],
        "perturbed_lattice": lambda: 1.0,
        "arcsin_cox": lambda: 1.0,
    }[model.name]()


def _sinc(t):
    return np.sinc(np.asarray(t) / np.pi)


def structure_factor(model, k):
    """Theoretical structure factor S(k).

    ``k`` is a frequency vector (d,) or an array of vectors (..., d) in
    d = 2 (a scalar is treated as a frequency on the first axis).
    """
    k = np.asarray(k, dtype=float)
    scalar_norms = k.ndim == 0
    if scalar_norms:
        k = np.array([float(k), 0.0])
    single = k.ndim == 1
    kk = np.atleast_2d(k)
    q = np.linalg.norm(kk, axis=-1)
    p = dict(model.params)
    name = model.name

    if name == "poisson":
        s = np.ones_like(q)
    elif name == "thomas":
        s = 1.0 + p["alpha"] * np.exp(-p["sigma2"] * q * q)
    elif name == "matern":
        s = 1.0 + p["alpha"] * _disk_cf(p["rho"] * q) ** 2
    elif name == "exp_lgcp":
        lam = math.exp(p["mu"] + p["sigma2"] / 2.0)
        s = 1.0 + lam * _lgcp_radial_integral(q, p["sigma2"], p["alpha"])
    elif name == "ginibre":
        s = 1.0 - np.exp(-q * q / 4.0)
    elif name == "bessel_dpp":
        c = 2.0 / p["alpha"]
        s = 1.0 - (p["rho"] * p["alpha"] ** 4 / 4.0) * _disk_overlap_area(q, c)
    elif name == "perturbed_lattice":
        s = 1.0 - _sinc(kk[..., 0] / 2.0) ** 2 * _sinc(kk[..., 1] / 2.0) ** 2 * np.exp(
            -np.sqrt(q / 2.0)
        )
    elif name == "arcsin_cox":
        s = _arcsin_structure_factor(q, p["sigma"], p["rho"])
    else:
        raise ValueError(f"unknown model {name!r}")

    s = np.maximum(s, 0.0)
    if scalar_norms:
        return float(s.reshape(-1)[0])
    return s[0] if single and s.shape[0] == 1 else s


def _disk_cf(t):
    """Characteristic function of the uniform law on the unit disk, 2 J1(t)/t."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    nz = np.abs(t) > 1e-12
    out[nz] = 2.0 * j1(t[nz]) / t[nz]
    return out


def _disk_overlap_area(q, c):
    """Area of the intersection of two radius-c disks with centers q apart."""
    q = np.asarray(q, dtype=float)
    out = np.zeros_like(q)
    inside = q < 2.0 * c
    qi = q[inside]
    out[inside] = 2.0 * c * c * np.arccos(qi / (2.0 * c)) - 0.5 * qi * np.sqrt(
        4.0 * c * c - qi * qi
    )
    return out


_RADIAL_NODES, _RADIAL_WEIGHTS = leggauss(12)


def _radial_fourier(values_fn, s_max, q, panels_extra=24):
    """2-d radial Fourier transform 2 pi int_0^{s_max} f(s) J0(s q) s ds.

    Panel Gauss-Legendre in s with the panel count scaled to the number of
    Bessel oscillations, vectorized over the frequencies ``q``.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    panels = int(max(panels_extra, math.ceil(s_max * float(np.max(q, initial=0.0)) / math.pi) + 8))
    edges = np.linspace(0.0, s_max, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + half[:, None] * _RADIAL_NODES[None, :]).ravel()
    w = (half[:, None] * np.broadcast_to(_RADIAL_WEIGHTS, (panels, len(_RADIAL_NODES)))).ravel()
    f = values_fn(s) * s * w
    bess = j0(np.outer(q, s))
    return 2.0 * math.pi * bess @ f


def _lgcp_radial_integral(q, sigma2, alpha):
    """int (e^{c(x)} - 1) e^{-ik.x} dx for c(s) = sigma2 e^{-s/alpha}, d = 2."""
    if sigma2 == 0.0:
        return np.zeros_like(np.atleast_1d(q))
    s_max = alpha * max(40.0, math.log(sigma2 * 1e16) if sigma2 > 1e-16 else 40.0)
    fn = lambda s: np.expm1(sigma2 * np.exp(-s / alpha))
    return _radial_fourier(fn, s_max, q)


def _arcsin_structure_factor(q, sigma, rho):
    cov = BumpCovariance(sigma * sigma, rho)
    fn = lambda s: 0.5 * math.exp(-cov.at_zero) * (
        np.exp(cov.at_radius(s)) - np.exp(-cov.at_radius(s))
    )
    return 1.0 + _radial_fourier(fn, cov.support_radius, q, panels_extra=32)


def pair_correlation_arcsin(cov, x):
    """Pair correlation of the arcsine Cox process driven by the field ``cov``.

    g(x) = 1 + (e^{-c(0)} / 2) (e^{c(x)} - e^{-c(x)}).
    """
    c0 = float(cov.at_zero)
    cx = float(np.atleast_1d(cov(np.asarray(x, dtype=float)))[0])
    return 1.0 + 0.5 * math.exp(-c0) * (math.exp(cx) - math.exp(-cx))


def thinned_structure_factor(s_value, p):
    """Structure factor of an independent p-thinning: (1 - p) + p S."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return (1.0 - p) + p * np.asarray(s_value, dtype=float)


def chi_square_bound(sigma, rho, d, volume):
    """Upper bound on the chi-square divergence between the arcsine Cox
    process and the unit Poisson process on a window of the given volume:

        (1 - 8^d sigma^4 rho^{2d})^{-|W| / (2^d rho^d)} - 1,

    valid when 8^d sigma^4 rho^{2d} < 1.
    """
    if volume <= 0 or rho <= 0 or d < 1:
        raise ValueError("volume and rho must be > 0 and d >= 1")
    base = 8.0 ** d * sigma ** 4 * rho ** (2 * d)
    if base >= 1.0:
        raise ValueError(
            "bound is vacuous: 8^d sigma^4 rho^(2d) must be < 1 "
            f"(got {base:.3g})"
        )
    exponent = volume / (2.0 ** d * rho ** d)
    return (1.0 - base) ** (-exponent) - 1.0


def theory_table(model, norms, direction=(1.0, 0.0)):
    """Rows (k_norm, S(k)) along a fixed direction through the origin."""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    norms = np.atleast_1d(np.asarray(norms, dtype=float))
    ks = norms[:, None] * direction[None, :]
    values = structure_factor(model, ks)
    return list(zip(norms.tolist(), np.atleast_1d(values).tolist()))
