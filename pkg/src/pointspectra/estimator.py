"""Multitaper estimation of the structure factor from an observed pattern.

The estimator averages squared centered tapered sums

    T_i(k0) = sum_{x in pattern} e^{-i k0.x} f_i(x),
    C_i(k0) = T_i(k0) - lambda int_W f_i(x) e^{-i k0.x} dx,
    S_hat(k0) = (1 / (lambda |I|)) sum_{i in I} |C_i(k0)|^2,

over the dilated Hermite family f_i.  The centering term carries the
frequency phase so that C_i is exactly centered for a homogeneous Poisson
process of the given intensity; the plug-in variant substitutes the
empirical intensity and returns exactly zero on an empty pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import hermite
from .hermite import TaperBasis
from .patterns import PointPattern, Window

__all__ = [
    "SpectralEstimate",
    "RiskBoundTerms",
    "linear_statistic",
    "centered_statistic",
    "multitaper_oracle",
    "multitaper_plugin",
    "risk_bound_terms",
    "MultitaperStructureFactor",
]


@dataclass(frozen=True)
class SpectralEstimate:
    """A single-frequency estimate and how it was produced."""

    frequency: tuple
    value: float
    taper_count: int
    intensity_mode: str  # "oracle" or "plugin"
    intensity: float
    per_taper: object = None  # optional complex C_i array, lexicographic order

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("estimate value must be >= 0")


def _taper_axis_values(points, basis):
    """Per-axis Hermite values at the scaled points, list of (i_max, n) arrays."""
    return [
        hermite.hermite_series(points[:, s] / basis.r, basis.i_max)
        for s in range(basis.d)
    ]


def _taper_tensor(points, basis, k0):
    """T_i(k0) for every multi-index, as an (i_max,)*d complex tensor."""
    n = points.shape[0]
    scale = basis.r ** (-basis.d / 2.0)
    if n == 0:
        return np.zeros((basis.i_max,) * basis.d, dtype=complex)
    phase = np.exp(-1j * points @ np.asarray(k0, dtype=float))
    axes = _taper_axis_values(points, basis)
    if basis.d == 1:
        t = axes[0] @ phase
    elif basis.d == 2:
        t = np.einsum("an,bn,n->ab", axes[0], axes[1], phase, optimize=True)
    elif basis.d == 3:
        t = np.einsum("an,bn,cn,n->abc", axes[0], axes[1], axes[2], phase, optimize=True)
    else:
        raise ValueError("taper statistics are implemented for d <= 3")
    return scale * t


def _parity_mask(basis):
    if basis.parity == "any":
        return None
    grids = np.meshgrid(*[np.arange(basis.i_max)] * basis.d, indexing="ij")
    total = sum(grids) % 2
    want = 0 if basis.parity == "even" else 1
    return total == want


def linear_statistic(pattern, basis, index, k0):
    """Tapered Fourier sum T_i(k0) over the observed points."""
    index = tuple(int(v) for v in np.atleast_1d(index))
    if len(index) != basis.d or max(index) >= basis.i_max:
        raise ValueError(f"index {index} outside basis (i_max={basis.i_max})")
    t = _taper_tensor(pattern.points, basis, k0)
    return complex(t[index])


def centered_statistic(pattern, basis, index, k0, lam):
    """C_i(k0) = T_i(k0) - lam * int_W f_i e^{-i k0.x} dx."""
    if lam <= 0:
        raise ValueError("intensity lam must be > 0")
    t = linear_statistic(pattern, basis, index, k0)
    e = hermite.windowed_fourier_integral(basis, index, k0, pattern.window)
    return t - lam * e


def _estimate_value(pattern, basis, k0, lam, keep_per_taper=False):
    t = _taper_tensor(pattern.points, basis, k0)
    e = hermite.fourier_integral_tensor(basis, pattern.window, k0)
    c = t - lam * e
    mask = _parity_mask(basis)
    if mask is not None:
        c = c[mask]
    count = c.size
    value = float(np.sum(np.abs(c) ** 2).real / (lam * count))
    per = c.ravel() if keep_per_taper else None
    return value, count, per


def multitaper_oracle(pattern, basis, k0, lam, keep_per_taper=False):
    """Multitaper estimate with known intensity ``lam``."""
    if lam <= 0:
        raise ValueError("intensity lam must be > 0")
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    value, count, per = _estimate_value(pattern, basis, k0, lam, keep_per_taper)
    return SpectralEstimate(
        frequency=tuple(k0.tolist()),
        value=value,
        taper_count=count,
        intensity_mode="oracle",
        intensity=float(lam),
        per_taper=per,
    )


def multitaper_plugin(pattern, basis, k0, keep_per_taper=False):
    """Multitaper estimate with the plug-in intensity count / |W|.

    Returns exactly zero for an empty pattern.
    """
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    lam_hat = pattern.intensity_estimate()
    if lam_hat == 0.0:
        count = basis.index_count
        return SpectralEstimate(
            frequency=tuple(k0.tolist()),
            value=0.0,
            taper_count=count,
            intensity_mode="plugin",
            intensity=0.0,
            per_taper=np.zeros(count, dtype=complex) if keep_per_taper else None,
        )
    value, count, per = _estimate_value(pattern, basis, k0, lam_hat, keep_per_taper)
    return SpectralEstimate(
        frequency=tuple(k0.tolist()),
        value=value,
        taper_count=count,
        intensity_mode="plugin",
        intensity=lam_hat,
        per_taper=per,
    )


# ---------------------------------------------------------------------------
# Batched evaluation (shared with the cross-validation machinery)
# ---------------------------------------------------------------------------

def masked_phase_matrix(points, freqs, weights=None):
    """Phases e^{-i k_j . x} as an (n_points, n_freq) array, optionally
    multiplied columnwise by 0/1 subsample masks (one row of ``weights``
    per frequency).  Frequency-independent work that the batched
    statistics below reuse across taper families."""
    freqs = np.atleast_2d(np.asarray(freqs, dtype=float))
    phase = np.exp(-1j * points @ freqs.T)
    if weights is not None:
        phase = phase * weights.T
    return phase


def batched_taper_statistics(points, basis, freqs, weights=None, phase=None):
    """T tensors for many frequencies at once, shape (n_freq, i_max^d).

    ``weights`` is an optional (n_freq, n_points) multiplier (e.g. 0/1
    thinning masks); tapers are flattened in lexicographic (C) order.
    d = 2 only, where the batching matters.
    """
    freqs = np.atleast_2d(np.asarray(freqs, dtype=float))
    n = points.shape[0]
    m = basis.i_max
    if basis.d != 2:
        raise ValueError("batched statistics are implemented for d = 2")
    if n == 0:
        return np.zeros((len(freqs), m * m), dtype=complex)
    if phase is None:
        phase = masked_phase_matrix(points, freqs, weights)
    a1, a2 = _taper_axis_values(points, basis)
    prod = (a1[:, None, :] * a2[None, :, :]).reshape(m * m, n)
    return basis.r ** -1.0 * (prod @ phase).T


_FT_CACHE = {}
_FT_CACHE_MAX = 32


def batched_fourier_integrals(basis, window, freqs):
    """Centering tensors int_W f_i e^{-i k.x} dx for many k, shape (n_freq, i_max^d).

    One Gauss-Legendre grid per axis (panel count sized for the largest
    frequency in the batch) serves every frequency and order at once.
    The result depends only on (basis, window, frequencies), not on the
    data, so it is memoized: replicated experiments reuse it.
    """
    freqs = np.atleast_2d(np.asarray(freqs, dtype=float))
    if basis.d != 2:
        raise ValueError("batched integrals are implemented for d = 2")
    hw = window.half_widths
    key = (basis.r, basis.i_max, hw, freqs.tobytes())
    cached = _FT_CACHE.get(key)
    if cached is not None:
        return cached
    m = basis.i_max
    per_axis = []
    for s in range(2):
        x, w = hermite._axis_ft_grid(basis.r, hw[s], float(np.abs(freqs[:, s]).max()), m)
        values = hermite.hermite_series(x / basis.r, m)  # (m, Q)
        phases = np.exp(-1j * np.outer(freqs[:, s], x))  # (J, Q)
        per_axis.append(basis.r ** -0.5 * (phases @ (w[:, None] * values.T)))
    ax1, ax2 = per_axis
    out = (ax1[:, :, None] * ax2[:, None, :]).reshape(len(freqs), m * m)
    out.setflags(write=False)
    if len(_FT_CACHE) >= _FT_CACHE_MAX:
        _FT_CACHE.pop(next(iter(_FT_CACHE)))
    _FT_CACHE[key] = out
    return out


def batched_plugin_estimates(points, window, basis, freqs, weights=None, phase=None,
                             counts=None):
    """Plug-in multitaper estimates at many frequencies (d = 2).

    With ``weights`` as 0/1 masks, row j is the estimate computed from the
    masked subsample at frequency j; empty subsamples give exactly 0.
    ``phase``/``counts`` may be supplied to reuse the masked phase matrix
    across taper families.
    """
    freqs = np.atleast_2d(np.asarray(freqs, dtype=float))
    t = batched_taper_statistics(points, basis, freqs, weights, phase)
    e = batched_fourier_integrals(basis, window, freqs)
    if counts is None:
        if weights is None:
            counts = np.full(len(freqs), points.shape[0], dtype=float)
        else:
            counts = weights.sum(axis=1)
    lam = np.asarray(counts, dtype=float) / window.volume
    out = np.zeros(len(freqs))
    live = lam > 0
    if np.any(live):
        c = t[live] - lam[live, None] * e[live]
        out[live] = (np.abs(c) ** 2).sum(axis=1) / (lam[live] * basis.i_max ** 2)
    return out


# ---------------------------------------------------------------------------
# Risk-bound diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RiskBoundTerms:
    """The four terms of the mean-squared-risk upper bound."""

    variance_term: float
    f_loc: float
    w_loc: float
    b4: float

    def total(self, s_inf):
        return self.variance_term + self.f_loc + self.b4 + 6.0 * s_inf * self.w_loc


def risk_bound_terms(basis, window, beta, L, s_inf, gamma4):
    """Evaluate the risk-bound terms for a taper family on a window.

    ``gamma4`` is the combined total-variation weight
    1 + 7 |g2| + 6 |g3| + |g4| of the reduced cumulant measures; the
    fourth-moment term multiplies its square root.
    """
    if not 0.0 < beta <= 2.0:
        raise ValueError("beta must lie in (0, 2]")
    if L <= 0 or s_inf <= 0 or gamma4 < 0:
        raise ValueError("L and s_inf must be > 0 and gamma4 >= 0")
    indices = basis.indices
    count = len(indices)
    R = _window_equal_half_width(window, basis)

    sob = np.mean([hermite.sobolev_norm_sq(i, beta) for i in indices])
    f_loc = math.sqrt(basis.d) * L * basis.r ** (-beta) * sob

    tails = [hermite.tail_mass(i, R / basis.r, 2) for i in indices]
    w_loc = math.sqrt(float(np.mean(np.square(tails))))

    l4 = np.mean([hermite.psi_l4_norm_sq(i) for i in indices])
    b4 = basis.r ** (-basis.d / 2.0) * l4 * math.sqrt(gamma4)

    variance = math.sqrt(2.0) * s_inf / math.sqrt(count)
    return RiskBoundTerms(variance_term=variance, f_loc=f_loc, w_loc=w_loc, b4=b4)


def _window_equal_half_width(window, basis):
    if hasattr(window, "half_widths"):
        hw = set(window.half_widths)
        if len(hw) != 1:
            raise ValueError("risk terms require a square window")
        return float(hw.pop())
    return float(window)


# ---------------------------------------------------------------------------
# Estimator front end
# ---------------------------------------------------------------------------

class MultitaperStructureFactor(BaseEstimator):
    """Structure-factor estimator with a fixed number of Hermite tapers.

    Parameters
    ----------
    window : Window, tuple of half-widths, or float (square half-width)
        Observation window the data were collected in.
    i_max : int
        Taper orders per axis; the family has i_max^d members.
    theta : float
        Dilation exponent in (0, 2/3).
    intensity : "plugin" or float
        Use the empirical intensity, or a known oracle value.
    parity : str
        Optional parity restriction of the index set ("any", "even", "odd").

    After ``fit(X)`` with X the (n, d) point array, ``predict(K)`` returns
    the estimated S at each frequency row of K.
    """

    def __init__(self, window=10.0, i_max=8, theta=1.0 / 3.0, intensity="plugin",
                 parity="any"):
        self.window = window
        self.i_max = i_max
        self.theta = theta
        self.intensity = intensity
        self.parity = parity

    def _window(self):
        if isinstance(self.window, Window):
            return self.window
        if np.isscalar(self.window):
            return Window.square(float(self.window))
        return Window(tuple(self.window))

    def fit(self, X, y=None):
        window = self._window()
        if isinstance(X, PointPattern):
            self.pattern_ = X
        else:
            self.pattern_ = PointPattern(np.asarray(X, dtype=float), window)
        self.basis_ = TaperBasis.for_window(
            self.pattern_.window, self.i_max, self.theta, self.parity
        )
        return self

    def predict(self, K):
        if not hasattr(self, "pattern_"):
            raise RuntimeError("estimator is not fitted; call fit(X) first")
        K = np.atleast_2d(np.asarray(K, dtype=float))
        if K.shape[1] != self.pattern_.d:
            raise ValueError("frequency dimension does not match the data")
        out = np.empty(len(K))
        for j, k in enumerate(K):
            if self.intensity == "plugin":
                out[j] = multitaper_plugin(self.pattern_, self.basis_, k).value
            else:
                out[j] = multitaper_oracle(
                    self.pattern_, self.basis_, k, float(self.intensity)
                ).value
        return out
