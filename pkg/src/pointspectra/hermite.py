"""Orthonormal Hermite functions and scaled Hermite taper families.

The taper family used throughout the package is built from the
L2-orthonormal Hermite functions

    psi_n(y) = (2^n n! sqrt(pi))^{-1/2} H_n(y) exp(-y^2/2),

with H_n the physicists' Hermite polynomials, tensorized over coordinates
and dilated to match an observation window.  Everything here is pure
numerics: function evaluation, norms, tails and windowed Fourier
integrals of the tapers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_genlaguerre, roots_hermite

__all__ = [
    "TaperBasis",
    "dilation_factor",
    "hermite_function",
    "hermite_series",
    "psi",
    "taper_value",
    "sobolev_norm_sq",
    "tail_mass",
    "windowed_fourier_integral",
    "fourier_integral_tensor",
]

_PI_QUARTER = math.pi ** -0.25

# rescaling threshold for the weighted recurrence; values are renormalized
# whenever they exceed exp(_RESCALE_LOG) so intermediates never overflow
_RESCALE_LOG = 300.0


def hermite_series(y, n_max):
    """Evaluate psi_0, ..., psi_{n_max-1} at the points ``y``.

    Uses the normalized three-term recurrence

        psi_{n+1}(y) = sqrt(2/(n+1)) y psi_n(y) - sqrt(n/(n+1)) psi_{n-1}(y)

    seeded with psi_0(y) = pi^{-1/4} exp(-y^2/2).  The Gaussian weight is
    carried as a separate log-scale factor with periodic renormalization,
    so the result stays finite (and accurate in the classically allowed
    region) even for very large orders or arguments.

    Parameters
    ----------
    y : array_like
        Evaluation points.
    n_max : int
        Number of orders to return (all n < n_max).

    Returns
    -------
    ndarray, shape (n_max, y.size)
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    y = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    out = np.empty((n_max, y.size))

    log_scale = -0.5 * y * y
    scale = np.exp(log_scale)  # harmless underflow to 0 deep in the tail
    h_prev = np.full(y.size, _PI_QUARTER)
    out[0] = h_prev * scale
    if n_max == 1:
        return out

    h_cur = math.sqrt(2.0) * y * h_prev
    out[1] = h_cur * scale
    for n in range(1, n_max - 1):
        h_prev, h_cur = h_cur, (
            math.sqrt(2.0 / (n + 1)) * y * h_cur
            - math.sqrt(n / (n + 1.0)) * h_prev
        )
        big = np.abs(h_cur) > np.exp(_RESCALE_LOG)
        if big.any():
            f = math.exp(-_RESCALE_LOG)
            h_cur[big] *= f
            h_prev[big] *= f
            log_scale[big] += _RESCALE_LOG
            scale[big] = np.exp(log_scale[big])
        out[n + 1] = h_cur * scale
    return out


def hermite_function(n, y):
    """n-th orthonormal Hermite function at the scalar ``y``."""
    if n < 0:
        raise ValueError("order n must be >= 0")
    return float(hermite_series([y], n + 1)[n, 0])


def _hermite_polynomial_series(y, n_max):
    """Normalized Hermite polynomial part, i.e. psi_n without the Gaussian.

    Same recurrence as :func:`hermite_series` but seeded with the constant
    pi^{-1/4}; used where the Gaussian weight is absorbed into a quadrature
    rule.  No rescaling: callers keep arguments small enough not to
    overflow (|y|^2 <~ 1200).
    """
    y = np.atleast_1d(np.asarray(y, dtype=float)).ravel()
    out = np.empty((n_max, y.size))
    out[0] = _PI_QUARTER
    if n_max == 1:
        return out
    out[1] = math.sqrt(2.0) * y * _PI_QUARTER
    for n in range(1, n_max - 1):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * y * out[n]
            - math.sqrt(n / (n + 1.0)) * out[n - 1]
        )
    return out


def psi(index, x):
    """Tensor-product Hermite function at the point ``x``.

    ``index`` is a multi-index (i_1, ..., i_d) of non-negative integers and
    ``x`` a point of the same dimension; the value is the product of the
    one-dimensional functions psi_{i_l}(x_l).
    """
    index = _check_multi_index(index)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (len(index),):
        raise ValueError(
            f"point has dimension {x.shape}, index has dimension {len(index)}"
        )
    value = 1.0
    for n, xs in zip(index, x):
        value *= hermite_function(n, xs)
    return value


def dilation_factor(R, i_max, theta=1.0 / 3.0):
    """Spatial scale r = R / sqrt(2 i_max + i_max^(1/3 + theta)).

    This choice concentrates every taper of the family {|i|_inf < i_max}
    inside the window of half-width R, with a tail that shrinks as i_max
    grows.
    """
    if R <= 0:
        raise ValueError("window half-width R must be > 0")
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    if not 0.0 < theta < 2.0 / 3.0:
        raise ValueError("theta must lie in (0, 2/3)")
    return R / math.sqrt(2.0 * i_max + i_max ** (1.0 / 3.0 + theta))


@dataclass(frozen=True)
class TaperBasis:
    """A dilated tensor Hermite taper family f_i = r^{-d/2} psi_i(. / r).

    Parameters
    ----------
    d : int
        Spatial dimension.
    i_max : int
        Orders per axis; the index set is {i : |i|_inf < i_max}.
    r : float
        Dilation factor (length units).
    half_width : float
        Half-width R of the square observation window the basis targets.
    theta : float
        Dilation exponent used when ``r`` came from :func:`dilation_factor`.
    parity : str
        "any" (default) keeps the full index set; "even"/"odd" restricts to
        multi-indices whose component sum has that parity, which makes
        every kept taper symmetric (resp. antisymmetric) under x -> -x.
    """

    d: int
    i_max: int
    r: float
    half_width: float
    theta: float = 1.0 / 3.0
    parity: str = "any"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension d must be >= 1")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if self.r <= 0 or self.half_width <= 0:
            raise ValueError("r and half_width must be > 0")
        if self.parity not in ("any", "even", "odd"):
            raise ValueError("parity must be 'any', 'even' or 'odd'")

    @classmethod
    def for_window(cls, window, i_max, theta=1.0 / 3.0, parity="any"):
        """Basis dilated for a square window, r from :func:`dilation_factor`."""
        hw = tuple(window.half_widths)
        R = _square_half_width(window)
        r = dilation_factor(R, i_max, theta)
        return cls(d=len(hw), i_max=i_max, r=r, half_width=R, theta=theta, parity=parity)

    @classmethod
    def square(cls, half_width, d, i_max, theta=1.0 / 3.0, parity="any"):
        """Basis for the window [-half_width, half_width]^d."""
        r = dilation_factor(half_width, i_max, theta)
        return cls(d=d, i_max=i_max, r=r, half_width=half_width, theta=theta, parity=parity)

    @property
    def indices(self):
        """Multi-indices in lexicographic order (tuple of tuples)."""
        all_indices = itertools.product(range(self.i_max), repeat=self.d)
        if self.parity == "any":
            return tuple(all_indices)
        want = 0 if self.parity == "even" else 1
        return tuple(i for i in all_indices if sum(i) % 2 == want)

    @property
    def index_count(self):
        if self.parity == "any":
            return self.i_max ** self.d
        return len(self.indices)


def _square_half_width(window):
    """Common half-width of a square window; raises if the box is not square."""
    if hasattr(window, "half_widths"):
        hw = tuple(window.half_widths)
    else:
        hw = tuple(window)
    if len(set(hw)) != 1:
        raise ValueError("taper dilation requires a square window (equal half-widths)")
    return float(hw[0])


def taper_value(basis, index, x):
    """Value of the dilated taper f_i(x) = r^{-d/2} psi_i(x / r)."""
    index = _check_multi_index(index)
    if len(index) != basis.d:
        raise ValueError("index dimension does not match basis dimension")
    if max(index) >= basis.i_max:
        raise ValueError(f"index {index} outside basis (i_max={basis.i_max})")
    if basis.parity != "any" and index not in basis.indices:
        raise ValueError(f"index {index} excluded by parity={basis.parity!r}")
    x = np.asarray(x, dtype=float)
    return basis.r ** (-basis.d / 2.0) * psi(index, x / basis.r)


def _check_multi_index(index):
    index = tuple(int(n) for n in np.atleast_1d(index))
    if any(n < 0 for n in index):
        raise ValueError("multi-index components must be >= 0")
    return index


# ---------------------------------------------------------------------------
# Sobolev norms
# ---------------------------------------------------------------------------

def sobolev_norm_sq(index, beta):
    """Squared homogeneous Sobolev norm int |F[psi_i](k)|^2 |k|^beta dk.

    Since the Hermite functions are Fourier eigenfunctions the integrand is
    |psi_i(k)|^2 |k|^beta.  For beta = 2 the exact identity
    (1/2) sum_s (2 i_s + 1) is used; for beta < 2 the integral is computed
    by a generalized Gauss-Laguerre rule in the squared radius (exact for
    the polynomial part).  For a dilated taper f_i multiply by r^{-beta}.

    Supported for beta in (0, 2] and dimension d <= 2 when beta < 2.
    """
    index = _check_multi_index(index)
    if not 0.0 < beta <= 2.0:
        raise ValueError("beta must lie in (0, 2]")
    if beta == 2.0:
        return 0.5 * sum(2 * n + 1 for n in index)
    d = len(index)
    if d == 1:
        return _sobolev_1d(index[0], beta)
    if d == 2:
        return _sobolev_2d(index, beta)
    raise ValueError("beta < 2 quadrature is implemented for d <= 2 only")


def _genlaguerre_scaled(m, alpha):
    """Nodes t_j and weights w_j e^{t_j} for the weight e^{-t} t^alpha."""
    t, w = roots_genlaguerre(m, alpha)
    return t, np.exp(np.log(w) + t)


def _sobolev_1d(n, beta):
    # int psi_n(k)^2 |k|^beta dk = int_0^inf e^-t t^{(beta-1)/2} Hhat_n(sqrt t)^2 dt
    # with Hhat the weight-free normalized polynomial; exact for the rule below.
    m = n // 2 + 6
    t, w_scaled = _genlaguerre_scaled(m, (beta - 1.0) / 2.0)
    vals = hermite_series(np.sqrt(t), n + 1)[n]
    return float(np.sum(w_scaled * vals * vals))


def _sobolev_2d(index, beta):
    a, b = index
    # polar coordinates, t = radius^2: the angular factor is a trigonometric
    # polynomial (exact on a uniform grid) and the radial factor a polynomial
    # in t (exact under generalized Gauss-Laguerre with alpha = beta/2)
    m_ang = 2 * (a + b) + 8
    phi = np.arange(m_ang) * (2.0 * math.pi / m_ang)
    m_rad = (a + b) // 2 + 6
    t, w_scaled = _genlaguerre_scaled(m_rad, beta / 2.0)
    rad = np.sqrt(t)
    k1 = np.outer(rad, np.cos(phi)).ravel()
    k2 = np.outer(rad, np.sin(phi)).ravel()
    va = hermite_series(k1, a + 1)[a].reshape(len(t), m_ang)
    vb = hermite_series(k2, b + 1)[b].reshape(len(t), m_ang)
    # the Gaussian e^{-t} carried by the two psi factors cancels against the
    # e^{t} folded into w_scaled, leaving the polynomial the rule is exact for
    angular = (va * va * vb * vb).sum(axis=1) * (2.0 * math.pi / m_ang)
    return float(0.5 * np.sum(w_scaled * angular))


# ---------------------------------------------------------------------------
# Tails and windowed integrals
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = leggauss(24)


def _panel_integral(f, breakpoints):
    """Gauss-Legendre integral of ``f`` over consecutive panels."""
    a = np.asarray(breakpoints[:-1])
    b = np.asarray(breakpoints[1:])
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    return float(np.sum(w * f(x.ravel()).reshape(x.shape)))


def _lobe_breakpoints(n, a, b, max_width=1.5):
    """Panel breakpoints in [a, b] split at the zeros of psi_n."""
    pts = [a, b]
    if n > 0:
        zeros = roots_hermite(n)[0]
        pts.extend(z for z in zeros if a < z < b)
    pts = np.array(sorted(pts))
    refined = [pts[0]]
    for right in pts[1:]:
        left = refined[-1]
        extra = max(1, int(math.ceil((right - left) / max_width)))
        refined.extend(np.linspace(left, right, extra + 1)[1:])
    return np.array(refined)


def _abs_power_integral(n, a, b, p):
    """int_a^b |psi_n(y)|^p dy, machine accurate via lobe-split panels."""
    if b <= a:
        return 0.0
    vals = lambda y: np.abs(hermite_series(y, n + 1)[n]) ** p
    return _panel_integral(vals, _lobe_breakpoints(n, a, b))


def tail_mass(index, rho, p=2):
    """Lp norm of psi_i restricted outside the box [-rho, rho]^d.

    Returns the norm itself (p-th root applied).  For the product function
    the complement integral factorizes as
    prod_s ||psi_{i_s}||_p^p - prod_s int_{-rho}^{rho} |psi_{i_s}|^p.
    """
    index = _check_multi_index(index)
    if rho <= 0:
        raise ValueError("rho must be > 0")
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    total = 1.0
    inside = 1.0
    for n in index:
        y_far = math.sqrt(2.0 * n + 1.0) + 40.0
        if p == 2:
            tot = 1.0
        else:
            tot = _abs_power_integral(n, -y_far, y_far, 1)
        ins = _abs_power_integral(n, -min(rho, y_far), min(rho, y_far), p)
        total *= tot
        inside *= ins
    return max(total - inside, 0.0) ** (1.0 / p)


def psi_l4_norm_sq(index):
    """||psi_i||_4^2 by quadrature (used in the fourth-moment risk term)."""
    index = _check_multi_index(index)
    fourth = 1.0
    for n in index:
        y_far = math.sqrt(2.0 * n + 1.0) + 15.0
        fourth *= _abs_power_integral(n, -y_far, y_far, 4)
    return math.sqrt(fourth)


def _axis_ft_grid(r, half_width, k_abs, i_max):
    """Gauss-Legendre nodes and weights on [-R, R] resolving both the taper
    oscillations (one panel per order) and the frequency phase."""
    panels = max(
        int(i_max),
        int(math.ceil(r * k_abs * half_width)),
        int(math.ceil(k_abs * half_width / math.pi)),
        8,
    ) + 4
    edges = np.linspace(-half_width, half_width, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * np.broadcast_to(_GL_WEIGHTS, (panels, 24))).ravel()
    return x, w


def _axis_windowed_ft(r, half_width, k_s, n_max, i_max_hint=None):
    """int_{-R}^{R} r^{-1/2} psi_n(x/r) e^{-i k_s x} dx for all n < n_max."""
    budget = i_max_hint if i_max_hint is not None else n_max
    x, w = _axis_ft_grid(r, half_width, abs(k_s), budget)
    values = hermite_series(x / r, n_max)
    phase = np.exp(-1j * k_s * x)
    return r ** -0.5 * (values @ (w * phase))


def fourier_integral_tensor(basis, window, k):
    """Windowed Fourier integrals of every taper, as an (i_max,)*d tensor.

    Entry [i_1, ..., i_d] equals int_W f_i(x) e^{-i k.x} dx; the integrand
    is separable so the tensor is an outer product of per-axis integrals.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    hw = _window_half_widths(window, basis.d)
    if k.shape != (basis.d,):
        raise ValueError("frequency dimension does not match basis")
    axes = [
        _axis_windowed_ft(basis.r, hw[s], k[s], basis.i_max, basis.i_max)
        for s in range(basis.d)
    ]
    tensor = axes[0]
    for ax in axes[1:]:
        tensor = np.multiply.outer(tensor, ax)
    return tensor


def windowed_fourier_integral(basis, index, k, window):
    """int_W f_i(x) e^{-i k.x} dx for one multi-index of the basis."""
    index = _check_multi_index(index)
    if max(index) >= basis.i_max or len(index) != basis.d:
        raise ValueError(f"index {index} outside basis (i_max={basis.i_max})")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    hw = _window_half_widths(window, basis.d)
    value = 1.0 + 0.0j
    for s, n in enumerate(index):
        value *= _axis_windowed_ft(basis.r, hw[s], k[s], n + 1, basis.i_max)[n]
    return complex(value)


def _window_half_widths(window, d):
    if hasattr(window, "half_widths"):
        hw = tuple(float(h) for h in window.half_widths)
    else:
        hw = tuple(float(h) for h in np.atleast_1d(window))
        if len(hw) == 1:
            hw = hw * d
    if len(hw) != d:
        raise ValueError("window dimension does not match basis dimension")
    if any(h <= 0 for h in hw):
        raise ValueError("window half-widths must be > 0")
    return hw
