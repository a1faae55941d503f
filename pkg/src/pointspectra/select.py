"""Data-driven choice of the taper count by thinned cross-validation.

For a target frequency node the pattern is split, independently for each
of a set of frequency pairs (k_j, kt_j) with |k_j| = |kt_j|, into two
halves by 1/2-thinning.  A candidate estimate at k_j on one half is
compared against a low-order pilot estimate at kt_j on the other half;
the candidate minimizing the mean squared discrepancy wins.  Both halves
target the thinned structure factor (1-p) + p S, whose minimizer over
taper counts is also suitable for S itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .estimator import (
    batched_plugin_estimates,
    masked_phase_matrix,
    multitaper_plugin,
)
from .hermite import TaperBasis
from .patterns import PointPattern, Window
from .simulate import SeedStream

__all__ = [
    "FrequencyPairSet",
    "CvConfig",
    "SelectionResult",
    "circle_pairs",
    "build_pair_set",
    "k0_allowed_diagnostics",
    "cv_estimates",
    "cv_criterion",
    "select_tapers",
    "interpolate_selection",
    "TaperCountCV",
]

DEFAULT_OFFSETS = (-0.2, -0.1, 0.0, 0.1, 0.2)
DEFAULT_NODE_NORMS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5)
DEFAULT_DIRECTION = (math.cos(2.0 * math.pi / 3.0), math.sin(2.0 * math.pi / 3.0))


@dataclass(frozen=True)
class FrequencyPairSet:
    """Frequency pairs (k_j, kt_j) used by the criterion at one node."""

    pairs: np.ndarray  # (N, 2, d)
    origin: tuple = None

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=float)
        if pairs.ndim != 3 or pairs.shape[1] != 2:
            raise ValueError("pairs must have shape (N, 2, d)")
        if pairs.shape[0] == 0:
            raise ValueError("pair set must be non-empty")
        object.__setattr__(self, "pairs", pairs)

    @property
    def n_pairs(self):
        return self.pairs.shape[0]

    @property
    def first(self):
        return self.pairs[:, 0, :]

    @property
    def second(self):
        return self.pairs[:, 1, :]


def circle_pairs(q, n):
    """n coordinate-swapped pairs on the circle of radius q (d = 2).

    Pair j is (q (cos a_j, sin a_j), q (sin a_j, cos a_j)) with
    a_j = 2 pi j / n for j = 1..n; swapping coordinates preserves the norm,
    so both members see the same S whenever S is exchange-symmetric.
    """
    if q <= 0:
        raise ValueError("radius q must be > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    return FrequencyPairSet(_circle_pair_array(q, n))


def _circle_pair_array(q, n):
    j = np.arange(1, n + 1)
    ang = 2.0 * math.pi * j / n
    c, s = np.cos(ang), np.sin(ang)
    first = q * np.column_stack((c, s))
    second = q * np.column_stack((s, c))
    return np.stack((first, second), axis=1)


@dataclass(frozen=True)
class CvConfig:
    """Hyper-parameters of the taper-count cross-validation."""

    candidates: tuple = tuple(range(1, 26))
    pilot_imax: int = 8
    theta: float = 1.0 / 3.0
    p: float = 0.5
    pair_spacing: float = None  # None: 0.02 for |node| <= 1, else 0.1
    offsets: tuple = DEFAULT_OFFSETS
    seed: SeedStream = field(default_factory=lambda: SeedStream(0))

    def __post_init__(self):
        if len(self.candidates) == 0:
            raise ValueError("candidate set must be non-empty")
        if any(c < 1 for c in self.candidates):
            raise ValueError("candidate i_max values must be >= 1")
        if self.pilot_imax < 1:
            raise ValueError("pilot_imax must be >= 1")
        if not 0.0 < self.p < 1.0:
            raise ValueError("thinning probability p must lie in (0, 1)")
        object.__setattr__(self, "candidates", tuple(sorted(int(c) for c in self.candidates)))
        seed = self.seed
        if not isinstance(seed, SeedStream):
            seed = SeedStream(int(seed))
        object.__setattr__(self, "seed", seed)


def _spacing_for(norm, cfg):
    if cfg.pair_spacing is not None:
        return float(cfg.pair_spacing)
    return 0.02 if norm <= 1.0 else 0.1


def _angular_count(radius, spacing):
    if spacing >= 2.0 * radius:
        return 1
    return max(1, int(round(math.pi / math.asin(spacing / (2.0 * radius)))))


def build_pair_set(k_node, cfg):
    """Frequency pairs around a node: circles at offset radii (d = 2).

    Radii are |k_node| plus the configured offsets (for the zero node the
    zero offset is dropped so no pair sits at the origin); on each circle
    the angular count makes adjacent frequencies about one spacing apart.
    """
    k_node = np.atleast_1d(np.asarray(k_node, dtype=float))
    if k_node.shape != (2,):
        raise ValueError("pair construction is defined for d = 2 nodes")
    norm = float(np.linalg.norm(k_node))
    spacing = _spacing_for(norm, cfg)
    if norm == 0.0:
        radii = [o for o in cfg.offsets if o != 0.0]
        if not radii:
            radii = [-0.2, -0.1, 0.1, 0.2]
    else:
        radii = [norm + o for o in cfg.offsets]
    radii = [q for q in radii if abs(q) > 1e-12]
    blocks = [
        _circle_pair_array(q, _angular_count(abs(q), spacing)) for q in radii
    ]
    return FrequencyPairSet(np.concatenate(blocks, axis=0), origin=tuple(k_node.tolist()))


def k0_allowed_diagnostics(pairs, k0, c3=10.0, n_radii=20):
    """Separation and spread diagnostics of a pair set relative to k0.

    Returns a dict with ``c1`` (worst norm ratio), ``c2`` (worst pair
    separation ratio) and ``clustering_ok`` (whether the local pair counts
    stay below c3 (N (a/|k0|)^{d-1} + 1) on a grid of radii a).
    """
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    k0_norm = float(np.linalg.norm(k0))
    if k0_norm == 0.0:
        raise ValueError("diagnostics are relative to |k0| > 0")
    first, second = pairs.first, pairs.second
    d = first.shape[1]
    n = pairs.n_pairs

    norms = np.minimum(np.linalg.norm(first, axis=1), np.linalg.norm(second, axis=1))
    c1 = float(norms.min() / k0_norm)
    sep = np.minimum(
        np.linalg.norm(first - second, axis=1),
        np.linalg.norm(first + second, axis=1),
    )
    c2 = float(sep.min() / k0_norm)

    all_freqs = np.concatenate([first, second], axis=0)
    # distances from each of (k_j, kt_j) to each of (k_j', kt_j')
    dists = np.linalg.norm(all_freqs[:, None, :] - all_freqs[None, :, :], axis=-1)
    clustering_ok = True
    for a in np.linspace(0.1 * k0_norm, 2.0 * k0_norm, n_radii):
        within = dists <= a
        counts = within[:n].sum(axis=1) + within[n:].sum(axis=1)
        bound = c3 * (n * (a / k0_norm) ** (d - 1) + 1.0)
        if counts.max() > bound:
            clustering_ok = False
            break
    return {"c1": c1, "c2": c2, "clustering_ok": clustering_ok}


def _thinning_masks(pattern, cfg, n_pairs):
    """0/1 retention masks, one independent stream per pair index."""
    masks = np.empty((n_pairs, pattern.n))
    for j in range(n_pairs):
        rng = cfg.seed.child(j).generator()
        masks[j] = rng.uniform(size=pattern.n) < cfg.p
    return masks


def _split_phases(pattern, cfg, pairs):
    """Masked phase matrices and point counts for the two halves of each pair."""
    masks = _thinning_masks(pattern, cfg, pairs.n_pairs)
    kept_phase = masked_phase_matrix(pattern.points, pairs.first, masks)
    rest_phase = masked_phase_matrix(pattern.points, pairs.second, 1.0 - masks)
    kept_counts = masks.sum(axis=1)
    rest_counts = pattern.n - kept_counts
    return kept_phase, kept_counts, rest_phase, rest_counts


def cv_estimates(pattern, i_max, cfg, pairs):
    """Candidate and pilot estimate arrays over the pair set.

    For each pair j the pattern is split by an independent p-thinning;
    the candidate estimate (i_max tapers per axis) is computed at k_j from
    the kept half and the pilot estimate at kt_j from the complement, both
    with plug-in intensity.  Returns (candidate_values, pilot_values).
    """
    if pattern.n == 0:
        raise ValueError("cannot cross-validate on an empty pattern")
    if pattern.d != 2:
        raise ValueError("cross-validation pairs are defined for d = 2")
    kept_phase, kept_counts, rest_phase, rest_counts = _split_phases(pattern, cfg, pairs)
    basis = TaperBasis.for_window(pattern.window, i_max, cfg.theta)
    pilot = TaperBasis.for_window(pattern.window, cfg.pilot_imax, cfg.theta)
    cand_vals = batched_plugin_estimates(
        pattern.points, pattern.window, basis, pairs.first,
        phase=kept_phase, counts=kept_counts,
    )
    pilot_vals = batched_plugin_estimates(
        pattern.points, pattern.window, pilot, pairs.second,
        phase=rest_phase, counts=rest_counts,
    )
    return cand_vals, pilot_vals


def cv_criterion(pattern, i_max, cfg, pairs):
    """Mean squared discrepancy between candidate and pilot halves."""
    cand_vals, pilot_vals = cv_estimates(pattern, i_max, cfg, pairs)
    return float(np.mean((cand_vals - pilot_vals) ** 2))


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of the taper-count selection at one node."""

    i_max: int
    criterion_values: dict
    candidate_estimates: dict
    pilot_estimates: np.ndarray


def select_tapers(pattern, cfg, k_node, pairs=None):
    """Select the candidate i_max minimizing the criterion at a node.

    Ties break toward the smallest i_max.  The full criterion curve and
    the per-pair estimates are returned for inspection.
    """
    if pairs is None:
        pairs = build_pair_set(k_node, cfg)
    if pattern.n == 0:
        raise ValueError("cannot cross-validate on an empty pattern")
    if pattern.d != 2:
        raise ValueError("cross-validation pairs are defined for d = 2")
    kept_phase, kept_counts, rest_phase, rest_counts = _split_phases(pattern, cfg, pairs)
    pilot_basis = TaperBasis.for_window(pattern.window, cfg.pilot_imax, cfg.theta)
    pilot_vals = batched_plugin_estimates(
        pattern.points, pattern.window, pilot_basis, pairs.second,
        phase=rest_phase, counts=rest_counts,
    )
    criterion = {}
    estimates = {}
    for imax in cfg.candidates:
        basis = TaperBasis.for_window(pattern.window, imax, cfg.theta)
        vals = batched_plugin_estimates(
            pattern.points, pattern.window, basis, pairs.first,
            phase=kept_phase, counts=kept_counts,
        )
        estimates[imax] = vals
        criterion[imax] = float(np.mean((vals - pilot_vals) ** 2))
    ordered = list(cfg.candidates)
    best = ordered[int(np.argmin([criterion[c] for c in ordered]))]
    return SelectionResult(
        i_max=best,
        criterion_values=criterion,
        candidate_estimates=estimates,
        pilot_estimates=pilot_vals,
    )


def interpolate_selection(nodes, k0):
    """Linear interpolation of selected taper counts between node norms.

    ``nodes`` is a sequence of (norm, i_max) sorted by norm; the count at
    |k0| is interpolated between the bracketing nodes, rounded to the
    nearest integer and clamped to at least 1 (and to the end nodes
    outside their range).
    """
    nodes = sorted((float(n), int(v)) for n, v in nodes)
    if not nodes:
        raise ValueError("node list must be non-empty")
    norm = float(np.linalg.norm(np.atleast_1d(np.asarray(k0, dtype=float))))
    xs = [n for n, _ in nodes]
    vs = [v for _, v in nodes]
    value = float(np.interp(norm, xs, vs))
    return max(1, int(round(value)))


class TaperCountCV(BaseEstimator):
    """Structure-factor estimator with node-wise cross-validated taper counts.

    ``fit(X)`` runs the selection at each node norm along the fixed
    direction; ``predict(K)`` estimates S at each frequency with the taper
    count interpolated from the nodes (plug-in intensity).

    ``pilot_imax`` must be chosen explicitly: 8 is a good default for
    clustered processes, 2 for repulsive ones.
    """

    def __init__(self, window=10.0, pilot_imax=None, candidates=tuple(range(1, 26)),
                 theta=1.0 / 3.0, p=0.5, node_norms=DEFAULT_NODE_NORMS,
                 direction=DEFAULT_DIRECTION, offsets=DEFAULT_OFFSETS,
                 pair_spacing=None, seed=0):
        self.window = window
        self.pilot_imax = pilot_imax
        self.candidates = candidates
        self.theta = theta
        self.p = p
        self.node_norms = node_norms
        self.direction = direction
        self.offsets = offsets
        self.pair_spacing = pair_spacing
        self.seed = seed

    def _config(self):
        if self.pilot_imax is None:
            raise ValueError(
                "pilot_imax must be set explicitly (8 suits clustered models, "
                "2 repulsive ones)"
            )
        return CvConfig(
            candidates=tuple(self.candidates),
            pilot_imax=int(self.pilot_imax),
            theta=self.theta,
            p=self.p,
            pair_spacing=self.pair_spacing,
            offsets=tuple(self.offsets),
            seed=self.seed if isinstance(self.seed, SeedStream) else SeedStream(int(self.seed)),
        )

    def _window(self):
        if isinstance(self.window, Window):
            return self.window
        if np.isscalar(self.window):
            return Window.square(float(self.window))
        return Window(tuple(self.window))

    def fit(self, X, y=None):
        cfg = self._config()
        window = self._window()
        if isinstance(X, PointPattern):
            pattern = X
        else:
            pattern = PointPattern(np.asarray(X, dtype=float), window)
        direction = np.asarray(self.direction, dtype=float)
        direction = direction / np.linalg.norm(direction)
        self.pattern_ = pattern
        self.nodes_ = []
        self.results_ = {}
        for norm in self.node_norms:
            node = norm * direction
            res = select_tapers(pattern, cfg, node)
            self.nodes_.append((float(norm), res.i_max))
            self.results_[float(norm)] = res
        return self

    def predict(self, K):
        if not hasattr(self, "pattern_"):
            raise RuntimeError("estimator is not fitted; call fit(X) first")
        K = np.atleast_2d(np.asarray(K, dtype=float))
        out = np.empty(len(K))
        for j, k in enumerate(K):
            imax = interpolate_selection(self.nodes_, k)
            basis = TaperBasis.for_window(self.pattern_.window, imax, self.theta)
            out[j] = multitaper_plugin(self.pattern_, basis, k).value
        return out
