"""Config-driven simulation campaigns: simulate, estimate, aggregate, emit CSV.

Configs are flat key-value text with section headers (INI style).  A run
is fully determined by its seed: replicates draw from per-replicate
streams and results are aggregated in replicate order, so the output is
byte-identical regardless of the worker count.
"""

from __future__ import annotations

import configparser
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import models
from .estimator import MultitaperStructureFactor, multitaper_oracle, multitaper_plugin
from .hermite import TaperBasis
from .patterns import Window
from .select import CvConfig, select_tapers
from .simulate import SeedStream, sample_model

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "FrequencyRecord",
    "parse_config",
    "serialize_config",
    "run_experiment",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("model", "k_norm", "mean", "q05", "q95", "theory", "replicates", "taper_mode")

WORKERS_ENV = "POINTSPECTRA_WORKERS"

_DEF_DIRECTION = (math.cos(2.0 * math.pi / 3.0), math.sin(2.0 * math.pi / 3.0))


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    model: models.ModelSpec
    window: Window
    norms: tuple
    direction: tuple = _DEF_DIRECTION
    tapers: object = 8  # int or the string "cv"
    theta: float = 1.0 / 3.0
    intensity: object = "plugin"  # "plugin" or a float
    candidates: tuple = (2, 4, 8, 16, 25)
    pilot: int = 8
    pair_spacing: float = None
    thinning: float = 0.5
    replicates: int = 100
    seed: int = 0
    output: str = None
    workers: int = None
    grid_h: float = None


_REQUIRED = {"model": ("name",), "run": ("replicates",)}
_KNOWN_KEYS = {
    "model": None,  # validated by models.make_model
    "window": ("half_width", "dim"),
    "frequencies": ("norms", "direction"),
    "estimator": ("tapers", "theta", "intensity", "candidates", "pilot",
                  "pair_spacing", "thinning"),
    "run": ("replicates", "seed", "output", "workers", "grid_h"),
}


def _floats(text):
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def parse_config(text):
    """Parse and validate an experiment config; errors name section.key."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<syntax>", str(exc)) from exc

    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(section, "unknown section")
        allowed = _KNOWN_KEYS[section]
        if allowed is not None:
            for key in cp[section]:
                if key not in allowed:
                    raise ConfigError(f"{section}.{key}", "unknown key")
    for section, keys in _REQUIRED.items():
        if section not in cp:
            raise ConfigError(section, "missing section")
        for key in keys:
            if key not in cp[section]:
                raise ConfigError(f"{section}.{key}", "missing required key")

    mp = dict(cp["model"])
    name = mp.pop("name")
    try:
        model = models.make_model(name, **{k: float(v) for k, v in mp.items()})
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from exc

    win = cp["window"] if "window" in cp else {}
    half_width = _get(win, "half_width", float, 10.0, "window.half_width")
    dim = _get(win, "dim", int, 2, "window.dim")
    if half_width <= 0:
        raise ConfigError("window.half_width", "must be > 0")
    if dim < 1:
        raise ConfigError("window.dim", "must be >= 1")
    window = Window.square(half_width, dim)

    freq = cp["frequencies"] if "frequencies" in cp else {}
    norms = _get(freq, "norms", _floats, (1.0, 2.0, 3.0), "frequencies.norms")
    if any(n < 0 for n in norms):
        raise ConfigError("frequencies.norms", "norms must be >= 0")
    direction = _get(freq, "direction", _floats, _DEF_DIRECTION, "frequencies.direction")
    if len(direction) != dim or not any(direction):
        raise ConfigError("frequencies.direction", f"needs {dim} non-zero components")

    est = cp["estimator"] if "estimator" in cp else {}
    tapers_raw = est.get("tapers", "8")
    if tapers_raw == "cv":
        tapers = "cv"
    else:
        try:
            tapers = int(tapers_raw)
        except ValueError:
            raise ConfigError("estimator.tapers", "must be an integer or 'cv'")
        if tapers < 1:
            raise ConfigError("estimator.tapers", "must be >= 1")
    theta = _get(est, "theta", float, 1.0 / 3.0, "estimator.theta")
    if not 0.0 < theta < 2.0 / 3.0:
        raise ConfigError("estimator.theta", "must lie in (0, 2/3)")
    intensity_raw = est.get("intensity", "plugin")
    if intensity_raw == "plugin":
        intensity = "plugin"
    else:
        try:
            intensity = float(intensity_raw)
        except ValueError:
            raise ConfigError("estimator.intensity", "must be 'plugin' or a number")
        if intensity <= 0:
            raise ConfigError("estimator.intensity", "oracle intensity must be > 0")
    candidates = _get(est, "candidates", _ints, (2, 4, 8, 16, 25), "estimator.candidates")
    if any(c < 1 for c in candidates):
        raise ConfigError("estimator.candidates", "values must be >= 1")
    pilot = _get(est, "pilot", int, 8, "estimator.pilot")
    if pilot < 1:
        raise ConfigError("estimator.pilot", "must be >= 1")
    pair_spacing = _get(est, "pair_spacing", float, None, "estimator.pair_spacing")
    thinning = _get(est, "thinning", float, 0.5, "estimator.thinning")
    if not 0.0 < thinning < 1.0:
        raise ConfigError("estimator.thinning", "must lie in (0, 1)")

    run = cp["run"]
    replicates = _get(run, "replicates", int, None, "run.replicates")
    if replicates is None or replicates < 1:
        raise ConfigError("run.replicates", "must be >= 1")
    seed = _get(run, "seed", int, 0, "run.seed")
    output = run.get("output") or None
    workers = _get(run, "workers", int, None, "run.workers")
    if workers is not None and workers < 1:
        raise ConfigError("run.workers", "must be >= 1")
    grid_h = _get(run, "grid_h", float, None, "run.grid_h")
    if grid_h is not None and grid_h <= 0:
        raise ConfigError("run.grid_h", "must be > 0")

    return ExperimentConfig(
        model=model, window=window, norms=tuple(norms), direction=tuple(direction),
        tapers=tapers, theta=theta, intensity=intensity,
        candidates=tuple(candidates), pilot=pilot, pair_spacing=pair_spacing,
        thinning=thinning, replicates=replicates, seed=seed, output=output,
        workers=workers, grid_h=grid_h,
    )


def _get(section, key, conv, default, path):
    if key not in section:
        return default
    try:
        return conv(section[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, f"cannot parse value {section[key]!r}") from exc


def serialize_config(config):
    """Config text that parses back to an identical configuration."""
    cp = configparser.ConfigParser()
    cp["model"] = {"name": config.model.name,
                   **{k: repr(v) for k, v in config.model.params}}
    hw = set(config.window.half_widths)
    cp["window"] = {"half_width": repr(config.window.half_widths[0]),
                    "dim": str(config.window.d)}
    if len(hw) != 1:
        raise ConfigError("window", "only square windows are serializable")
    cp["frequencies"] = {
        "norms": " ".join(repr(n) for n in config.norms),
        "direction": " ".join(repr(v) for v in config.direction),
    }
    est = {
        "tapers": str(config.tapers),
        "theta": repr(config.theta),
        "intensity": config.intensity if isinstance(config.intensity, str)
        else repr(config.intensity),
        "candidates": " ".join(str(c) for c in config.candidates),
        "pilot": str(config.pilot),
        "thinning": repr(config.thinning),
    }
    if config.pair_spacing is not None:
        est["pair_spacing"] = repr(config.pair_spacing)
    cp["estimator"] = est
    run = {"replicates": str(config.replicates), "seed": str(config.seed)}
    if config.output:
        run["output"] = config.output
    if config.workers is not None:
        run["workers"] = str(config.workers)
    if config.grid_h is not None:
        run["grid_h"] = repr(config.grid_h)
    cp["run"] = run
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencyRecord:
    k_norm: float
    mean: float
    q05: float
    q95: float
    theory: float
    replicates: int
    taper_mode: str


@dataclass(frozen=True)
class ExperimentResult:
    model_name: str
    records: tuple

    def csv_text(self):
        lines = [",".join(CSV_COLUMNS)]
        for r in self.records:
            lines.append(
                f"{self.model_name},{r.k_norm!r},{r.mean!r},{r.q05!r},"
                f"{r.q95!r},{r.theory!r},{r.replicates},{r.taper_mode}"
            )
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.csv_text())


def _frequencies(config):
    direction = np.asarray(config.direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    norms = np.asarray(config.norms, dtype=float)
    return norms[:, None] * direction[None, :]


def _replicate_estimates(config, rep):
    """Estimates for one replicate, one value per configured frequency."""
    stream = SeedStream(config.seed)
    pattern = sample_model(config.model, config.window, stream.child(rep, 0),
                           h=config.grid_h)
    freqs = _frequencies(config)
    out = np.empty(len(freqs))
    if config.tapers == "cv":
        for j, k in enumerate(freqs):
            cfg = CvConfig(
                candidates=config.candidates,
                pilot_imax=config.pilot,
                theta=config.theta,
                p=config.thinning,
                pair_spacing=config.pair_spacing,
                seed=stream.child(rep, 1, j),
            )
            chosen = select_tapers(pattern, cfg, k).i_max
            basis = TaperBasis.for_window(config.window, chosen, config.theta)
            out[j] = _single_estimate(pattern, basis, k, config.intensity)
    else:
        basis = TaperBasis.for_window(config.window, int(config.tapers), config.theta)
        for j, k in enumerate(freqs):
            out[j] = _single_estimate(pattern, basis, k, config.intensity)
    return out


def _single_estimate(pattern, basis, k, intensity):
    if intensity == "plugin":
        return multitaper_plugin(pattern, basis, k).value
    return multitaper_oracle(pattern, basis, k, float(intensity)).value


def _worker(args):
    config, rep = args
    return rep, _replicate_estimates(config, rep)


def run_experiment(config, workers=None):
    """Simulate, estimate and aggregate; returns the result (and writes CSV).

    Results are deterministic for a fixed seed: replicate r always uses
    stream (seed, r, ...) and the aggregation order is fixed, so the CSV
    bytes do not depend on the worker count.
    """
    if workers is None:
        workers = config.workers
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    n_freq = len(config.norms)
    values = np.empty((config.replicates, n_freq))
    tasks = [(config, rep) for rep in range(config.replicates)]
    if workers <= 1:
        for rep in range(config.replicates):
            values[rep] = _replicate_estimates(config, rep)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rep, row in pool.map(_worker, tasks, chunksize=1):
                values[rep] = row

    freqs = _frequencies(config)
    theory = np.atleast_1d(models.structure_factor(config.model, freqs))
    taper_mode = "cv" if config.tapers == "cv" else str(config.tapers)
    records = []
    for j, norm in enumerate(config.norms):
        col = values[:, j]
        records.append(FrequencyRecord(
            k_norm=float(norm),
            mean=float(np.mean(col)),
            q05=float(np.quantile(col, 0.05)),
            q95=float(np.quantile(col, 0.95)),
            theory=float(theory[j]),
            replicates=config.replicates,
            taper_mode=taper_mode,
        ))
    result = ExperimentResult(model_name=config.model.name, records=tuple(records))
    if config.output:
        result.write(config.output)
    return result
