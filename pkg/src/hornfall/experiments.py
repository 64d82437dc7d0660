"""Monte Carlo sweeps over density grids, compared against the analytic prediction.

Every trial at grid point ``p`` uses the seed ``SeedSequence([base_seed, p, trial])``
so a sweep is reproducible point by point regardless of how the work is
split across processes.  Rows come out in grid order (d1 outermost).

CSV schema (first line is a version comment)::

    # schema: hornfall-sweep/1
    d1,d2,d3,n,trials,empirical_p,phi,t0,simple,wilson_hw,backbone_mean
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import sys
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.distance import directed_hausdorff
from scipy.stats import binomtest

from .errors import ConfigError
from .formula import DensityVector, sample_arrays
from .kernels import propagate
from .theory import gamma_curve, root_t0

SCHEMA = "hornfall-sweep/1"
COLUMNS = ("d1", "d2", "d3", "n", "trials", "empirical_p", "phi", "t0", "simple", "wilson_hw", "backbone_mean")
MAX_K = 3


@dataclass
class SweepConfig:
    k: int
    axes: list[np.ndarray]  # values of d1..dk, one array per component
    n: int = 20000
    trials: int = 200
    seed: int = 0
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        self.axes = [np.atleast_1d(np.asarray(a, dtype=float)) for a in self.axes]
        if not 1 <= self.k <= MAX_K:
            raise ConfigError(f"sweeps support 1 <= k <= {MAX_K}, got k={self.k}")
        if len(self.axes) != self.k:
            raise ConfigError(f"need {self.k} axes (d1..d{self.k}), got {len(self.axes)}")
        if any(a.size == 0 for a in self.axes):
            raise ConfigError("every axis needs at least one value")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n < self.k:
            raise ConfigError(f"n={self.n} must be >= k={self.k}")
        if np.any(self.axes[0] < 0) or np.any(self.axes[0] >= 1):
            raise ConfigError("d1 values must lie in [0, 1)")
        if any(np.any(a < 0) for a in self.axes[1:]):
            raise ConfigError("densities must be non-negative")

    def points(self) -> list[tuple[float, ...]]:
        return [tuple(float(x) for x in p) for p in itertools.product(*self.axes)]


@dataclass(frozen=True)
class SweepRecord:
    d: tuple[float, ...]
    n: int
    trials: int
    empirical_p: float
    phi: float
    t0: float
    simple: bool
    wilson_hw: float
    backbone_mean: float
    sat_count: int = field(default=0, compare=False)

    def row(self) -> list[str]:
        d = list(self.d) + [0.0] * (MAX_K - len(self.d))
        vals = d + [self.n, self.trials, self.empirical_p, self.phi, self.t0,
                    "true" if self.simple else "false", self.wilson_hw, self.backbone_mean]
        return [repr(float(v)) if isinstance(v, float) else str(v) for v in vals]


def wilson_halfwidth(successes: int, trials: int, confidence: float = 0.95) -> float:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return 0.5 * (ci.high - ci.low)


def trial_seed(base_seed: int, point_index: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base_seed), int(point_index), int(trial)])


def run_trials(d: Sequence[float], n: int, trials: int, base_seed: int, point_index: int,
               backend: str | None = None) -> tuple[int, np.ndarray]:
    """Sample and solve ``trials`` formulas; return (#satisfiable, backbone fractions)."""
    dv = DensityVector(tuple(d))
    sat = 0
    fractions = np.empty(trials)
    for trial in range(trials):
        heads, ptr, body, _ = sample_arrays(n, dv, trial_seed(base_seed, point_index, trial))
        _, size, _, conflict = propagate(n, heads, ptr, body, backend=backend)
        sat += not conflict
        fractions[trial] = size / n
    return sat, fractions


def evaluate_point(d: Sequence[float], n: int, trials: int, base_seed: int, point_index: int,
                   backend: str | None = None) -> SweepRecord:
    pred = root_t0(DensityVector(tuple(d)))
    sat, fractions = run_trials(d, n, trials, base_seed, point_index, backend)
    return SweepRecord(
        d=tuple(float(x) for x in d), n=n, trials=trials,
        empirical_p=sat / trials, phi=pred.phi, t0=pred.t0, simple=pred.simple,
        wilson_hw=wilson_halfwidth(sat, trials), backbone_mean=float(fractions.mean()),
        sat_count=sat,
    )


def _evaluate_star(args):
    return evaluate_point(*args)


def worker_count(requested: int | None = None) -> int:
    """Requested workers, capped by ``HORNFALL_THREADS`` and the CPU count."""
    w = requested or 1
    env = os.environ.get("HORNFALL_THREADS")
    if env:
        try:
            w = min(w, max(1, int(env)))
        except ValueError:
            raise ConfigError(f"HORNFALL_THREADS must be an integer, got {env!r}") from None
    return max(1, min(w, os.cpu_count() or 1))


def iter_sweep(cfg: SweepConfig, backend: str | None = None) -> Iterator[SweepRecord]:
    jobs = [(p, cfg.n, cfg.trials, cfg.seed, i, backend) for i, p in enumerate(cfg.points())]
    workers = worker_count(cfg.workers)
    if workers == 1:
        yield from map(_evaluate_star, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_evaluate_star, jobs, chunksize=max(1, len(jobs) // (8 * workers)))


def write_csv_header(fh) -> csv.writer:
    fh.write(f"# schema: {SCHEMA}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    return w


def run_sweep(cfg: SweepConfig, backend: str | None = None) -> list[SweepRecord]:
    """Run the sweep; when ``cfg.output`` is set, rows are streamed to that CSV file
    (``-`` writes to stdout)."""
    records = []
    if cfg.output is None:
        return list(iter_sweep(cfg, backend))
    if cfg.output == "-":
        fh, close = sys.stdout, False
    else:
        fh, close = open(Path(cfg.output), "w", newline=""), True
    try:
        w = write_csv_header(fh)
        for rec in iter_sweep(cfg, backend):
            w.writerow(rec.row())
            fh.flush()
            records.append(rec)
    finally:
        if close:
            fh.close()
    return records


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = write_csv_header(buf)
    for rec in records:
        w.writerow(rec.row())
    return buf.getvalue()


def read_csv(path_or_text: str) -> list[dict[str, str]]:
    text = path_or_text
    if "\n" not in path_or_text:
        text = Path(path_or_text).read_text()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# -- config files ------------------------------------------------------------------

_KEYS = {"k", "d1", "d2", "d3", "n", "trials", "seed", "output", "workers"}


def parse_axis(text: str) -> np.ndarray:
    """``"0.1"``, ``"0.1,0.2,0.5"`` or inclusive ``"start:stop:step"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3:
                raise ConfigError(f"range must be start:stop:step, got {text!r}")
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ConfigError(f"bad range {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return start + step * np.arange(count)
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise ConfigError(f"cannot parse axis {text!r}") from None


def parse_config(text: str) -> SweepConfig:
    """Parse ``key=value`` lines (``#`` starts a comment)."""
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        kv[key] = val
    try:
        k = int(kv.get("k", "3"))
        axes = [parse_axis(kv.get(f"d{j}", "0")) for j in range(1, k + 1)]
        if k > MAX_K or any(f"d{j}" in kv for j in range(k + 1, MAX_K + 1)):
            raise ConfigError(f"axes beyond d{k} given for k={k}")
        return SweepConfig(
            k=k, axes=axes,
            n=int(kv.get("n", "20000")),
            trials=int(kv.get("trials", "200")),
            seed=int(kv.get("seed", "0")),
            output=kv.get("output"),
            workers=int(kv.get("workers", "1")),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


# -- probing the discontinuity -----------------------------------------------------


@dataclass(frozen=True)
class JumpProbe:
    phi_below: float
    phi_above: float
    empirical_below: float | None
    empirical_above: float | None


def jump_probe(d1: float, d3: float, window: float, n: int = 20000, trials: int = 0,
               seed: int = 0, backend: str | None = None) -> JumpProbe:
    """Analytic (and, with ``trials > 0``, Monte Carlo) probability at ``d3 -/+ window``."""
    lo = DensityVector((d1, 0.0, d3 - window))
    hi = DensityVector((d1, 0.0, d3 + window))
    eb = ea = None
    if trials > 0:
        eb = run_trials(lo.d, n, trials, seed, 0, backend)[0] / trials
        ea = run_trials(hi.d, n, trials, seed, 1, backend)[0] / trials
    return JumpProbe(root_t0(lo).phi, root_t0(hi).phi, eb, ea)


def near_gamma(d1: float, d3: float, width: float) -> bool:
    """Whether ``(d1, 0, d3)`` lies within ``width`` (in d1) of the curve Gamma."""
    return d3 >= 2.0 and abs(d1 - gamma_curve(d3).d1) <= width


def level_set(axis_x: np.ndarray, axis_y: np.ndarray, grid: np.ndarray, level: float = 0.5,
              spacing: float = 1e-3) -> np.ndarray:
    """Points on the ``level`` contour of ``grid[i, j] = f(axis_x[i], axis_y[j])``.

    Marching squares on the grid, then each polyline is resampled at about
    ``spacing`` so that distances to it are not dominated by segment length.
    """
    from skimage.measure import find_contours

    pts = []
    ix = np.arange(axis_x.size)
    iy = np.arange(axis_y.size)
    for c in find_contours(np.asarray(grid, dtype=float), level):
        xy = np.column_stack((np.interp(c[:, 0], ix, axis_x), np.interp(c[:, 1], iy, axis_y)))
        for a, b in zip(xy[:-1], xy[1:]):
            steps = max(1, int(np.ceil(np.hypot(*(b - a)) / spacing)))
            s = np.linspace(0.0, 1.0, steps, endpoint=False)[:, None]
            pts.append(a + s * (b - a))
        pts.append(xy[-1:])
    return np.vstack(pts) if pts else np.empty((0, 2))


def gamma_polyline(d3_lo: float, d3_hi: float, count: int = 4000) -> np.ndarray:
    """Gamma sampled as ``(d1, d3)`` pairs."""
    d3 = np.linspace(d3_lo, d3_hi, count)
    return np.array([(gamma_curve(x).d1, x) for x in d3])


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 or len(b) == 0:
        return math.inf
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


def grid_of(records: Sequence[SweepRecord], cfg: SweepConfig, attr: str, axes: tuple[int, int]) -> np.ndarray:
    """Reshape per-point values into a 2-D array over two swept axes."""
    shape = tuple(a.size for a in cfg.axes)
    vals = np.array([getattr(r, attr) for r in records], dtype=float).reshape(shape)
    keep = [slice(None) if i in axes else 0 for i in range(len(shape))]
    return vals[tuple(keep)]


__all__ = [
    "COLUMNS",
    "JumpProbe",
    "SCHEMA",
    "SweepConfig",
    "SweepRecord",
    "evaluate_point",
    "gamma_polyline",
    "grid_of",
    "hausdorff",
    "iter_sweep",
    "jump_probe",
    "level_set",
    "near_gamma",
    "parse_axis",
    "parse_config",
    "read_csv",
    "records_to_csv",
    "run_sweep",
    "run_trials",
    "trial_seed",
    "wilson_halfwidth",
    "worker_count",
]
