"""Monte Carlo ensembles of rough junctions and (sigma, xi) sweeps.

Every sample draws its two interface fields from seeds derived from
``(master_seed, sample_index, interface)`` alone, so results do not depend on
the number of workers or the order in which samples are evaluated.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as _st

from . import __version__
from .domain import GridSpec, JunctionParams, RoughnessParams, validate
from .randfield import DEFAULT_THICKNESS_FLOOR, synthesize_field, thickness_map
from .stats import LogNormalFit, fit_lognormal
from .transport import ConductanceTable, build_conductance_table, ej_rough

log = logging.getLogger(__name__)

_MASK64 = 0xFFFFFFFFFFFFFFFF
STREAM_TOP, STREAM_BOTTOM, STREAM_SWEEP = 0, 1, 2


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, index: int, stream: int) -> int:
    """64-bit seed for ``(master_seed, index, stream)``; a pure function."""
    x = _splitmix64(int(master_seed) & _MASK64)
    x = _splitmix64(x ^ (int(index) & _MASK64))
    return _splitmix64(x ^ (int(stream) & _MASK64))


@dataclass(frozen=True)
class EnsembleConfig:
    junction: JunctionParams = field(default_factory=JunctionParams)
    rough: RoughnessParams = field(default_factory=RoughnessParams)
    grid: GridSpec | None = None
    n_samples: int = 5000
    master_seed: int = 0
    thickness_floor: float = DEFAULT_THICKNESS_FLOOR
    # rescale each interface realisation to zero mean and RMS exactly sigma
    standardize_fields: bool = True

    def __post_init__(self):
        if self.grid is None:
            object.__setattr__(self, "grid", GridSpec.for_junction(self.junction, 512))

    def validate(self) -> "EnsembleConfig":
        validate(self.junction, self.rough, self.grid)
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not self.thickness_floor > 0:
            raise ValueError("thickness_floor must be > 0")
        return self

    def as_dict(self) -> dict:
        """Configuration in the JSON run-config layout."""
        j, r, g = self.junction, self.rough, self.grid
        return {
            "junction": {"fermi_energy_eV": j.fermi_energy, "barrier_height_eV": j.barrier_height,
                         "nominal_thickness_nm": j.nominal_thickness, "gap_meV": j.gap,
                         "width_x_nm": j.width_x, "width_y_nm": j.width_y},
            "roughness": {"sigma_nm": r.sigma, "xi_nm": r.xi, "standardize": self.standardize_fields},
            "grid": {"nx": g.nx, "ny": g.ny},
            "ensemble": {"n_samples": int(self.n_samples), "master_seed": int(self.master_seed),
                         "thickness_floor_nm": self.thickness_floor},
        }


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    config: EnsembleConfig
    indices: np.ndarray
    ej: np.ndarray  # GHz
    seeds: np.ndarray  # (n, 2) uint64: top, bottom
    elapsed: float
    n_clamped: int = 0

    @property
    def samples(self):
        return list(zip(self.indices.tolist(), self.ej.tolist()))

    def fit(self) -> LogNormalFit:
        return fit_lognormal(self.ej)

    def write_csv(self, path) -> None:
        """Sample rows preceded by a ``#`` header echoing the full config."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# tool_version={__version__}\n")
            fh.write(f"# master_seed={int(self.config.master_seed)}\n")
            fh.write(f"# config={json.dumps(self.config.as_dict(), sort_keys=True)}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_index", "seed_top", "seed_bottom", "ej_ghz"])
            for i, (s_top, s_bot), ej in zip(self.indices.tolist(), self.seeds.tolist(), self.ej.tolist()):
                w.writerow([i, s_top, s_bot, repr(ej)])


class SampleError(RuntimeError):
    """A single sample failed; the whole ensemble is aborted."""

    def __init__(self, index: int, cause):
        self.index = index
        self.cause = cause if isinstance(cause, str) else repr(cause)
        super().__init__(f"sample {index} failed: {self.cause}")

    def __reduce__(self):
        return (SampleError, (self.index, self.cause))


# -- per-sample evaluation ---------------------------------------------------

_WORKER_STATE: dict = {}


def _init_worker(config: EnsembleConfig, table: ConductanceTable) -> None:
    _WORKER_STATE["config"] = config
    _WORKER_STATE["table"] = table


def sample_ej(config: EnsembleConfig, table: ConductanceTable, index: int):
    """E_J/h (GHz) and clamped-pixel count of sample ``index``."""
    s_top = derive_seed(config.master_seed, index, STREAM_TOP)
    s_bot = derive_seed(config.master_seed, index, STREAM_BOTTOM)
    top = synthesize_field(config.grid, config.rough, s_top, standardize=config.standardize_fields)
    bottom = synthesize_field(config.grid, config.rough, s_bot, standardize=config.standardize_fields)
    tmap = thickness_map(config.junction.nominal_thickness, top, bottom, config.thickness_floor)
    return ej_rough(tmap, table, config.junction), tmap.n_clamped


def _run_chunk(indices):
    config, table = _WORKER_STATE["config"], _WORKER_STATE["table"]
    out = []
    for i in indices:
        try:
            out.append((i, *sample_ej(config, table, i)))
        except Exception as exc:  # noqa: BLE001 - re-raised with the sample index
            raise SampleError(i, exc) from exc
    return out


def default_workers() -> int:
    return os.cpu_count() or 1


def run_ensemble(config: EnsembleConfig, workers: int | None = None,
                 table: ConductanceTable | None = None) -> EnsembleResult:
    """Evaluate ``config.n_samples`` independent junctions.

    ``workers`` processes share the conductance table read-only; the result
    is identical for any worker count.
    """
    config.validate()
    workers = default_workers() if workers is None else max(int(workers), 1)
    t0 = time.perf_counter()
    if table is None:
        table = build_conductance_table(config.junction, config.rough, config.thickness_floor)
    n = int(config.n_samples)
    ej = np.empty(n)
    clamped = 0
    if workers == 1 or n == 1:
        _init_worker(config, table)
        rows = _run_chunk(range(n))
    else:
        n_chunks = min(n, workers * 4)
        chunks = [range(k * n // n_chunks, (k + 1) * n // n_chunks) for k in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(config, table)) as pool:
            rows = [r for part in pool.map(_run_chunk, chunks) for r in part]
    for i, value, n_cl in rows:
        ej[i] = value
        clamped += n_cl
    if not np.all(ej > 0):
        bad = int(np.nonzero(~(ej > 0))[0][0])
        raise SampleError(bad, ValueError(f"non-positive E_J {ej[bad]!r}"))
    seeds = np.array([[derive_seed(config.master_seed, i, STREAM_TOP),
                       derive_seed(config.master_seed, i, STREAM_BOTTOM)] for i in range(n)],
                     dtype=np.uint64).reshape(n, 2)
    elapsed = time.perf_counter() - t0
    log.info("ensemble sigma=%g xi=%g n=%d done in %.1fs", config.rough.sigma, config.rough.xi, n, elapsed)
    return EnsembleResult(config=config, indices=np.arange(n), ej=ej, seeds=seeds, elapsed=elapsed,
                          n_clamped=clamped)


# -- sweeps ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SweepCell:
    sigma: float
    xi: float
    master_seed: int
    fit: LogNormalFit
    ej: np.ndarray

    @property
    def n(self) -> int:
        return self.fit.n


def cell_config(base: EnsembleConfig, sigma: float, xi: float, cell_index: int) -> EnsembleConfig:
    seed = derive_seed(base.master_seed, cell_index, STREAM_SWEEP)
    return replace(base, rough=RoughnessParams(sigma=sigma, xi=xi), master_seed=seed)


def run_sweep(base: EnsembleConfig, sigmas, xis, workers: int | None = None) -> list[SweepCell]:
    """One ensemble per ``(sigma, xi)``; cells are ordered xi-major like Table I rows.

    Cell ``k`` uses master seed ``derive_seed(base.master_seed, k, STREAM_SWEEP)``.
    """
    sigmas, xis = list(sigmas), list(xis)
    if not sigmas or not xis:
        raise ValueError("sigma and xi lists must be non-empty")
    configs = [cell_config(base, s, x, k) for k, (x, s) in
               enumerate((x, s) for x in xis for s in sigmas)]
    for c in configs:
        c.validate()
    cells = []
    for c in configs:
        res = run_ensemble(c, workers=workers)
        cells.append(SweepCell(sigma=c.rough.sigma, xi=c.rough.xi, master_seed=c.master_seed,
                               fit=res.fit(), ej=res.ej))
    return cells


def write_sweep_csv(cells, base: EnsembleConfig, path) -> None:
    """Table-I layout: one row per xi, per-sigma columns of mean, std, n and seed."""
    sigmas = sorted({c.sigma for c in cells})
    xis = sorted({c.xi for c in cells})
    by_key = {(c.sigma, c.xi): c for c in cells}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# tool_version={__version__}\n")
        fh.write(f"# master_seed={int(base.master_seed)}\n")
        fh.write(f"# config={json.dumps(base.as_dict(), sort_keys=True)}\n")
        fh.write(f"# sigmas_nm={json.dumps(sigmas)}\n# xis_nm={json.dumps(xis)}\n")
        w = csv.writer(fh, lineterminator="\n")
        header = ["xi_nm"]
        for s in sigmas:
            header += [f"sigma={s!r}_mean_ghz", f"sigma={s!r}_std_ghz", f"sigma={s!r}_n",
                       f"sigma={s!r}_seed"]
        w.writerow(header)
        for x in xis:
            row = [repr(x)]
            for s in sigmas:
                c = by_key[(s, x)]
                row += [repr(c.fit.mean_EJ), repr(c.fit.std_EJ), c.n, c.master_seed]
            w.writerow(row)


# -- trend statistics --------------------------------------------------------

def _fitted_moment(kind: str):
    def stat(x, axis=-1):
        logs = np.log(x)
        mu, s2 = logs.mean(axis=axis), logs.var(axis=axis)
        if kind == "mean":
            return np.exp(mu + s2 / 2)
        return np.sqrt(np.expm1(s2) * np.exp(2 * mu + s2))
    return stat


def bootstrap_ci(samples, kind: str = "mean", level: float = 0.95, n_resamples: int = 2000,
                 seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval of the fitted log-normal mean or std."""
    if kind not in ("mean", "std"):
        raise ValueError("kind must be 'mean' or 'std'")
    res = _st.bootstrap((np.asarray(samples, dtype=float),), _fitted_moment(kind), vectorized=True,
                        confidence_level=level, n_resamples=n_resamples, method="percentile",
                        random_state=np.random.default_rng(seed))
    ci = res.confidence_interval
    return float(ci.low), float(ci.high)


def strictly_increasing(intervals) -> bool:
    """True when consecutive intervals are disjoint and ordered upwards."""
    return all(a[1] < b[0] for a, b in zip(intervals, intervals[1:]))
