"""Gaussian random interface fields with Gaussian autocovariance.

Fields are synthesised on a periodic grid by spectral filtering of
Hermitian-symmetric complex white noise: ``h = IFFT(W * sqrt(lambda_k))`` with
``lambda_k`` the discrete eigenvalues of the covariance
``sigma^2 exp(-r^2/xi^2)``.
"""

from __future__ import annotations

import csv
import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .domain import GridSpec, RoughnessParams

DEFAULT_THICKNESS_FLOOR = 0.2  # nm


@dataclass(frozen=True, eq=False)
class HeightField:
    """One interface realisation ``h(x, y)`` in nm."""

    grid: GridSpec
    rough: RoughnessParams
    values: np.ndarray
    seed: int


@dataclass(frozen=True, eq=False)
class ThicknessMap:
    """Local barrier thickness per pixel (nm); ``n_clamped`` pixels hit the floor."""

    grid: GridSpec
    values: np.ndarray
    floor: float
    n_clamped: int = 0


@functools.lru_cache(maxsize=16)
def spectral_amplitude(grid: GridSpec, rough: RoughnessParams) -> np.ndarray:
    """Square-root eigenvalues on the ``rfft2`` half spectrum.

    The continuous density ``S(k) = sigma^2 pi xi^2 exp(-xi^2 |k|^2 / 4)`` is
    sampled on the discrete wavevectors and rescaled so that the mean
    eigenvalue over the full spectrum, i.e. the pixel variance, is exactly
    ``sigma^2``.
    """
    kx = 2 * np.pi * np.fft.fftfreq(grid.nx, grid.dx)
    ky_full = 2 * np.pi * np.fft.fftfreq(grid.ny, grid.dy)
    ky = 2 * np.pi * np.fft.rfftfreq(grid.ny, grid.dy)
    xi2 = rough.xi ** 2

    shape_x = np.exp(-xi2 * kx ** 2 / 4)
    # the spectrum is separable, so the full-spectrum mean factorises
    full_mean = shape_x.mean() * np.exp(-xi2 * ky_full ** 2 / 4).mean()
    lam = np.outer(shape_x, np.exp(-xi2 * ky ** 2 / 4)) * (rough.sigma ** 2 / full_mean)
    amp = np.sqrt(lam)
    amp.setflags(write=False)
    return amp


def hermitian_white_noise(shape, rng: np.random.Generator) -> np.ndarray:
    """Half-spectrum white noise distributed exactly like ``rfft2`` of unit
    real white noise on ``shape``.

    Interior columns are complex normal with ``E|z|^2 = N``. ``irfft2`` keeps
    only the Hermitian part of the ``ky = 0`` and Nyquist columns, which halves
    their power, so those columns are drawn with twice the power.
    """
    nx, ny = shape
    n = nx * ny
    nyh = ny // 2 + 1
    z = rng.standard_normal((nx, nyh, 2)).view(np.complex128)[..., 0]
    z *= math.sqrt(n / 2)
    z[:, 0] *= math.sqrt(2)
    if ny % 2 == 0:
        z[:, -1] *= math.sqrt(2)
    return z


def synthesize_field(grid: GridSpec, rough: RoughnessParams, seed: int,
                     standardize: bool = False) -> HeightField:
    """Draw one zero-mean Gaussian field with covariance ``sigma^2 exp(-r^2/xi^2)``.

    With ``standardize=True`` each realisation is additionally shifted to zero
    spatial mean and rescaled to spatial RMS exactly ``sigma``, i.e. ``sigma``
    is treated as the RMS of every individual interface rather than only an
    ensemble property.
    """
    if min(rough.xi / grid.dx, rough.xi / grid.dy) < 2:
        raise ValueError(f"xi = {rough.xi:g} nm spans fewer than 2 pixels; field would be white noise")
    length = min(grid.length_x, grid.length_y)
    if rough.xi > length / 4:
        warnings.warn(f"xi = {rough.xi:g} nm exceeds L/4 = {length / 4:g} nm; periodic wrap-around "
                      "distorts the field statistics", RuntimeWarning, stacklevel=2)

    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    if rough.sigma == 0:
        values = np.zeros(grid.shape)
    else:
        spec = hermitian_white_noise(grid.shape, np.random.default_rng(seed))
        spec *= spectral_amplitude(grid, rough)
        values = np.fft.irfft2(spec, s=grid.shape)
        if standardize:
            values -= values.mean()
            values *= rough.sigma / math.sqrt(np.mean(values * values))
    return HeightField(grid=grid, rough=rough, values=values, seed=seed)


def autocovariance_map(values: np.ndarray) -> np.ndarray:
    """Circular autocovariance ``<h(r0) h(r0 + r)>`` via Wiener-Khinchin.

    No mean is subtracted, so a constant field ``c`` gives ``c^2`` everywhere.
    """
    n = values.size
    power = np.abs(np.fft.rfft2(values)) ** 2
    return np.fft.irfft2(power, s=values.shape) / n


def _lag_radii(grid: GridSpec) -> np.ndarray:
    ix = np.fft.fftfreq(grid.nx) * grid.nx * grid.dx
    iy = np.fft.fftfreq(grid.ny) * grid.ny * grid.dy
    return np.hypot(ix[:, None], iy[None, :])


def estimate_statistics(field: HeightField):
    """Return ``(rms, radial)`` with ``radial`` a ``(k, 2)`` array of ``(r, C(r))``.

    Lags are binned in shells of width ``min(dx, dy)`` up to half the shorter
    side; ``r`` is the mean lag of each shell.
    """
    values = np.asarray(field.values, dtype=float)
    rms = math.sqrt(float(np.mean(values * values)))
    cov = autocovariance_map(values)
    grid = field.grid
    r = _lag_radii(grid)
    width = min(grid.dx, grid.dy)
    r_max = min(grid.length_x, grid.length_y) / 2
    mask = r <= r_max
    idx = np.floor(r[mask] / width + 0.5).astype(int)
    counts = np.bincount(idx)
    r_sum = np.bincount(idx, weights=r[mask])
    c_sum = np.bincount(idx, weights=cov[mask])
    keep = counts > 0
    radial = np.column_stack([r_sum[keep] / counts[keep], c_sum[keep] / counts[keep]])
    return rms, radial


def axis_autocovariance(field: HeightField):
    """Autocovariance along x and along y at lags ``0 .. n/2`` pixels."""
    cov = autocovariance_map(np.asarray(field.values, dtype=float))
    nx, ny = field.grid.shape
    return cov[: nx // 2 + 1, 0], cov[0, : ny // 2 + 1]


def fit_correlation_length(radial, r_max: float | None = None) -> tuple[float, float]:
    """Least-squares fit of ``A exp(-r^2/xi^2)`` to a radial autocovariance.

    Returns ``(A, xi)``. Only lags ``r <= r_max`` enter the fit; by default
    the lags where C(r) is above 5% of C(0).
    """
    radial = np.asarray(radial, dtype=float)
    r, c = radial[:, 0], radial[:, 1]
    if r_max is None:
        above = np.nonzero(c < 0.05 * c[0])[0]
        r_max = r[above[0]] if above.size else r[-1]
    sel = r <= r_max
    guess_xi = r[np.argmin(np.abs(c - c[0] / math.e))] or r[1]
    popt, _ = curve_fit(lambda x, a, xi: a * np.exp(-(x / xi) ** 2), r[sel], c[sel],
                        p0=(c[0], guess_xi))
    return float(popt[0]), abs(float(popt[1]))


def thickness_map(d: float, top: HeightField, bottom: HeightField,
                  floor: float = DEFAULT_THICKNESS_FLOOR) -> ThicknessMap:
    """Local thickness ``max(d + top + bottom, floor)``."""
    if top.grid != bottom.grid:
        raise ValueError(f"interface grids differ: {top.grid} vs {bottom.grid}")
    if not floor > 0:
        raise ValueError(f"thickness floor must be > 0, got {floor!r}")
    values = d + top.values + bottom.values
    low = values < floor
    n_clamped = int(np.count_nonzero(low))
    if n_clamped:
        values[low] = floor
    return ThicknessMap(grid=top.grid, values=values, floor=floor, n_clamped=n_clamped)


# -- CSV export --------------------------------------------------------------

def write_field_csv(field: HeightField, path) -> None:
    """Write the field as a row-major CSV grid (one row per x index).

    The leading ``#`` lines carry nx, ny, dx, dy, sigma, xi and seed.
    """
    g, rough = field.grid, field.rough
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, value in (("nx", g.nx), ("ny", g.ny), ("dx", repr(g.dx)), ("dy", repr(g.dy)),
                           ("sigma", repr(rough.sigma)), ("xi", repr(rough.xi)), ("seed", field.seed)):
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in field.values:
            writer.writerow([repr(float(v)) for v in row])


def read_field_csv(path) -> HeightField:
    meta = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif line.strip():
                rows.append([float(v) for v in line.split(",")])
    grid = GridSpec(int(meta["nx"]), int(meta["ny"]), float(meta["dx"]), float(meta["dy"]))
    rough = RoughnessParams(float(meta["sigma"]), float(meta["xi"]))
    return HeightField(grid=grid, rough=rough, values=np.array(rows), seed=int(meta["seed"]))
