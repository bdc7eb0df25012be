"""Log-normal statistics of Josephson-energy samples and transmon propagation."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as _st

MIN_FIT_SAMPLES = 10


@dataclass(frozen=True)
class LogNormalFit:
    """Maximum-likelihood log-normal fit; energies in GHz.

    ``mean_EJ``/``std_EJ`` are the moments of the fitted distribution,
    ``sample_mean``/``sample_std`` those of the raw samples (population std).
    ``goodness`` is the KS statistic of the log-samples against the fitted
    normal.
    """

    mu_J: float
    sigma_J: float
    mean_EJ: float
    std_EJ: float
    n: int
    goodness: float
    sample_mean: float
    sample_std: float
    sample_skewness: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TransmonEstimate:
    E_C: float
    f01_mean: float
    f01_std: float


def lognormal_moments(mu_J: float, sigma_J: float) -> tuple[float, float]:
    """Mean and variance of ``exp(N(mu_J, sigma_J^2))``."""
    if sigma_J < 0:
        raise ValueError("sigma_J must be >= 0")
    s2 = sigma_J * sigma_J
    mean = math.exp(mu_J + s2 / 2)
    var = math.expm1(s2) * math.exp(2 * mu_J + s2)
    return mean, var


def fit_lognormal(samples) -> LogNormalFit:
    x = np.asarray(samples, dtype=float)
    if x.size < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples, got {x.size}")
    if np.any(~(x > 0)):
        raise ValueError("all samples must be positive")
    logs = np.log(x)
    if np.ptp(logs) == 0:  # avoid rounding noise from np.mean on identical values
        mu, sigma = float(logs[0]), 0.0
    else:
        mu = float(np.mean(logs))
        sigma = float(np.std(logs))
    if sigma > 0:
        ks = float(_st.kstest(logs, "norm", args=(mu, sigma)).statistic)
    else:
        ks = 0.0
    mean, var = lognormal_moments(mu, sigma)
    std_raw = float(np.std(x))
    skew = float(_st.skew(x)) if std_raw > 0 else 0.0
    return LogNormalFit(mu_J=mu, sigma_J=sigma, mean_EJ=mean, std_EJ=math.sqrt(var), n=int(x.size),
                        goodness=ks, sample_mean=float(np.mean(x)), sample_std=std_raw,
                        sample_skewness=skew)


def lognormal_pdf(x, mu_J: float, sigma_J: float):
    x = np.asarray(x, dtype=float)
    return _st.lognorm.pdf(x, s=sigma_J, scale=math.exp(mu_J))


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Exact two-sided one-sample KS critical value."""
    return float(_st.kstwo.isf(alpha, n))


def transmon_frequency(mean_EJ: float, std_EJ: float, E_C: float) -> TransmonEstimate:
    """Transmon 0-1 frequency and its first-order spread, all in GHz.

    ``f01 = sqrt(8 E_C E_J) - E_C`` and ``df01 = sqrt(2 E_C / E_J) dE_J``.
    """
    if not E_C > 0:
        raise ValueError("E_C must be > 0")
    if mean_EJ <= E_C:
        raise ValueError(f"E_J = {mean_EJ:g} GHz must exceed E_C = {E_C:g} GHz for the transmon formula")
    f01 = math.sqrt(8 * E_C * mean_EJ) - E_C
    df01 = math.sqrt(2 * E_C / mean_EJ) * std_EJ
    return TransmonEstimate(E_C=E_C, f01_mean=f01, f01_std=df01)


def histogram(samples, n_bins: int = 50):
    """Density-normalised histogram over ``[min, max]``: ``(centers, densities, edges)``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample list")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    density, edges = np.histogram(x, bins=n_bins, density=True)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return centers, density, edges


def write_histogram_csv(samples, fit: LogNormalFit | None, n_bins: int, path, header_lines=()) -> None:
    """Histogram with the fitted log-normal density at each bin centre.

    Without a fit (or for a degenerate one) the density column is zero.
    """
    centers, density, edges = histogram(samples, n_bins)
    if fit is not None and fit.sigma_J > 0:
        pdf = lognormal_pdf(centers, fit.mu_J, fit.sigma_J)
    else:
        pdf = np.zeros_like(centers)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_left_ghz", "bin_right_ghz", "bin_center_ghz", "density_per_ghz",
                    "lognormal_fit_density_per_ghz"])
        for lo, hi, c, dval, pval in zip(edges[:-1], edges[1:], centers, density, pdf):
            w.writerow([repr(float(lo)), repr(float(hi)), repr(float(c)), repr(float(dval)),
                        repr(float(pval))])


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON form of a configuration mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def sample_report(samples, config: dict, reason: str) -> dict:
    """Report for ensembles too small to fit: raw moments only."""
    x = np.asarray(samples, dtype=float)
    return {"fit": None, "reason": reason, "n": int(x.size), "sample_mean_ghz": float(np.mean(x)),
            "sample_std_ghz": float(np.std(x)), "config_hash": config_hash(config)}


def fit_report(fit: LogNormalFit, config: dict, transmon: TransmonEstimate | None = None) -> dict:
    report = {
        "mu_J": fit.mu_J,
        "sigma_J": fit.sigma_J,
        "mean_ghz": fit.mean_EJ,
        "std_ghz": fit.std_EJ,
        "sample_mean_ghz": fit.sample_mean,
        "sample_std_ghz": fit.sample_std,
        "sample_skewness": fit.sample_skewness,
        "n": fit.n,
        "ks_statistic": fit.goodness,
        "ks_critical_1pct": ks_critical_value(fit.n),
        "config_hash": config_hash(config),
    }
    if transmon is not None:
        report["transmon"] = {"e_c_ghz": transmon.E_C, "f01_mean_ghz": transmon.f01_mean,
                              "f01_std_ghz": transmon.f01_std}
    return report
