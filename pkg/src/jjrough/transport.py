"""Tunnelling transport and Josephson energy of (rough) barriers.

Each transverse pixel is treated as an independent rectangular barrier of
its local thickness. Conductances add in parallel and the critical current
follows from the normal conductance through the Ambegaokar-Baratoff relation.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .domain import (CONSTANTS, JunctionParams, RoughnessParams, ev_to_joule, hz_to_ghz,
                     mev_to_joule, per_m2_to_per_nm2, per_m_to_per_nm)
from .randfield import DEFAULT_THICKNESS_FLOOR, ThicknessMap

QUAD_RTOL = 1e-8
TABLE_RTOL = 1e-5


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class TableRangeError(ValueError):
    """A thickness outside the range covered by a ConductanceTable."""


class OpaqueBarrierWarning(RuntimeWarning):
    """The transmission underflowed and the conductance is reported as 0."""


@dataclass(frozen=True)
class LengthScales:
    k_F: float  # nm^-1
    kappa: float  # nm^-1
    lambda_F: float  # nm
    lambda_D: float  # nm


def _wavevector(energy_ev):
    """``sqrt(2 m E)/hbar`` in nm^-1 for an energy in eV."""
    c = CONSTANTS
    return per_m_to_per_nm(np.sqrt(2 * c.m_e * ev_to_joule(energy_ev)) / c.hbar)


def length_scales(params: JunctionParams) -> LengthScales:
    k_f = float(_wavevector(params.fermi_energy))
    kappa = float(_wavevector(params.barrier_height))
    return LengthScales(k_F=k_f, kappa=kappa, lambda_F=2 * math.pi / k_f, lambda_D=1 / kappa)


def barrier_transmission(e_z, d, params: JunctionParams):
    """Rectangular-barrier transmission at longitudinal energy ``e_z`` (eV).

    Evaluated as ``e^{-2x} / (e^{-2x} + A (1 - e^{-2x})^2 / 4)`` with
    ``x = kappa d`` and ``A = (k^2 + kappa^2)^2 / (4 k^2 kappa^2)``, which equals
    ``1 / (1 + A sinh^2(x))`` without overflowing for thick barriers.
    Works elementwise on arrays.
    """
    e_z = np.asarray(e_z, dtype=float)
    d = np.asarray(d, dtype=float)
    top = params.fermi_energy + params.barrier_height
    if np.any(e_z <= 0) or np.any(e_z > top):
        raise ValueError(f"longitudinal energy must lie in (0, {top:g}] eV")
    if np.any(d < 0):
        raise ValueError("barrier thickness must be >= 0")
    k = _wavevector(e_z)
    kappa = _wavevector(top - e_z)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = kappa * d
        q = np.exp(-2 * x)
        a = (k * k + kappa * kappa) ** 2 / (4 * k * k * kappa * kappa)
        t = q / (q + a * (-np.expm1(-2 * x)) ** 2 / 4)
        # barrier top: sinh(kappa d)/kappa -> d
        t_top = 1 / (1 + (k * d) ** 2 / 4)
    t = np.where(kappa == 0, t_top, t)
    t = np.where(d == 0, 1.0, t)
    return t if t.ndim else float(t)


def _density_prefactor() -> float:
    """``(2e^2/h) (m / 2 pi hbar^2)`` times 1 eV, in S/nm^2 per eV."""
    c = CONSTANTS
    per_m2 = 2 * c.e ** 2 / c.h * c.m_e / (2 * math.pi * c.hbar ** 2) * ev_to_joule(1.0)
    return per_m2_to_per_nm2(per_m2)


def _channel_density() -> float:
    """Transverse channels per nm^2 per eV of longitudinal energy (spin excluded)."""
    c = CONSTANTS
    return per_m2_to_per_nm2(c.m_e / (2 * math.pi * c.hbar ** 2) * ev_to_joule(1.0))


def _integrate(func, params: JunctionParams, d: float, what: str) -> float:
    """Adaptive integral of ``func(E_z)`` over ``(0, E_F]`` to QUAD_RTOL."""
    ef = params.fermi_energy
    # the integrand lives within a few decay widths below E_F
    kappa = float(_wavevector(params.barrier_height))
    hb2m = 1 / float(_wavevector(1.0)) ** 2  # hbar^2/2m in eV nm^2
    width = 2 * hb2m * kappa / max(d, 1e-3)
    points = [p for p in (ef - 3 * width, ef - 12 * width) if 0 < p < ef]
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(func, 0.0, ef, epsabs=0.0, epsrel=QUAD_RTOL, limit=400,
                            points=points or None)
        except IntegrationWarning as exc:
            raise QuadratureError(f"{what} at d={d:g} nm did not converge: {exc}") from exc
    return val


def conductance_density(d: float, params: JunctionParams) -> float:
    """Normal conductance per unit area (S/nm^2) of a uniform barrier.

    ``g(d) = (2e^2/h) (m / 2 pi hbar^2) * int_0^{E_F} T(E_z; d) dE_z``
    """
    if d < 0:
        raise ValueError("barrier thickness must be >= 0")
    if d == 0:
        return _density_prefactor() * params.fermi_energy
    integral = _integrate(lambda e: barrier_transmission(e, d, params), params, d, "conductance")
    g = _density_prefactor() * integral
    if g == 0.0:
        warnings.warn(f"transmission underflows at d={d:g} nm; conductance treated as 0",
                      OpaqueBarrierWarning, stacklevel=2)
    return g


@dataclass(frozen=True, eq=False)
class ConductanceTable:
    """``g(d)`` tabulated on a uniform thickness grid, monotone cubic in ``(d, ln g)``."""

    thickness_grid: np.ndarray
    g_values: np.ndarray
    params: JunctionParams
    interpolant: PchipInterpolator

    @property
    def d_min(self) -> float:
        return float(self.thickness_grid[0])

    @property
    def d_max(self) -> float:
        return float(self.thickness_grid[-1])

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        nodes = self.thickness_grid
        lo, hi = nodes[0], nodes[-1]
        if d.size and (d.min() < lo or d.max() > hi):
            raise TableRangeError(f"thickness outside table range [{lo:g}, {hi:g}] nm "
                                  f"(got [{d.min():g}, {d.max():g}])")
        # uniform grid: locate the interval arithmetically, then Horner on the
        # piecewise-cubic coefficients of ln g
        step = (hi - lo) / (nodes.size - 1)
        i = np.minimum(((d - lo) / step).astype(np.intp), nodes.size - 2)
        t = d - nodes[i]
        c = self.interpolant.c
        g = np.exp(((c[0, i] * t + c[1, i]) * t + c[2, i]) * t + c[3, i])
        # exact nodes return the quadrature value itself
        g = np.where(t == 0, self.g_values[i], g)
        g = np.where(d == nodes[i + 1], self.g_values[i + 1], g)
        return g if g.ndim else float(g)


def table_range(params: JunctionParams, rough: RoughnessParams,
                floor: float = DEFAULT_THICKNESS_FLOOR) -> tuple[float, float]:
    half = max(8 * math.sqrt(2) * rough.sigma, 0.05)
    return max(params.nominal_thickness - half, floor), params.nominal_thickness + half


def build_conductance_table(params: JunctionParams, rough: RoughnessParams,
                            floor: float = DEFAULT_THICKNESS_FLOOR,
                            step: float = 0.02) -> ConductanceTable:
    """Tabulate ``g(d)`` and refine until every interval midpoint agrees with
    direct quadrature to TABLE_RTOL."""
    lo, hi = table_range(params, rough, floor)
    cache = {}

    def g_at(x):
        if x not in cache:
            cache[x] = conductance_density(x, params)
        return cache[x]

    while True:
        n = max(int(math.ceil((hi - lo) / step)), 3) + 1
        nodes = np.linspace(lo, hi, n)
        g = np.array([g_at(float(x)) for x in nodes])
        if np.any(g <= 0) or np.any(np.diff(g) >= 0):
            raise QuadratureError("conductance is not positive and strictly decreasing on the table grid")
        interp = PchipInterpolator(nodes, np.log(g))
        mids = 0.5 * (nodes[1:] + nodes[:-1])
        direct = np.array([g_at(float(x)) for x in mids])
        err = np.max(np.abs(np.exp(interp(mids)) / direct - 1))
        if err <= TABLE_RTOL:
            return ConductanceTable(nodes, g, params, interp)
        step /= 2


def ej_from_conductance(conductance: float, params: JunctionParams) -> float:
    """``E_J/h`` in GHz for a normal conductance in S.

    ``I_c = pi Delta / (2 e R_N)`` and ``E_J = hbar I_c / (2e)`` combine to
    ``E_J/h = Delta G / (8 e^2)``.
    """
    c = CONSTANTS
    if conductance == 0:
        return 0.0
    r_n = 1 / conductance
    i_c = math.pi * mev_to_joule(params.gap) / (2 * c.e * r_n)
    e_j = c.hbar / (2 * c.e) * i_c
    return hz_to_ghz(e_j / c.h)


def ej_uniform(d: float, params: JunctionParams) -> float:
    return ej_from_conductance(conductance_density(d, params) * params.area, params)


def total_conductance(tmap: ThicknessMap, table: ConductanceTable) -> float:
    """Parallel sum ``sum g(d_pixel) dx dy`` in S."""
    return float(np.sum(table(tmap.values))) * tmap.grid.pixel_area


def ej_rough(tmap: ThicknessMap, table: ConductanceTable, params: JunctionParams) -> float:
    return ej_from_conductance(total_conductance(tmap, table), params)


# -- short-junction supercurrent --------------------------------------------

def channel_current(phi, tau):
    """Dimensionless current ``tau sin(phi) / sqrt(1 - tau sin^2(phi/2))`` of one
    channel, in units of ``e Delta / (2 hbar)``."""
    return tau * np.sin(phi) / np.sqrt(1 - tau * np.sin(phi / 2) ** 2)


def _maximize_over_phase(current) -> tuple[float, float]:
    """Return ``(phi*, I(phi*))`` maximising ``current`` on ``(0, pi)``."""
    res = minimize_scalar(lambda p: -current(p), bounds=(0.0, math.pi), method="bounded",
                          options={"xatol": 1e-10, "maxiter": 500})
    phi = float(res.x)
    return phi, current(phi)


def critical_current_channels(taus, gap: float) -> float:
    """Critical current (A) of a set of channels with transmissions ``taus``;
    ``gap`` in meV."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    _, i_max = _maximize_over_phase(lambda p: float(np.sum(channel_current(p, taus))))
    return CONSTANTS.e * mev_to_joule(gap) / (2 * CONSTANTS.hbar) * i_max


def _uniform_phase_current(phi: float, d: float, params: JunctionParams) -> float:
    """Channel-summed dimensionless current per nm^2 of a uniform barrier."""
    if d == 0:
        return _channel_density() * params.fermi_energy * float(channel_current(phi, 1.0))
    integral = _integrate(lambda e: channel_current(phi, barrier_transmission(e, d, params)),
                          params, d, "supercurrent")
    return _channel_density() * integral


def ej_short_junction(map_or_d, params: JunctionParams) -> float:
    """``E_J/h`` (GHz) from the zero-temperature short-junction current-phase
    relation, maximised over the phase.

    Accepts a uniform thickness in nm or a ThicknessMap. For maps the
    channel integral is evaluated per distinct pixel thickness, so this is
    meant for small validation maps.
    """
    if isinstance(map_or_d, ThicknessMap):
        values, counts = np.unique(map_or_d.values, return_counts=True)
        area = map_or_d.grid.pixel_area

        def current(phi):
            return area * sum(c * _uniform_phase_current(phi, float(v), params)
                              for v, c in zip(values, counts))
    else:
        d = float(map_or_d)
        if d < 0:
            raise ValueError("barrier thickness must be >= 0")

        def current(phi):
            return params.area * _uniform_phase_current(phi, d, params)

    _, i_max = _maximize_over_phase(current)
    c = CONSTANTS
    i_c = c.e * mev_to_joule(params.gap) / (2 * c.hbar) * i_max
    return hz_to_ghz(c.hbar / (2 * c.e) * i_c / c.h)


def ab_sweep(params: JunctionParams, d_min: float, d_max: float, n_points: int):
    """Rows ``(d, E_J^AB/h, E_J^short/h)`` in (nm, GHz, GHz) for uniform barriers."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if not 0 < d_min <= d_max:
        raise ValueError("need 0 < d_min <= d_max")
    ds = np.linspace(d_min, d_max, n_points) if n_points > 1 else np.array([d_min])
    return [(float(d), ej_uniform(float(d), params), ej_short_junction(float(d), params)) for d in ds]


def write_ab_sweep_csv(rows, path, header_lines=()) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d_nm", "ej_ab_ghz", "ej_short_junction_ghz", "ratio"])
        for d, ab, sj in rows:
            writer.writerow([repr(d), repr(ab), repr(sj), repr(sj / ab)])


__all__ = [
    "ConductanceTable", "LengthScales", "OpaqueBarrierWarning", "QuadratureError",
    "TableRangeError", "ab_sweep", "barrier_transmission", "build_conductance_table",
    "channel_current", "conductance_density", "critical_current_channels", "ej_from_conductance",
    "ej_rough", "ej_short_junction", "ej_uniform", "length_scales", "table_range",
    "total_conductance", "write_ab_sweep_csv",
]
