"""Physical constants, unit conversions and validated parameter types.

Externally every quantity is expressed in eV, meV, nm or GHz. The helpers in
this module are the only place where those units are converted to SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in SI units (J s, C, kg)."""

    hbar: float = _sc.hbar
    h: float = _sc.h
    e: float = _sc.e
    m_e: float = _sc.m_e


CONSTANTS = PhysicalConstants()


class ValidationError(ValueError):
    """Raised when one or more parameter invariants are violated.

    ``violations`` holds one ``(field, message)`` pair per broken invariant.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{name}: {msg}" for name, msg in self.violations)
        super().__init__(f"{len(self.violations)} invalid parameter(s): {lines}")


# -- unit conversions --------------------------------------------------------

def ev_to_joule(x):
    return x * CONSTANTS.e


def joule_to_ev(x):
    return x / CONSTANTS.e


def mev_to_joule(x):
    return x * 1e-3 * CONSTANTS.e


def joule_to_mev(x):
    return x / (1e-3 * CONSTANTS.e)


def nm_to_m(x):
    return x * 1e-9


def m_to_nm(x):
    return x * 1e9


def per_m_to_per_nm(x):
    return x * 1e-9


def per_m2_to_per_nm2(x):
    return x * 1e-18


def per_nm2_to_per_m2(x):
    return x * 1e18


def hz_to_ghz(x):
    return x * 1e-9


def ghz_to_hz(x):
    return x * 1e9


# -- parameter types ---------------------------------------------------------

@dataclass(frozen=True)
class JunctionParams:
    """Deterministic junction description.

    ``barrier_height`` is measured above the Fermi energy, so the barrier top
    sits at ``fermi_energy + barrier_height`` above the lead band bottom.
    """

    fermi_energy: float = 11.7  # eV
    barrier_height: float = 1.1  # eV
    nominal_thickness: float = 1.0  # nm
    gap: float = 0.2  # meV
    width_x: float = 200.0  # nm
    width_y: float = 200.0  # nm

    @property
    def area(self) -> float:
        """Cross-section in nm^2."""
        return self.width_x * self.width_y

    def violations(self):
        out = []
        for name in ("fermi_energy", "barrier_height", "nominal_thickness",
                     "gap", "width_x", "width_y"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                out.append((name, f"must be finite and > 0, got {value!r}"))
        # gap is in meV, fermi_energy in eV
        if self.gap > 0 and self.fermi_energy > 0:
            if self.gap * 1e-3 >= 1e-2 * self.fermi_energy:
                out.append(("gap", f"must be < 1e-2 * fermi_energy "
                                   f"({1e-2 * self.fermi_energy * 1e3:g} meV), got {self.gap!r} meV"))
        return out


@dataclass(frozen=True)
class RoughnessParams:
    """RMS interface height ``sigma`` and correlation length ``xi``, both in nm."""

    sigma: float = 0.085
    xi: float = 10.0

    def violations(self, junction: JunctionParams | None = None):
        out = []
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            out.append(("sigma", f"must be >= 0, got {self.sigma!r}"))
        if not (math.isfinite(self.xi) and self.xi > 0):
            out.append(("xi", f"must be > 0, got {self.xi!r}"))
        if junction is not None and self.sigma >= junction.nominal_thickness / 2:
            out.append(("sigma", f"must be < nominal_thickness/2 "
                                 f"({junction.nominal_thickness / 2:g} nm), got {self.sigma!r}"))
        return out


@dataclass(frozen=True)
class GridSpec:
    """Pixel counts and pitch (nm) of the transverse discretisation."""

    nx: int
    ny: int
    dx: float
    dy: float

    @classmethod
    def for_junction(cls, junction: JunctionParams, nx: int = 512, ny: int | None = None):
        ny = nx if ny is None else ny
        return cls(nx=int(nx), ny=int(ny), dx=junction.width_x / nx, dy=junction.width_y / ny)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def length_x(self) -> float:
        return self.nx * self.dx

    @property
    def length_y(self) -> float:
        return self.ny * self.dy

    @property
    def pixel_area(self) -> float:
        return self.dx * self.dy

    def violations(self, junction: JunctionParams | None = None,
                   rough: RoughnessParams | None = None):
        out = []
        for name in ("nx", "ny"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                out.append((name, f"must be a positive integer, got {v!r}"))
        for name in ("dx", "dy"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                out.append((name, f"must be > 0, got {v!r}"))
        if out:
            return out
        if junction is not None:
            if not math.isclose(self.length_x, junction.width_x, rel_tol=1e-9):
                out.append(("dx", f"nx*dx = {self.length_x:g} nm must equal width_x = {junction.width_x:g} nm"))
            if not math.isclose(self.length_y, junction.width_y, rel_tol=1e-9):
                out.append(("dy", f"ny*dy = {self.length_y:g} nm must equal width_y = {junction.width_y:g} nm"))
        if rough is not None and rough.xi > 0:
            bound = rough.xi / 5
            if self.dx > bound * (1 + 1e-12):
                out.append(("dx", f"grid resolution: dx = {self.dx:g} nm exceeds xi/5 = {bound:g} nm"))
            if self.dy > bound * (1 + 1e-12):
                out.append(("dy", f"grid resolution: dy = {self.dy:g} nm exceeds xi/5 = {bound:g} nm"))
        return out


@dataclass(frozen=True)
class ValidatedConfig:
    junction: JunctionParams
    rough: RoughnessParams
    grid: GridSpec


def validate(params: JunctionParams, rough: RoughnessParams, grid: GridSpec) -> ValidatedConfig:
    """Check every invariant and report all violations at once."""
    violations = params.violations()
    violations += [(f"rough.{n}", m) for n, m in rough.violations(params)]
    violations += [(f"grid.{n}", m) for n, m in grid.violations(params, rough)]
    if violations:
        raise ValidationError(violations)
    return ValidatedConfig(params, rough, grid)
