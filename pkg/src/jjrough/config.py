"""Strict JSON run configuration."""

from __future__ import annotations

import json

from .domain import GridSpec, JunctionParams, RoughnessParams, ValidationError
from .ensemble import EnsembleConfig
from .randfield import DEFAULT_THICKNESS_FLOOR

# section -> {key: required}
SCHEMA = {
    "junction": {"fermi_energy_eV": True, "barrier_height_eV": True, "nominal_thickness_nm": True,
                 "gap_meV": True, "width_x_nm": True, "width_y_nm": True},
    "roughness": {"sigma_nm": True, "xi_nm": True, "standardize": False},
    "grid": {"nx": True, "ny": True},
    "ensemble": {"n_samples": True, "master_seed": True, "thickness_floor_nm": False},
    "analysis": {"e_c_ghz": False, "n_bins": False},
}
REQUIRED_SECTIONS = ("junction", "roughness", "grid", "ensemble")

PAPER_DEFAULTS = {
    "junction": {"fermi_energy_eV": 11.7, "barrier_height_eV": 1.1, "nominal_thickness_nm": 1.0,
                 "gap_meV": 0.2, "width_x_nm": 200.0, "width_y_nm": 200.0},
    "roughness": {"sigma_nm": 0.085, "xi_nm": 10.0},
    "grid": {"nx": 512, "ny": 512},
    "ensemble": {"n_samples": 5000, "master_seed": 20260101},
    "analysis": {"e_c_ghz": 0.25, "n_bins": 60},
}


def check_schema(doc) -> None:
    """Reject unknown sections/keys and missing required ones, all at once."""
    problems = []
    if not isinstance(doc, dict):
        raise ValidationError([("config", "top level must be a JSON object")])
    for section in doc:
        if section not in SCHEMA:
            problems.append((section, "unknown section"))
    for section, keys in SCHEMA.items():
        body = doc.get(section)
        if body is None:
            if section in REQUIRED_SECTIONS:
                problems.append((section, "missing section"))
            continue
        if not isinstance(body, dict):
            problems.append((section, "must be an object"))
            continue
        for key in body:
            if key not in keys:
                problems.append((f"{section}.{key}", "unknown key"))
        for key, required in keys.items():
            if required and key not in body:
                problems.append((f"{section}.{key}", "missing required key"))
    if problems:
        raise ValidationError(problems)


def _num(section, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError([(f"{section}.{key}", f"must be a number, got {value!r}")])
    if kind is int:
        if int(value) != value:
            raise ValidationError([(f"{section}.{key}", f"must be an integer, got {value!r}")])
        return int(value)
    return float(value)


def ensemble_config_from_dict(doc: dict) -> EnsembleConfig:
    check_schema(doc)
    j, r, g, e = doc["junction"], doc["roughness"], doc["grid"], doc["ensemble"]
    junction = JunctionParams(
        fermi_energy=_num("junction", "fermi_energy_eV", j["fermi_energy_eV"]),
        barrier_height=_num("junction", "barrier_height_eV", j["barrier_height_eV"]),
        nominal_thickness=_num("junction", "nominal_thickness_nm", j["nominal_thickness_nm"]),
        gap=_num("junction", "gap_meV", j["gap_meV"]),
        width_x=_num("junction", "width_x_nm", j["width_x_nm"]),
        width_y=_num("junction", "width_y_nm", j["width_y_nm"]),
    )
    rough = RoughnessParams(sigma=_num("roughness", "sigma_nm", r["sigma_nm"]),
                            xi=_num("roughness", "xi_nm", r["xi_nm"]))
    standardize = r.get("standardize", True)
    if not isinstance(standardize, bool):
        raise ValidationError([("roughness.standardize", "must be true or false")])
    nx, ny = _num("grid", "nx", g["nx"], int), _num("grid", "ny", g["ny"], int)
    if nx < 1 or ny < 1:
        raise ValidationError([("grid", "nx and ny must be >= 1")])
    grid = GridSpec.for_junction(junction, nx, ny)
    seed = _num("ensemble", "master_seed", e["master_seed"], int)
    if not 0 <= seed < 2 ** 64:
        raise ValidationError([("ensemble.master_seed", "must be an unsigned 64-bit integer")])
    n_samples = _num("ensemble", "n_samples", e["n_samples"], int)
    if n_samples < 1:
        raise ValidationError([("ensemble.n_samples", "must be >= 1")])
    cfg = EnsembleConfig(junction=junction, rough=rough, grid=grid, n_samples=n_samples,
                         master_seed=seed,
                         thickness_floor=_num("ensemble", "thickness_floor_nm",
                                              e.get("thickness_floor_nm", DEFAULT_THICKNESS_FLOOR)),
                         standardize_fields=standardize)
    try:
        cfg.validate()
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError([("ensemble", str(exc))]) from exc
    return cfg


def analysis_from_dict(doc: dict) -> dict:
    a = doc.get("analysis") or {}
    out = {"e_c_ghz": None, "n_bins": 50}
    if "e_c_ghz" in a and a["e_c_ghz"] is not None:
        out["e_c_ghz"] = _num("analysis", "e_c_ghz", a["e_c_ghz"])
        if not out["e_c_ghz"] > 0:
            raise ValidationError([("analysis.e_c_ghz", "must be > 0")])
    if "n_bins" in a:
        out["n_bins"] = _num("analysis", "n_bins", a["n_bins"], int)
        if out["n_bins"] < 2:
            raise ValidationError([("analysis.n_bins", "must be >= 2")])
    return out


def load_config(path) -> dict:
    """Read a strict JSON document (duplicate keys rejected)."""
    def no_dupes(pairs):
        keys = [k for k, _ in pairs]
        dupes = {k for k in keys if keys.count(k) > 1}
        if dupes:
            raise ValidationError([(k, "duplicate key") for k in sorted(dupes)])
        return dict(pairs)

    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh, object_pairs_hook=no_dupes)
        except json.JSONDecodeError as exc:
            raise ValidationError([("config", f"invalid JSON: {exc}")]) from exc
