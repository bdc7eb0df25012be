import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jjrough import domain
from jjrough.domain import CONSTANTS, GridSpec, JunctionParams, RoughnessParams, ValidationError, validate


def test_paper_defaults_validate(paper_junction, paper_rough, paper_grid):
    cfg = validate(paper_junction, paper_rough, paper_grid)
    assert cfg.junction is paper_junction
    assert cfg.grid.dx == pytest.approx(200 / 512)


def test_negative_sigma_is_named(paper_junction, paper_grid):
    with pytest.raises(ValidationError) as info:
        validate(paper_junction, RoughnessParams(sigma=-0.1, xi=10.0), paper_grid)
    assert any("sigma" in name for name, _ in info.value.violations)


def test_coarse_grid_reports_resolution(paper_junction):
    rough = RoughnessParams(0.085, 10.0)
    grid = GridSpec(nx=40, ny=40, dx=5.0, dy=5.0)  # dx = xi/2
    with pytest.raises(ValidationError) as info:
        validate(paper_junction, rough, grid)
    messages = " ".join(m for _, m in info.value.violations)
    assert "resolution" in messages


def test_all_violations_reported():
    bad = JunctionParams(fermi_energy=-1.0, barrier_height=0.0, nominal_thickness=1.0, gap=0.2,
                         width_x=200, width_y=200)
    with pytest.raises(ValidationError) as info:
        validate(bad, RoughnessParams(-0.1, -5.0), GridSpec(10, 10, 1.0, 1.0))
    names = [n for n, _ in info.value.violations]
    for expected in ("fermi_energy", "barrier_height", "rough.sigma", "rough.xi", "grid.dx", "grid.dy"):
        assert expected in names


def test_gap_must_be_small_against_fermi_energy():
    bad = JunctionParams(fermi_energy=0.01, gap=0.2)
    assert [n for n, _ in bad.violations()] == ["gap"]


def test_sigma_bounded_by_half_thickness(paper_junction):
    names = [n for n, _ in RoughnessParams(0.5, 10.0).violations(paper_junction)]
    assert names == ["sigma"]


def test_grid_must_cover_junction(paper_junction):
    names = [n for n, _ in GridSpec(512, 512, 0.3, 200 / 512).violations(paper_junction)]
    assert names == ["dx"]


def test_constants_are_codata():
    assert CONSTANTS.h == pytest.approx(2 * math.pi * CONSTANTS.hbar, rel=1e-15)
    assert CONSTANTS.e == 1.602176634e-19


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_unit_round_trips(x):
    assert domain.joule_to_ev(domain.ev_to_joule(x)) == pytest.approx(x, rel=1e-12)
    assert domain.joule_to_mev(domain.mev_to_joule(x)) == pytest.approx(x, rel=1e-12)
    assert domain.m_to_nm(domain.nm_to_m(x)) == pytest.approx(x, rel=1e-12)
    assert domain.per_nm2_to_per_m2(domain.per_m2_to_per_nm2(x)) == pytest.approx(x, rel=1e-12)
    assert domain.ghz_to_hz(domain.hz_to_ghz(x)) == pytest.approx(x, rel=1e-12)


def test_params_are_immutable(paper_junction):
    with pytest.raises(AttributeError):
        paper_junction.gap = 1.0
