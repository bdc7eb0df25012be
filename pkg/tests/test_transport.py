import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import constants as sc

from jjrough.domain import GridSpec, JunctionParams, RoughnessParams
from jjrough.randfield import ThicknessMap, synthesize_field, thickness_map
from jjrough.transport import (OpaqueBarrierWarning, TableRangeError, barrier_transmission,
                               build_conductance_table, channel_current, conductance_density,
                               critical_current_channels, ej_from_conductance, ej_rough,
                               ej_short_junction, ej_uniform, length_scales, total_conductance)
from oracles import brute_force_16x16, oracle_conductance_density, oracle_transmission

PAPER = JunctionParams()


# -- length scales -----------------------------------------------------------

def test_fermi_wavelength_of_al():
    assert length_scales(JunctionParams(fermi_energy=11.6)).lambda_F == pytest.approx(0.36, abs=0.005)


def test_decay_length():
    assert length_scales(PAPER).lambda_D == pytest.approx(0.19, abs=0.005)


def test_decay_length_scales_with_root_u():
    a = length_scales(PAPER)
    b = length_scales(JunctionParams(barrier_height=4 * PAPER.barrier_height))
    assert b.lambda_D == pytest.approx(a.lambda_D / 2, rel=1e-14)
    assert a.lambda_F == pytest.approx(2 * math.pi / a.k_F, rel=1e-15)


# -- transmission ------------------------------------------------------------

@given(st.floats(min_value=1e-3, max_value=11.7))
def test_no_barrier_is_transparent(e_z):
    assert barrier_transmission(e_z, 0.0, PAPER) == 1.0


def test_asymptotic_form_at_fermi_energy():
    ls = length_scales(PAPER)
    k, kap, d = ls.k_F, ls.kappa, 1.0
    asym = 16 * k ** 2 * kap ** 2 / (k ** 2 + kap ** 2) ** 2 * math.exp(-2 * kap * d)
    assert kap * d == pytest.approx(5.4, abs=0.05)
    assert barrier_transmission(PAPER.fermi_energy, d, PAPER) == pytest.approx(asym, rel=0.01)


def test_matches_textbook_formula():
    e = np.linspace(0.1, 11.7, 50)
    for d in (0.3, 1.0, 2.0):
        np.testing.assert_allclose(barrier_transmission(e, d, PAPER),
                                   oracle_transmission(e, d, 11.7, 1.1), rtol=1e-12)


@settings(max_examples=200)
@given(st.floats(min_value=1e-3, max_value=12.79), st.floats(min_value=0, max_value=5),
       st.floats(min_value=1e-4, max_value=1))
def test_transmission_in_unit_interval_and_decreasing(e_z, d, delta):
    t1 = barrier_transmission(e_z, d, PAPER)
    t2 = barrier_transmission(e_z, d + delta, PAPER)
    assert 0 <= t2 <= t1 <= 1
    if t1 > 1e-300:
        assert t2 < t1


def test_transmission_domain_errors():
    with pytest.raises(ValueError):
        barrier_transmission(0.0, 1.0, PAPER)
    with pytest.raises(ValueError):
        barrier_transmission(13.0, 1.0, PAPER)
    with pytest.raises(ValueError):
        barrier_transmission(5.0, -0.1, PAPER)


def test_thick_barrier_does_not_overflow():
    assert barrier_transmission(11.7, 500.0, PAPER) == 0.0


# -- conductance density -----------------------------------------------------

def test_opaque_barrier():
    with pytest.warns(OpaqueBarrierWarning):
        g = conductance_density(1.0, JunctionParams(barrier_height=1e6))
    assert g < 1e-300


def test_conductance_matches_gauss_oracle_at_paper_point():
    assert conductance_density(1.0, PAPER) == pytest.approx(
        oracle_conductance_density(1.0, 11.7, 1.1), rel=1e-6)


def test_conductance_matches_gauss_oracle_random_triples():
    rng = np.random.default_rng(11)
    for _ in range(50):
        d, u, ef = rng.uniform(0.5, 2.0), rng.uniform(0.5, 3.0), rng.uniform(3.0, 12.0)
        got = conductance_density(d, JunctionParams(fermi_energy=ef, barrier_height=u))
        assert got == pytest.approx(oracle_conductance_density(d, ef, u), rel=1e-6), (d, u, ef)


def test_conductance_log_slope_asymptote():
    """d ln g / dd = -2 kappa - 1/d + O(1/(kappa d^2)): the energy integral over
    the tunnelling window of width ~ hbar^2 kappa / (m d) adds the 1/d term."""
    kap = length_scales(PAPER).kappa
    slope = (math.log(conductance_density(1.1, PAPER)) - math.log(conductance_density(1.0, PAPER))) / 0.1
    assert slope == pytest.approx(-2 * kap - 1 / 1.05, rel=0.03)


@pytest.mark.xfail(strict=True, reason="the energy integral adds about -1/d to the log-slope, "
                                       "so it sits ~11% beyond -2*kappa at d = 1 nm")
def test_conductance_log_slope_within_5pct_of_two_kappa():
    kap = length_scales(PAPER).kappa
    slope = (math.log(conductance_density(1.1, PAPER)) - math.log(conductance_density(1.0, PAPER))) / 0.1
    assert slope == pytest.approx(-2 * kap, rel=0.05)


# -- conductance table -------------------------------------------------------

@pytest.fixture(scope="module")
def table():
    return build_conductance_table(PAPER, RoughnessParams(0.085, 10.0))


def test_table_covers_eight_combined_sigmas(table):
    half = 8 * math.sqrt(2) * 0.085
    assert table.d_min == pytest.approx(max(1.0 - half, 0.2))
    assert table.d_max == pytest.approx(1.0 + half)


def test_table_range_clamped_at_floor():
    t = build_conductance_table(JunctionParams(nominal_thickness=0.6), RoughnessParams(0.1, 10.0), floor=0.2)
    assert t.d_min == 0.2


def test_table_nodes_are_exact(table):
    for i in (0, 7, len(table.thickness_grid) // 2, len(table.thickness_grid) - 1):
        d = float(table.thickness_grid[i])
        assert table(d) == conductance_density(d, PAPER)


def test_table_midpoints(table):
    rng = np.random.default_rng(5)
    nodes = table.thickness_grid
    for i in rng.choice(len(nodes) - 1, size=100, replace=len(nodes) <= 101):
        mid = 0.5 * (nodes[i] + nodes[i + 1])
        assert table(mid) == pytest.approx(conductance_density(mid, PAPER), rel=1e-4)


def test_table_off_grid_points(table):
    rng = np.random.default_rng(6)
    for d in rng.uniform(table.d_min, table.d_max, 30):
        assert table(d) == pytest.approx(conductance_density(d, PAPER), rel=1e-4)


def test_table_refuses_extrapolation(table):
    with pytest.raises(TableRangeError):
        table(table.d_max + 1e-6)
    with pytest.raises(TableRangeError):
        table(np.array([1.0, table.d_min - 0.01]))


def test_table_positive_decreasing_log_convex(table):
    g = table.g_values
    assert np.all(g > 0)
    assert np.all(np.diff(g) < 0)
    assert np.all(np.diff(np.log(g), 2) > 0)


# -- Josephson energy --------------------------------------------------------

def test_open_circuit():
    assert ej_from_conductance(0.0, PAPER) == 0.0


def test_ej_linear_in_conductance():
    assert ej_from_conductance(2e-3, PAPER) == pytest.approx(2 * ej_from_conductance(1e-3, PAPER), rel=1e-15)


def test_one_kilo_ohm_junction():
    # I_c = pi * 0.2 mV / (2 * 1 kOhm); E_J/h = hbar I_c / (2 e h) = I_c / (4 pi e)
    i_c = math.pi * 0.2e-3 / (2 * 1e3)
    assert i_c == pytest.approx(0.3142e-6, rel=1e-3)
    expected = i_c / (4 * math.pi * sc.e) / 1e9
    assert expected == pytest.approx(156.04, abs=0.01)
    assert ej_from_conductance(1e-3, PAPER) == pytest.approx(expected, rel=1e-12)


def test_ej_uniform_monotone():
    assert ej_uniform(1.0, PAPER) > ej_uniform(1.2, PAPER)


def _ej_log_slope(d_lo, d_hi, n=13):
    ds = np.linspace(d_lo, d_hi, n)
    return np.polyfit(ds, np.log([ej_uniform(d, PAPER) for d in ds]), 1)[0]


def test_ej_uniform_slope_approaches_two_kappa():
    """Local log-slope tends to -2 kappa - 1/d with an O(1/d^2) remainder."""
    kap = length_scales(PAPER).kappa
    h = 0.01
    errors = []
    for d in (1.0, 2.0, 4.0, 8.0):
        slope = (math.log(ej_uniform(d + h, PAPER)) - math.log(ej_uniform(d - h, PAPER))) / (2 * h)
        errors.append(abs(slope / (-2 * kap - 1 / d) - 1))
    assert errors[0] < 0.03
    assert all(b < a / 3 for a, b in zip(errors, errors[1:]))


@pytest.mark.xfail(strict=True, reason="fitted slope is about -11.9/nm, ~11% beyond -2*kappa")
def test_ej_uniform_slope_within_5pct_of_two_kappa():
    assert _ej_log_slope(0.8, 1.4) == pytest.approx(-2 * length_scales(PAPER).kappa, rel=0.05)


def test_rough_uniform_map_matches_uniform(table):
    grid = GridSpec.for_junction(PAPER, 64)
    tmap = ThicknessMap(grid, np.full(grid.shape, 1.0), floor=0.2)
    assert ej_rough(tmap, table, PAPER) == pytest.approx(ej_uniform(1.0, PAPER), rel=1e-4)
    tmap = ThicknessMap(grid, np.full(grid.shape, 1.13), floor=0.2)
    assert ej_rough(tmap, table, PAPER) == pytest.approx(ej_uniform(1.13, PAPER), rel=1e-4)


def test_rough_half_and_half(table):
    grid = GridSpec.for_junction(PAPER, 64)
    values = np.full(grid.shape, 0.9)
    values[32:, :] = 1.2
    tmap = ThicknessMap(grid, values, floor=0.2)
    expected = 0.5 * (ej_uniform(0.9, PAPER) + ej_uniform(1.2, PAPER))
    assert ej_rough(tmap, table, PAPER) == pytest.approx(expected, rel=1e-4)


def test_parallel_composition(table):
    grid = GridSpec.for_junction(PAPER, 128)
    rough = RoughnessParams(0.085, 10.0)
    tmap = thickness_map(1.0, synthesize_field(grid, rough, 1), synthesize_field(grid, rough, 2))
    half = GridSpec(64, 128, grid.dx, grid.dy)
    left = ThicknessMap(half, tmap.values[:64], 0.2)
    right = ThicknessMap(half, tmap.values[64:], 0.2)
    total = total_conductance(tmap, table)
    assert total == pytest.approx(total_conductance(left, table) + total_conductance(right, table),
                                  rel=1e-13)


def test_rough_matches_brute_force():
    junction, rough, tmap, expected = brute_force_16x16()
    table = build_conductance_table(junction, rough)
    assert ej_rough(tmap, table, junction) == pytest.approx(expected, rel=1e-4)


# -- short-junction supercurrent --------------------------------------------

def test_single_open_channel():
    # dense phase scan oracle for tau = 1: maximum approaches 2 at phi = pi
    phi = np.linspace(0, math.pi, 200001)[1:-1]
    scan_max = np.max(channel_current(phi, 1.0))
    assert scan_max == pytest.approx(2.0, abs=1e-9)
    i_c = critical_current_channels([1.0], gap=0.2)
    assert i_c == pytest.approx(sc.e * 0.2e-3 * sc.e / sc.hbar, rel=1e-8)


def test_tunnel_channels_reduce_to_ab():
    taus = np.full(1000, 1e-6)
    i_c = critical_current_channels(taus, gap=0.2)
    g = 2 * sc.e ** 2 / sc.h * taus.sum()
    assert i_c == pytest.approx(math.pi * 0.2e-3 / 2 * g, rel=1e-6)


def test_thick_barrier_short_junction_equals_ab():
    assert ej_short_junction(1.5, PAPER) / ej_uniform(1.5, PAPER) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("d", [0.6, 0.8, 1.0, 1.2, 1.5])
def test_short_junction_ab_bound(d):
    ratio = ej_short_junction(d, PAPER) / ej_uniform(d, PAPER)
    assert 1.0 <= ratio <= 1.02


def test_short_junction_on_map():
    grid = GridSpec(4, 4, 50.0, 50.0)
    values = np.full(grid.shape, 1.0)
    values[:2] = 1.1
    tmap = ThicknessMap(grid, values, 0.2)
    expected = 0.5 * (ej_short_junction(1.0, PAPER) + ej_short_junction(1.1, PAPER))
    assert ej_short_junction(tmap, PAPER) == pytest.approx(expected, rel=1e-7)
