from fractions import Fraction

import numpy as np
import pytest

from fraclab.grid import Field, make_grid, mask_from_predicate
from fraclab.fracops import make_kernel
from fraclab.forms import conductivity_form
from fraclab.dnmap import assemble_dn, window_equal
from fraclab.liouville import (
    dn_comparison_gap,
    liouville_identity_gap,
    make_conductivity,
    nonuniqueness_pair,
    reconstruct_conductivity,
    schrodinger_form,
    transform,
)
from fraclab.solver import ExteriorProblem, solve_exterior


def smooth_bump(x, center, radius, height):
    t = (x - center) / radius
    return np.where(np.abs(t) < 1.0,
                    height * np.exp(1.0 - 1.0 / np.maximum(1.0 - t**2, 1e-300)), 0.0)


@pytest.fixture(scope="module")
def setup():
    g = make_grid(1, 10.0, 128)
    kernel = make_kernel(g, 0.5, "kernel")
    mask = mask_from_predicate(
        g, lambda x: -1.0 < x < 1.0,
        windows={"W1": lambda x: 1.5 < x < 2.5, "W2": lambda x: -2.5 < x < -1.5,
                 "V1": lambda x: 1.5 < x < 2.7, "V2": lambda x: 2.2 < x < 3.2})
    return g, kernel, mask


def test_identity_is_exact_rational_algebra():
    """Independent oracle: the energy identity is pure algebra for any
    symmetric weights, checked in exact rational arithmetic on 4 points."""
    n = 4
    w = [[Fraction(0)] * n for _ in range(n)]
    entries = [(0, 1, Fraction(3, 2)), (0, 2, Fraction(1, 3)), (0, 3, Fraction(2, 5)),
               (1, 2, Fraction(7, 4)), (1, 3, Fraction(1, 6)), (2, 3, Fraction(5, 8))]
    for i, j, val in entries:
        w[i][j] = w[j][i] = val
    a = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 4)]  # sqrt(gamma)
    u = [Fraction(1, 2), Fraction(-1, 3), Fraction(2), Fraction(0)]
    phi = [Fraction(1), Fraction(1, 5), Fraction(-1, 2), Fraction(3)]
    h = Fraction(1, 7)

    m = [ai - 1 for ai in a]
    km = [sum(w[x][y] * (m[x] - m[y]) for y in range(n)) for x in range(n)]
    q = [-km[x] / a[x] for x in range(n)]
    v = [a[x] * u[x] for x in range(n)]
    psi = [a[x] * phi[x] for x in range(n)]

    lhs = h / 2 * sum(w[x][y] * a[x] * a[y] * (u[x] - u[y]) * (phi[x] - phi[y])
                      for x in range(n) for y in range(n))
    rhs_energy = h / 2 * sum(w[x][y] * (v[x] - v[y]) * (psi[x] - psi[y])
                             for x in range(n) for y in range(n))
    rhs_potential = h * sum(q[x] * v[x] * psi[x] for x in range(n))
    assert lhs == rhs_energy + rhs_potential


def test_make_conductivity_flat_cases(setup):
    g, kernel, _ = setup
    c1 = make_conductivity(Field.constant(g, 1.0), kernel)
    assert np.abs(c1.m.values).max() <= 1e-12
    assert np.abs(c1.q.values).max() <= 1e-12
    c4 = make_conductivity(Field.constant(g, 4.0), kernel)
    assert np.abs(c4.m.values - 1.0).max() <= 1e-12
    assert np.abs(c4.q.values).max() <= 1e-12


def test_make_conductivity_rejects_nonpositive(setup):
    g, kernel, _ = setup
    bad = np.ones(g.size)
    bad[0] = -0.1
    with pytest.raises(ValueError):
        make_conductivity(Field(g, bad), kernel)


def test_potential_spreads_nonlocally(setup):
    g, kernel, _ = setup
    x = g.axis_coords()
    gamma = Field(g, 1.0 + smooth_bump(x, 0.0, 0.5, 0.5))
    cond = make_conductivity(gamma, kernel)
    outside = np.abs(x) > 1.0
    assert np.abs(cond.q.values[outside]).max() > 0.0  # nonlocal spread of K m


def test_identity_gap_random_conductivities(setup):
    g, kernel, _ = setup
    rng = np.random.default_rng(0)
    for _ in range(30):
        gamma = Field(g, rng.uniform(0.5, 4.0, g.size))
        cond = make_conductivity(gamma, kernel)
        u = Field(g, rng.uniform(-1, 1, g.size))
        phi = Field(g, rng.uniform(-1, 1, g.size))
        assert liouville_identity_gap(cond, kernel, u, phi) <= 1e-11


def test_identity_gap_2d():
    g = make_grid(2, 6.0, 16)
    kernel = make_kernel(g, 0.4, "kernel")
    rng = np.random.default_rng(1)
    gamma = Field(g, rng.uniform(0.5, 4.0, g.size))
    cond = make_conductivity(gamma, kernel)
    u = Field(g, rng.uniform(-1, 1, g.size))
    phi = Field(g, rng.uniform(-1, 1, g.size))
    assert liouville_identity_gap(cond, kernel, u, phi) <= 1e-11


def test_identity_constant_gamma_reduces_to_energy(setup):
    g, kernel, _ = setup
    from fraclab.fracops import frac_gradient_pairing
    c = 2.5
    cond = make_conductivity(Field.constant(g, c), kernel)
    rng = np.random.default_rng(2)
    u = Field(g, rng.uniform(-1, 1, g.size))
    phi = Field(g, rng.uniform(-1, 1, g.size))
    b = conductivity_form(kernel, cond.gamma)
    assert b.apply(u, phi) == pytest.approx(c * frac_gradient_pairing(kernel, u, phi), rel=1e-12)
    one = Field.constant(g, 1.0)
    assert liouville_identity_gap(cond, kernel, one, one) <= 1e-12


def test_transform_round_trip(setup):
    g, kernel, _ = setup
    rng = np.random.default_rng(3)
    gamma = Field(g, rng.uniform(0.5, 4.0, g.size))
    cond = make_conductivity(gamma, kernel)
    u = Field(g, rng.uniform(-1, 1, g.size))
    back = transform(cond, transform(cond, u, "to_schrodinger"), "to_conductivity")
    assert np.abs(back.values - u.values).max() <= 1e-15 * np.abs(u.values).max()
    flat = make_conductivity(Field.constant(g, 1.0), kernel)
    same = transform(flat, u, "to_schrodinger")
    assert np.array_equal(same.values, u.values)
    with pytest.raises(ValueError):
        transform(cond, u, "sideways")


def test_solution_correspondence(setup):
    g, kernel, mask = setup
    x = g.axis_coords()
    interior_flags = np.isin(np.arange(g.size), mask.interior)
    gamma = Field(g, 1.0 + smooth_bump(x, 0.0, 0.7, 0.5) * interior_flags)
    cond = make_conductivity(gamma, kernel)
    rng = np.random.default_rng(4)
    f_vals = np.zeros(g.size)
    f_vals[mask.exterior] = rng.uniform(-1, 1, mask.exterior.size)
    f = Field(g, f_vals)
    u = solve_exterior(ExteriorProblem(conductivity_form(kernel, gamma), mask, f)).u
    v_direct = solve_exterior(ExteriorProblem(
        schrodinger_form(cond), mask, Field(g, np.sqrt(gamma.values) * f.values))).u
    v_mapped = transform(cond, u, "to_schrodinger")
    assert np.abs(v_mapped.values - v_direct.values).max() <= 1e-9


def test_dn_comparison_under_support_separation(setup):
    g, kernel, mask = setup
    x = g.axis_coords()
    gamma = Field(g, 1.0 + smooth_bump(x, 0.0, 0.7, 0.5) * (np.abs(x) < 1.0))
    cond = make_conductivity(gamma, kernel)
    f = Field(g, np.where((x > 1.5) & (x < 2.5), 1.0, 0.0))
    gg = Field(g, np.where((x < -1.5) & (x > -2.5), 1.0, 0.0))
    assert dn_comparison_gap(cond, mask, f, gg) <= 1e-9


def test_dn_comparison_flat_gamma(setup):
    g, kernel, mask = setup
    cond = make_conductivity(Field.constant(g, 1.0), kernel)
    x = g.axis_coords()
    f = Field(g, np.where((x > 1.5) & (x < 2.5), 1.0, 0.0))
    gg = Field(g, np.where((x < -1.5) & (x > -2.5), 1.0, 0.0))
    assert dn_comparison_gap(cond, mask, f, gg) <= 1e-12


def test_dn_comparison_rejects_support_overlap(setup):
    g, kernel, mask = setup
    x = g.axis_coords()
    gamma = Field(g, 1.0 + smooth_bump(x, 1.5, 0.5, 0.5))  # m reaches past 1
    cond = make_conductivity(gamma, kernel)
    f = Field(g, np.where((x > 1.2) & (x < 2.5), 1.0, 0.0))
    gg = Field(g, np.where((x < -1.5) & (x > -2.5), 1.0, 0.0))
    with pytest.raises(ValueError, match="indices"):
        dn_comparison_gap(cond, mask, f, gg)


def test_nonuniqueness_zero_data_returns_same(setup):
    g, kernel, mask = setup
    x = g.axis_coords()
    gamma1 = Field(g, 1.0 + smooth_bump(x, 0.0, 0.7, 0.5))
    cond1 = make_conductivity(gamma1, kernel)
    cond2 = nonuniqueness_pair(cond1, mask, Field.zeros(g))
    assert np.abs(cond2.gamma.values - gamma1.values).max() <= 1e-12


def test_nonuniqueness_window_dichotomy(setup):
    g, kernel, mask = setup
    x = g.axis_coords()
    gamma1 = Field(g, 1.0 + smooth_bump(x, 0.0, 0.7, 0.5))
    cond1 = make_conductivity(gamma1, kernel)
    m0 = Field(g, smooth_bump(x, 4.0, 0.45, 0.2) * (np.abs(x) > 1.0))
    cond2 = nonuniqueness_pair(cond1, mask, m0)

    assert np.abs((cond1.q.values - cond2.q.values)[mask.interior]).max() <= 1e-10
    assert np.abs(cond1.gamma.values - cond2.gamma.values).max() >= 0.01

    dn1 = assemble_dn(conductivity_form(kernel, cond1.gamma), mask)
    dn2 = assemble_dn(conductivity_form(kernel, cond2.gamma), mask)
    assert window_equal(dn1, dn2, "W1", "W2", 1e-9)  # disjoint windows blind
    assert not window_equal(dn1, dn2, "V1", "V2", 1e-6)  # overlap detects


def test_nonuniqueness_rejects_bad_m0(setup):
    g, kernel, mask = setup
    x = g.axis_coords()
    gamma1 = Field(g, 1.0 + smooth_bump(x, 0.0, 0.7, 0.5))
    cond1 = make_conductivity(gamma1, kernel)
    inside = Field(g, smooth_bump(x, 0.0, 0.5, 0.1))
    with pytest.raises(ValueError):
        nonuniqueness_pair(cond1, mask, inside)  # supported in the interior
    in_window = Field(g, smooth_bump(x, 2.0, 0.3, 0.1))
    with pytest.raises(ValueError):
        nonuniqueness_pair(cond1, mask, in_window)
    huge = Field(g, smooth_bump(x, 4.0, 0.45, 5.0) * (np.abs(x) > 1.0))
    with pytest.raises((ValueError, RuntimeError)):
        nonuniqueness_pair(cond1, mask, huge)  # positivity loss


@pytest.fixture(scope="module")
def recon_setup():
    g = make_grid(1, 6.0, 128)
    kernel = make_kernel(g, 0.5, "kernel")
    mask = mask_from_predicate(g, lambda x: -1.0 < x < 1.0)
    return g, kernel, mask


def test_reconstruction_closed_loop(recon_setup):
    g, kernel, mask = recon_setup
    x = g.axis_coords()
    gamma = Field(g, 1.0 + smooth_bump(x, 0.0, 0.6, 0.3) * (np.abs(x) < 1.0))
    dn = assemble_dn(conductivity_form(kernel, gamma), mask)
    rec = reconstruct_conductivity(dn, mask, 0.5, kernel=kernel)
    assert not rec.low_confidence
    assert np.abs(rec.gamma.values - gamma.values).max() <= 1e-6


def test_reconstruction_flat_gamma(recon_setup):
    g, kernel, mask = recon_setup
    dn = assemble_dn(conductivity_form(kernel, Field.constant(g, 1.0)), mask)
    rec = reconstruct_conductivity(dn, mask, 0.5, kernel=kernel)
    assert np.abs(rec.gamma.values - 1.0).max() <= 1e-8
    assert np.abs(rec.q.values).max() <= 1e-10
