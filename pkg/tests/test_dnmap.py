import numpy as np
import pytest

from fraclab.grid import Field, make_grid, mask_from_predicate
from fraclab.fracops import make_kernel
from fraclab.forms import (
    PdoSpec,
    conductivity_form,
    dirichlet_form,
    pdo_form,
    potential_form,
)
from fraclab.dnmap import (
    alessandrini_gap,
    assemble_dn,
    dn_pairing,
    export_dn_csv,
    window_equal,
)
from fraclab.solver import NonCoerciveError


@pytest.fixture(scope="module")
def setup():
    g = make_grid(1, 8.0, 128)
    mask = mask_from_predicate(
        g, lambda x: -1.0 < x < 1.0,
        windows={"W1": lambda x: 1.5 < x < 2.5, "W2": lambda x: -2.5 < x < -1.5})
    kernel = make_kernel(g, 0.5, "spectral")
    return g, mask, kernel


def exterior_field(g, mask, rng):
    vals = np.zeros(g.size)
    vals[mask.exterior] = rng.uniform(-1, 1, mask.exterior.size)
    return Field(g, vals)


def test_assembly_is_deterministic(setup):
    g, mask, kernel = setup
    q = Field(g, np.random.default_rng(0).uniform(0, 1, g.size))
    b1 = dirichlet_form(kernel) + potential_form(g, q)
    b2 = dirichlet_form(kernel) + potential_form(g, q)
    dn1 = assemble_dn(b1, mask)
    dn2 = assemble_dn(b2, mask)
    assert np.abs(dn1.matrix - dn2.matrix).max() <= 1e-12 * np.abs(dn1.matrix).max()


def test_symmetric_form_gives_symmetric_dn(setup):
    g, mask, kernel = setup
    form = dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.3))
    dn = assemble_dn(form, mask)
    assert np.abs(dn.matrix - dn.matrix.T).max() <= 1e-10 * np.abs(dn.matrix).max()


def test_unit_conductivity_matches_dirichlet_dn(setup):
    g, mask, _ = setup
    kernel = make_kernel(g, 0.5, "kernel")
    dn_c = assemble_dn(conductivity_form(kernel, Field.constant(g, 1.0)), mask)
    dn_d = assemble_dn(dirichlet_form(kernel), mask)
    assert np.abs(dn_c.matrix - dn_d.matrix).max() <= 1e-12 * np.abs(dn_d.matrix).max()


def test_noncoercive_form_is_refused(setup):
    g, mask, kernel = setup
    bad = dirichlet_form(kernel) + potential_form(g, Field.constant(g, -50.0))
    with pytest.raises(NonCoerciveError):
        assemble_dn(bad, mask)


def test_dn_adjoint_identity_for_pdo(setup):
    g, mask, _ = setup
    kernel = make_kernel(g, 0.75, "spectral")
    x = g.axis_coords()
    form = pdo_form(kernel, PdoSpec(order=1, coefficients={
        (0,): Field(g, 0.3 + 0.1 * np.sin(2 * np.pi * x / g.extent)),
        (1,): Field(g, 0.2 * np.exp(-(x**2))),
    }))
    dn = assemble_dn(form, mask)
    dn_adj = assemble_dn(form.adjoint(), mask)
    assert np.abs(dn.matrix.T - dn_adj.matrix).max() <= 1e-10 * np.abs(dn.matrix).max()


def test_quotient_invariance(setup):
    g, mask, kernel = setup
    form = dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.3))
    dn = assemble_dn(form, mask)
    rng = np.random.default_rng(1)
    f = exterior_field(g, mask, rng)
    gg = exterior_field(g, mask, rng)
    base = dn_pairing(dn, f, gg)
    f_mod = Field(g, f.values + np.isin(np.arange(g.size), mask.interior)
                  * rng.uniform(-7, 7, g.size))
    assert dn_pairing(dn, f_mod, gg) == base


def test_alessandrini_identity_random_pairs(setup):
    g, mask, kernel = setup
    rng = np.random.default_rng(2)
    base = dirichlet_form(kernel)
    for _ in range(10):
        b1 = base + potential_form(g, Field(g, rng.uniform(0, 1, g.size)))
        b2 = base + potential_form(g, Field(g, rng.uniform(0, 1, g.size)))
        dn1, dn2 = assemble_dn(b1, mask), assemble_dn(b2, mask)
        f = exterior_field(g, mask, rng)
        gg = exterior_field(g, mask, rng)
        lhs, rhs = alessandrini_gap(dn1, dn2, b1, b2, mask, f, gg)
        assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(lhs))


def test_alessandrini_equal_forms_vanish(setup):
    g, mask, kernel = setup
    form = dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.4))
    dn = assemble_dn(form, mask)
    rng = np.random.default_rng(3)
    f = exterior_field(g, mask, rng)
    gg = exterior_field(g, mask, rng)
    lhs, rhs = alessandrini_gap(dn, dn, form, form, mask, f, gg)
    assert abs(lhs) <= 1e-10 and abs(rhs) <= 1e-10
    lhs0, rhs0 = alessandrini_gap(dn, dn, form, form, mask, Field.zeros(g), gg)
    assert lhs0 == 0.0 and abs(rhs0) <= 1e-15


def test_alessandrini_rejects_interior_support(setup):
    g, mask, kernel = setup
    form = dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.4))
    dn = assemble_dn(form, mask)
    bad = Field.constant(g, 1.0)
    with pytest.raises(ValueError):
        alessandrini_gap(dn, dn, form, form, mask, bad, bad)


def test_window_blocks_and_equality(setup):
    g, mask, kernel = setup
    form = dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.4))
    dn = assemble_dn(form, mask)
    assert window_equal(dn, dn, "W1", "W2", 0.0)
    block = dn.window_block("W1", "W2")
    assert block.shape == (mask.window("W2").size, mask.window("W1").size)


def test_export_csv_round_trip(tmp_path, setup):
    g, mask, kernel = setup
    dn = assemble_dn(dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.4)), mask)
    path = tmp_path / "dn.csv"
    export_dn_csv(dn, path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(data, dn.matrix)  # 17 significant digits round-trip
