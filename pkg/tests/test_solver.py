import numpy as np
import pytest

from fraclab.grid import Field, make_grid, mask_from_predicate
from fraclab.fracops import hs_gram_block, make_kernel
from fraclab.forms import PdoSpec, dirichlet_form, pdo_form, potential_form
from fraclab.solver import (
    ExteriorProblem,
    NonCoerciveError,
    runge_residual,
    solve_adjoint,
    solve_exterior,
)


@pytest.fixture(scope="module")
def setup():
    g = make_grid(1, 8.0, 128)
    mask = mask_from_predicate(g, lambda x: -1.0 < x < 1.0)
    kernel = make_kernel(g, 0.5, "spectral")
    form = dirichlet_form(kernel) + potential_form(g, Field.constant(g, 0.5))
    return g, mask, form


def exterior_field(g, mask, rng):
    vals = np.zeros(g.size)
    vals[mask.exterior] = rng.uniform(-1, 1, mask.exterior.size)
    return Field(g, vals)


def test_zero_data_zero_solution(setup):
    g, mask, form = setup
    sol = solve_exterior(ExteriorProblem(form, mask, Field.zeros(g)))
    assert np.abs(sol.u.values).max() == 0.0


def test_constant_data_harmonic(setup):
    g, mask, _ = setup
    form = dirichlet_form(make_kernel(g, 0.5, "spectral"))
    sol = solve_exterior(ExteriorProblem(form, mask, Field.constant(g, 1.0)))
    assert np.abs(sol.u.values - 1.0).max() <= 1e-10


def test_random_data_residual(setup):
    g, mask, form = setup
    rng = np.random.default_rng(0)
    for _ in range(5):
        sol = solve_exterior(ExteriorProblem(form, mask, exterior_field(g, mask, rng)))
        assert sol.residual <= 1e-9
        assert sol.exterior_match


def test_interior_data_modification_is_invisible(setup):
    g, mask, form = setup
    rng = np.random.default_rng(1)
    f = exterior_field(g, mask, rng)
    f_mod = Field(g, f.values + np.isin(np.arange(g.size), mask.interior)
                  * rng.uniform(-5, 5, g.size))
    u1 = solve_exterior(ExteriorProblem(form, mask, f))
    u2 = solve_exterior(ExteriorProblem(form, mask, f_mod))
    assert np.array_equal(u1.u.values, u2.u.values)


def test_noncoercive_refusal(setup):
    g, mask, _ = setup
    form = dirichlet_form(make_kernel(g, 0.5, "spectral")) + potential_form(
        g, Field.constant(g, -50.0))
    with pytest.raises(NonCoerciveError):
        solve_exterior(ExteriorProblem(form, mask, Field.constant(g, 1.0)))


def test_adjoint_matches_for_symmetric_forms(setup):
    g, mask, form = setup
    rng = np.random.default_rng(2)
    f = exterior_field(g, mask, rng)
    u = solve_exterior(ExteriorProblem(form, mask, f)).u
    ua = solve_adjoint(ExteriorProblem(form, mask, f)).u
    assert np.abs(u.values - ua.values).max() <= 1e-12 * max(1, np.abs(u.values).max())


def test_adjoint_differs_for_drift(setup):
    g, mask, _ = setup
    x = g.axis_coords()
    form = pdo_form(
        make_kernel(g, 0.75, "spectral"),
        PdoSpec(order=1, coefficients={(1,): Field(g, 0.2 * np.exp(-(x**2)))}),
    )
    rng = np.random.default_rng(3)
    f = exterior_field(g, mask, rng)
    u = solve_exterior(ExteriorProblem(form, mask, f)).u
    ua = solve_adjoint(ExteriorProblem(form, mask, f)).u
    assert np.abs(u.values - ua.values).max() > 1e-6


def test_interior_source_enters_through_quadrature(setup):
    g, mask, form = setup
    rng = np.random.default_rng(4)
    src = Field(g, np.isin(np.arange(g.size), mask.interior) * rng.uniform(-1, 1, g.size))
    sol = solve_exterior(ExteriorProblem(form, mask, Field.zeros(g), interior_source=src))
    # residual definition includes the source; the exterior stays clamped
    assert sol.residual <= 1e-9
    assert np.abs(sol.u.values[mask.exterior]).max() == 0.0
    assert np.abs(sol.u.values[mask.interior]).max() > 0.0


def test_stability_bound(setup):
    g, mask, form = setup
    from fraclab.forms import coercivity_margin
    import scipy.linalg
    margin = coercivity_margin(form, mask)
    bound_const = 1.0 / margin + 1.0
    gram = hs_gram_block(g, 0.5, np.arange(g.size), np.arange(g.size))
    rng = np.random.default_rng(5)
    for _ in range(10):
        f = exterior_field(g, mask, rng)
        sol = solve_exterior(ExteriorProblem(form, mask, f))
        norm_u = np.sqrt(sol.u.values @ (gram @ sol.u.values))
        norm_f = np.sqrt(f.values @ (gram @ f.values))
        assert norm_u <= bound_const * norm_f * (1.0 + 1e-9)


def test_runge_target_in_span(setup):
    g, mask, form = setup
    window = mask.exterior
    e0 = Field(g, np.eye(g.size)[window[0]])
    u0 = solve_exterior(ExteriorProblem(form, mask, e0)).u
    target = Field(g, (u0.values - e0.values)
                   * np.isin(np.arange(g.size), mask.interior))
    assert runge_residual(form, mask, window, target, 1) <= 1e-10


def test_runge_monotone_and_small_at_full_window(setup):
    g, mask, _ = setup
    x = g.axis_coords()
    form = dirichlet_form(make_kernel(g, 0.5, "spectral")) + potential_form(
        g, Field.constant(g, 0.1))
    hat = Field(g, np.maximum(0.0, 1.0 - np.abs(x) / 0.5)
                * np.isin(np.arange(g.size), mask.interior))
    window = mask.exterior
    prev = np.inf
    for n in (1, 2, 4, 8, 16, 32, window.size):
        r = runge_residual(form, mask, window, hat, n)
        assert r <= prev + 1e-12
        prev = r
    assert prev <= 0.1


def test_solution_map_is_linear_in_data(setup):
    g, mask, form = setup
    rng = np.random.default_rng(6)
    f1 = exterior_field(g, mask, rng)
    f2 = exterior_field(g, mask, rng)
    a, b = 1.7, -0.4
    combo = Field(g, a * f1.values + b * f2.values)
    u1 = solve_exterior(ExteriorProblem(form, mask, f1)).u
    u2 = solve_exterior(ExteriorProblem(form, mask, f2)).u
    uc = solve_exterior(ExteriorProblem(form, mask, combo)).u
    expect = a * u1.values + b * u2.values
    assert np.abs(uc.values - expect).max() <= 1e-10 * max(1.0, np.abs(expect).max())


def test_runge_rejects_bad_inputs(setup):
    g, mask, form = setup
    hat = Field.zeros(g)
    with pytest.raises(ValueError):
        runge_residual(form, mask, np.array([], dtype=int), hat, 1)
    with pytest.raises(ValueError):
        runge_residual(form, mask, mask.exterior, hat, 0)
    bad_target = Field.constant(g, 1.0)  # supported everywhere
    with pytest.raises(ValueError):
        runge_residual(form, mask, mask.exterior, bad_target, 1)
