"""Dyadic level-set approximations, common refinements, convergence tables.

The linear density p(x) = 2x on [0, 1] with a 2^4 base grid is small enough
to check the whole construction by hand; those literals are exact dyadic
floats.  Continuous reference values regenerated by tests/_oracles.py.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qentropy.dyadic import CSV_HEADER

from qentropy import (
    BaseGridDensity,
    ConvergenceRow,
    ResolutionError,
    approximating_pmf,
    common_refinement,
    convergence_table,
    demo_to_csv,
    dyadic_approximation,
    entropy_nonextension_demo,
    reference_divergence,
    table_to_csv,
)


def linear_grid(exponent=4):
    return BaseGridDensity.from_function(lambda x: 2.0 * x, (0.0, 1.0), base_exponent=exponent)


def flat_grid(exponent=4):
    return BaseGridDensity.from_values(np.ones(2**exponent), (0.0, 1.0))


def test_linear_density_level_one_by_hand():
    # 16 midpoint values (2i+1)/16; value bins at width 1/2, truncation at 1
    approx = dyadic_approximation(linear_grid(), 1)
    assert approx.overflow_id == 2
    assert approx.has_overflow
    assert np.array_equal(approx.bin_ids, [0, 1, 2])
    assert np.array_equal(approx.mean_values, [0.25, 0.75, 1.5])
    assert np.array_equal(approx.masses, [0.0625, 0.1875, 0.75])
    assert np.array_equal(approx.mu_masses, [0.25, 0.25, 0.5])
    assert np.array_equal(approx.members[0], [0, 1, 2, 3])
    assert np.array_equal(approx.members[2], np.arange(8, 16))
    assert math.fsum(approx.masses) == 1.0


def test_flat_density_is_one_overflow_cell_at_level_one():
    # the value 1.0 sits exactly at the level-1 truncation threshold
    approx = dyadic_approximation(flat_grid(), 1)
    assert approx.cell_count == 1
    assert approx.has_overflow
    assert np.array_equal(approx.mean_values, [1.0])
    # at level 2 the same value lands in a regular bin
    approx2 = dyadic_approximation(flat_grid(), 2)
    assert approx2.cell_count == 1
    assert not approx2.has_overflow
    assert np.array_equal(approx2.bin_ids, [4])


def test_refinement_of_linear_against_flat():
    refinement = common_refinement(
        dyadic_approximation(linear_grid(), 1), dyadic_approximation(flat_grid(), 1)
    )
    assert refinement.cell_count == 3
    assert np.array_equal(refinement.f_means, [0.25, 0.75, 1.5])
    assert np.array_equal(refinement.g_means, [1.0, 1.0, 1.0])
    assert np.array_equal(refinement.mu_masses, [0.25, 0.25, 0.5])
    assert np.array_equal(refinement.f_masses, [0.0625, 0.1875, 0.75])
    assert np.array_equal(refinement.g_masses, [0.25, 0.25, 0.5])


def test_level_one_divergence_is_exact_arithmetic():
    # pmf pair (0.0625, 0.1875, 0.75) vs (0.25, 0.25, 0.5): the order-2
    # power sum is 1.28125 in exact arithmetic
    rows = convergence_table(linear_grid(), flat_grid(), 2.0, "renyi", [1])
    assert math.isclose(rows[0].discrete_divergence, math.log(1.28125), rel_tol=0, abs_tol=1e-14)


def test_simple_function_sup_norm_bound():
    grid = BaseGridDensity.from_function(
        lambda x: 1.0 + 0.3 * np.sin(2.0 * math.pi * x), (0.0, 1.0), base_exponent=10
    )
    for level in (1, 2, 4, 6):
        approx = dyadic_approximation(grid, level)
        f_n = approx.simple_function()
        below = grid.values < level
        assert np.all(np.abs(f_n[below] - grid.values[below]) <= 2.0 ** (-level))
        assert math.isclose(float(np.sum(approx.masses)), 1.0, rel_tol=0, abs_tol=1e-12)


def test_levels_validation():
    with pytest.raises(ResolutionError):
        dyadic_approximation(linear_grid(4), 5)  # 32 bins > 16 cells
    dyadic_approximation(linear_grid(4), 4)  # boundary case is fine
    with pytest.raises(ValueError):
        dyadic_approximation(linear_grid(4), 0)
    with pytest.raises(ValueError):
        convergence_table(linear_grid(), flat_grid(), 2.0, "renyi", [])
    with pytest.raises(ValueError):
        convergence_table(linear_grid(), flat_grid(), 2.0, "hellinger", [2])
    with pytest.raises(ValueError):
        convergence_table(linear_grid(4), flat_grid(5), 2.0, "renyi", [2])


def test_grid_validation():
    with pytest.raises(ValueError):
        BaseGridDensity.from_values(np.full(12, 1.0 / 12), (0.0, 1.0))  # not a power of two
    with pytest.raises(ValueError):
        BaseGridDensity.from_values(np.array([2.0, 1.0]), (0.0, 1.0))  # mass 1.5
    with pytest.raises(ValueError):
        BaseGridDensity.from_values(np.array([2.0, -0.0001]), (0.0, 1.0), renormalize=True)
    with pytest.raises(ValueError):
        BaseGridDensity.from_values(np.array([1.5, 0.5]), (0.0, 1.0), bound=1.2)
    with pytest.raises(ValueError):
        BaseGridDensity.from_function(lambda x: 0.0 * x, (0.0, 1.0), base_exponent=3)
    grid = BaseGridDensity.from_values(np.array([3.0, 1.0]), (0.0, 1.0), renormalize=True)
    assert np.array_equal(grid.values, [1.5, 0.5])
    assert grid.renormalization == 0.5


def test_reference_divergence_matches_closed_forms():
    # continuous values for p = 2x against the flat density (50-dps oracle);
    # the base grid is a midpoint rule, so the smooth index-2 integrand
    # converges like Delta^2 while sqrt(2x) at index 0.5 is held back by the
    # endpoint singularity (measured 1.1e-8 at this resolution)
    p, r = linear_grid(16), flat_grid(16)
    cases = [
        (2.0, "renyi", 0.2876820724517809, 1e-9),
        (0.5, "renyi", 0.11778303565638345, 5e-8),
        (2.0, "tsallis", 1.0 / 3.0, 1e-9),
        (0.5, "tsallis", 0.11438191683587327, 5e-8),
    ]
    for index, kind, exact, tol in cases:
        assert math.isclose(reference_divergence(p, r, index, kind), exact, rel_tol=0, abs_tol=tol)


def test_convergence_toward_reference():
    p, r = linear_grid(14), flat_grid(14)
    for index, kind in [(2.0, "renyi"), (0.5, "renyi"), (2.0, "tsallis"), (0.5, "tsallis")]:
        rows = convergence_table(p, r, index, kind, [2, 4, 8, 12])
        errors = [row.abs_error for row in rows]
        assert errors == sorted(errors, reverse=True)
        assert errors[-1] < 1e-3
        assert rows[0].reference_divergence == rows[-1].reference_divergence


def test_mutually_singular_pair_is_infinite_on_both_routes():
    n = 16
    p = BaseGridDensity.from_values(np.ones(n), (0.0, 1.0))
    r_vals = np.zeros(n)
    r_vals[: n // 2] = 2.0
    r = BaseGridDensity.from_values(r_vals, (0.0, 1.0))
    assert reference_divergence(p, r, 2.0, "renyi") == math.inf
    rows = convergence_table(p, r, 2.0, "renyi", [2])
    assert rows[0].discrete_divergence == math.inf
    assert rows[0].abs_error == 0.0


def test_csv_format_is_byte_stable():
    rows = [ConvergenceRow(3, 0.25, 0.125, 0.125), ConvergenceRow(4, 1.0 / 3.0, 0.5, math.inf)]
    got = table_to_csv(rows)
    assert got == (
        "level,discrete_divergence,reference_divergence,abs_error\n"
        "3,0.25,0.125,0.125\n"
        "4,0.3333333333333333,0.5,inf\n"
    )
    assert got.splitlines()[0] == CSV_HEADER


def test_demo_unit_interval():
    report = entropy_nonextension_demo([2, 4, 1024])
    assert report.continuous_entropy == 0.0
    assert not report.continuous_negative
    for row in report.rows:
        assert math.isclose(row.discrete_entropy, math.log(row.n), rel_tol=0, abs_tol=1e-12)
    csv = demo_to_csv(report)
    assert csv.startswith("n,discrete_entropy,continuous_entropy\n2,0.6931471805599453,0.0\n")


def test_demo_half_interval_goes_negative():
    report = entropy_nonextension_demo([2], interval=(0.0, 0.5))
    assert report.continuous_negative
    assert math.isclose(report.continuous_entropy, math.log(0.5), rel_tol=0, abs_tol=1e-12)
    # discrete side is measured against counting and does not move
    assert math.isclose(report.rows[0].discrete_entropy, math.log(2.0), rel_tol=0, abs_tol=1e-12)


def test_demo_validation():
    with pytest.raises(ValueError):
        entropy_nonextension_demo([])
    with pytest.raises(ValueError):
        entropy_nonextension_demo([2.5])
    with pytest.raises(ValueError):
        entropy_nonextension_demo([2], interval=(1.0, 0.0))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**31 - 1),
    st.integers(min_value=1, max_value=6),
)
def test_mass_and_mean_properties(seed, level):
    rng = np.random.default_rng(seed)
    c1, c2 = rng.uniform(-0.4, 0.4, 2)
    grid = BaseGridDensity.from_function(
        lambda x: 1.0 + c1 * np.sin(2.0 * math.pi * x) + c2 * np.cos(4.0 * math.pi * x),
        (0.0, 1.0),
        base_exponent=8,
    )
    approx = dyadic_approximation(grid, level)
    assert abs(float(np.sum(approximating_pmf(approx).masses)) - 1.0) <= 1e-12
    scale = 2.0**level
    for i, k in enumerate(approx.bin_ids):
        if k == approx.overflow_id:
            assert approx.mean_values[i] >= level
        else:
            assert k / scale <= approx.mean_values[i] < (k + 1) / scale
    # refinement masses of the first margin telescope back to the pmf
    refinement = common_refinement(approx, dyadic_approximation(grid, level))
    assert math.isclose(float(np.sum(refinement.f_masses)), 1.0, rel_tol=0, abs_tol=1e-12)
    assert math.isclose(float(np.sum(refinement.g_masses)), 1.0, rel_tol=0, abs_tol=1e-12)
