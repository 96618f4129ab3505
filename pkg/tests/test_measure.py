"""Weighted partitions, densities, pmfs, and the derivative between them."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qentropy import (
    AbsoluteContinuityError,
    Cell,
    DensityVector,
    ProbabilityVector,
    WeightedPartition,
    induced_pmf,
    radon_nikodym,
    uniform_partition,
)


def test_partition_validation():
    cells = tuple(Cell(str(k)) for k in range(3))
    with pytest.raises(ValueError):
        WeightedPartition(cells, [-0.1, 0.6, 0.5])
    with pytest.raises(ValueError):
        WeightedPartition(cells, [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        WeightedPartition(cells, [1.0, 2.0])
    with pytest.raises(ValueError):
        WeightedPartition((), [])
    part = WeightedPartition(cells, [0.0, 1.0, 3.0])  # null cells are allowed
    assert len(part) == 3
    assert part.total_mass == 4.0


def test_uniform_partition_modes():
    counting = uniform_partition(4)
    assert np.array_equal(counting.weights, np.ones(4))
    prob = uniform_partition(4, "uniform_probability")
    assert np.allclose(prob.weights, 0.25, rtol=0, atol=0)
    grid = uniform_partition(4, "lebesgue", interval=(0.0, 2.0))
    assert np.allclose(grid.weights, 0.5, rtol=0, atol=0)
    assert grid.cells[0].left == 0.0 and grid.cells[-1].right == 2.0
    assert math.isclose(grid.total_mass, 2.0, rel_tol=0, abs_tol=1e-12)
    with pytest.raises(ValueError):
        uniform_partition(0)
    with pytest.raises(ValueError):
        uniform_partition(4, "lebesgue")  # interval required
    with pytest.raises(ValueError):
        uniform_partition(4, "nonsense")


def test_density_normalization_gate():
    part = uniform_partition(2, "uniform_probability")
    DensityVector([1.2, 0.8], part)  # 0.5*1.2 + 0.5*0.8 = 1
    with pytest.raises(ValueError):
        DensityVector([1.0, 0.5], part)
    scaled = DensityVector.from_values([3.0, 2.0], part, renormalize=True)
    assert math.isclose(float(scaled.values @ part.weights), 1.0, rel_tol=0, abs_tol=1e-15)
    assert math.isclose(scaled.renormalization, 1.0 / 2.5, rel_tol=1e-15)
    with pytest.raises(ValueError):
        DensityVector.from_values([0.0, 0.0], part, renormalize=True)
    with pytest.raises(ValueError):
        DensityVector([1.0, np.nan], part)


def test_probability_vector_normalization_gate():
    ProbabilityVector([0.5, 0.5])
    with pytest.raises(ValueError):
        ProbabilityVector([0.5, 0.6])
    with pytest.raises(ValueError):
        ProbabilityVector([0.7, -0.3, 0.6])
    scaled = ProbabilityVector.from_values([2.0, 6.0], renormalize=True)
    assert np.allclose(scaled.masses, [0.25, 0.75], rtol=0, atol=1e-15)
    assert scaled.renormalization == 0.125


def test_density_pmf_roundtrip():
    part = WeightedPartition(tuple(Cell(str(k)) for k in range(3)), [0.5, 1.0, 2.5])
    p = DensityVector.from_values([0.5, 0.5, 0.1], part)
    P = induced_pmf(p)
    assert np.allclose(P.masses, [0.25, 0.5, 0.25], rtol=0, atol=1e-15)
    back = radon_nikodym(P, part)
    assert np.allclose(back.values, p.values, rtol=1e-15)


def test_radon_nikodym_on_null_cells():
    part = WeightedPartition(tuple(Cell(str(k)) for k in range(3)), [1.0, 0.0, 1.0])
    ok = radon_nikodym(ProbabilityVector([0.4, 0.0, 0.6]), part)
    assert ok.values[1] == 0.0
    with pytest.raises(AbsoluteContinuityError):
        radon_nikodym(ProbabilityVector([0.4, 0.2, 0.4]), part)


def test_radon_nikodym_shape_mismatch():
    with pytest.raises(ValueError):
        radon_nikodym(ProbabilityVector([0.5, 0.5]), uniform_partition(3))


def test_cells_carry_labels_and_bounds():
    c = Cell("bin-3", 0.25, 0.5)
    assert (c.label, c.left, c.right) == ("bin-3", 0.25, 0.5)
    with pytest.raises(Exception):
        c.left = 0.0  # frozen


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=9), st.integers(min_value=0, max_value=2**31 - 1))
def test_roundtrip_property(n, seed):
    rng = np.random.default_rng(seed)
    mu = rng.uniform(0.1, 2.0, n)
    part = WeightedPartition(tuple(Cell(str(k)) for k in range(n)), mu)
    masses = rng.dirichlet(np.ones(n))
    P = ProbabilityVector.from_values(masses, renormalize=True)
    again = induced_pmf(radon_nikodym(P, part))
    assert np.allclose(again.masses, P.masses, rtol=0, atol=1e-14)
