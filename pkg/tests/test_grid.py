import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brfd.grid import (
    DimensionError, GridFunction, InteriorGridFunction, Mesh, StaggeredFunction, TimeGrid,
    compose, forward_difference, hadamard, laplacian, sample,
)


def test_mesh_fields():
    m = Mesh(-1.0, 2.0, 29)
    assert m.L == 3.0
    assert m.h == pytest.approx(0.1, rel=1e-15)
    assert abs(m.h * (m.J + 1) - m.L) <= 1e-14 * m.L
    assert m.node(0) == -1.0 and m.node(m.J + 1) == 2.0
    assert m.nodes[0] == -1.0 and m.nodes[-1] == 2.0


@pytest.mark.parametrize("args", [(1.0, 1.0, 3), (0.0, 1.0, 0), (2.0, 1.0, 3), (0.0, 1.0, 2.5)])
def test_mesh_rejects_bad_input(args):
    with pytest.raises(ValueError):
        Mesh(*args)


def test_time_grid():
    tg = TimeGrid(1.0, 10)
    assert abs(tg.tau * tg.N - tg.T) <= 1e-14
    assert tg.t(3) == pytest.approx(0.3)
    assert tg.t(10) == 1.0
    assert tg.t_half(0) == 0.05
    assert tg.t_quarter == 0.025
    with pytest.raises(ValueError):
        TimeGrid(0.0, 3)
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)


def test_interior_endpoints_forced():
    v = InteriorGridFunction([3.0, 1.0, 2.0, 5.0])
    assert v.values.tolist() == [0.0, 1.0, 2.0, 0.0]
    with pytest.raises(ValueError):
        v.values[1] = 7.0


def test_laplacian_examples():
    m = Mesh(0.0, 1.0, 1)
    assert laplacian(InteriorGridFunction([0, 1, 0]), m).values.tolist() == [0.0, -8.0, 0.0]
    assert np.all(laplacian(InteriorGridFunction.zeros(m), m).values == 0)
    m = Mesh(0.0, 1.0, 17)
    lap = laplacian(sample(lambda x: x * (1 - x), m, interior=True), m)
    np.testing.assert_allclose(lap.values[1:-1], -2.0, rtol=1e-12)
    assert lap.values[0] == 0 and lap.values[-1] == 0


def test_laplacian_dimension_mismatch():
    with pytest.raises(DimensionError):
        laplacian(InteriorGridFunction([0, 1, 1, 0]), Mesh(0, 1, 1))


@pytest.mark.parametrize("J", [3, 10, 57])
def test_cubic_exactness(J):
    # p(x) = (x - a)(x - b)(x + 2), p'' = 6x + 4 - 2(a + b)... computed directly
    a, b = -0.5, 1.5
    m = Mesh(a, b, J)
    p = lambda x: (x - a) * (x - b) * (x + 2)
    p2 = lambda x: 6 * x + 2 * (2 - a - b)
    lap = laplacian(sample(p, m, interior=True), m).values[1:-1]
    exact = p2(m.nodes[1:-1])
    np.testing.assert_allclose(lap, exact, rtol=1e-12, atol=1e-10)


def test_forward_difference_examples():
    m = Mesh(0.0, 1.0, 1)
    assert forward_difference(GridFunction([0, 1, 0]), m).values.tolist() == [2.0, -2.0]
    m = Mesh(0.0, 1.0, 9)
    assert np.all(forward_difference(GridFunction(np.full(11, 4.2)), m).values == 0)
    np.testing.assert_allclose(forward_difference(sample(lambda x: x, m), m).values, 1.0, rtol=1e-13)
    assert len(forward_difference(sample(lambda x: x, m), m)) == m.J + 1


def test_hadamard():
    assert hadamard(GridFunction([1, 2, 3]), GridFunction([4, 5, 6])).values.tolist() == [4, 10, 18]
    v = GridFunction([1.5, -2, 3])
    assert np.all(hadamard(v, GridFunction([0, 0, 0])).values == 0)
    assert hadamard(v, GridFunction([1, 1, 1])) == v
    out = hadamard(GridFunction([7, 1, 7]), InteriorGridFunction([0, 2, 0]))
    assert isinstance(out, InteriorGridFunction)
    with pytest.raises(DimensionError):
        hadamard(GridFunction([1, 2]), GridFunction([1, 2, 3]))


def test_sample():
    m = Mesh(0.0, 1.0, 3)
    assert sample(lambda x: x, m).values.tolist() == [0, 0.25, 0.5, 0.75, 1.0]
    assert sample(lambda x: 1.0, m, interior=True).values.tolist() == [0, 1, 1, 1, 0]
    u0 = lambda x: np.sin(np.pi * x)
    np.testing.assert_array_equal(
        sample(u0, m).values[1:-1], sample(u0, m, interior=True).values[1:-1]
    )
    assert abs(sample(u0, m).values[-1]) < 1e-15


def test_sample_scalar_only_callable():
    import math
    m = Mesh(0.0, 1.0, 4)
    np.testing.assert_allclose(sample(math.sin, m).values, np.sin(m.nodes))


def test_compose():
    w = GridFunction([0, 2, 0])
    assert compose(lambda a: a, w) == w
    assert compose(lambda a: a ** 2, w).values.tolist() == [0, 4, 0]
    assert np.all(compose(lambda a, b: a - b, w, w).values == 0)
    with pytest.raises(DimensionError):
        compose(lambda a, b: a, w, GridFunction([1, 2]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2 ** 32 - 1))
def test_operators_linear(J, a, b, seed):
    rng = np.random.default_rng(seed)
    m = Mesh(0.0, 2.0, J)
    v = InteriorGridFunction(rng.standard_normal(J + 2))
    z = InteriorGridFunction(rng.standard_normal(J + 2))
    combo = InteriorGridFunction(a * v.values + b * z.values)
    lhs = laplacian(combo, m).values
    rhs = a * laplacian(v, m).values + b * laplacian(z, m).values
    scale = 1 + np.max(np.abs(rhs))
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * scale
    lhs = forward_difference(combo, m).values
    rhs = a * forward_difference(v, m).values + b * forward_difference(z, m).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * (1 + np.max(np.abs(rhs)))
    lap = laplacian(v, m)
    assert lap.values[0] == 0.0 and lap.values[-1] == 0.0


def test_staggered_conformity():
    m = Mesh(0, 1, 4)
    assert StaggeredFunction(np.zeros(5)).conforms(m)
    assert not StaggeredFunction(np.zeros(4)).conforms(m)
