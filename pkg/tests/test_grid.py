import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dyadica import grid
from dyadica.errors import ConfigurationError, ParameterError, ShapeError


# ---------------------------------------------------------------------------
# axes


def test_build_axis_cell_counts():
    ax = grid.build_axis(3)
    assert ax.n_cells == 8
    assert ax.h == 1.0 / 8.0
    assert grid.build_axis(1).n_cells == 2


def test_build_axis_rejects_out_of_range():
    with pytest.raises(ConfigurationError):
        grid.build_axis(15)
    with pytest.raises(ConfigurationError):
        grid.build_axis(0)
    with pytest.raises(ConfigurationError):
        grid.build_axis(2.5)


# ---------------------------------------------------------------------------
# grid functions


def test_grid_function_validates_shape_and_finiteness():
    ax = grid.build_axis(2)
    with pytest.raises(ShapeError):
        grid.grid_function([1.0, 2.0], ax)  # wrong length
    with pytest.raises(ShapeError):
        grid.grid_function([1.0, np.inf, 0.0, 0.0], ax)


def test_grid_function_values_are_immutable():
    ax = grid.build_axis(2)
    f = grid.constant_function(1.0, ax)
    with pytest.raises(ValueError):
        f.values[0] = 7.0


def test_arithmetic_checks_axes():
    f = grid.constant_function(1.0, grid.build_axis(2))
    g = grid.constant_function(1.0, grid.build_axis(3))
    with pytest.raises(ShapeError):
        _ = f + g


# ---------------------------------------------------------------------------
# inner product


def test_inner_product_of_ones_is_one():
    ax = grid.build_axis(4)
    one = grid.constant_function(1.0, ax)
    assert grid.inner_product(one, one) == pytest.approx(1.0, abs=1e-15)


def test_inner_product_haar_normalization():
    # step function +1 on [0,1/2), -1 on [1/2,1): unit L2 norm
    ax = grid.build_axis(3)
    vals = np.where(np.arange(8) < 4, 1.0, -1.0)
    h = grid.grid_function(vals, ax)
    assert grid.inner_product(h, h) == pytest.approx(1.0, abs=1e-15)


def test_inner_product_identity_function_against_one():
    # cell averages of f(x) = x are the midpoints; sum * h = 1/2 exactly
    ax = grid.build_axis(4)
    f = grid.tabulate_midpoint(lambda x: x, ax)
    one = grid.constant_function(1.0, ax)
    assert grid.inner_product(f, one) == pytest.approx(0.5, abs=1e-15)


def test_inner_product_axis_mismatch():
    f = grid.constant_function(1.0, grid.build_axis(2))
    g = grid.constant_function(1.0, grid.build_axis(3))
    with pytest.raises(ShapeError):
        grid.inner_product(f, g)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_inner_product_bilinear_symmetric_positive(seed):
    r = np.random.default_rng(seed)
    ax = grid.Axis(4)
    f = grid.grid_function(r.normal(size=16), ax)
    g = grid.grid_function(r.normal(size=16), ax)
    w = grid.grid_function(r.normal(size=16), ax)
    a, b = r.normal(), r.normal()
    lhs = grid.inner_product(a * f + b * g, w)
    rhs = a * grid.inner_product(f, w) + b * grid.inner_product(g, w)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    assert grid.inner_product(f, g) == pytest.approx(grid.inner_product(g, f))
    assert grid.inner_product(f, f) >= 0.0


def test_inner_product_zero_iff_zero():
    ax = grid.Axis(3)
    z = grid.constant_function(0.0, ax)
    assert grid.inner_product(z, z) == 0.0
    f = grid.grid_function(np.arange(8, dtype=float), ax)
    assert grid.inner_product(f, f) > 0.0


# ---------------------------------------------------------------------------
# kernel cell integrals


def test_full_interval_line_integral_closed_form():
    # double integral of |x-y|**-0.5 over the unit square = 8/3
    val = grid.line_pair_integral(1.0, 0.0, 0.5)
    assert val == pytest.approx(8.0 / 3.0, abs=1e-14)
    ref = oracles.pair_integral_quad(1.0, 0.0, 0.5, wrap=False)
    assert val == pytest.approx(ref, rel=1e-8)


def test_diagonal_cell_scaling():
    ax = grid.build_axis(6)
    val = grid.kernel_cell_integral(ax, 5, 5, 0.5)
    assert val == pytest.approx((8.0 / 3.0) * ax.h ** 1.5, rel=1e-13)


def test_kernel_symmetry():
    ax = grid.build_axis(5)
    for a, b in [(0, 7), (3, 30), (12, 12), (1, 17)]:
        assert grid.kernel_cell_integral(ax, a, b, 0.4) == pytest.approx(
            grid.kernel_cell_integral(ax, b, a, 0.4), abs=0.0
        )


def test_kernel_positive():
    ax = grid.build_axis(4)
    for a in range(16):
        assert grid.kernel_cell_integral(ax, a, 3, 0.7) > 0.0


def test_kernel_wrapping_values_frozen():
    # pinned against the overlap-hat quadrature oracle
    ax = grid.build_axis(3)
    assert grid.kernel_cell_integral(ax, 0, 7, 0.5) == pytest.approx(
        0.04881553646890876, rel=1e-10
    )
    assert grid.kernel_cell_integral(ax, 0, 4, 0.5) == pytest.approx(
        0.02311678470700492, rel=1e-10
    )


def test_kernel_against_quadrature():
    # quadrature consistency, including wrapping pairs and both branches
    for L in (2, 4):
        ax = grid.build_axis(L)
        n = ax.n_cells
        for lam in (0.3, 0.7):
            for a, b in [(0, 0), (0, 1), (0, n // 2), (1, n - 1), (2, n - 2)]:
                mine = grid.kernel_cell_integral(ax, a, b, lam)
                ref = oracles.pair_integral_quad(
                    ax.h, ((a - b) % n) * ax.h, lam, wrap=True
                )
                assert mine == pytest.approx(ref, rel=1e-8)


def test_kernel_refinement_consistency():
    # parent-pair integral equals the sum over the four child pairs
    coarse, fine = grid.build_axis(3), grid.build_axis(4)
    for lam in (0.3, 0.5, 0.7):
        for a in range(8):
            for b in range(8):
                parent = grid.kernel_cell_integral(coarse, a, b, lam)
                kids = sum(
                    grid.kernel_cell_integral(fine, 2 * a + i, 2 * b + j, lam)
                    for i in (0, 1)
                    for j in (0, 1)
                )
                assert parent == pytest.approx(kids, abs=1e-12)


def test_kernel_rejects_bad_lambda():
    ax = grid.build_axis(3)
    for lam in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ParameterError):
            grid.kernel_cell_integral(ax, 0, 1, lam)


def test_kernel_matrix_is_circulant_and_symmetric():
    ax = grid.build_axis(4)
    G = grid.kernel_matrix(ax, 0.5)
    assert np.allclose(G, G.T, atol=0.0)
    g = grid.kernel_profile(ax, 0.5)
    assert G[5, 2] == g[3]
    assert G[2, 5] == g[(2 - 5) % 16]
