import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadica import dyadic, errors, grid, haar

import oracles


def offset0(L):
    return dyadic.DyadicSystem(grid.build_axis(L), 0)


# ---------------------------------------------------------------------------
# Haar functions


def test_haar_unit_interval_values():
    sys = offset0(3)
    hf = haar.haar_function(sys.cube(0, 0))
    assert np.array_equal(hf.values, [1, 1, 1, 1, -1, -1, -1, -1])


def test_haar_zero_mean_unit_norm():
    for off in (0, 11):
        sys = dyadic.DyadicSystem(grid.build_axis(4), off)
        for k in range(4):
            for m in range(1 << k):
                hf = haar.haar_function(sys.cube(k, m))
                assert hf.mean() == 0.0
                assert abs(grid.l2_norm(hf) - 1.0) < 1e-14


def test_haar_pairs_with_identity():
    # cell averages of x are the midpoints, and the pairing is exact
    ax = grid.build_axis(6)
    f = grid.tabulate_midpoint(lambda x: x, ax)
    hf = haar.haar_function(offset0(6).cube(0, 0))
    assert grid.inner_product(f, hf) == -0.25


def test_haar_finest_level_raises():
    sys = offset0(4)
    with pytest.raises(errors.ResolutionError):
        haar.haar_function(sys.cube(4, 3))


def test_haar_matches_oracle(rng):
    for _ in range(25):
        L = int(rng.integers(2, 7))
        n = 1 << L
        off = int(rng.integers(n))
        sys = dyadic.DyadicSystem(grid.build_axis(L), off)
        k = int(rng.integers(L))
        m = int(rng.integers(1 << k))
        got = haar.haar_function(sys.cube(k, m)).values
        want = oracles.haar_vector(n, k, m, off)
        assert np.array_equal(got, want)


def test_haar_matrix_orthonormal():
    for L, off in [(3, 0), (5, 9), (8, 100)]:
        sys = dyadic.DyadicSystem(grid.build_axis(L), off)
        H = haar.haar_matrix(sys)
        gram = sys.axis.h * H.T @ H
        assert np.max(np.abs(gram - np.eye(1 << L))) < 1e-12


def test_haar_matrix_columns_match_functions():
    sys = dyadic.DyadicSystem(grid.build_axis(4), 6)
    H = haar.haar_matrix(sys)
    assert np.array_equal(H[:, 0], np.ones(16))
    for k in range(4):
        for m in range(1 << k):
            cube = sys.cube(k, m)
            col = haar.basis_column(cube)
            assert np.array_equal(H[:, col], haar.haar_function(cube).values)


# ---------------------------------------------------------------------------
# expansion: one parameter


def test_expand_single_step():
    sys = dyadic.DyadicSystem(grid.build_axis(5), 7)
    K = sys.cube(2, 3)
    cmap = haar.haar_expand(haar.haar_function(K), sys)
    assert abs(cmap.entries[K] - 1.0) < 1e-14
    assert cmap.mean == 0.0
    others = [v for c, v in cmap.entries.items() if c != K]
    assert np.max(np.abs(others)) < 1e-14


def test_expand_constant():
    sys = offset0(4)
    cmap = haar.haar_expand(grid.constant_function(1.0, sys.axis), sys)
    assert abs(cmap.mean - 1.0) < 1e-14
    assert all(abs(v) < 1e-14 for v in cmap.entries.values())


def test_expand_plancherel_and_reconstruction(rng):
    ax = grid.build_axis(6)
    for _ in range(20):
        sys = dyadic.sample_system(ax, seed=int(rng.integers(1 << 30)))
        f = grid.grid_function(rng.standard_normal(64), ax)
        cmap = haar.haar_expand(f, sys)
        assert abs(cmap.energy() - grid.l2_norm(f) ** 2) < 1e-12
        assert np.max(np.abs(cmap.reconstruct().values - f.values)) < 1e-12


def test_expand_system_mismatch():
    sys = offset0(4)
    f = grid.constant_function(1.0, grid.build_axis(5))
    with pytest.raises(errors.SystemMismatchError):
        haar.haar_expand(f, sys)


def test_expand_axis_count_mismatch():
    ax = grid.build_axis(3)
    f2 = grid.constant_function(1.0, ax, ax)
    with pytest.raises(errors.ShapeError):
        haar.haar_expand(f2, offset0(3))
    f1 = grid.constant_function(1.0, ax)
    with pytest.raises(errors.ShapeError):
        haar.haar_expand(f1, offset0(3), offset0(3))


@settings(deadline=None, max_examples=40)
@given(
    off=st.integers(0, 15),
    vals=st.lists(
        st.floats(-1e6, 1e6, allow_nan=False), min_size=16, max_size=16
    ),
)
def test_expand_roundtrip_property(off, vals):
    ax = grid.build_axis(4)
    sys = dyadic.DyadicSystem(ax, off)
    f = grid.grid_function(vals, ax)
    back = haar.haar_expand(f, sys).reconstruct()
    scale = max(1.0, float(np.max(np.abs(f.values))))
    assert np.max(np.abs(back.values - f.values)) < 1e-12 * scale


# ---------------------------------------------------------------------------
# expansion: two parameters


def test_bi_expand_tensor_step():
    sys1 = dyadic.DyadicSystem(grid.build_axis(4), 3)
    sys2 = dyadic.DyadicSystem(grid.build_axis(3), 5)
    I = sys1.cube(1, 1)
    J = sys2.cube(2, 0)
    f = grid.grid_function(
        np.outer(haar.haar_function(I).values, haar.haar_function(J).values),
        sys1.axis,
        sys2.axis,
    )
    cmap = haar.haar_expand(f, sys1, sys2)
    assert abs(cmap.entries[(I, J)] - 1.0) < 1e-14
    assert cmap.mean == 0.0
    rest = [v for key, v in cmap.entries.items() if key != (I, J)]
    assert np.max(np.abs(rest)) < 1e-13
    assert all(abs(v) < 1e-13 for v in cmap.axis_mean_entries[0].values())
    assert all(abs(v) < 1e-13 for v in cmap.axis_mean_entries[1].values())


def test_bi_expand_constant_in_first_axis(rng):
    sys1 = offset0(3)
    sys2 = dyadic.DyadicSystem(grid.build_axis(4), 9)
    g = rng.standard_normal(16)
    f = grid.grid_function(np.outer(np.ones(8), g), sys1.axis, sys2.axis)
    cmap = haar.haar_expand(f, sys1, sys2)
    # everything lives in the axis-1 mean entries (+ grand mean)
    assert np.max(np.abs(list(cmap.entries.values()))) < 1e-13
    assert np.max(np.abs(list(cmap.axis_mean_entries[1].values()))) < 1e-13
    energy = cmap.mean**2 + sum(v**2 for v in cmap.axis_mean_entries[0].values())
    assert abs(energy - grid.l2_norm(f) ** 2) < 1e-12


def test_bi_expand_plancherel_and_reconstruction(rng):
    ax1 = grid.build_axis(4)
    ax2 = grid.build_axis(3)
    for _ in range(5):
        sys1 = dyadic.sample_system(ax1, seed=int(rng.integers(1 << 30)))
        sys2 = dyadic.sample_system(ax2, seed=int(rng.integers(1 << 30)))
        f = grid.grid_function(rng.standard_normal((16, 8)), ax1, ax2)
        cmap = haar.haar_expand(f, sys1, sys2)
        assert abs(cmap.energy() - grid.l2_norm(f) ** 2) < 1e-12
        assert np.max(np.abs(cmap.reconstruct().values - f.values)) < 1e-12


# ---------------------------------------------------------------------------
# averaging projections


def test_average_project_constant():
    sys = offset0(4)
    I = sys.cube(2, 1)
    out = haar.average_project(grid.constant_function(1.0, sys.axis), I)
    assert np.array_equal(out.values, I.indicator().values)


def test_average_project_kills_own_haar():
    sys = dyadic.DyadicSystem(grid.build_axis(5), 3)
    I = sys.cube(2, 2)
    out = haar.average_project(haar.haar_function(I), I)
    assert np.max(np.abs(out.values)) == 0.0


def test_average_project_identity_on_half():
    ax = grid.build_axis(6)
    sys = offset0(6)
    f = grid.tabulate_midpoint(lambda x: x, ax)
    out = haar.average_project(f, sys.cube(1, 0))
    assert np.allclose(out.values[:32], 0.25)
    assert np.array_equal(out.values[32:], np.zeros(32))


def test_level_average_endpoints(rng):
    ax = grid.build_axis(4)
    sys = dyadic.DyadicSystem(ax, 13)
    f = grid.grid_function(rng.standard_normal(16), ax)
    assert np.array_equal(haar.level_average(f, sys, 4).values, f.values)
    glob = haar.level_average(f, sys, 0)
    assert np.allclose(glob.values, f.values.mean())


# ---------------------------------------------------------------------------
# martingale blocks


def test_block_depth0_matches_oracle(rng):
    ax = grid.build_axis(5)
    for _ in range(10):
        off = int(rng.integers(32))
        sys = dyadic.DyadicSystem(ax, off)
        f = grid.grid_function(rng.standard_normal(32), ax)
        k = int(rng.integers(4))
        m = int(rng.integers(1 << k))
        got = haar.martingale_block(f, sys.cube(k, m), 0)
        want = oracles.martingale_diff_brute(f.values, 32, k, m, off)
        assert np.max(np.abs(got.values - want)) < 1e-13


def test_block_telescoping(rng):
    ax = grid.build_axis(6)
    sys = dyadic.DyadicSystem(ax, 17)
    f = grid.grid_function(rng.standard_normal(64), ax)
    total = np.zeros(64)
    for k in range(6):
        total += haar.level_difference(f, sys, k).values
    assert np.max(np.abs(total + f.values.mean() - f.values)) < 1e-13


def test_block_depth1_child_scale_average_vanishes(rng):
    ax = grid.build_axis(5)
    sys = dyadic.DyadicSystem(ax, 21)
    f = grid.grid_function(rng.standard_normal(32), ax)
    K = sys.cube(1, 0)
    blk = haar.martingale_block(f, K, 1)
    proj = haar.level_average(blk, sys, K.level + 1)
    assert np.max(np.abs(proj.values)) < 1e-13


def test_block_consistency_with_descendant_sum(rng):
    ax = grid.build_axis(6)
    sys = dyadic.DyadicSystem(ax, 5)
    f = grid.grid_function(rng.standard_normal(64), ax)
    for k, i in [(0, 2), (1, 1), (2, 3), (3, 0)]:
        for m in range(1 << k):
            K = sys.cube(k, m)
            got = haar.martingale_block(f, K, i)
            acc = np.zeros(64)
            width = 1 << i
            for d in range(width):
                I = sys.cube(k + i, m * width + d)
                acc += haar.martingale_block(f, I, 0).values
            assert np.max(np.abs(got.values - acc)) < 1e-13


def test_block_depth_overflow():
    sys = offset0(4)
    f = grid.constant_function(1.0, sys.axis)
    with pytest.raises(errors.ResolutionError):
        haar.martingale_block(f, sys.cube(2, 0), 2)


# ---------------------------------------------------------------------------
# rectangle blocks and partial pairing


def _tensor(sys1, sys2, v1, v2):
    return grid.grid_function(np.outer(v1, v2), sys1.axis, sys2.axis)


def test_rect_block_reproduces_tensor_step():
    sys1 = offset0(4)
    sys2 = dyadic.DyadicSystem(grid.build_axis(3), 2)
    I = sys1.cube(2, 1)
    J = sys2.cube(1, 1)
    f = _tensor(sys1, sys2, haar.haar_function(I).values, haar.haar_function(J).values)
    out = haar.rect_block(f, I, J, 0, 0)
    assert np.max(np.abs(out.values - f.values)) < 1e-13


def test_rect_block_kills_constant_factor(rng):
    sys1 = offset0(3)
    sys2 = offset0(3)
    f = _tensor(sys1, sys2, np.ones(8), rng.standard_normal(8))
    out = haar.rect_block(f, sys1.cube(1, 0), sys2.cube(1, 0), 0, 0)
    assert np.max(np.abs(out.values)) < 1e-14


def test_rect_block_full_reconstruction(rng):
    # all rectangle blocks at depth (0, 0) plus the three mixed mean pieces
    ax1 = grid.build_axis(4)
    ax2 = grid.build_axis(4)
    sys1 = dyadic.DyadicSystem(ax1, 11)
    sys2 = dyadic.DyadicSystem(ax2, 6)
    f = grid.grid_function(rng.standard_normal((16, 16)), ax1, ax2)
    total = np.zeros((16, 16))
    for k1 in range(4):
        for m1 in range(1 << k1):
            for k2 in range(4):
                for m2 in range(1 << k2):
                    total += haar.rect_block(
                        f, sys1.cube(k1, m1), sys2.cube(k2, m2), 0, 0
                    ).values
    mean1 = haar.level_average(f, sys1, 0, axis_index=1)
    mean2 = haar.level_average(f, sys2, 0, axis_index=2)
    both = haar.level_average(mean1, sys2, 0, axis_index=2)
    total += mean1.values + mean2.values - both.values
    assert np.max(np.abs(total - f.values)) < 1e-12


def test_partial_pairing_tensor(rng):
    sys1 = dyadic.DyadicSystem(grid.build_axis(4), 9)
    sys2 = offset0(3)
    I = sys1.cube(1, 0)
    g = rng.standard_normal(8)
    f = _tensor(sys1, sys2, haar.haar_function(I).values, g)
    out = haar.partial_pairing(f, I, axis_index=1)
    assert out.axes == (sys2.axis,)
    assert np.max(np.abs(out.values - g)) < 1e-13


def test_partial_pairing_constant_factor(rng):
    sys1 = offset0(3)
    sys2 = offset0(3)
    f = _tensor(sys1, sys2, np.ones(8), rng.standard_normal(8))
    out = haar.partial_pairing(f, sys1.cube(1, 1), axis_index=1)
    assert np.max(np.abs(out.values)) < 1e-14


def test_partial_pairing_fubini(rng):
    sys1 = dyadic.DyadicSystem(grid.build_axis(4), 5)
    sys2 = dyadic.DyadicSystem(grid.build_axis(4), 12)
    f = grid.grid_function(rng.standard_normal((16, 16)), sys1.axis, sys2.axis)
    cmap = haar.haar_expand(f, sys1, sys2)
    I = sys1.cube(2, 3)
    J = sys2.cube(1, 0)
    once = haar.partial_pairing(f, I, axis_index=1)
    twice = grid.inner_product(once, haar.haar_function(J))
    assert abs(twice - cmap.entries[(I, J)]) < 1e-13


def test_partial_pairing_needs_two_axes():
    sys = offset0(3)
    f = grid.constant_function(1.0, sys.axis)
    with pytest.raises(errors.ShapeError):
        haar.partial_pairing(f, sys.cube(1, 0), axis_index=1)


def test_axis_index_validation(rng):
    sys = offset0(3)
    f2 = grid.grid_function(rng.standard_normal((8, 8)), sys.axis, sys.axis)
    with pytest.raises(errors.ShapeError):
        haar.martingale_block(f2, sys.cube(0, 0), 0)  # missing axis_index
    f1 = grid.constant_function(1.0, sys.axis)
    with pytest.raises(errors.ShapeError):
        haar.level_average(f1, sys, 1, axis_index=2)
    with pytest.raises(errors.ParameterError):
        haar.level_average(f1, sys, 1, axis_index=3)
