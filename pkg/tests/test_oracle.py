import math

import numpy as np
import pytest

from isodrum.oracle import fd_dirichlet_lowest, grid_laplacian, isosceles_right_dirichlet, square_dirichlet


def test_square_list():
    vals = square_dirichlet(6) / math.pi**2
    assert np.allclose(vals, [2, 5, 5, 8, 10, 10])
    assert square_dirichlet(1, side=2.0)[0] == pytest.approx(math.pi**2 / 2)


def test_triangle_list():
    # antisymmetric square modes: m > n >= 1
    vals = isosceles_right_dirichlet(5) / math.pi**2
    assert np.allclose(vals, [5, 10, 13, 17, 20])


def test_fd_square_converges(unit_square):
    errs = [fd_dirichlet_lowest(unit_square, m)[0] - 2 * math.pi**2 for m in (8, 16, 32)]
    assert all(e < 0 for e in errs)  # 5-point stencil underestimates on the square
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert ratios == pytest.approx([4, 4], rel=0.02)


def test_fd_square_matches_closed_form(unit_square):
    # discrete eigenvalues are known exactly for the 5-point stencil
    m = 10
    h = 1 / m
    exact = sorted(
        4 / h**2 * (math.sin(a * math.pi * h / 2) ** 2 + math.sin(b * math.pi * h / 2) ** 2)
        for a in range(1, m)
        for b in range(1, m)
    )[:4]
    assert np.allclose(fd_dirichlet_lowest(unit_square, m, k=4), exact)


def test_grid_counts(unit_square, drums):
    assert grid_laplacian(unit_square, 4).matrix.shape == (9, 9)
    a = grid_laplacian(drums.first, 8).matrix.shape[0]
    b = grid_laplacian(drums.second, 8).matrix.shape[0]
    # both polygons are lattice polygons of equal area and boundary length
    assert a == b


def test_off_grid_rejected(drums):
    from isodrum.unfolding import unfold
    from conftest import SCALENE

    with pytest.raises(ValueError):
        grid_laplacian(unfold(drums.first.diagram, SCALENE), 4)
