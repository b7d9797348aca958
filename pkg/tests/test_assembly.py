import math

import numpy as np
import pytest

from kansa_tps import linalg
from kansa_tps.assembly import (
    CollocationSet, InvalidSetError, RhsEvaluationError, RhsSpec, UnsupportedKernelError, assemble,
    assemble_rhs, extend_boundary, extend_interior,
)
from kansa_tps.kernel import TpsKernel
from kansa_tps.sampling import PointSampler, SeededGenerator
from kansa_tps.solver import sample_set


def det(km):
    return linalg.log_abs_det(linalg.lu_factor(km.data))


def test_one_interior_one_boundary(disk, k2):
    cset = CollocationSet.build(disk, [[0.0, 0.0]], [0.0])
    km = assemble(k2, disk, cset)
    assert km.data.tolist() == [[0.0, 8.0], [0.0, 0.0]]
    assert (km.n, km.m) == (1, 1)


def test_two_interior_unit_distance(disk, k2):
    cset = CollocationSet.build(disk, [[-0.5, 0.0], [0.5, 0.0]])
    km = assemble(k2, disk, cset)
    assert km.data.tolist() == [[0.0, 8.0], [8.0, 0.0]]
    d = det(km)
    assert d.sign == -1 and d.value == pytest.approx(-64.0, rel=1e-14)


def test_entry_layout(ellipse):
    k = TpsKernel(3)
    cset = sample_set(ellipse, 4, 3, SeededGenerator(2))
    km = assemble(k, ellipse, cset)
    P, Q = cset.interior, cset.boundary
    for i in range(4):
        for j in range(4):
            assert km.data[i, j] == k.lap_phi_pair(P[i], P[j])
        for h in range(3):
            assert km.data[i, 4 + h] == k.lap_phi_pair(P[i], Q[h])
    for h in range(3):
        for j in range(4):
            assert km.data[4 + h, j] == k.phi_pair(Q[h], P[j])
        for l in range(3):
            assert km.data[4 + h, 4 + l] == k.phi_pair(Q[h], Q[l])


@pytest.mark.parametrize("nu", [2, 3])
def test_zero_diagonal_and_symmetry(star3, nu):
    k = TpsKernel(nu)
    for seed in range(10):
        cset = sample_set(star3, 7, 6, SeededGenerator(seed))
        km = assemble(k, star3, cset)
        a, n = km.data, cset.n
        assert np.all(np.diag(a) == 0.0)
        # interior Laplacian block and boundary value block are symmetric
        assert np.array_equal(a[:n, :n], a[:n, :n].T)
        assert np.array_equal(a[n:, n:], a[n:, n:].T)
        # Laplacian of a boundary center at P_i equals Laplacian of phi_i at Q_h
        lap_iq = k.lap_phi(np.hypot(*(cset.boundary[None, :, :] - cset.interior[:, None, :]).transpose(2, 0, 1)))
        assert np.array_equal(a[:n, n:], lap_iq)
        assert np.all(np.isfinite(a))


def test_nu1_rejected(disk):
    cset = CollocationSet.build(disk, [[0.0, 0.0], [0.2, 0.1]])
    with pytest.raises(UnsupportedKernelError, match="nu >= 2"):
        assemble(TpsKernel(1), disk, cset)


def test_invalid_sets(disk, k2):
    with pytest.raises(InvalidSetError):
        assemble(k2, disk, CollocationSet.build(disk, [[0.1, 0.1], [0.1, 0.1]]))
    with pytest.raises(InvalidSetError):
        assemble(k2, disk, CollocationSet.build(disk, [[1.5, 0.0]], [0.0]))
    with pytest.raises(InvalidSetError):
        assemble(k2, disk, CollocationSet.build(disk, [], [1.0, 1.0]))


def test_rhs_examples(disk):
    cset = CollocationSet.build(disk, [[0.1, 0.2], [-0.3, 0.0]], [0.5])
    rhs = RhsSpec(lambda x, y: 4.0, lambda x, y: 0.0)
    assert assemble_rhs(rhs, cset).tolist() == [4.0, 4.0, 0.0]
    cset = CollocationSet.build(disk, [[0.1, 0.2]], [0.5, 1.5, 4.0])
    rhs = RhsSpec(lambda x, y: 0.0 * x, lambda x, y: x**2 + y**2)
    assert np.allclose(assemble_rhs(rhs, cset)[1:], 1.0, rtol=0, atol=1e-15)


def test_rhs_failures(disk):
    cset = CollocationSet.build(disk, [[0.1, 0.2]], [0.5])

    def boom(x, y):
        raise RuntimeError("nope")

    with pytest.raises(RhsEvaluationError):
        assemble_rhs(RhsSpec(boom, lambda x, y: 0.0), cset)
    with pytest.raises(RhsEvaluationError):
        assemble_rhs(RhsSpec(lambda x, y: np.nan, lambda x, y: 0.0), cset)


def grow(domain, kernel, seed, steps):
    gen = SeededGenerator(seed)
    sampler = PointSampler(domain, gen)
    cset = CollocationSet.build(domain)
    km = assemble(kernel, domain, cset)
    for _ in range(steps):
        if gen.uniform() < 0.5:
            km, cset = extend_interior(km, kernel, domain, cset, sampler.interior_point(cset.points))
        else:
            km, cset = extend_boundary(km, kernel, domain, cset, sampler.boundary_abscissa(cset.points))
        yield km, cset


@pytest.mark.parametrize("nu", [2, 3])
def test_extension_equals_fresh_assembly(ellipse, nu):
    k = TpsKernel(nu)
    for seed in range(100):
        for km, cset in grow(ellipse, k, seed, 12):
            fresh = assemble(k, ellipse, cset)
            assert np.array_equal(km.data, fresh.data)
            assert (km.n, km.m) == (fresh.n, fresh.m)


def test_extend_sizes(disk, k2):
    cset = CollocationSet.build(disk, [[0.1, 0.1]], [0.3])
    km = assemble(k2, disk, cset)
    km3, cset3 = extend_boundary(km, k2, disk, cset, 2.0)
    assert km3.data.shape == (3, 3) and (cset3.n, cset3.m) == (1, 2)
    km3, cset3 = extend_interior(km, k2, disk, cset, (0.0, -0.4))
    assert km3.data.shape == (3, 3) and (cset3.n, cset3.m) == (2, 1)


def test_boundary_pair_closed_form(disk, k2):
    cset = CollocationSet.build(disk, [], [0.4])
    km = assemble(k2, disk, cset)
    km2, cset2 = extend_boundary(km, k2, disk, cset, 2.9)
    r = math.hypot(*(cset2.boundary[1] - cset2.boundary[0]))
    assert det(km2).value == pytest.approx(-k2.phi(r) ** 2, rel=1e-12)


def test_mixed_pair_closed_form_via_interior_extension(disk, k2):
    cset = CollocationSet.build(disk, [], [1.1])
    km = assemble(k2, disk, cset)
    km2, cset2 = extend_interior(km, k2, disk, cset, (0.2, -0.3))
    r = math.hypot(*(cset2.boundary[0] - cset2.interior[0]))
    assert det(km2).value == pytest.approx(-k2.phi(r) * k2.lap_phi(r), rel=1e-12)


def test_interior_insertion_is_a_permutation(disk, k2):
    # appending the new interior row/column at the end instead of at position n
    # permutes one row and one column through m positions each: det unchanged
    cset = sample_set(disk, 5, 4, SeededGenerator(31))
    km = assemble(k2, disk, cset)
    p = (0.05, -0.61)
    km_ins, _ = extend_interior(km, k2, disk, cset, p)
    n = cset.n
    order = list(range(n)) + list(range(n + 1, n + 1 + cset.m)) + [n]
    moved = km_ins.data[np.ix_(order, order)]
    d_ins, d_moved = det(km_ins), linalg.log_abs_det(linalg.lu_factor(moved))
    assert d_ins.sign == d_moved.sign
    assert d_ins.logabs == pytest.approx(d_moved.logabs, rel=1e-12)
    # a row-only move flips the sign m times
    rows_only = km_ins.data[order]
    d_rows = linalg.log_abs_det(linalg.lu_factor(rows_only))
    assert d_rows.sign == d_ins.sign * (-1) ** cset.m


def test_swapping_interior_points_keeps_det(star3, k2):
    for seed in range(10):
        cset = sample_set(star3, 6, 5, SeededGenerator(seed))
        swapped = CollocationSet(cset.interior[[1, 0, 2, 3, 4, 5]], cset.abscissas, cset.boundary)
        d1, d2 = det(assemble(k2, star3, cset)), det(assemble(k2, star3, swapped))
        assert d1.sign == d2.sign
        assert d1.logabs == pytest.approx(d2.logabs, rel=1e-12, abs=1e-12)


def test_extend_guards(disk, k2):
    cset = CollocationSet.build(disk, [[0.1, 0.1]], [0.3])
    km = assemble(k2, disk, cset)
    with pytest.raises(InvalidSetError):
        extend_interior(km, k2, disk, cset, (0.1, 0.1))
    with pytest.raises(InvalidSetError):
        extend_boundary(km, k2, disk, cset, 0.3)
    with pytest.raises(InvalidSetError):
        extend_interior(km, k2, disk, cset, (3.0, 0.0))


def test_matrix_csv(tmp_path, disk, k2):
    km = assemble(k2, disk, sample_set(disk, 3, 2, SeededGenerator(1)))
    km.to_csv(tmp_path / "k.csv")
    back = np.loadtxt(tmp_path / "k.csv", delimiter=",")
    assert np.array_equal(back, km.data)
