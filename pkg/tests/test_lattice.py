from fractions import Fraction

import pytest

from errors import BlockRangeError, ParameterDomainError, RankDeficientError
from lattice import (Basis, BlockRange, PowerProduct, block_volume_sq, coordinates, gso_compute,
                     hermite_upper_bound, minkowski_bound, orthogonal_vectors, projected_block,
                     rational_reversed_dual, reversed_dual, size_reduce)


def test_identity_gso():
    """
    Identity basis has unit Gram-Schmidt norms and no projections.
    """
    gso = gso_compute(Basis.identity(4))
    assert gso.norms_sq == (1, 1, 1, 1)
    assert all(gso.mu[i][j] == 0 for i in range(4) for j in range(i))
    assert gso.gram_det() == 1


def test_gso_of_sheared_pair():
    """
    Columns (1,0), (1,1): mu_21 = 1 and both GSO norms are 1.
    """
    gso = gso_compute(Basis.from_columns([(1, 0), (1, 1)]))
    assert gso.mu[1][0] == 1
    assert gso.norms_sq == (1, 1)


def test_dependent_columns_rejected():
    """
    Linearly dependent columns raise RankDeficientError.
    """
    with pytest.raises(RankDeficientError):
        gso_compute(Basis.from_columns([(1, 2), (2, 4)]))


def test_ragged_columns_rejected():
    with pytest.raises(ParameterDomainError):
        Basis.from_columns([(1, 2), (1, 2, 3)])


def test_too_many_columns_rejected():
    with pytest.raises(RankDeficientError):
        Basis.from_columns([(1, 0), (0, 1), (1, 1)])


@pytest.mark.parametrize("lo,hi", [(0, 2), (2, 5), (3, 2)])
def test_block_range_outside_basis(lo, hi):
    """
    Block ranges must satisfy 1 <= lo <= hi <= n.
    """
    with pytest.raises(BlockRangeError):
        BlockRange(lo, hi).check(3)


def test_size_reduce_sheared_pair():
    """
    Size reduction turns (1,0), (1,1) into the identity.
    """
    B = size_reduce(Basis.from_columns([(1, 0), (1, 1)]))
    assert B.columns == ((1, 0), (0, 1))


def test_size_reduce_keeps_earlier_columns():
    B = Basis.from_columns([(1, 0, 0), (5, 1, 0), (7, 3, 1)])
    out = size_reduce(B, start=3)
    assert out.columns[:2] == B.columns[:2]
    gso = gso_compute(out)
    assert all(abs(gso.mu[2][j]) <= Fraction(1, 2) for j in range(2))


def test_block_volume_of_diagonal():
    """
    vol(B)^2 of diag(3,1) is 9 and equals the Gram determinant.
    """
    B = Basis.from_columns([(3, 0), (0, 1)])
    assert block_volume_sq(B, BlockRange(1, 2)) == 9
    assert B.gram_det() == 9
    assert block_volume_sq(B, BlockRange(2, 2)) == 1


def test_projected_block():
    """
    Projecting (1,1) orthogonally to (1,0) leaves (0,1).
    """
    B = Basis.from_columns([(1, 0), (1, 1)])
    assert projected_block(B, BlockRange(2, 2)) == [(0, 1)]
    assert projected_block(B, BlockRange(1, 2)) == [(1, 0), (1, 1)]


def test_orthogonal_vectors_are_orthogonal():
    B = Basis.from_columns([(2, 1, 0), (1, 2, 1), (0, 1, 3)])
    star = orthogonal_vectors(B)
    for i in range(3):
        for j in range(i):
            assert sum(a * b for a, b in zip(star[i], star[j])) == 0


def test_reversed_dual_of_diagonal():
    """
    Reversed dual of diag(2,3) is ((0,1/3), (1/2,0)), scaled by 6.
    """
    dual = reversed_dual(Basis.from_columns([(2, 0), (0, 3)]))
    assert dual.scale == 6
    assert dual.columns == ((0, 2), (3, 0))


def test_reversed_dual_of_identity():
    dual = reversed_dual(Basis.identity(3))
    assert dual.scale == 1
    assert dual.columns == ((0, 0, 1), (0, 1, 0), (1, 0, 0))


def test_dual_involution(skewed_pair):
    """
    Taking the reversed dual twice gives back the basis.
    """
    twice = rational_reversed_dual(rational_reversed_dual(skewed_pair.columns))
    assert twice == [tuple(Fraction(x) for x in col) for col in skewed_pair.columns]


def test_reversed_dual_norms():
    """
    First reversed-dual vector has squared norm 1 / ||b*_n||^2.
    """
    B = Basis.from_columns([(2, 1, 0), (1, 2, 1), (0, 1, 3)])
    dual = rational_reversed_dual(B.columns)
    assert sum(x * x for x in dual[0]) == 1 / gso_compute(B).norms_sq[-1]


def test_coordinates(skewed_pair):
    assert coordinates(skewed_pair, (1, -1)) == (1, -1)
    with pytest.raises(ParameterDomainError):
        coordinates(skewed_pair, (1, 0))


def test_coordinates_reject_rational_target():
    with pytest.raises(ParameterDomainError):
        coordinates(Basis.identity(2), (Fraction(1, 2), 0))


def test_reversed_dual_of_rational_block():
    """
    Projected blocks carry Fraction entries; the dual stays exact.
    """
    dual = rational_reversed_dual([(Fraction(1, 2), 0), (0, Fraction(1, 3))])
    assert dual == [(Fraction(0), Fraction(3)), (Fraction(2), Fraction(0))]


def test_reversed_dual_rejects_dependent_vectors():
    with pytest.raises(RankDeficientError):
        rational_reversed_dual([(1, 2), (2, 4)])


@pytest.mark.parametrize("k,gamma_sq", [
    (1, Fraction(1)),
    (2, Fraction(4, 3)),
    (4, Fraction(2)),
    (8, Fraction(4)),
    (24, Fraction(16)),
])
def test_exact_hermite_constants(k, gamma_sq):
    """
    gamma_k^2 for ranks with integral squares.
    """
    bound = hermite_upper_bound(k)
    assert bound.exact
    assert bound.gamma_power(2).raised(bound.root) == gamma_sq ** bound.root


def test_gamma_3_cubed():
    """
    gamma_3^3 = 2.
    """
    assert hermite_upper_bound(3).gamma_power(3).raised(2) == 4


@pytest.mark.parametrize("k", range(2, 9))
def test_minkowski_bound_dominates_exact(k):
    """
    Minkowski's bound is never below the exact constant.
    """
    assert hermite_upper_bound(k).exact
    assert hermite_upper_bound(k).gamma().le(minkowski_bound(k).gamma())


def test_hermite_beyond_table_uses_minkowski():
    bound = hermite_upper_bound(12)
    assert not bound.exact
    assert 1 < bound.to_float() < 12


def test_power_product_comparisons():
    """
    sqrt(2) < sqrt(3), and sqrt(2)*sqrt(2) == 2 both ways.
    """
    assert PowerProduct.of(2, Fraction(1, 2)).lt(PowerProduct.of(3, Fraction(1, 2)))
    two = PowerProduct.of(2, Fraction(1, 2)) * PowerProduct.of(2, Fraction(1, 2))
    assert two.le(PowerProduct.of(2)) and PowerProduct.of(2).le(two)
    assert not two.lt(PowerProduct.of(2))
    assert PowerProduct.of(9, Fraction(1, 3)).inverse().lt(PowerProduct.of(1))


def test_power_product_rejects_nonpositive_base():
    with pytest.raises(ParameterDomainError):
        PowerProduct.of(0)
