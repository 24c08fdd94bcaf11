from fractions import Fraction

import pytest

from conftest import EPS, seeded_basis
from dbkz import (DbkzParams, TourTrace, dbkz_reduce, default_tour_count, dhsvp_reduce_block, hsvp_reduce_block,
                  is_dhsvp_target_met, is_hsvp_target_met)
from enumeration import OracleBudget, lll_reduce
from errors import ParameterDomainError
from lattice import Basis, BlockRange, PowerProduct, gso_compute, hermite_upper_bound
from verifier import check_dbkz_bound, is_dhsvp_reduced, is_hsvp_reduced

N = 6
K = 3


def calls_for(tours, n, k):
    return tours * (2 * n - 2 * k + 1) + 1


@pytest.mark.parametrize("tours", [1, 2, 3])
def test_call_count(tours):
    """
    Exactly N tours of 2n-2k+1 calls plus one final SVP call.
    """
    budget = OracleBudget()
    B = seeded_basis(N, 1)
    dbkz_reduce(B, DbkzParams(K, tours=tours), budget)
    assert budget.call_counter == calls_for(tours, N, K)


def test_volume_preserved():
    B = seeded_basis(N, 2)
    out = dbkz_reduce(B, DbkzParams(K, tours=2))
    assert out.gram_det() == B.gram_det()


def test_trace_records_every_tour():
    """
    One record before the first tour and one after each.
    """
    trace = TourTrace(K, N)
    dbkz_reduce(seeded_basis(N, 3), DbkzParams(K, tours=3), trace=trace)
    assert len(trace.records) == 4
    assert len(trace.reference()) == N - K
    assert all(d >= 0 for d in trace.deviations())


def test_default_tour_count_grows_with_n():
    B = seeded_basis(8, 0)
    small = default_tour_count(B, BlockRange(1, 6), 3, EPS)
    large = default_tour_count(B, BlockRange(1, 8), 3, EPS)
    assert 1 <= small < large


def test_default_tour_count_grows_as_eps_shrinks():
    B = seeded_basis(6, 0)
    assert default_tour_count(B, BlockRange(1, 6), 3, Fraction(1, 1000)) >= \
        default_tour_count(B, BlockRange(1, 6), 3, Fraction(1, 2))


@pytest.mark.parametrize("params,n", [
    (DbkzParams(1), 6),
    (DbkzParams(6), 6),
    (DbkzParams(3, eps=Fraction(0)), 6),
    (DbkzParams(3, delta=Fraction(1, 2)), 6),
    (DbkzParams(3, tours=0), 6),
])
def test_invalid_params(params, n):
    with pytest.raises(ParameterDomainError):
        params.validate(n, OracleBudget())


def test_block_size_above_budget():
    with pytest.raises(ParameterDomainError):
        DbkzParams(5).validate(8, OracleBudget(max_rank=4))


def test_dbkz_on_block_leaves_outside_alone():
    """
    Operations stay at the block's absolute positions.
    """
    B = lll_reduce(seeded_basis(7, 4))
    out = dbkz_reduce(B, DbkzParams(K, tours=1), r=BlockRange(2, 6))
    before = gso_compute(B).norms_sq
    after = gso_compute(out).norms_sq
    assert out.columns[0] == B.columns[0]
    assert after[6] == before[6]


@pytest.mark.slow
@pytest.mark.parametrize("n,k,seed", [(N, K, 0), (N, K, 1), (8, 4, 2)])
def test_default_tours_meet_hermite_bound(n, k, seed):
    """
    With the default tour count the first vector satisfies the DBKZ bound.
    """
    B = seeded_basis(n, seed)
    budget = OracleBudget()
    tours = default_tour_count(B, BlockRange(1, n), k, EPS)
    out = dbkz_reduce(B, DbkzParams(k, eps=EPS), budget)
    assert check_dbkz_bound(out, k, EPS).passed
    assert budget.call_counter == calls_for(tours, n, k)


@pytest.mark.slow
@pytest.mark.parametrize("n,k,seed", [(8 + s % 7, 3 + s % 3, 100 + s) for s in range(50)])
def test_dbkz_bound_sweep(n, k, seed):
    """
    n in [8, 14], k in [3, 5], two tours each.
    """
    B = seeded_basis(n, seed)
    budget = OracleBudget()
    out = dbkz_reduce(B, DbkzParams(k, eps=EPS, tours=2), budget)
    assert check_dbkz_bound(out, k, EPS).passed
    assert budget.call_counter == calls_for(2, n, k)
    assert out.gram_det() == B.gram_det()


def test_hsvp_target_already_met():
    """
    A loose target returns the input without any oracle call.
    """
    budget = OracleBudget()
    B = seeded_basis(N, 5)
    r = BlockRange(1, 5)
    out = hsvp_reduce_block(B, r, K, PowerProduct.of(1000), DbkzParams(K), budget)
    assert out == B
    assert budget.call_counter == 0


def test_dhsvp_target_already_met():
    budget = OracleBudget()
    B = seeded_basis(N, 5)
    out = dhsvp_reduce_block(B, BlockRange(2, 6), K, PowerProduct.of(1000), DbkzParams(K), budget)
    assert out == B
    assert budget.call_counter == 0


def test_rank_k_block_takes_one_call():
    """
    A block of rank k gets a single SVP (or DSVP) step.
    """
    B = Basis.from_columns([(7, 1, 0, 0), (1, 9, 2, 0), (0, 3, 11, 1), (1, 0, 2, 13)])
    tight = PowerProduct.of(1)
    budget = OracleBudget()
    hsvp_reduce_block(B, BlockRange(1, 3), K, tight, DbkzParams(K), budget)
    assert budget.call_counter <= 1
    budget = OracleBudget()
    dhsvp_reduce_block(B, BlockRange(2, 4), K, tight, DbkzParams(K), budget)
    assert budget.call_counter <= 1


@pytest.mark.parametrize("seed", range(3))
def test_hsvp_reaches_dbkz_target(seed):
    """
    Target (1+eps) gamma_k^((s-1)/(2(k-1))) is reached on a rank-5 block.
    """
    B = lll_reduce(seeded_basis(N, seed))
    r = BlockRange(1, 5)
    eta = PowerProduct.of(1 + EPS) * hermite_upper_bound(K).gamma_power(Fraction(4, 2 * (K - 1)))
    out = hsvp_reduce_block(B, r, K, eta, DbkzParams(K, eps=EPS))
    assert is_hsvp_target_met(out, r, eta)
    assert is_hsvp_reduced(out, r, eta).passed
    assert out.gram_det() == B.gram_det()


@pytest.mark.parametrize("seed", range(3))
def test_dhsvp_reaches_dbkz_target(seed):
    B = lll_reduce(seeded_basis(N, seed))
    r = BlockRange(2, 6)
    eta = PowerProduct.of(1 + EPS) * hermite_upper_bound(K).gamma_power(Fraction(4, 2 * (K - 1)))
    out = dhsvp_reduce_block(B, r, K, eta, DbkzParams(K, eps=EPS))
    assert is_dhsvp_target_met(out, r, eta)
    assert is_dhsvp_reduced(out, r, eta).passed
    assert out.columns[0] == B.columns[0]
