from fractions import Fraction

import pytest

from conftest import EPS, seeded_basis
from enumeration import OracleBudget, lambda1
from errors import ParameterDomainError
from lattice import Basis, PowerProduct, combine
import slide
from slide import (PotentialEvent, PotentialTrace, SlideParams, _max_decreases, approx_svp_large, approx_svp_small,
                   mordell_eta, run_approx_svp_large, run_approx_svp_small, slide_reduce_large, slide_reduce_small)
from verifier import (LatticeVerifier, approx_large_bounds, approx_small_bound, check_approx_ratio,
                      is_slide_reduced_large, is_slide_reduced_small, mordell_factor)

SLACK = PowerProduct.of(1 + EPS)


def params_dict(k):
    return {'k': k, 'delta': 1, 'eps': EPS}


@pytest.mark.parametrize("n,k", [(6, 4), (7, 4), (6, 3)])
def test_split_small(n, k):
    assert SlideParams(k).split_small(n) == n - k


@pytest.mark.parametrize("n,k", [(5, 4), (9, 4), (3, 1)])
def test_split_small_rejects(n, k):
    """
    q = n - k must lie in [2, k].
    """
    with pytest.raises(ParameterDomainError):
        SlideParams(k).split_small(n)


def test_split_large():
    assert SlideParams(3).split_large(8) == (2, 2)
    assert SlideParams(3).split_large(9) == (3, 0)
    with pytest.raises(ParameterDomainError):
        SlideParams(3).split_large(5)


@pytest.mark.parametrize("params", [SlideParams(3, delta=Fraction(1, 2)), SlideParams(3, eps=Fraction(0))])
def test_bad_slide_params(params):
    with pytest.raises(ParameterDomainError):
        params.split_small(6)


def test_block_size_above_max_rank():
    with pytest.raises(ParameterDomainError):
        slide_reduce_small(seeded_basis(6, 0), SlideParams(4), OracleBudget(max_rank=3))


def test_max_decreases():
    """
    Largest a with factor^a <= p0.
    """
    assert _max_decreases(100, Fraction(2)) == 6
    assert _max_decreases(1, Fraction(2)) == 0
    assert _max_decreases(121, Fraction(11, 10) ** 2) == 25


def test_mordell_eta_matches_checker():
    eta = mordell_eta(4, 2, Fraction(11, 10))
    other = mordell_factor(4, 2, Fraction(11, 10))
    assert eta.le(other) and other.le(eta)


def test_potential_trace_lines():
    trace = PotentialTrace([50, 40], [PotentialEvent(1, 'dsvp[2,4]', 50, 40)])
    assert trace.is_non_increasing()
    assert trace.to_lines() == ['potential[0]=50', 'potential[1]=40',
                                'potential_event pass=1 step=dsvp[2,4] before=50 after=40']
    assert not PotentialTrace([3, 4]).is_non_increasing()


@pytest.mark.parametrize("n,k,seed", [(6, 4, 0), (7, 4, 1), (6, 3, 2), (8, 4, 3)])
def test_slide_small_output(n, k, seed):
    """
    Output is (1+eps)-slide-reduced, volume-preserving, within its call ceiling.
    """
    B = seeded_basis(n, seed)
    budget = OracleBudget()
    out, trace, report = slide_reduce_small(B, SlideParams(k, eps=EPS), budget)
    assert out.gram_det() == B.gram_det()
    assert is_slide_reduced_small(out, k, SLACK).passed
    assert trace.is_non_increasing()
    assert report.accounting_ok()
    assert report.oracle_calls == budget.call_counter
    assert report.q == n - k
    assert LatticeVerifier.validate_all(out, 'slide-small', params_dict(k))['passed']


def test_slide_small_on_reduced_input_is_one_pass():
    """
    A second run on slide-reduced output stops after a single pass.
    """
    params = SlideParams(3, eps=EPS)
    out, _, _ = slide_reduce_small(seeded_basis(6, 4), params)
    again, trace, report = slide_reduce_small(out, params)
    assert report.passes == 1
    assert len(trace.values) == 2
    assert trace.values[0] == trace.values[1]


def test_slide_small_max_passes():
    B = seeded_basis(7, 5, bound=50)
    _, _, report = slide_reduce_small(B, SlideParams(4, eps=EPS, max_passes=1))
    assert report.passes == 1


@pytest.mark.parametrize("n,k,seed", [(6, 3, 0), (7, 3, 1), (8, 3, 2), (8, 2, 3)])
def test_slide_large_output(n, k, seed):
    B = seeded_basis(n, seed)
    budget = OracleBudget()
    out, trace, report = slide_reduce_large(B, SlideParams(k, eps=EPS), budget)
    assert out.gram_det() == B.gram_det()
    assert is_slide_reduced_large(out, k, SLACK).passed
    assert trace.is_non_increasing()
    assert report.accounting_ok()
    assert report.p == n // k
    assert report.dbkz_calls <= report.dbkz_ceiling


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(3))
def test_slide_large_verifier_family(seed):
    B = seeded_basis(9, seed)
    out, _, _ = slide_reduce_large(B, SlideParams(3, eps=EPS))
    verdict = LatticeVerifier.validate_all(out, 'slide-large', params_dict(3))
    assert verdict['passed'], [r.to_line() for r in verdict['results']]


@pytest.mark.parametrize("n,seed", [(6, 0), (7, 1), (8, 2)])
def test_approx_svp_small(n, seed):
    """
    c = 1: the returned vector is within the proven factor of lambda_1.
    """
    B = seeded_basis(n, seed)
    res, report = run_approx_svp_small(B, Fraction(1), eps=EPS)
    assert combine(res.coeffs, B.columns) == res.vector
    assert res.norm_sq == sum(x * x for x in res.vector)
    assert report.algorithm == 'approx-svp-small'
    bound = approx_small_bound(n, report.k, 1, EPS)
    assert check_approx_ratio('approx', res.norm_sq, lambda1(B), [bound]).passed


def test_approx_svp_small_falls_back_to_oracle():
    """
    n = 3, c = 1 leaves no room to slide; the answer is exact.
    """
    B = Basis.from_columns([(3, 1, 0), (1, 4, 1), (0, 2, 5)])
    res, report = run_approx_svp_small(B, Fraction(1))
    assert report.extra['fallback'] == 'direct'
    assert res.norm_sq == lambda1(B)
    assert approx_svp_small(B, Fraction(1)) == res


@pytest.mark.parametrize("c", [Fraction(1, 2), Fraction(2), Fraction(0)])
def test_approx_svp_small_rejects_c(c, skewed_pair):
    with pytest.raises(ParameterDomainError):
        approx_svp_small(skewed_pair, c)


@pytest.mark.parametrize("n,c,seed", [(8, Fraction(3), 0), (8, Fraction(1), 1), (9, Fraction(2), 2)])
def test_approx_svp_large(n, c, seed):
    B = seeded_basis(n, seed)
    res, report = run_approx_svp_large(B, c, eps=EPS)
    assert combine(res.coeffs, B.columns) == res.vector
    assert report.extra['picked'] in ('b1', 'inner')
    bounds = approx_large_bounds(n, report.k, 1, EPS)
    assert check_approx_ratio('approx', res.norm_sq, lambda1(B), bounds).passed


def test_approx_svp_large_rejects():
    with pytest.raises(ParameterDomainError):
        approx_svp_large(seeded_basis(8, 0), Fraction(1, 2))
    with pytest.raises(ParameterDomainError):
        approx_svp_large(seeded_basis(5, 0), Fraction(3))


def small_regime_cases(count=50):
    """n in [6, 12] with k chosen so that 2 <= q <= k"""
    cases = []
    for s in range(count):
        n = 6 + s % 7
        ks = list(range((n + 1) // 2, n - 1))
        cases.append((n, ks[(s // 7) % len(ks)], 200 + s))
    return cases


def large_regime_cases(count=50):
    """n in [8, 15] with k in [3, 5] and p in {2, 3}"""
    cases = []
    for s in range(count):
        n = 8 + s % 8
        ks = [k for k in (3, 4, 5) if n // k in (2, 3)]
        cases.append((n, ks[(s // 8) % len(ks)], 300 + s))
    return cases


@pytest.mark.slow
@pytest.mark.parametrize("n,k,seed", small_regime_cases())
def test_slide_small_sweep(n, k, seed):
    """
    Slide predicate, twin and gluing facts, and the n <= 2k bound on every run.
    """
    B = seeded_basis(n, seed)
    budget = OracleBudget()
    out, trace, report = slide_reduce_small(B, SlideParams(k, eps=EPS), budget)
    assert out.gram_det() == B.gram_det()
    assert is_slide_reduced_small(out, k, SLACK).passed
    verdict = LatticeVerifier.validate_all(out, 'slide-small', params_dict(k))
    assert verdict['passed'], [r.to_line() for r in verdict['results']]
    assert trace.is_non_increasing()
    for event in trace.events:
        assert Fraction(event.before) >= (1 + EPS) ** 2 * event.after
    assert report.oracle_calls <= report.call_ceiling


@pytest.mark.parametrize("n,k,seed", small_regime_cases(6))
def test_accepted_dual_steps_shrink_potential(n, k, seed):
    """
    Each accepted dual step lowers vol(B_[1,q])^2 by at least (1+eps)^2.
    """
    _, trace, report = slide_reduce_small(seeded_basis(n, seed, bound=100), SlideParams(k, eps=EPS))
    assert len(trace.events) == report.dual_updates
    for event in trace.events:
        assert Fraction(event.before) >= (1 + EPS) ** 2 * event.after
    assert trace.values[-1] * (1 + EPS) ** (2 * report.dual_updates) <= trace.values[0]
    assert report.oracle_calls <= report.call_ceiling
    assert report.accounting_ok()


@pytest.mark.slow
@pytest.mark.parametrize("n,k,seed", large_regime_cases())
def test_slide_large_sweep(n, k, seed):
    """
    Slide predicate, Mordell twin facts, gluing, the n >= 2k bounds and the
    tail GSO decay on every run.
    """
    B = seeded_basis(n, seed)
    budget = OracleBudget()
    out, trace, report = slide_reduce_large(B, SlideParams(k, eps=EPS), budget)
    assert out.gram_det() == B.gram_det()
    assert report.p in (2, 3)
    assert is_slide_reduced_large(out, k, SLACK).passed
    verdict = LatticeVerifier.validate_all(out, 'slide-large', params_dict(k))
    assert verdict['passed'], [r.to_line() for r in verdict['results']]
    assert trace.is_non_increasing()
    for event in trace.events:
        if event.step.startswith('dsvp'):
            assert Fraction(event.before) >= (1 + EPS) ** 2 * event.after
    assert report.accounting_ok()
    assert report.dbkz_calls <= report.dbkz_ceiling


def test_slide_large_reports_missed_targets(monkeypatch):
    """
    A Mordell step that leaves its target unmet shows up in the report.
    """
    monkeypatch.setattr(slide, 'hsvp_reduce_block', lambda B, *args: B)
    monkeypatch.setattr(slide, 'is_hsvp_target_met', lambda *args: False)
    _, _, report = slide_reduce_large(seeded_basis(8, 6), SlideParams(3, eps=EPS, max_passes=5))
    assert int(report.extra['target_misses']) >= report.passes
    assert f"target_misses={report.extra['target_misses']}" in report.to_lines()


def test_slide_large_without_misses_has_no_entry():
    _, _, report = slide_reduce_large(Basis.identity(8), SlideParams(3, eps=EPS))
    assert 'target_misses' not in report.extra


@pytest.mark.slow
@pytest.mark.parametrize("n,c", [(n, c) for n in range(8, 13) for c in (Fraction(3, 4), Fraction(1))])
def test_approx_svp_small_sweep(n, c):
    B = seeded_basis(n, 400 + n)
    res, report = run_approx_svp_small(B, c, eps=EPS)
    assert 'fallback' not in report.extra
    assert combine(res.coeffs, B.columns) == res.vector
    bound = approx_small_bound(n, report.k, 1, EPS)
    assert check_approx_ratio('approx', res.norm_sq, lambda1(B), [bound]).passed


@pytest.mark.slow
@pytest.mark.parametrize("n,c", [(n, c) for n in range(10, 16) for c in (Fraction(1), Fraction(2))])
def test_approx_svp_large_sweep(n, c):
    B = seeded_basis(n, 500 + n)
    res, report = run_approx_svp_large(B, c, eps=EPS)
    assert combine(res.coeffs, B.columns) == res.vector
    bounds = approx_large_bounds(n, report.k, 1, EPS)
    assert check_approx_ratio('approx', res.norm_sq, lambda1(B), bounds).passed
