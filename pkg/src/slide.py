"""Slide reduction for k < n <= 2k and for n >= 2k, and the two approximate-SVP
reductions built on top of them.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from dbkz import (DbkzParams, dhsvp_reduce_block, hsvp_reduce_block,
                  is_dhsvp_target_met, is_hsvp_target_met)
from enumeration import (OracleBudget, ShortestVectorResult, dsvp_reduce_block,
                         enumerate_shortest, svp_reduce_block)
from errors import ParameterDomainError
from lattice import (Basis, BlockRange, PowerProduct, block_volume_sq, combine,
                     coordinates, gso_compute, hermite_upper_bound, size_reduce)
from report import ReductionReport

logger = logging.getLogger(__name__)


@dataclass
class SlideParams:
    k: int
    delta: Fraction = Fraction(1)
    eps: Fraction = Fraction(1, 10)
    dbkz_tours: Optional[int] = None
    max_passes: Optional[int] = None

    def split_small(self, n: int) -> int:
        """q with n = k + q, 2 <= q <= k"""
        self._check_common()
        q = n - self.k
        if not 2 <= q <= self.k:
            raise ParameterDomainError(f"Slide reduction for n <= 2k needs n = k+q with 2 <= q <= k "
                                       f"(n={n}, k={self.k})")
        return q

    def split_large(self, n: int) -> Tuple[int, int]:
        """(p, q) with n = pk + q, p >= 2, 0 <= q < k"""
        self._check_common()
        p, q = divmod(n, self.k)
        if p < 2:
            raise ParameterDomainError(f"Slide reduction for n >= 2k needs p >= 2 (n={n}, k={self.k})")
        return p, q

    def _check_common(self) -> None:
        if self.k < 2:
            raise ParameterDomainError(f"Block size must be >= 2, got {self.k}")
        if self.delta < 1:
            raise ParameterDomainError(f"delta must be >= 1, got {self.delta}")
        if self.eps <= 0:
            raise ParameterDomainError(f"eps must be > 0, got {self.eps}")


@dataclass
class PotentialEvent:
    pass_index: int
    step: str
    before: int
    after: int


@dataclass
class PotentialTrace:
    """Integer potential sampled at the start and after every pass, plus the
    steps that changed it"""

    values: List[int] = field(default_factory=list)
    events: List[PotentialEvent] = field(default_factory=list)

    def is_non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.values, self.values[1:]))

    def to_lines(self) -> List[str]:
        lines = [f"potential[{i}]={v}" for i, v in enumerate(self.values)]
        lines += [f"potential_event pass={e.pass_index} step={e.step} before={e.before} after={e.after}"
                  for e in self.events]
        return lines


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ParameterDomainError(f"Potential {x} is not an integer; input basis must be integral")
    return x.numerator


def _max_decreases(p0: int, factor: Fraction) -> int:
    """Largest a with factor^a <= p0"""
    a, acc = 0, Fraction(1)
    while acc * factor <= p0:
        acc *= factor
        a += 1
    return a


def mordell_eta(k: int, q: int, delta: Fraction) -> PowerProduct:
    """eta = (delta^2 gamma_k)^((k+q-1)/(2(k-1)))"""
    e = Fraction(k + q - 1, 2 * (k - 1))
    return PowerProduct.of(delta, 2 * e) * hermite_upper_bound(k).gamma_power(e)


def small_regime_factor(n: int, k: int, delta: Fraction, eps: Fraction) -> PowerProduct:
    """Bound on ||v|| / lambda_1 for the vector returned after slide reduction
    with n <= 2k: delta * (1+eps)delta sqrt(gamma_k) ((1+eps)^2 delta^2 gamma_q)^e"""
    q = n - k
    e = Fraction(q + 1, q - 1) * Fraction(n - k, 2 * k)
    d = PowerProduct.of((1 + eps) * delta)
    return (PowerProduct.of(delta) * d * hermite_upper_bound(k).gamma_power(Fraction(1, 2))
            * d ** (2 * e) * hermite_upper_bound(q).gamma_power(e))


def large_regime_factors(n: int, k: int, delta: Fraction, eps: Fraction) -> Tuple[PowerProduct, PowerProduct]:
    """Both branches of the n >= 2k case analysis.

    (A) the rank-2k corollary bound, used when lambda_1(B_[1,k+q]) = lambda_1(L);
    (B) (1+eps)delta ((1+eps)^2 delta^2 gamma_k)^((n-k)/(k-1)) otherwise.
    """
    branch_a = small_regime_factor(2 * k, k, delta, eps)
    e = Fraction(n - k, k - 1)
    d = PowerProduct.of((1 + eps) * delta)
    branch_b = d * d ** (2 * e) * hermite_upper_bound(k).gamma_power(e)
    return branch_a, branch_b


def slide_reduce_small(B: Basis, params: SlideParams, budget: Optional[OracleBudget] = None
                       ) -> Tuple[Basis, PotentialTrace, ReductionReport]:
    """Slide reduction for n = k + q, 2 <= q <= k.

    Output is ((1+eps)delta, k)-slide-reduced: B_[1,q] and B_[i,n] for
    i in [q+1, max(k, q+1)] SVP-reduced, B_[2,q+1] DSVP-reduced.
    """
    start = time.perf_counter()
    budget = budget if budget is not None else OracleBudget()
    n, k = B.n, params.k
    q = params.split_small(n)
    if k > budget.max_rank:
        raise ParameterDomainError(f"Block size {k} exceeds max_rank={budget.max_rank}")
    calls_before = budget.call_counter
    slack_sq = (1 + params.eps) ** 2
    first = BlockRange(1, q)
    dual_block = BlockRange(2, q + 1)
    trace = PotentialTrace([_as_int(block_volume_sq(B, first))])
    p0 = trace.values[0]
    passes = accepted = 0

    while True:
        passes += 1
        before = trace.values[-1]
        B = svp_reduce_block(B, first, params.delta, budget)
        for i in range(q + 1, max(k, q + 1) + 1):
            B = svp_reduce_block(B, BlockRange(i, n), params.delta, budget)
        C = dsvp_reduce_block(B, dual_block, params.delta, budget)
        b_sq = gso_compute(B).norms_sq[q]
        c_sq = gso_compute(C).norms_sq[q]
        if slack_sq * b_sq < c_sq:
            B = C
            accepted += 1
            after = _as_int(block_volume_sq(B, first))
            trace.events.append(PotentialEvent(passes, "dsvp" + str(dual_block), before, after))
            logger.debug("Pass %d: dual step accepted, P %d -> %d", passes, before, after)
        trace.values.append(_as_int(block_volume_sq(B, first)))
        if trace.values[-1] == before:
            break
        if params.max_passes and passes >= params.max_passes:
            logger.warning("Stopping after max_passes=%d with the potential still moving", passes)
            break
    logger.info("Slide reduction (n=%d, k=%d, q=%d) finished after %d passes", n, k, q, passes)

    per_pass = 2 + max(k, q + 1) - q
    max_updates = _max_decreases(p0, slack_sq)
    report = ReductionReport(
        algorithm='slide-small', n=n, k=k, q=q, delta=params.delta, eps=params.eps,
        oracle_calls=budget.call_counter - calls_before,
        direct_oracle_calls=budget.call_counter - calls_before,
        passes=passes, dual_updates=accepted,
        call_ceiling=(max_updates + 1) * per_pass,
        potential_ok=Fraction(p0, trace.values[-1]) >= slack_sq ** accepted,
        potential=trace,
        wall_ms=(time.perf_counter() - start) * 1000,
    )
    return B, trace, report


def _large_potential(B: Basis, k: int, p: int, q: int) -> Tuple[int, ...]:
    gso = gso_compute(B)
    return tuple(_as_int(block_volume_sq(gso, BlockRange(1, i * k + q))) for i in range(1, p))


def slide_reduce_large(B: Basis, params: SlideParams, budget: Optional[OracleBudget] = None
                       ) -> Tuple[Basis, PotentialTrace, ReductionReport]:
    """Slide reduction for n = pk + q, p >= 2, 0 <= q < k.

    Output is ((1+eps)delta, k)-slide-reduced: Mordell conditions on B_[1,k+q]
    and B_[2,k+q+1], SVP-reduced primal blocks, DSVP-reduced dual blocks.
    A Mordell block that still misses its target after the DBKZ tours is
    counted in ``report.extra['target_misses']``.
    """
    start = time.perf_counter()
    budget = budget if budget is not None else OracleBudget()
    n, k = B.n, params.k
    p, q = params.split_large(n)
    if k > budget.max_rank:
        raise ParameterDomainError(f"Block size {k} exceeds max_rank={budget.max_rank}")
    d = k + q
    one_eps = 1 + params.eps
    eta = mordell_eta(k, q, params.delta)
    primal_target = PowerProduct.of(one_eps) * eta
    dual_target = PowerProduct.of(one_eps, Fraction(1, 2)) * eta
    dbkz_params = DbkzParams(k, min(params.eps, Fraction(1)), params.delta, params.dbkz_tours)
    mordell = BlockRange(1, d)
    dual_mordell = BlockRange(2, d + 1)

    B = size_reduce(B)
    calls_before = budget.call_counter
    direct_calls = dbkz_calls = passes = updates = misses = 0
    vols = _large_potential(B, k, p, q)
    trace = PotentialTrace([math.prod(vols)])
    p0 = trace.values[0]

    while True:
        passes += 1
        before_vols = vols
        if not is_hsvp_target_met(B, mordell, primal_target):
            dbkz_calls += 1
            B = hsvp_reduce_block(B, mordell, k, primal_target, dbkz_params, budget)
            if not is_hsvp_target_met(B, mordell, primal_target):
                misses += 1
        for i in range(1, p):
            B = svp_reduce_block(B, BlockRange(i * k + q + 1, (i + 1) * k + q), params.delta, budget)
            direct_calls += 1
        if not is_dhsvp_target_met(B, dual_mordell, primal_target):
            dbkz_calls += 1
            pot = math.prod(_large_potential(B, k, p, q))
            B = dhsvp_reduce_block(B, dual_mordell, k, dual_target, dbkz_params, budget)
            if not is_dhsvp_target_met(B, dual_mordell, dual_target):
                misses += 1
            new_pot = math.prod(_large_potential(B, k, p, q))
            if new_pot != pot:
                updates += 1
                trace.events.append(PotentialEvent(passes, "dhsvp" + str(dual_mordell), pot, new_pot))
        for i in range(1, p - 1):
            r = BlockRange(i * k + q + 2, (i + 1) * k + q + 1)
            C = dsvp_reduce_block(B, r, params.delta, budget)
            direct_calls += 1
            b_sq = gso_compute(B).norms_sq[r.hi - 1]
            c_sq = gso_compute(C).norms_sq[r.hi - 1]
            if one_eps ** 2 * b_sq < c_sq:
                pot = math.prod(_large_potential(B, k, p, q))
                B = C
                updates += 1
                trace.events.append(PotentialEvent(passes, "dsvp" + str(r), pot,
                                                   math.prod(_large_potential(B, k, p, q))))
        vols = _large_potential(B, k, p, q)
        trace.values.append(math.prod(vols))
        if vols == before_vols:
            break
        if params.max_passes and passes >= params.max_passes:
            logger.warning("Stopping after max_passes=%d with the potential still moving", passes)
            break
    logger.info("Slide reduction (n=%d, k=%d, p=%d, q=%d) finished after %d passes", n, k, p, q, passes)

    max_updates = _max_decreases(p0, one_eps)
    per_pass = (p - 1) + (p - 2)
    report = ReductionReport(
        algorithm='slide-large', n=n, k=k, q=q, p=p, delta=params.delta, eps=params.eps,
        oracle_calls=budget.call_counter - calls_before,
        direct_oracle_calls=direct_calls, dbkz_calls=dbkz_calls,
        passes=passes, dual_updates=updates,
        call_ceiling=(max_updates + 1) * per_pass,
        dbkz_ceiling=2 * (max_updates + 1),
        potential_ok=Fraction(p0, trace.values[-1]) >= one_eps ** updates,
        potential=trace,
        wall_ms=(time.perf_counter() - start) * 1000,
    )
    if misses:
        report.extra['target_misses'] = str(misses)
    return B, trace, report


def _result_in(B_in: Basis, vector) -> ShortestVectorResult:
    vector = tuple(int(x) for x in vector)
    return ShortestVectorResult(coordinates(B_in, vector), Fraction(sum(x * x for x in vector)), vector)


def run_approx_svp_small(B: Basis, c: Fraction, delta: Fraction = Fraction(1),
                         eps: Optional[Fraction] = None, budget: Optional[OracleBudget] = None
                         ) -> Tuple[ShortestVectorResult, ReductionReport]:
    """Slide-reduce with k = ceil(n/(2c)), then one more oracle call on B_[1,k]"""
    start = time.perf_counter()
    c = Fraction(c)
    if not Fraction(1, 2) < c <= 1:
        raise ParameterDomainError(f"c must lie in (1/2, 1], got {c}")
    budget = budget if budget is not None else OracleBudget()
    n = B.n
    eps = Fraction(eps) if eps is not None else Fraction(1, n)
    k = math.ceil(n / (2 * c))
    if n - k == 1:
        k -= 1
    if k < 2 or n - k < 2:
        # Rank too small to slide; the oracle handles the whole lattice.
        calls_before = budget.call_counter
        res = enumerate_shortest(B, budget)
        report = ReductionReport(algorithm='approx-svp-small', n=n, k=n, delta=delta, eps=eps,
                                 oracle_calls=budget.call_counter - calls_before,
                                 wall_ms=(time.perf_counter() - start) * 1000)
        report.extra['fallback'] = 'direct'
        return _result_in(B, res.vector), report

    reduced, _, report = slide_reduce_small(B, SlideParams(k, delta, eps), budget)
    res = enumerate_shortest(reduced.columns[:k], budget)
    report.algorithm = 'approx-svp-small'
    report.oracle_calls += 1
    report.extra['bound_factor'] = f"{small_regime_factor(n, k, delta, eps).to_float():.6g}"
    report.wall_ms = (time.perf_counter() - start) * 1000
    return _result_in(B, combine(res.coeffs, reduced.columns[:k])), report


def approx_svp_small(B: Basis, c: Fraction, delta: Fraction = Fraction(1),
                     eps: Optional[Fraction] = None,
                     budget: Optional[OracleBudget] = None) -> ShortestVectorResult:
    return run_approx_svp_small(B, c, delta, eps, budget)[0]


def run_approx_svp_large(B: Basis, c: Fraction, delta: Fraction = Fraction(1),
                         eps: Optional[Fraction] = None, budget: Optional[OracleBudget] = None
                         ) -> Tuple[ShortestVectorResult, ReductionReport]:
    """Slide-reduce with k = floor(n/(c+1)), run the rank-2k reduction on
    B_[1,2k], and return the shorter of b_1 and the vector it finds"""
    start = time.perf_counter()
    c = Fraction(c)
    if c < 1:
        raise ParameterDomainError(f"c must be >= 1, got {c}")
    budget = budget if budget is not None else OracleBudget()
    n = B.n
    eps = Fraction(eps) if eps is not None else Fraction(1, n)
    k = math.floor(n / (c + 1))
    if k < 2:
        raise ParameterDomainError(f"k = floor(n/(c+1)) = {k} is below 2 for n={n}, c={c}")

    reduced, _, report = slide_reduce_large(B, SlideParams(k, delta, eps), budget)
    inner, inner_report = run_approx_svp_small(Basis(reduced.columns[:2 * k]), Fraction(1), delta, eps, budget)
    b1 = reduced.columns[0]
    b1_sq = sum(x * x for x in b1)
    chosen = b1 if b1_sq <= inner.norm_sq else inner.vector
    report.algorithm = 'approx-svp-large'
    report.oracle_calls += inner_report.oracle_calls
    branch_a, branch_b = large_regime_factors(n, k, delta, eps)
    report.extra['bound_factor_a'] = f"{branch_a.to_float():.6g}"
    report.extra['bound_factor_b'] = f"{branch_b.to_float():.6g}"
    report.extra['picked'] = 'b1' if chosen is b1 else 'inner'
    report.wall_ms = (time.perf_counter() - start) * 1000
    return _result_in(B, chosen), report


def approx_svp_large(B: Basis, c: Fraction, delta: Fraction = Fraction(1),
                     eps: Optional[Fraction] = None,
                     budget: Optional[OracleBudget] = None) -> ShortestVectorResult:
    return run_approx_svp_large(B, c, delta, eps, budget)[0]
