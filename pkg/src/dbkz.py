"""Self-dual BKZ (DBKZ): tours of forward SVP steps and backward DSVP steps.

Used on its own and as the HSVP / dual-HSVP engine for the oversized first
block of slide reduction. Every operation is issued at absolute positions of
the basis, so any block [lo, hi] of a larger basis can be reduced in place.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from enumeration import OracleBudget, dsvp_reduce_block, svp_reduce_block
from errors import ParameterDomainError
from lattice import (Basis, BlockRange, PowerProduct, Scalar, block_volume_sq,
                     gso_compute, hermite_upper_bound, norm_sq)

logger = logging.getLogger(__name__)


@dataclass
class DbkzParams:
    k: int
    eps: Fraction = Fraction(1, 10)
    delta: Fraction = Fraction(1)
    tours: Optional[int] = None

    def validate(self, rank: int, budget: OracleBudget) -> None:
        if self.k < 2 or rank <= self.k:
            raise ParameterDomainError(f"DBKZ needs n > k >= 2, got n={rank}, k={self.k}")
        if self.k > budget.max_rank:
            raise ParameterDomainError(f"Block size {self.k} exceeds max_rank={budget.max_rank}")
        if not 0 < self.eps <= 1:
            raise ParameterDomainError(f"eps must lie in (0,1], got {self.eps}")
        if not 1 <= self.delta <= 2 ** self.k:
            raise ParameterDomainError(f"delta must lie in [1, 2^k], got {self.delta}")
        if self.tours is not None and self.tours < 1:
            raise ParameterDomainError(f"tours must be >= 1, got {self.tours}")


def _log2_upper(x: Fraction) -> int:
    """Integer upper bound on log2(x) for x > 0"""
    x = Fraction(x)
    return x.numerator.bit_length() - (x.denominator.bit_length() - 1)


def default_tour_count(B: Basis, r: BlockRange, k: int, eps: Scalar) -> int:
    """N >= ceil((2n^2/(k-1)^2) * log(n * log(5||B0||) / eps)).

    Logarithms are taken base 2 and bounded from above with bit lengths, so
    the result never undercuts the natural-log formula.
    """
    n = r.rank()
    max_sq = max(norm_sq(col) for col in B.columns[r.lo - 1:r.hi])
    inner = max(Fraction(_log2_upper(25 * Fraction(max_sq)), 2), Fraction(1))
    outer = max(_log2_upper(n * inner / Fraction(eps)), 1)
    return math.ceil(Fraction(2 * n * n, (k - 1) ** 2) * outer)


@dataclass
class TourTrace:
    """Per-tour diagnostic of log block volumes against their fixed point.

    x_i = log vol(B_[1,k+i-1]) - ((k+i-1)/n) log vol(L)
    y_i = ((n-k-i+1)(k+i-1)/(k-1)) log(delta sqrt(gamma_k))
    """

    k: int
    n: int
    delta: Fraction = Fraction(1)
    records: List[List[float]] = field(default_factory=list)

    def reference(self) -> List[float]:
        step = math.log(float(self.delta)) + 0.5 * math.log(hermite_upper_bound(self.k).to_float())
        return [(self.n - self.k - i + 1) * (self.k + i - 1) / (self.k - 1) * step
                for i in range(1, self.n - self.k + 1)]

    def record(self, B: Basis, r: BlockRange) -> None:
        gso = gso_compute(B).block(r)
        logs = [math.log(b.numerator) - math.log(b.denominator) for b in gso.norms_sq]
        total = sum(logs)
        xs = []
        for i in range(1, self.n - self.k + 1):
            d = self.k + i - 1
            xs.append(0.5 * sum(logs[:d]) - 0.5 * d / self.n * total)
        self.records.append(xs)

    def max_deviation(self, index: int = -1) -> float:
        ys = self.reference()
        return max(abs(x / y - 1) for x, y in zip(self.records[index], ys))

    def deviations(self) -> List[float]:
        return [self.max_deviation(i) for i in range(len(self.records))]


def _primal_tour(B: Basis, r: BlockRange, k: int, delta: Scalar, budget: OracleBudget,
                 skip_first: bool = False) -> Basis:
    for i in range(r.lo, r.hi - k + 1):
        if skip_first and i == r.lo:
            continue
        B = svp_reduce_block(B, BlockRange(i, i + k - 1), delta, budget)
    for j in range(r.hi - k + 1, r.lo - 1, -1):
        B = dsvp_reduce_block(B, BlockRange(j, j + k - 1), delta, budget)
    return B


def _dual_tour(B: Basis, r: BlockRange, k: int, delta: Scalar, budget: OracleBudget,
               skip_first: bool = False) -> Basis:
    for i in range(r.hi, r.lo + k - 1, -1):
        if skip_first and i == r.hi:
            continue
        B = dsvp_reduce_block(B, BlockRange(i - k + 1, i), delta, budget)
    for j in range(r.lo, r.hi - k + 2):
        B = svp_reduce_block(B, BlockRange(j, j + k - 1), delta, budget)
    return B


def dbkz_reduce(B: Basis, params: DbkzParams, budget: Optional[OracleBudget] = None,
                r: Optional[BlockRange] = None, trace: Optional[TourTrace] = None) -> Basis:
    """Run exactly N tours and a final SVP step: N*(2n-2k+1)+1 oracle calls"""
    budget = budget if budget is not None else OracleBudget()
    r = (r or BlockRange(1, B.n)).check(B.n)
    params.validate(r.rank(), budget)
    k = params.k
    tours = params.tours or default_tour_count(B, r, k, params.eps)
    logger.info("DBKZ on %s with k=%d, %d tours", r, k, tours)
    if trace is not None:
        trace.record(B, r)
    for _ in range(tours):
        B = _primal_tour(B, r, k, params.delta, budget)
        if trace is not None:
            trace.record(B, r)
    return svp_reduce_block(B, BlockRange(r.lo, r.lo + k - 1), params.delta, budget)


def is_hsvp_target_met(B: Basis, r: BlockRange, eta: PowerProduct) -> bool:
    """||b*_lo||^(2s) <= eta^(2s) vol(B_[r])^2"""
    gso = gso_compute(B)
    s = r.rank()
    lhs = PowerProduct.of(gso.norms_sq[r.lo - 1], s)
    rhs = eta ** (2 * s) * PowerProduct.of(block_volume_sq(gso, r))
    return lhs.le(rhs)


def is_dhsvp_target_met(B: Basis, r: BlockRange, eta: PowerProduct) -> bool:
    """vol(B_[r])^2 <= eta^(2s) ||b*_hi||^(2s)"""
    gso = gso_compute(B)
    s = r.rank()
    lhs = PowerProduct.of(block_volume_sq(gso, r))
    rhs = eta ** (2 * s) * PowerProduct.of(gso.norms_sq[r.hi - 1], s)
    return lhs.le(rhs)


def hsvp_reduce_block(B: Basis, r: BlockRange, k: int, eta_target: PowerProduct,
                      params: DbkzParams, budget: Optional[OracleBudget] = None) -> Basis:
    """eta_target-HSVP-reduce B_[r] with DBKZ tours.

    Stops after the first tour (plus its final SVP step) at which the target
    holds, and never runs more than N tours. A block of rank k is simply
    SVP-reduced.
    """
    budget = budget if budget is not None else OracleBudget()
    r.check(B.n)
    if is_hsvp_target_met(B, r, eta_target):
        return B
    first = BlockRange(r.lo, r.lo + k - 1)
    if r.rank() == k:
        return svp_reduce_block(B, first, params.delta, budget)
    params.validate(r.rank(), budget)
    tours = params.tours or default_tour_count(B, r, k, params.eps)
    for tour in range(tours):
        B = _primal_tour(B, r, k, params.delta, budget, skip_first=tour > 0)
        B = svp_reduce_block(B, first, params.delta, budget)
        if is_hsvp_target_met(B, r, eta_target):
            logger.debug("HSVP target on %s met after %d tours", r, tour + 1)
            break
    else:
        logger.warning("HSVP target on %s not met after %d tours", r, tours)
    return B


def dhsvp_reduce_block(B: Basis, r: BlockRange, k: int, eta_target: PowerProduct,
                       params: DbkzParams, budget: Optional[OracleBudget] = None) -> Basis:
    """eta_target-DHSVP-reduce B_[r]: DBKZ on the reversed dual of the block,
    issued as mirrored primal operations.
    """
    budget = budget if budget is not None else OracleBudget()
    r.check(B.n)
    if is_dhsvp_target_met(B, r, eta_target):
        return B
    last = BlockRange(r.hi - k + 1, r.hi)
    if r.rank() == k:
        return dsvp_reduce_block(B, last, params.delta, budget)
    params.validate(r.rank(), budget)
    tours = params.tours or default_tour_count(B, r, k, params.eps)
    for tour in range(tours):
        B = _dual_tour(B, r, k, params.delta, budget, skip_first=tour > 0)
        B = dsvp_reduce_block(B, last, params.delta, budget)
        if is_dhsvp_target_met(B, r, eta_target):
            logger.debug("DHSVP target on %s met after %d tours", r, tour + 1)
            break
    else:
        logger.warning("DHSVP target on %s not met after %d tours", r, tours)
    return B
