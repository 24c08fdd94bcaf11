"""Parameter sweeps: achieved ratio ||b_1||^2 / lambda_1^2 against the proven
bound, oracle calls and wall time per (n, k or c, seed)."""

import csv
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, TextIO

from enumeration import DEFAULT_MAX_RANK, OracleBudget, lambda1
from generator import GenSpec, generate
from slide import SlideParams, run_approx_svp_large, run_approx_svp_small, slide_reduce_large, slide_reduce_small
from verifier import LatticeVerifier, approx_large_bounds, approx_small_bound, check_approx_ratio

logger = logging.getLogger(__name__)

CSV_HEADER = ['n', 'k', 'q', 'p', 'algorithm', 'delta', 'eps', 'ratio_sq_num', 'ratio_sq_den',
              'bound_ok', 'oracle_calls', 'ms']


@dataclass(frozen=True)
class BenchCase:
    n: int
    seed: int
    k: Optional[int] = None
    c: Optional[Fraction] = None
    family: str = 'uniform'
    bound: int = 10
    delta: Fraction = Fraction(1)
    eps: Fraction = Fraction(1, 10)
    tours: Optional[int] = None
    max_rank: int = DEFAULT_MAX_RANK

    def sort_key(self):
        return (self.n, self.k if self.k is not None else -1, self.seed, self.c or 0)


def run_case(case: BenchCase) -> Dict:
    B = generate(GenSpec(case.family, case.n, bound=case.bound, seed=case.seed))
    lam = lambda1(B, OracleBudget(case.max_rank))
    budget = OracleBudget(case.max_rank)
    start = time.perf_counter()
    row = {'n': case.n, 'delta': str(case.delta), 'eps': str(case.eps)}

    if case.c is not None:
        runner = run_approx_svp_small if case.c <= 1 else run_approx_svp_large
        result, report = runner(B, case.c, case.delta, case.eps, budget)
        norm_sq = result.norm_sq
        k = report.k
        if case.c <= 1:
            bounds = [approx_small_bound(case.n, k, case.delta, case.eps)] if report.q else []
        else:
            bounds = approx_large_bounds(case.n, k, case.delta, case.eps)
        # with no slide step the oracle answer is exact
        bound_ok = check_approx_ratio('approx_svp', norm_sq, lam, bounds).passed if bounds else norm_sq == lam
        row.update(k=k, q=report.q if report.q is not None else '', p=report.p if report.p is not None else '',
                   algorithm=report.algorithm)
    else:
        params = SlideParams(case.k, case.delta, case.eps, dbkz_tours=case.tours)
        if case.n - case.k <= case.k:
            algorithm = 'slide-small'
            B, _, report = slide_reduce_small(B, params, budget)
        else:
            algorithm = 'slide-large'
            B, _, report = slide_reduce_large(B, params, budget)
        norm_sq = Fraction(sum(x * x for x in B.columns[0]))
        verdict = LatticeVerifier.validate_all(B, algorithm, {'k': case.k, 'delta': case.delta, 'eps': case.eps,
                                                             'max_rank': case.max_rank})
        bound_ok = verdict['passed'] and report.accounting_ok()
        row.update(k=case.k, q=report.q, p=report.p if report.p is not None else '', algorithm=algorithm)

    ratio = Fraction(norm_sq) / lam
    row.update(ratio_sq_num=ratio.numerator, ratio_sq_den=ratio.denominator,
               bound_ok='true' if bound_ok else 'false', oracle_calls=budget.call_counter,
               ms=f"{(time.perf_counter() - start) * 1000:.1f}")
    logger.debug("bench n=%d k=%s seed=%d ratio=%s ok=%s", case.n, row['k'], case.seed, ratio, bound_ok)
    return row


def sweep_cases(n_values: Iterable[int], k_values: Iterable[int], c_values: Iterable[Fraction],
                seeds: int, **kwargs) -> List[BenchCase]:
    """Every (n, k) with n > k + 1 and every (n, c), for seeds 0..seeds-1"""
    cases = []
    for n in n_values:
        for seed in range(seeds):
            for k in k_values:
                if 2 <= k and n - k >= 2:
                    cases.append(BenchCase(n, seed, k=k, **kwargs))
            for c in c_values:
                cases.append(BenchCase(n, seed, c=Fraction(c), **kwargs))
    return cases


def bench_sweep(cases: List[BenchCase], workers: int = 1) -> List[Dict]:
    """Run all cases, in a process pool when workers > 1; rows come back
    ordered by (n, k, seed)"""
    cases = sorted(cases, key=BenchCase.sort_key)
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_case, cases))
    else:
        rows = [run_case(case) for case in cases]
    logger.info("Bench sweep finished: %d rows", len(rows))
    return rows


def write_csv(rows: List[Dict], out: TextIO = sys.stdout) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_HEADER, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
