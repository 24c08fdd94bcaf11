#!/usr/bin/env python3
"""
Lattice reduction toolkit
Slide reduction (n <= 2k and n >= 2k), DBKZ, exact SVP oracle and checkers
"""

import argparse
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

sys.path.insert(0, str(Path(__file__).parent / 'src'))

from basis_io import BasisParser, dump_basis, dumps_basis
from bench import bench_sweep, sweep_cases, write_csv
from config import ALGORITHMS, RunConfig, load_config, parse_fraction
from dbkz import DbkzParams, TourTrace, dbkz_reduce, default_tour_count
from enumeration import OracleBudget, lambda1, lll_reduce
from errors import LatticeToolkitError, ParameterDomainError
from generator import FAMILIES, GenSpec, generate
from lattice import Basis, BlockRange, PowerProduct
from report import CheckRunner, ReductionReport
from slide import SlideParams, run_approx_svp_large, run_approx_svp_small, slide_reduce_large, slide_reduce_small
from verifier import LatticeVerifier, approx_large_bounds, approx_small_bound, check_approx_ratio

logger = logging.getLogger('lattice_toolkit')

EXIT_OK = 0
EXIT_CHECK_FAILED = 1


def status(message: str) -> None:
    """Human-facing progress line; stdout is reserved for the report"""
    print(message, file=sys.stderr)


class ReductionOrchestrator:
    """Loads a basis, runs one algorithm, verifies, writes basis and report"""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.budget = OracleBudget(cfg.max_rank)
        self.start_time = time.perf_counter()

    def load_basis(self) -> Basis:
        if not self.cfg.input_path:
            raise ParameterDomainError("No input basis given")
        status(f"📄 Loading basis from {self.cfg.input_path}")
        B = BasisParser(self.cfg.input_path).basis.validate()
        status(f"   ✓ rank {B.n}, dimension {B.m}")
        return B

    def reduce(self, B: Basis) -> Tuple[Basis, ReductionReport]:
        cfg = self.cfg
        cfg.validate(B.n)
        eps = cfg.eps if cfg.eps is not None else Fraction(1, 10)
        status(f"🔧 Reducing with {cfg.algorithm} (k={cfg.k}, delta={cfg.delta}, eps={eps})")
        if cfg.algorithm == 'lll':
            start = time.perf_counter()
            B = lll_reduce(B, cfg.lll_eps)
            report = ReductionReport('lll', B.n, eps=cfg.lll_eps, wall_ms=(time.perf_counter() - start) * 1000)
        elif cfg.algorithm == 'dbkz':
            start = time.perf_counter()
            trace = TourTrace(cfg.k, B.n, cfg.delta) if cfg.trace else None
            tours = cfg.tours or default_tour_count(B, BlockRange(1, B.n), cfg.k, eps)
            B = dbkz_reduce(B, DbkzParams(cfg.k, eps, cfg.delta, tours), self.budget, trace=trace)
            report = ReductionReport('dbkz', B.n, k=cfg.k, delta=cfg.delta, eps=eps,
                                     oracle_calls=self.budget.call_counter,
                                     call_ceiling=tours * (2 * B.n - 2 * cfg.k + 1) + 1, tour_trace=trace,
                                     wall_ms=(time.perf_counter() - start) * 1000)
            report.extra['tours'] = str(tours)
        elif cfg.algorithm == 'slide-small':
            B, _, report = slide_reduce_small(B, SlideParams(cfg.k, cfg.delta, eps), self.budget)
        elif cfg.algorithm == 'slide-large':
            B, _, report = slide_reduce_large(B, SlideParams(cfg.k, cfg.delta, eps, dbkz_tours=cfg.tours), self.budget)
        else:
            raise ParameterDomainError(f"Use the svp subcommand for '{cfg.algorithm}'")
        status(f"   ✓ {report.oracle_calls} oracle calls")
        return B, report

    def verify(self, B: Basis, algorithm: str, eps: Optional[Fraction]) -> List:
        params = {'k': self.cfg.k, 'delta': self.cfg.delta, 'eps': eps, 'max_rank': self.cfg.max_rank,
                  'lll_eps': self.cfg.lll_eps}
        verdict = LatticeVerifier.validate_all(B, algorithm, params)
        runner = CheckRunner()
        runner.run(verdict['results'])
        summary = runner.get_summary()
        status(f"Checks: {summary['passed']}/{summary['total']} passed ({summary['pass_rate']:.1f}%)")
        return verdict['results']

    def run(self) -> ReductionReport:
        """Load, reduce, optionally verify, write the reduced basis"""
        status("\n" + "=" * 70)
        status("🚀 Lattice reduction")
        status("=" * 70 + "\n")
        B = self.load_basis()
        B, report = self.reduce(B)
        if self.cfg.verify:
            eps = self.cfg.eps if self.cfg.eps is not None else Fraction(1, 10)
            report.checks = self.verify(B, self.cfg.algorithm, eps)
        if self.cfg.output_path:
            dump_basis(B, self.cfg.output_path)
            status(f"💾 Reduced basis written to {self.cfg.output_path}")
        status("\n" + "=" * 70)
        status("✅ DONE" if report.passed() else "❌ CHECKS FAILED")
        status(f"   Duration: {time.perf_counter() - self.start_time:.1f}s")
        status("=" * 70 + "\n")
        return report

    def svp(self) -> ReductionReport:
        cfg = self.cfg
        B = self.load_basis()
        if cfg.c is None:
            raise ParameterDomainError("svp needs --c")
        small = cfg.c <= 1
        status(f"🔧 Approximate SVP with c={cfg.c} ({'n <= 2k' if small else 'n >= 2k'} reduction)")
        runner = run_approx_svp_small if small else run_approx_svp_large
        result, report = runner(B, cfg.c, cfg.delta, cfg.eps, self.budget)
        report.extra['vector'] = " ".join(str(x) for x in result.vector)
        report.extra['coeffs'] = " ".join(str(x) for x in result.coeffs)
        report.extra['norm_sq'] = str(result.norm_sq)
        if cfg.verify:
            lam = lambda1(B, OracleBudget(cfg.max_rank))
            eps = report.eps
            if small and report.q:
                bounds = [approx_small_bound(B.n, report.k, cfg.delta, eps)]
            elif small:
                # answered by the oracle on the whole lattice
                bounds = [PowerProduct.of(1)]
            else:
                bounds = approx_large_bounds(B.n, report.k, cfg.delta, eps)
            report.extra['ratio_sq'] = str(result.norm_sq / lam)
            report.checks = CheckRunner().run([check_approx_ratio('approx_svp', result.norm_sq, lam, bounds)])
        return report

    def verify_only(self) -> ReductionReport:
        B = self.load_basis()
        self.cfg.validate(B.n)
        eps = self.cfg.eps if self.cfg.eps is not None else Fraction(1, 10)
        report = ReductionReport(self.cfg.algorithm, B.n, k=self.cfg.k, delta=self.cfg.delta, eps=eps)
        report.checks = self.verify(B, self.cfg.algorithm, eps)
        return report


def run(cfg: RunConfig) -> ReductionReport:
    return ReductionOrchestrator(cfg).run()


def _fraction(num: Optional[int], den: Optional[int]) -> Optional[Fraction]:
    if num is None and den is None:
        return None
    if den == 0:
        raise ParameterDomainError("Denominator must be nonzero")
    return Fraction(num if num is not None else 1, den if den is not None else 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Exact lattice basis reduction toolkit")
    parser.add_argument('--config', help="YAML configuration file")
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    sub = parser.add_subparsers(dest='command', required=True)

    def reduction_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument('--k', type=int)
        p.add_argument('--delta-num', type=int)
        p.add_argument('--delta-den', type=int)
        p.add_argument('--eps-num', type=int)
        p.add_argument('--eps-den', type=int)
        p.add_argument('--tours', type=int)
        p.add_argument('--max-rank', type=int)
        p.add_argument('--verify', action='store_true', default=None)
        p.add_argument('--report', dest='report_path', help="write the report here instead of stdout")
        p.add_argument('--no-timing', action='store_true', help="omit timing fields from the report")

    gen = sub.add_parser('gen', help="generate a seeded basis")
    gen.add_argument('--family', choices=FAMILIES)
    gen.add_argument('--n', type=int)
    gen.add_argument('--m', type=int)
    gen.add_argument('--bound', type=int)
    gen.add_argument('--seed', type=int)
    gen.add_argument('--diagonal', type=int, nargs='+')
    gen.add_argument('--output', dest='output_path')

    red = sub.add_parser('reduce', help="reduce a basis file")
    red.add_argument('input_path')
    red.add_argument('--algorithm', choices=[a for a in ALGORITHMS if a != 'approx-svp'])
    red.add_argument('--output', dest='output_path')
    red.add_argument('--trace', action='store_true', default=None)
    reduction_flags(red)

    svp = sub.add_parser('svp', help="approximate SVP through slide reduction")
    svp.add_argument('input_path')
    svp.add_argument('--c', dest='c_text', required=True, help="exponent c as 'num/den' or an integer")
    reduction_flags(svp)

    ver = sub.add_parser('verify', help="check an existing basis")
    ver.add_argument('input_path')
    ver.add_argument('--algorithm', choices=[a for a in ALGORITHMS if a != 'approx-svp'])
    reduction_flags(ver)

    bench = sub.add_parser('bench', help="parameter sweep to CSV")
    bench.add_argument('--n', dest='bench_n', type=int, nargs='+')
    bench.add_argument('--k', dest='bench_k', type=int, nargs='*')
    bench.add_argument('--c', dest='bench_c', nargs='*')
    bench.add_argument('--seeds', dest='bench_seeds', type=int)
    bench.add_argument('--workers', type=int)
    bench.add_argument('--family', choices=FAMILIES)
    bench.add_argument('--bound', type=int)
    bench.add_argument('--delta-num', type=int)
    bench.add_argument('--delta-den', type=int)
    bench.add_argument('--eps-num', type=int)
    bench.add_argument('--eps-den', type=int)
    bench.add_argument('--tours', type=int)
    bench.add_argument('--max-rank', type=int)
    bench.add_argument('--output', dest='output_path')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args)
    overrides = {key: values.get(key) for key in (
        'k', 'tours', 'max_rank', 'verify', 'trace', 'input_path', 'output_path', 'report_path',
        'family', 'n', 'm', 'bound', 'seed', 'algorithm', 'bench_n', 'bench_k', 'bench_seeds', 'workers')}
    overrides['delta'] = _fraction(values.get('delta_num'), values.get('delta_den'))
    overrides['eps'] = _fraction(values.get('eps_num'), values.get('eps_den'))
    if values.get('c_text') is not None:
        overrides['c'] = parse_fraction(values['c_text'], 'c')
    if values.get('bench_c') is not None:
        overrides['bench_c'] = [parse_fraction(c, 'c') for c in values['bench_c']]
    if values.get('log_level'):
        overrides['log_level'] = values['log_level']
    if args.command == 'svp':
        overrides['algorithm'] = 'approx-svp'
    return load_config(args.config, overrides).validate()


def _emit(report: ReductionReport, cfg: RunConfig, timing: bool) -> None:
    if cfg.report_path:
        with open(cfg.report_path, 'w') as f:
            report.write(f, timing=timing, trace=cfg.trace)
    else:
        report.write(sys.stdout, timing=timing, trace=cfg.trace)


def main(argv: Optional[List[str]] = None) -> int:
    """Main"""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        logging.basicConfig(level=getattr(logging, cfg.log_level, logging.WARNING),
                            format='%(asctime)s %(levelname)s %(name)s: %(message)s', stream=sys.stderr)

        if args.command == 'gen':
            diagonal = tuple(args.diagonal) if args.diagonal else None
            family = 'scrambled-diagonal' if diagonal and not args.family else cfg.family
            n = len(diagonal) if diagonal and args.n is None else cfg.n
            B = generate(GenSpec(family, n, cfg.m, cfg.bound, cfg.seed, diagonal))
            if cfg.output_path:
                dump_basis(B, cfg.output_path)
                status(f"✅ {family} basis (n={B.n}) written to {cfg.output_path}")
            else:
                sys.stdout.write(dumps_basis(B))
            return EXIT_OK

        if args.command == 'bench':
            eps = cfg.eps if cfg.eps is not None else Fraction(1, 10)
            cases = sweep_cases(cfg.bench_n, cfg.bench_k, cfg.bench_c, cfg.bench_seeds,
                                family=cfg.family, bound=cfg.bound, delta=cfg.delta, eps=eps,
                                tours=cfg.tours, max_rank=cfg.max_rank)
            status(f"📊 Running {len(cases)} bench cases on {cfg.workers} worker(s)")
            rows = bench_sweep(cases, cfg.workers)
            if cfg.output_path:
                with open(cfg.output_path, 'w', newline='') as f:
                    write_csv(rows, f)
            else:
                write_csv(rows)
            failed = sum(1 for r in rows if r['bound_ok'] != 'true')
            status(f"{'✅' if not failed else '❌'} {len(rows) - failed}/{len(rows)} rows within bound")
            return EXIT_CHECK_FAILED if failed else EXIT_OK

        orchestrator = ReductionOrchestrator(cfg)
        if args.command == 'reduce':
            report = orchestrator.run()
        elif args.command == 'svp':
            report = orchestrator.svp()
        else:
            report = orchestrator.verify_only()
        _emit(report, cfg, timing=not args.no_timing)
        return EXIT_OK if report.passed() else EXIT_CHECK_FAILED

    except LatticeToolkitError as e:
        status(f"\n❌ Error: {e}\n")
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
