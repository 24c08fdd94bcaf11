"""Run reports and the PASS/FAIL/SKIP check runner."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, List, Optional, TextIO

if TYPE_CHECKING:
    from dbkz import TourTrace
    from slide import PotentialTrace
    from verifier import CheckResult


def _fmt(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, Fraction):
        return str(value)
    return str(value)


@dataclass
class ReductionReport:
    """Outcome of one reduction run, written as key=value lines followed by
    one PASS/FAIL/SKIP line per check"""

    algorithm: str
    n: int
    k: Optional[int] = None
    q: Optional[int] = None
    p: Optional[int] = None
    delta: Fraction = Fraction(1)
    eps: Optional[Fraction] = None
    oracle_calls: int = 0
    direct_oracle_calls: Optional[int] = None
    dbkz_calls: Optional[int] = None
    passes: Optional[int] = None
    dual_updates: Optional[int] = None
    call_ceiling: Optional[int] = None
    dbkz_ceiling: Optional[int] = None
    potential_ok: Optional[bool] = None
    potential: Optional[PotentialTrace] = None
    tour_trace: Optional[TourTrace] = None
    checks: List[CheckResult] = field(default_factory=list)
    extra: Dict[str, str] = field(default_factory=dict)
    wall_ms: float = 0.0

    def accounting_ok(self) -> bool:
        """Potential decrease and oracle-call ceiling both hold"""
        if self.potential_ok is False:
            return False
        if self.potential is not None and not self.potential.is_non_increasing():
            return False
        calls = self.direct_oracle_calls if self.direct_oracle_calls is not None else self.oracle_calls
        if self.call_ceiling is not None and calls > self.call_ceiling:
            return False
        if self.dbkz_ceiling is not None and self.dbkz_calls is not None and self.dbkz_calls > self.dbkz_ceiling:
            return False
        return True

    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.inapplicable)

    def get_summary(self) -> Dict:
        """Check summary: total/passed/failed/skipped/pass_rate"""
        applicable = [c for c in self.checks if not c.inapplicable]
        passed = sum(1 for c in applicable if c.passed)
        total = len(applicable)
        return {
            'total': total,
            'passed': passed,
            'failed': total - passed,
            'skipped': len(self.checks) - total,
            'pass_rate': (passed / total * 100) if total > 0 else 0,
        }

    def to_lines(self, timing: bool = True, trace: bool = False) -> List[str]:
        lines = []
        for key in ('algorithm', 'n', 'k', 'q', 'p', 'delta', 'eps', 'oracle_calls',
                    'direct_oracle_calls', 'dbkz_calls', 'passes', 'dual_updates',
                    'call_ceiling', 'dbkz_ceiling', 'potential_ok'):
            value = getattr(self, key)
            if value is not None:
                lines.append(f"{key}={_fmt(value)}")
        if self.call_ceiling is not None:
            lines.append(f"accounting_ok={_fmt(self.accounting_ok())}")
        for key in sorted(self.extra):
            lines.append(f"{key}={self.extra[key]}")
        if trace and self.potential is not None:
            lines += self.potential.to_lines()
        if trace and self.tour_trace is not None:
            for i, dev in enumerate(self.tour_trace.deviations()):
                lines.append(f"tour[{i}].max_deviation={dev:.6f}")
        if timing:
            lines.append(f"ms={self.wall_ms:.1f}")
        lines += [c.to_line() for c in self.checks]
        return lines

    def write(self, out: TextIO = sys.stdout, timing: bool = True, trace: bool = False) -> None:
        for line in self.to_lines(timing, trace):
            out.write(line + "\n")


class CheckRunner:
    """Collects CheckResults and prints progress lines to stderr"""

    def __init__(self, stream: TextIO = sys.stderr):
        self.stream = stream
        self.results: List[CheckResult] = []

    def run(self, results: List[CheckResult]) -> List[CheckResult]:
        print("\n🔍 Running lattice checks...", file=self.stream)
        for result in results:
            self.results.append(result)
            if result.inapplicable:
                status = "⚠️  SKIP"
            else:
                status = "✅ PASS" if result.passed else "❌ FAIL"
            print(f"{status} {result.name}", file=self.stream)
            if result.witness and not result.passed:
                print(f"   Witness: {result.witness}", file=self.stream)
        return self.results

    def get_summary(self) -> Dict:
        applicable = [r for r in self.results if not r.inapplicable]
        total = len(applicable)
        passed = sum(1 for r in applicable if r.passed)
        return {
            'total': total,
            'passed': passed,
            'failed': total - passed,
            'pass_rate': (passed / total * 100) if total > 0 else 0,
        }
