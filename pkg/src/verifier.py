"""Exact checkers for reduction predicates and the inequalities reduced bases
satisfy.

Checkers only use Gram-Schmidt data, explicit projected blocks and the
enumeration oracle (with a budget of their own); none of them calls the
reduction algorithms. Every inequality is decided by raising both sides to
a common integer power.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

from enumeration import DEFAULT_MAX_RANK, OracleBudget, lambda1
from lattice import (Basis, BlockRange, PowerProduct, Scalar, block_volume_sq, gso_compute,
                     hermite_upper_bound, projected_block, rational_reversed_dual)

logger = logging.getLogger(__name__)

Factor = Union[Scalar, PowerProduct]
Vectors = Union[Basis, Sequence[Sequence[Scalar]]]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str = ""
    inapplicable: bool = False

    @classmethod
    def ok(cls, name: str) -> 'CheckResult':
        return cls(name, True)

    @classmethod
    def fail(cls, name: str, witness: str) -> 'CheckResult':
        return cls(name, False, witness)

    @classmethod
    def skip(cls, name: str, reason: str) -> 'CheckResult':
        return cls(name, False, reason, inapplicable=True)

    def to_line(self) -> str:
        if self.inapplicable:
            tag = 'SKIP'
        else:
            tag = 'PASS' if self.passed else 'FAIL'
        return f"{tag} {self.name} {self.witness}".rstrip()


def _pp(x: Factor) -> PowerProduct:
    return x if isinstance(x, PowerProduct) else PowerProduct.of(x)


def _leq(name: str, lhs: PowerProduct, rhs: PowerProduct, where: str = "") -> CheckResult:
    lhs_v, rhs_v, power = lhs.compare(rhs)
    if lhs_v <= rhs_v:
        return CheckResult.ok(name)
    prefix = f"{where}: " if where else ""
    return CheckResult.fail(name, f"{prefix}lhs^{power}={lhs_v} > rhs^{power}={rhs_v}")


def _conjunction(name: str, results: List[CheckResult]) -> CheckResult:
    for r in results:
        if not r.passed and not r.inapplicable:
            return CheckResult.fail(name, f"{r.name}: {r.witness}")
    for r in results:
        if r.inapplicable:
            return CheckResult.skip(name, f"{r.name}: {r.witness}")
    return CheckResult.ok(name)


def _vectors(B: Vectors) -> Sequence[Sequence[Scalar]]:
    return B.columns if isinstance(B, Basis) else B


def _lambda1_sq(vectors: Sequence[Sequence[Scalar]], max_rank: int) -> Optional[Fraction]:
    if len(vectors) > max_rank:
        return None
    return lambda1(vectors, OracleBudget(max_rank))


def _delta_gamma(delta: Factor, k: int, exponent: Fraction) -> PowerProduct:
    """(delta^2 gamma_k)^exponent"""
    return _pp(delta) ** (2 * exponent) * hermite_upper_bound(k).gamma_power(exponent)


# ---------------------------------------------------------------------------
# Basic predicates
# ---------------------------------------------------------------------------

def is_size_reduced(B: Vectors) -> CheckResult:
    gso = gso_compute(_vectors(B))
    for i in range(gso.n):
        for j in range(i):
            if abs(gso.mu[i][j]) > Fraction(1, 2):
                return CheckResult.fail('size_reduced', f"mu[{i + 1},{j + 1}]={gso.mu[i][j]}")
    return CheckResult.ok('size_reduced')


def is_lll_reduced(B: Vectors, eps: Scalar = Fraction(1, 3)) -> CheckResult:
    name = f'lll_reduced(eps={eps})'
    size = is_size_reduced(B)
    if not size.passed:
        return CheckResult.fail(name, size.witness)
    gso = gso_compute(_vectors(B))
    for i in range(1, gso.n):
        lhs = gso.norms_sq[i - 1]
        rhs = (1 + Fraction(eps)) * (gso.norms_sq[i] + gso.mu[i][i - 1] ** 2 * gso.norms_sq[i - 1])
        if lhs > rhs:
            return CheckResult.fail(name, f"lovasz at {i + 1}: {lhs} > {rhs}")
    return CheckResult.ok(name)


def is_svp_reduced(B: Basis, r: Optional[BlockRange] = None, delta: Factor = 1,
                   max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    r = (r or BlockRange(1, B.n)).check(B.n)
    name = f'svp_reduced{r}'
    gso = gso_compute(B)
    lam = _lambda1_sq(projected_block(B, r, gso), max_rank)
    if lam is None:
        return CheckResult.skip(name, f"rank {r.rank()} above max_rank={max_rank}")
    return _leq(name, PowerProduct.of(gso.norms_sq[r.lo - 1]), _pp(delta) ** 2 * PowerProduct.of(lam),
                "||b*_lo||^2 vs delta^2 lambda1^2")


def is_hsvp_reduced(B: Basis, r: Optional[BlockRange] = None, delta_h: Factor = 1) -> CheckResult:
    r = (r or BlockRange(1, B.n)).check(B.n)
    gso = gso_compute(B)
    s = r.rank()
    return _leq(f'hsvp_reduced{r}', PowerProduct.of(gso.norms_sq[r.lo - 1], s),
                _pp(delta_h) ** (2 * s) * PowerProduct.of(block_volume_sq(gso, r)),
                "||b*_lo||^2s vs delta^2s vol^2")


def is_dsvp_reduced(B: Basis, r: Optional[BlockRange] = None, delta: Factor = 1,
                    require_lll: bool = True, max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    """Reversed dual of B_[r] is delta-SVP-reduced; with ``require_lll`` the
    block must also be 1/3-LLL-reduced"""
    r = (r or BlockRange(1, B.n)).check(B.n)
    name = f'dsvp_reduced{r}'
    gso = gso_compute(B)
    block = projected_block(B, r, gso)
    if require_lll:
        lll = is_lll_reduced(block)
        if not lll.passed:
            return CheckResult.fail(name, lll.witness)
    lam = _lambda1_sq(rational_reversed_dual(block), max_rank)
    if lam is None:
        return CheckResult.skip(name, f"rank {r.rank()} above max_rank={max_rank}")
    # first reversed-dual vector has squared norm 1/||b*_hi||^2
    return _leq(name, PowerProduct.of(gso.norms_sq[r.hi - 1], -1), _pp(delta) ** 2 * PowerProduct.of(lam),
                "||d_1||^2 vs delta^2 lambda1(dual)^2")


def is_dhsvp_reduced(B: Basis, r: Optional[BlockRange] = None, delta_h: Factor = 1) -> CheckResult:
    r = (r or BlockRange(1, B.n)).check(B.n)
    gso = gso_compute(B)
    s = r.rank()
    return _leq(f'dhsvp_reduced{r}', PowerProduct.of(block_volume_sq(gso, r)),
                _pp(delta_h) ** (2 * s) * PowerProduct.of(gso.norms_sq[r.hi - 1], s),
                "vol^2 vs delta^2s ||b*_hi||^2s")


# ---------------------------------------------------------------------------
# Twin reduction and gluing
# ---------------------------------------------------------------------------

def is_twin_reduced(B: Basis, d: int, delta: Factor) -> CheckResult:
    name = f'twin_reduced(d={d})'
    if not 1 <= d < B.n:
        return CheckResult.skip(name, f"needs 1 <= d < n={B.n}")
    return _conjunction(name, [is_hsvp_reduced(B, BlockRange(1, d), delta),
                               is_dhsvp_reduced(B, BlockRange(2, d + 1), delta)])


def check_twin_fact(B: Basis, d: int, delta: Factor) -> CheckResult:
    """GSO decay and volume sandwich of a delta-twin-reduced B_[1,d+1]"""
    name = f'twin_fact(d={d})'
    if d < 2:
        return CheckResult.skip(name, "needs d >= 2")
    twin = is_twin_reduced(B, d, delta)
    if not twin.passed:
        return CheckResult.skip(name, f"precondition: {twin.to_line()}")
    gso = gso_compute(B)
    b1 = PowerProduct.of(gso.norms_sq[0])
    last = PowerProduct.of(gso.norms_sq[d])
    root_vol = PowerProduct.of(block_volume_sq(gso, BlockRange(1, d + 1)), Fraction(1, d + 1))
    e = Fraction(d, d - 1)
    return _conjunction(name, [
        _leq('twin_decay', b1, _pp(delta) ** (4 * e) * last, "||b_1||^2 vs delta^(4d/(d-1)) ||b*_{d+1}||^2"),
        _leq('twin_volume_lower', _pp(delta) ** (-2 * e) * b1, root_vol, "delta^(-2d/(d-1)) ||b_1||^2 vs vol^(2/(d+1))"),
        _leq('twin_volume_upper', root_vol, _pp(delta) ** (2 * e) * last, "vol^(2/(d+1)) vs delta^(2d/(d-1)) ||b*_{d+1}||^2"),
    ])


def check_gluing(B: Basis, d: int, alpha: Optional[Factor] = None, beta: Optional[Factor] = None,
                 eta: Optional[Factor] = None, max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    """Gluing of B_[1,d] and B_[d+1,n].

    Item 1 (alpha, beta): B_[d+1,n] beta-SVP-reduced, ||b_1|| <= alpha ||b*_{d+1}||
    and lambda_1(L) < lambda_1(L(B_[1,d])) give ||b_1|| <= alpha beta lambda_1(L).
    Item 2 (eta): B_[1,d] eta^(d-1)-HSVP, B_[d+1,n] eta^(n-d-1)-HSVP and
    ||b_1|| <= eta^(2d) ||b*_{d+1}|| give B eta^(n-1)-HSVP-reduced.
    Items whose hypotheses fail are skipped; both skipped makes the check inapplicable.
    """
    name = f'gluing(d={d})'
    n = B.n
    if not 1 <= d < n:
        return CheckResult.skip(name, f"needs 1 <= d < n={n}")
    gso = gso_compute(B)
    b1 = PowerProduct.of(gso.norms_sq[0])
    last = PowerProduct.of(gso.norms_sq[d])
    tail = BlockRange(d + 1, n)
    conclusions = []

    if alpha is not None and beta is not None:
        full = _lambda1_sq(B.columns, max_rank)
        head = _lambda1_sq(B.columns[:d], max_rank)
        if (full is not None and head is not None and full < head
                and is_svp_reduced(B, tail, beta, max_rank).passed
                and b1.le(_pp(alpha) ** 2 * last)):
            conclusions.append(_leq('gluing_svp', b1, (_pp(alpha) * _pp(beta)) ** 2 * PowerProduct.of(full),
                                    "||b_1||^2 vs (alpha beta lambda1)^2"))

    if eta is not None:
        eta = _pp(eta)
        if (is_hsvp_reduced(B, BlockRange(1, d), eta ** (d - 1)).passed
                and is_hsvp_reduced(B, tail, eta ** (n - d - 1)).passed
                and b1.le(eta ** (4 * d) * last)):
            result = is_hsvp_reduced(B, BlockRange(1, n), eta ** (n - 1))
            conclusions.append(CheckResult('gluing_hsvp', result.passed, result.witness))

    if not conclusions:
        return CheckResult.skip(name, "no item has its hypotheses satisfied")
    return _conjunction(name, conclusions)


# ---------------------------------------------------------------------------
# Slide reduction
# ---------------------------------------------------------------------------

def is_slide_reduced_small(B: Basis, k: int, delta: Factor, require_lll: bool = False,
                           max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    n = B.n
    q = n - k
    name = f'slide_reduced_small(k={k})'
    if not 1 <= q <= k:
        return CheckResult.skip(name, f"needs n = k+q with 1 <= q <= k (n={n})")
    checks = [is_size_reduced(B), is_svp_reduced(B, BlockRange(1, q), delta, max_rank)]
    checks += [is_svp_reduced(B, BlockRange(i, n), delta, max_rank) for i in range(q + 1, max(k, q + 1) + 1)]
    checks.append(is_dsvp_reduced(B, BlockRange(2, q + 1), delta, require_lll, max_rank))
    return _conjunction(name, checks)


def mordell_factor(k: int, q: int, delta: Factor) -> PowerProduct:
    """(delta^2 gamma_k)^((k+q-1)/(2(k-1)))"""
    return _delta_gamma(delta, k, Fraction(k + q - 1, 2 * (k - 1)))


def is_slide_reduced_large(B: Basis, k: int, delta: Factor, require_lll: bool = False,
                           max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    n = B.n
    name = f'slide_reduced_large(k={k})'
    p, q = divmod(n, k)
    if k < 2 or p < 2:
        return CheckResult.skip(name, f"needs n = pk+q with p, k >= 2 (n={n}, k={k})")
    d = k + q
    eta = mordell_factor(k, q, delta)
    checks = [is_size_reduced(B),
              is_hsvp_reduced(B, BlockRange(1, d), eta),
              is_dhsvp_reduced(B, BlockRange(2, d + 1), eta)]
    checks += [is_svp_reduced(B, BlockRange(i * k + q + 1, (i + 1) * k + q), delta, max_rank)
               for i in range(1, p)]
    checks += [is_dsvp_reduced(B, BlockRange(i * k + q + 2, (i + 1) * k + q + 1), delta, require_lll, max_rank)
               for i in range(1, p - 1)]
    return _conjunction(name, checks)


def check_thm_small(B: Basis, k: int, delta: Factor, lambda1_sq: Optional[Scalar] = None,
                    max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    """lambda_1(L(B_[1,k]))^2 <= delta^2 gamma_k (delta^2 gamma_q)^(((q+1)/(q-1))((n-k)/k)) lambda_1(L)^2"""
    n = B.n
    q = n - k
    name = f'thm_small(k={k})'
    if not 2 <= q <= k:
        return CheckResult.skip(name, f"needs 2 <= q <= k (n={n}, k={k})")
    if lambda1_sq is None:
        lambda1_sq = _lambda1_sq(B.columns, max_rank)
    head = _lambda1_sq(B.columns[:k], max_rank)
    if lambda1_sq is None or head is None:
        return CheckResult.skip(name, f"rank above max_rank={max_rank}")
    e = Fraction(q + 1, q - 1) * Fraction(n - k, k)
    bound = _delta_gamma(delta, k, Fraction(1)) * _delta_gamma(delta, q, e)
    return _leq(name, PowerProduct.of(head), bound * PowerProduct.of(lambda1_sq),
                "lambda1(B_[1,k])^2 vs bound^2 lambda1^2")


def check_thm_large(B: Basis, k: int, delta: Factor, max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    """HSVP bound on b_1 always; the SVP bound when lambda_1(L(B_[1,k+q])) > lambda_1(L)"""
    n = B.n
    name = f'thm_large(k={k})'
    p, q = divmod(n, k)
    if k < 2 or p < 2:
        return CheckResult.skip(name, f"needs n >= 2k (n={n}, k={k})")
    gso = gso_compute(B)
    b1 = PowerProduct.of(gso.norms_sq[0])
    checks = [_leq('thm_large_hsvp', b1 ** n,
                   _delta_gamma(delta, k, Fraction(n * (n - 1), k - 1)) * PowerProduct.of(gso.gram_det()),
                   "||b_1||^2n vs (delta^2 gamma_k)^(n(n-1)/(k-1)) vol^2")]
    full = _lambda1_sq(B.columns, max_rank)
    head = _lambda1_sq(B.columns[:k + q], max_rank)
    if full is not None and head is not None and head > full:
        checks.append(_leq('thm_large_svp', b1,
                           _pp(delta) ** 2 * _delta_gamma(delta, k, Fraction(2 * (n - k), k - 1))
                           * PowerProduct.of(full),
                           "||b_1||^2 vs delta^2 (delta^2 gamma_k)^(2(n-k)/(k-1)) lambda1^2"))
    return _conjunction(name, checks)


def check_appendix(B: Basis, d: int, k: int, delta: Factor, max_rank: int = DEFAULT_MAX_RANK) -> CheckResult:
    """GSO decay, HSVP and SVP bounds on the tail B_[d+1,n] for n = pk + d, d >= k"""
    n = B.n
    name = f'appendix(d={d},k={k})'
    if d < k or (n - d) < k or (n - d) % k:
        return CheckResult.skip(name, f"needs n - d = pk with p >= 1 and d >= k (n={n})")
    p = (n - d) // k
    gso = gso_compute(B)
    head = PowerProduct.of(gso.norms_sq[d])
    checks = []
    for i in range(p):
        checks.append(_leq(f'gso_decay[{i}]', head,
                           _delta_gamma(delta, k, Fraction(2 * i * k, k - 1)) * PowerProduct.of(gso.norms_sq[i * k + d]),
                           f"||b*_{d + 1}||^2 vs ||b*_{i * k + d + 1}||^2"))
    tail = BlockRange(d + 1, n)
    s = n - d
    checks.append(_leq('tail_hsvp', head ** s,
                       _delta_gamma(delta, k, Fraction(s * (s - 1), k - 1)) * PowerProduct.of(block_volume_sq(gso, tail)),
                       "||b*_{d+1}||^2s vs bound vol^2"))
    lam = _lambda1_sq(projected_block(B, tail, gso), max_rank)
    if lam is None:
        checks.append(CheckResult.skip('tail_svp', f"rank {s} above max_rank={max_rank}"))
    else:
        checks.append(_leq('tail_svp', head,
                           _pp(delta) ** 2 * _delta_gamma(delta, k, Fraction(2 * (s - k), k - 1)) * PowerProduct.of(lam),
                           "||b*_{d+1}||^2 vs bound lambda1(tail)^2"))
    return _conjunction(name, checks)


# ---------------------------------------------------------------------------
# DBKZ and the approximate-SVP reductions
# ---------------------------------------------------------------------------

def check_dbkz_bound(B: Basis, k: int, eps: Scalar, delta: Factor = 1) -> CheckResult:
    """||b_1||^2n <= (1+eps)^2n (delta^2 gamma_k)^(n(n-1)/(k-1)) vol^2"""
    n = B.n
    gso = gso_compute(B)
    rhs = (PowerProduct.of(1 + Fraction(eps), 2 * n) * _delta_gamma(delta, k, Fraction(n * (n - 1), k - 1))
           * PowerProduct.of(gso.gram_det()))
    return _leq(f'dbkz_bound(k={k})', PowerProduct.of(gso.norms_sq[0], n), rhs,
                "||b_1||^2n vs bound vol^2")


def approx_small_bound(n: int, k: int, delta: Factor, eps: Scalar) -> PowerProduct:
    """Squared approximation factor after slide reduction (n <= 2k) and one oracle call"""
    q = n - k
    slack = PowerProduct.of(1 + Fraction(eps)) * _pp(delta)
    e = Fraction(q + 1, q - 1) * Fraction(n - k, k)
    return _pp(delta) ** 2 * _delta_gamma(slack, k, Fraction(1)) * _delta_gamma(slack, q, e)


def approx_large_bounds(n: int, k: int, delta: Factor, eps: Scalar) -> List[PowerProduct]:
    """Squared approximation factors of both branches for n >= 2k"""
    slack = PowerProduct.of(1 + Fraction(eps)) * _pp(delta)
    branch_b = slack ** 2 * _delta_gamma(slack, k, Fraction(2 * (n - k), k - 1))
    return [approx_small_bound(2 * k, k, delta, eps), branch_b]


def check_approx_ratio(name: str, norm_sq: Scalar, lambda1_sq: Scalar,
                       bounds: Sequence[PowerProduct]) -> CheckResult:
    """||v||^2 <= bound * lambda_1^2 for at least one of the squared bounds"""
    lhs = PowerProduct.of(norm_sq)
    results = [_leq(name, lhs, b * PowerProduct.of(lambda1_sq), f"branch {i}") for i, b in enumerate(bounds)]
    for r in results:
        if r.passed:
            return r
    return CheckResult.fail(name, "; ".join(r.witness for r in results))


# ---------------------------------------------------------------------------

class LatticeVerifier:
    """Runs the predicate family matching an algorithm's guarantee"""

    @staticmethod
    def slack(delta: Scalar, eps: Optional[Scalar]) -> PowerProduct:
        return PowerProduct.of(Fraction(delta) * (1 + Fraction(eps or 0)))

    @classmethod
    def checks_for(cls, B: Basis, algorithm: str, params: Dict) -> List[CheckResult]:
        k = params.get('k')
        delta = Fraction(params.get('delta', 1))
        eps = params.get('eps')
        max_rank = params.get('max_rank', DEFAULT_MAX_RANK)
        results = []
        if algorithm == 'lll':
            results.append(is_lll_reduced(B, params.get('lll_eps', Fraction(1, 3))))
        elif algorithm == 'dbkz':
            results.append(check_dbkz_bound(B, k, eps, delta))
        elif algorithm == 'slide-small':
            q = B.n - k
            slack = cls.slack(delta, eps)
            results.append(is_slide_reduced_small(B, k, slack, max_rank=max_rank))
            twin = slack * hermite_upper_bound(q).gamma_power(Fraction(1, 2))
            results.append(check_twin_fact(B, q, twin))
            if q >= 2:
                results.append(check_gluing(B, q, eta=twin ** Fraction(1, q - 1), max_rank=max_rank))
            results.append(check_thm_small(B, k, slack, max_rank=max_rank))
        elif algorithm == 'slide-large':
            p, q = divmod(B.n, k)
            d = k + q
            slack = cls.slack(delta, eps)
            results.append(is_slide_reduced_large(B, k, slack, max_rank=max_rank))
            results.append(check_twin_fact(B, d, mordell_factor(k, q, slack)))
            eta = _delta_gamma(slack, k, Fraction(1, 2 * (k - 1)))
            alpha = _delta_gamma(slack, k, Fraction(d, k - 1))
            beta = _pp(slack) * _delta_gamma(slack, k, Fraction(B.n - d - k, k - 1))
            results.append(check_gluing(B, d, alpha, beta, eta, max_rank))
            results.append(check_thm_large(B, k, slack, max_rank))
            results.append(check_appendix(B, d, k, slack, max_rank))
        else:
            results.append(CheckResult.skip(f'{algorithm}', "no predicate family for this algorithm"))
        return results

    @classmethod
    def validate_all(cls, B: Basis, algorithm: str, params: Dict) -> Dict:
        """Run all checks; inapplicable checks neither pass nor fail"""
        results = cls.checks_for(B, algorithm, params)
        all_passed = all(r.passed for r in results if not r.inapplicable)
        logger.info("%d checks for %s, passed=%s", len(results), algorithm, all_passed)
        return {
            'passed': all_passed,
            'results': results,
        }
