import sys
from fractions import Fraction
from itertools import product
from math import isqrt
from pathlib import Path

import pytest

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(ROOT / 'src'))

from enumeration import OracleBudget  # noqa: E402
from generator import GenSpec, generate  # noqa: E402
from lattice import Basis, combine  # noqa: E402

EPS = Fraction(1, 10)


@pytest.fixture
def budget():
    return OracleBudget()


@pytest.fixture
def identity4():
    return Basis.identity(4)


@pytest.fixture
def skewed_pair():
    """Columns (2,1), (1,2): lambda_1^2 = 2 through (1,-1)"""
    return Basis.from_columns([(2, 1), (1, 2)])


def seeded_basis(n, seed, bound=10, family='uniform'):
    return generate(GenSpec(family, n, bound=bound, seed=seed))


def det(columns):
    """Exact determinant by elimination over the rationals"""
    A = [[Fraction(x) for x in col] for col in columns]
    n = len(A)
    out = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if A[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            out = -out
        out *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return out


def coefficient_box(B):
    """|x_i| <= sqrt(R * (G^-1)_ii) for any x reaching norm^2 R, with R the
    shortest column and (G^-1)_ii a ratio of Gram minors"""
    G = [[sum(a * b for a, b in zip(u, v)) for v in B.columns] for u in B.columns]
    R = min(G[i][i] for i in range(B.n))
    full = det(G)
    box = []
    for i in range(B.n):
        minor = [[G[r][c] for c in range(B.n) if c != i] for r in range(B.n) if r != i]
        inv_ii = det(minor) if minor else Fraction(1)
        box.append(isqrt(int(R * inv_ii / full)) + 1)
    return box


def brute_force_lambda1(B):
    best = None
    ranges = [range(-b, b + 1) for b in coefficient_box(B)]
    for coeffs in product(*ranges):
        if any(coeffs):
            v = combine(coeffs, B.columns)
            norm = sum(x * x for x in v)
            if best is None or norm < best:
                best = norm
    return best

