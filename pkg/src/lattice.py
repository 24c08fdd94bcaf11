"""Exact lattice primitives: bases, Gram-Schmidt data, blocks, duals, volumes
and Hermite-constant bounds.

Everything here is exact. Integers stay integers, everything derived from
them is a ``fractions.Fraction``; norms are always handled squared.
Basis vectors are columns. Block ranges are 1-indexed and inclusive.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm
from typing import Iterable, List, Sequence, Tuple, Union

from sympy import Matrix, Rational

from errors import BlockRangeError, ParameterDomainError, RankDeficientError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
Vector = Tuple[Scalar, ...]

# Rational lower bound on pi, used for the unit-ball volume in Minkowski's bound.
PI_LOWER = Fraction(3141592653, 10**9)


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    return sum(a * b for a, b in zip(u, v))


def norm_sq(v: Sequence[Scalar]) -> Scalar:
    return dot(v, v)


def combine(coeffs: Sequence[int], vectors: Sequence[Sequence[Scalar]]) -> Vector:
    """Return sum(coeffs[j] * vectors[j])"""
    dim = len(vectors[0])
    out = [0] * dim
    for c, vec in zip(coeffs, vectors):
        if c:
            for t in range(dim):
                out[t] += c * vec[t]
    return tuple(out)


@dataclass(frozen=True)
class Basis:
    """Integer lattice basis stored as n column vectors in Z^m"""

    columns: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable[int]]) -> 'Basis':
        cols = tuple(tuple(int(x) for x in col) for col in columns)
        if not cols:
            raise RankDeficientError("A basis needs at least one vector")
        m = len(cols[0])
        if any(len(col) != m for col in cols):
            raise ParameterDomainError("All basis vectors must have the same dimension")
        if len(cols) > m:
            raise RankDeficientError(f"{len(cols)} vectors in dimension {m} cannot be independent")
        return cls(cols)

    @classmethod
    def identity(cls, n: int) -> 'Basis':
        return cls(tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n)))

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def m(self) -> int:
        return len(self.columns[0])

    def column(self, i: int) -> Tuple[int, ...]:
        """1-indexed column access"""
        return self.columns[i - 1]

    def replace(self, start: int, new_columns: Sequence[Sequence[int]]) -> 'Basis':
        """Return a basis with columns start.. (1-indexed) replaced"""
        cols = list(self.columns)
        for offset, col in enumerate(new_columns):
            cols[start - 1 + offset] = tuple(col)
        return Basis(tuple(cols))

    def transform(self, r: 'BlockRange', unimodular: Sequence[Sequence[int]]) -> 'Basis':
        """Apply an integer column transform (given by its columns) to block r"""
        block = self.columns[r.lo - 1:r.hi]
        return self.replace(r.lo, [combine(u, block) for u in unimodular])

    def gram_det(self) -> int:
        return gso_compute(self).gram_det()

    def max_norm_sq(self) -> int:
        return max(norm_sq(col) for col in self.columns)

    def validate(self) -> 'Basis':
        """Raise RankDeficientError unless the columns are independent"""
        gso_compute(self)
        return self


@dataclass(frozen=True)
class BlockRange:
    """Projected block B_[lo, hi], 1-indexed and inclusive"""

    lo: int
    hi: int

    def rank(self) -> int:
        return self.hi - self.lo + 1

    def check(self, n: int) -> 'BlockRange':
        if not 1 <= self.lo <= self.hi <= n:
            raise BlockRangeError(f"Block [{self.lo},{self.hi}] not within [1,{n}]")
        return self

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class GsoData:
    """Gram-Schmidt data: mu[i][j] (diagonal 1) and norms_sq[i] = ||b*_i||^2"""

    mu: Tuple[Tuple[Fraction, ...], ...]
    norms_sq: Tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.norms_sq)

    def gram_det(self) -> Fraction:
        out = Fraction(1)
        for b in self.norms_sq:
            out *= b
        if out.denominator == 1:
            return out.numerator
        return out

    def block(self, r: BlockRange) -> 'GsoData':
        """GSO data of the projected block B_[r]"""
        lo, hi = r.lo - 1, r.hi
        return GsoData(
            tuple(tuple(row[lo:hi]) for row in self.mu[lo:hi]),
            self.norms_sq[lo:hi],
        )


def _vectors(B: Union[Basis, Sequence[Sequence[Scalar]]]) -> Sequence[Sequence[Scalar]]:
    return B.columns if isinstance(B, Basis) else B


def gram_matrix(B: Union[Basis, Sequence[Sequence[Scalar]]]) -> List[List[Scalar]]:
    vecs = _vectors(B)
    n = len(vecs)
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            G[i][j] = G[j][i] = dot(vecs[i], vecs[j])
    return G


def gso_from_gram(G: Sequence[Sequence[Scalar]]) -> GsoData:
    """Cholesky-style Gram-Schmidt on a Gram matrix"""
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    r = [[Fraction(0)] * n for _ in range(n)]
    norms = []
    for i in range(n):
        for j in range(i + 1):
            acc = Fraction(G[i][j])
            for t in range(j):
                acc -= mu[j][t] * r[i][t]
            r[i][j] = acc
            if j < i:
                mu[i][j] = acc / norms[j]
        if r[i][i] <= 0:
            raise RankDeficientError(f"Vector {i + 1} is dependent on the previous ones")
        mu[i][i] = Fraction(1)
        norms.append(r[i][i])
    return GsoData(tuple(tuple(row) for row in mu), tuple(norms))


def gso_compute(B: Union[Basis, Sequence[Sequence[Scalar]]]) -> GsoData:
    return gso_from_gram(gram_matrix(B))


def orthogonal_vectors(B: Union[Basis, Sequence[Sequence[Scalar]]], gso: GsoData = None,
                       upto: int = None) -> List[Vector]:
    """Return b*_1..b*_upto as explicit rational vectors"""
    vecs = _vectors(B)
    gso = gso or gso_compute(B)
    upto = len(vecs) if upto is None else upto
    star: List[Vector] = []
    for i in range(upto):
        v = [Fraction(x) for x in vecs[i]]
        for j in range(i):
            c = gso.mu[i][j]
            if c:
                v = [a - c * b for a, b in zip(v, star[j])]
        star.append(tuple(v))
    return star


def projected_block(B: Union[Basis, Sequence[Sequence[Scalar]]], r: BlockRange,
                    gso: GsoData = None) -> List[Vector]:
    """Explicit vectors pi_lo(b_lo), ..., pi_lo(b_hi)"""
    vecs = _vectors(B)
    r.check(len(vecs))
    gso = gso or gso_compute(B)
    star = orthogonal_vectors(B, gso, upto=r.lo - 1)
    out = []
    for j in range(r.lo - 1, r.hi):
        v = [Fraction(x) for x in vecs[j]]
        for i in range(r.lo - 1):
            c = gso.mu[j][i]
            if c:
                v = [a - c * b for a, b in zip(v, star[i])]
        out.append(tuple(v))
    return out


def size_reduce(B: Basis, start: int = 1, gso: GsoData = None) -> Basis:
    """Size-reduce columns start..n (1-indexed) so that every |mu_ij| <= 1/2.

    Columns before ``start`` are left alone; GSO norms never change.
    """
    gso = gso or gso_compute(B)
    cols = [list(c) for c in B.columns]
    mu = [list(row) for row in gso.mu]
    for i in range(max(start - 1, 1), B.n):
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                cols[i] = [a - q * b for a, b in zip(cols[i], cols[j])]
                for t in range(j):
                    mu[i][t] -= q * mu[j][t]
                mu[i][j] -= q
    return Basis(tuple(tuple(c) for c in cols))


def block_volume_sq(B: Union[Basis, GsoData], r: BlockRange) -> Fraction:
    """vol(B_[r])^2 = product of ||b*_i||^2 over the block"""
    gso = B if isinstance(B, GsoData) else gso_compute(B)
    r.check(gso.n)
    out = Fraction(1)
    for b in gso.norms_sq[r.lo - 1:r.hi]:
        out *= b
    return out


def _rational_matrix(rows: Sequence[Sequence[Scalar]]) -> Matrix:
    return Matrix([[Rational(x.numerator, x.denominator) for x in row] for row in rows])


def _to_fraction(e) -> Fraction:
    return Fraction(int(e.p), int(e.q))


def _gram_inverse(vecs: Sequence[Sequence[Scalar]]) -> Matrix:
    """Exact inverse of the Gram matrix over the rationals"""
    try:
        return _rational_matrix(gram_matrix(vecs)).inv()
    except ValueError as e:
        raise RankDeficientError("Gram matrix is singular") from e


def coordinates(B: Basis, v: Sequence[Scalar]) -> Tuple[int, ...]:
    """Integer z with B z = v; raises if v is not in L(B)"""
    G = _rational_matrix(gram_matrix(B))
    rhs = _rational_matrix([[dot(col, v)] for col in B.columns])
    z = [_to_fraction(c) for c in G.LUsolve(rhs)]
    if any(c.denominator != 1 for c in z) or combine([int(c) for c in z], B.columns) != tuple(v):
        raise ParameterDomainError("Vector is not in the lattice spanned by the basis")
    return tuple(int(c) for c in z)


@dataclass(frozen=True)
class DualBasis:
    """Reversed dual basis multiplied by ``scale`` so that entries are integral"""

    columns: Tuple[Tuple[Scalar, ...], ...]
    scale: int

    def as_basis(self) -> Basis:
        return Basis.from_columns(self.columns)


def reversed_dual(B: Union[Basis, Sequence[Sequence[Scalar]]]) -> DualBasis:
    """B^{-s} = B (B^T B)^{-1} with columns reversed, times the smallest
    positive integer that clears every denominator.

    For an integer basis the scale divides the Gram determinant.
    """
    vecs = _vectors(B)
    D = _rational_matrix(vecs).T * _gram_inverse(vecs)
    dual = [tuple(_to_fraction(x) for x in D.col(j)) for j in reversed(range(len(vecs)))]
    scale = 1
    for col in dual:
        for x in col:
            scale = lcm(scale, x.denominator)
    columns = tuple(tuple(int(x * scale) for x in col) for col in dual)
    return DualBasis(columns, scale)


def rational_reversed_dual(vecs: Sequence[Sequence[Scalar]]) -> List[Vector]:
    """Unscaled reversed dual of a (possibly rational) block"""
    d = reversed_dual(vecs)
    return [tuple(Fraction(x, d.scale) for x in col) for col in d.columns]


# ---------------------------------------------------------------------------
# Exact products of rational powers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerProduct:
    """prod(base ** exponent) with positive rational bases and rational exponents.

    Comparisons are exact: both sides are raised to the least common
    denominator of all exponents involved.
    """

    factors: Tuple[Tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def of(cls, base: Scalar, exponent: Scalar = 1) -> 'PowerProduct':
        base = Fraction(base)
        if base <= 0:
            raise ParameterDomainError(f"PowerProduct base must be positive, got {base}")
        return cls(((base, Fraction(exponent)),))

    def __mul__(self, other: 'PowerProduct') -> 'PowerProduct':
        return PowerProduct(self.factors + other.factors)

    def __pow__(self, exponent: Scalar) -> 'PowerProduct':
        e = Fraction(exponent)
        return PowerProduct(tuple((b, x * e) for b, x in self.factors))

    def inverse(self) -> 'PowerProduct':
        return self ** -1

    def denominator(self) -> int:
        out = 1
        for _, e in self.factors:
            out = lcm(out, e.denominator)
        return out

    def raised(self, power: int) -> Fraction:
        """Exact value of self ** power; power must clear every exponent"""
        out = Fraction(1)
        for base, e in self.factors:
            x = e * power
            if x.denominator != 1:
                raise ParameterDomainError(f"Power {power} does not clear exponent {e}")
            if x:
                out *= base ** int(x)
        return out

    def compare(self, other: 'PowerProduct') -> Tuple[Fraction, Fraction, int]:
        """Return (self**L, other**L, L) for the common clearing power L"""
        L = lcm(self.denominator(), other.denominator())
        return self.raised(L), other.raised(L), L

    def le(self, other: 'PowerProduct') -> bool:
        lhs, rhs, _ = self.compare(other)
        return lhs <= rhs

    def lt(self, other: 'PowerProduct') -> bool:
        lhs, rhs, _ = self.compare(other)
        return lhs < rhs

    def to_float(self) -> float:
        out = 1.0
        for base, e in self.factors:
            out *= float(base) ** float(e)
        return out


# ---------------------------------------------------------------------------
# Hermite constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HermiteBound:
    """gamma_k^(2*root) <= base, with equality when ``exact``"""

    k: int
    base: Fraction
    root: int
    exact: bool

    def gamma_power(self, exponent: Scalar) -> PowerProduct:
        """gamma_k ** exponent as an exact power product (upper bound)"""
        return PowerProduct.of(self.base, Fraction(exponent) / (2 * self.root))

    def gamma(self) -> PowerProduct:
        return self.gamma_power(1)

    def to_float(self) -> float:
        return self.gamma().to_float()


# (base, root) with gamma_k^(2*root) == base
_EXACT_HERMITE = {
    1: (Fraction(1), 1),
    2: (Fraction(4, 3), 1),
    3: (Fraction(4), 3),
    4: (Fraction(2), 1),
    5: (Fraction(64), 5),
    6: (Fraction(64, 3), 3),
    7: (Fraction(4096), 7),
    8: (Fraction(4), 1),
    24: (Fraction(16), 1),
}


def unit_ball_volume_lower(k: int) -> Fraction:
    """Rational lower bound on the volume of the k-dimensional unit ball"""
    j = k // 2
    if k % 2 == 0:
        return PI_LOWER ** j / factorial(j)
    return Fraction(2 ** k * factorial(j)) * PI_LOWER ** j / factorial(k)


def minkowski_bound(k: int) -> HermiteBound:
    """gamma_k <= 4 v_k^(-2/k), i.e. (gamma_k^2)^k <= 16^k / v_k^4"""
    v = unit_ball_volume_lower(k)
    return HermiteBound(k, Fraction(16 ** k) / v ** 4, k, False)


def hermite_upper_bound(k: int) -> HermiteBound:
    if k < 1:
        raise ParameterDomainError(f"Hermite constant needs k >= 1, got {k}")
    if k in _EXACT_HERMITE:
        base, root = _EXACT_HERMITE[k]
        return HermiteBound(k, base, root, True)
    return minkowski_bound(k)
