"""Exact Fincke-Pohst enumeration of short vectors in definite lattices."""
import logging
from collections import Counter
from math import isqrt
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import QQ

from src.lattice.gram_lattice import GramLattice
from src.lattice.reduction import lll_gram
from src.utils.exceptions import EnumerationCapExceeded, LatticeInputError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


def definite_sign(L: GramLattice) -> int:
    """+1 for positive definite, -1 for negative definite input.

    Raises:
        LatticeInputError: L is indefinite.
    """
    if L.is_positive_definite():
        return 1
    if L.is_negative_definite():
        return -1
    raise LatticeInputError(f"{L} is not definite")


def _quadratic_coefficients(gram: Sequence[Sequence[int]]) -> List[List]:
    """Cholesky-type coefficients: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2 over QQ."""
    n = len(gram)
    q = [[QQ(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _interval(center, radius_sq) -> range:
    """Integers x with (x - center)^2 <= radius_sq, for rationals center and radius_sq >= 0."""
    if radius_sq < 0:
        return range(0)
    s = isqrt(int(radius_sq.numerator) // int(radius_sq.denominator)) + 1
    c_floor = int(center.numerator) // int(center.denominator)
    lo, hi = c_floor - s, c_floor + s + 1
    while lo <= hi and (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return range(lo, hi + 1)


def _enumerate_positive(gram: Sequence[Sequence[int]], bound: int) -> Iterator[Tuple[int, Vector]]:
    """Yield (norm, x) for nonzero x up to sign with x G x^T <= bound; G positive definite."""
    n = len(gram)
    if n == 0:
        return
    q = _quadratic_coefficients(gram)
    x = [0] * n
    remaining = [QQ(0)] * (n + 1)
    remaining[n] = QQ(bound)
    centers = [QQ(0)] * n
    ranges: List[Optional[Iterator[int]]] = [None] * n

    def open_level(i: int) -> None:
        centers[i] = -sum((q[i][j] * x[j] for j in range(i + 1, n)), QQ(0))
        ranges[i] = iter(_interval(centers[i], remaining[i + 1] / q[i][i]))

    i = n - 1
    open_level(i)
    while i < n:
        value = next(ranges[i], None)
        if value is None:
            i += 1
            continue
        # sign normalization: the last nonzero coordinate is positive
        if all(v == 0 for v in x[i + 1:]) and value < 0:
            continue
        x[i] = value
        t = value - centers[i]
        remaining[i] = remaining[i + 1] - q[i][i] * t * t
        if i == 0:
            if any(x):
                norm = bound - remaining[0]
                yield int(norm), tuple(x)
            continue
        i -= 1
        open_level(i)


def iter_short_vectors(L: GramLattice, bound: int, cap: Optional[int] = None) -> Iterator[Tuple[int, Vector]]:
    """Yield (|v²|, v) up to sign, in L-coordinates, in enumeration order."""
    sign = definite_sign(L)
    positive = [[sign * x for x in row] for row in L.gram]
    H, reduced = lll_gram(positive)
    produced = 0
    for norm, y in _enumerate_positive(reduced, bound):
        produced += 1
        if cap is not None and produced > cap:
            raise EnumerationCapExceeded("short vector enumeration", cap)
        v = tuple(sum(y[k] * H[k][j] for k in range(L.rank)) for j in range(L.rank))
        yield norm, _normalize_sign(v)


def _normalize_sign(v: Vector) -> Vector:
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def short_vectors(L: GramLattice, bound: int, cap: Optional[int] = None) -> List[Vector]:
    """All v with 0 < |v²| <= bound, one of each pair ±v, sorted by norm then coordinates.

    Raises:
        LatticeInputError: L is indefinite.
    """
    if bound <= 0:
        raise LatticeInputError("short vector bound must be positive")
    found = sorted(iter_short_vectors(L, bound, cap))
    return [v for _, v in found]


def short_vectors_by_norm(L: GramLattice, bound: int, cap: Optional[int] = None) -> Dict[int, List[Vector]]:
    out: Dict[int, List[Vector]] = {}
    for norm, v in sorted(iter_short_vectors(L, bound, cap)):
        out.setdefault(norm, []).append(v)
    return out


def theta_coefficients(L: GramLattice, bound: int, cap: Optional[int] = None) -> Tuple[int, ...]:
    """Number of vectors (both signs) of each |norm| 1..bound."""
    counts = Counter(norm for norm, _ in iter_short_vectors(L, bound, cap))
    return tuple(2 * counts.get(k, 0) for k in range(1, bound + 1))


def minimum(L: GramLattice) -> int:
    """Smallest |v²| over nonzero v."""
    sign = definite_sign(L)
    _, reduced = lll_gram([[sign * x for x in row] for row in L.gram])
    bound = min(reduced[i][i] for i in range(L.rank))
    return min(norm for norm, _ in iter_short_vectors(L, bound))
