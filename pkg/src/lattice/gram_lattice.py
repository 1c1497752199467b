import logging
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]


def as_int_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def domain_matrix(rows: Sequence[Sequence[int]], domain=ZZ) -> DomainMatrix:
    """Exact sympy matrix; an empty list gives a 0x0 matrix."""
    rows = [list(row) for row in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[domain(x) for x in row] for row in rows], (len(rows), ncols), domain)


def to_int_rows(M: DomainMatrix) -> List[List[int]]:
    return [[int(x) for x in row] for row in M.to_list()]


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> List[List[int]]:
    """Exact integer product A·B on nested sequences."""
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def transpose(A: Sequence[Sequence[int]]) -> List[List[int]]:
    return [list(col) for col in zip(*A)]


def integer_kernel(A: Sequence[Sequence[int]], nrows: int) -> List[List[int]]:
    """Z-basis of {x in Z^nrows : x·A = 0}; saturated by construction."""
    if not A or not A[0]:
        return [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    D, s, _ = smith_normal_decomp(domain_matrix(A))
    D = to_int_rows(D)
    rank = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i] != 0)
    return to_int_rows(s)[rank:]


class GramLattice:
    """An integral lattice given by a symmetric Gram matrix; vectors are row coordinate vectors.

    Args:
        gram: Symmetric square integer matrix, nondegenerate unless empty.
        label (Optional[str]): Human-readable name, e.g. "D4+D4+E8".
    """

    def __init__(self, gram: Sequence[Sequence[int]], label: Optional[str] = None):
        gram = as_int_matrix(gram)
        n = len(gram)
        if any(len(row) != n for row in gram):
            raise LatticeInputError("Gram matrix is not square")
        for i in range(n):
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise LatticeInputError(f"Gram matrix is not symmetric at ({i + 1},{j + 1})")
        self._gram = gram
        self.label = label
        if n and self.det == 0:
            raise LatticeInputError("degenerate lattice")

    @property
    def gram(self) -> Matrix:
        return self._gram

    @property
    def rank(self) -> int:
        return len(self._gram)

    @cached_property
    def det(self) -> int:
        if not self.rank:
            return 1
        return int(domain_matrix(self._gram).det())

    @property
    def is_even(self) -> bool:
        return all(self._gram[i][i] % 2 == 0 for i in range(self.rank))

    def require_even(self, what: str = "operation") -> None:
        if not self.is_even:
            raise LatticeInputError(f"{what} requires an even lattice; {self} has an odd diagonal entry")

    def inner(self, x: Sequence[int], y: Sequence[int]):
        g = self._gram
        return sum(x[i] * g[i][j] * y[j] for i in range(self.rank) if x[i] for j in range(self.rank) if y[j])

    def norm(self, x: Sequence[int]):
        return self.inner(x, x)

    def matrix(self, domain=ZZ) -> DomainMatrix:
        return domain_matrix(self._gram, domain)

    @cached_property
    def _signature(self) -> Tuple[int, int]:
        return _symmetric_signature(self._gram)

    def signature(self) -> Tuple[int, int]:
        """(n_plus, n_minus), by exact rational symmetric elimination."""
        return self._signature

    def is_positive_definite(self) -> bool:
        return self._signature == (self.rank, 0)

    def is_negative_definite(self) -> bool:
        return self._signature == (0, self.rank)

    def change_basis(self, U: Sequence[Sequence[int]], label: Optional[str] = None) -> "GramLattice":
        """Gram matrix U·G·U^T of the sublattice spanned by the rows of U."""
        return GramLattice(mat_mul(mat_mul(U, self._gram), transpose(U)), label or self.label)

    def __eq__(self, other) -> bool:
        return isinstance(other, GramLattice) and self._gram == other._gram

    def __hash__(self) -> int:
        return hash(self._gram)

    def __repr__(self) -> str:
        name = f" {self.label}" if self.label else ""
        return f"GramLattice(rank={self.rank}, det={self.det}{name})"


def _symmetric_signature(gram: Matrix) -> Tuple[int, int]:
    n = len(gram)
    A = [[QQ(x) for x in row] for row in gram]
    plus = minus = 0
    active = list(range(n))
    while active:
        pivot = next((i for i in active if A[i][i] != 0), None)
        if pivot is None:
            # all remaining diagonal entries vanish: create one with x -> x + y
            i = active[0]
            j = next((j for j in active if j != i and A[i][j] != 0), None)
            if j is None:
                raise LatticeInputError("degenerate lattice")
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            continue
        d = A[pivot][pivot]
        if d > 0:
            plus += 1
        else:
            minus += 1
        active.remove(pivot)
        for i in active:
            if A[i][pivot] != 0:
                f = A[i][pivot] / d
                for k in active:
                    A[i][k] -= f * A[pivot][k]
        for i in active:
            A[i][pivot] = A[pivot][i] = QQ(0)
    return plus, minus


def signature(L: GramLattice) -> Tuple[int, int]:
    return L.signature()


def direct_sum(*lattices: GramLattice) -> GramLattice:
    """Block-diagonal Gram; the rank-0 lattice is the identity."""
    n = sum(L.rank for L in lattices)
    gram = [[0] * n for _ in range(n)]
    offset = 0
    for L in lattices:
        for i, row in enumerate(L.gram):
            gram[offset + i][offset:offset + L.rank] = row
        offset += L.rank
    labels = [L.label for L in lattices if L.label]
    label = "+".join(labels) if len(labels) == len(lattices) and labels else None
    return GramLattice(gram, label)


def rescale(L: GramLattice, n: int) -> GramLattice:
    """L(n): the Gram matrix multiplied by n."""
    if n == 0:
        raise LatticeInputError("cannot rescale a lattice by 0")
    label = f"{L.label}({n})" if L.label else None
    return GramLattice([[n * x for x in row] for row in L.gram], label)


def orthogonal_complement(L: GramLattice, S: Sequence[Sequence[int]]) -> GramLattice:
    """Gram matrix of {x in L : x·s = 0 for all rows s of S}.

    Raises:
        LatticeInputError: S spans a degenerate sublattice.
    """
    S = [list(map(int, s)) for s in S]
    if S:
        sub = mat_mul(mat_mul(S, L.gram), transpose(S))
        if domain_matrix(sub).det() == 0:
            raise LatticeInputError("sublattice is degenerate in L")
    A = transpose(mat_mul(S, L.gram)) if S else []
    basis = integer_kernel(A, L.rank)
    if not basis:
        return GramLattice([])
    return L.change_basis(basis, label=None)


def complement_basis(L: GramLattice, S: Sequence[Sequence[int]]) -> List[List[int]]:
    """Z-basis (in L-coordinates) of the orthogonal complement of the rows of S."""
    if not S:
        return [[int(i == j) for j in range(L.rank)] for i in range(L.rank)]
    return integer_kernel(transpose(mat_mul(S, L.gram)), L.rank)
