"""Discriminant groups L^#/L and their finite quadratic forms."""
import itertools
import logging
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ
from sympy.polys.matrices.normalforms import smith_normal_decomp

from src.lattice.gram_lattice import GramLattice, domain_matrix, to_int_rows
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)

Coords = Tuple[int, ...]


def _reduce_mod(value, modulus: int):
    """Rational value reduced into [0, modulus)."""
    value = QQ(value)
    return value - modulus * (value.numerator // (modulus * value.denominator))


class FiniteQuadraticForm:
    """A finite quadratic form on Z/d_1 x ... x Z/d_k.

    The form is stored through the rational matrix P of products g_i·g_j of generator lifts:
    q(c) = c P c^T mod 2 and b(c, c') = c P c'^T mod 1. Diagonal entries are kept mod 2 and
    off-diagonal entries mod 1.

    Args:
        orders: Generator orders d_i > 1.
        products: Symmetric rational k x k matrix P.
        group (Optional[DiscriminantGroup]): The lattice data the form was computed from.
    """

    def __init__(self, orders: Sequence[int], products, group: Optional["DiscriminantGroup"] = None):
        self.orders: Tuple[int, ...] = tuple(int(d) for d in orders)
        k = len(self.orders)
        if any(d < 2 for d in self.orders):
            raise LatticeInputError("generator orders must exceed 1")
        P = [[QQ(products[i][j]) for j in range(k)] for i in range(k)]
        for i in range(k):
            for j in range(i):
                if P[i][j] != P[j][i]:
                    raise LatticeInputError("finite form matrix is not symmetric")
        self.products = tuple(
            tuple(_reduce_mod(P[i][j], 2 if i == j else 1) for j in range(k)) for i in range(k)
        )
        self.group = group
        self._check_well_defined()
        self.denominator = reduce(lcm, (int(x.denominator) for row in self.products for x in row), 1)
        self._scaled = np.array(
            [[int(x * self.denominator) for x in row] for row in self.products], dtype=object
        ).reshape(k, k)

    def _check_well_defined(self) -> None:
        for i, d in enumerate(self.orders):
            value = d * d * self.products[i][i]
            if value.denominator != 1 or int(value) % 2:
                raise LatticeInputError(f"q is not well defined on generator {i + 1}")
            for j in range(self.rank):
                if i != j and (d * self.products[i][j]).denominator != 1:
                    raise LatticeInputError(f"b is not well defined on generators {i + 1},{j + 1}")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.orders, 1)

    @property
    def exponent(self) -> int:
        return reduce(lcm, self.orders, 1)

    @cached_property
    def elements(self) -> List[Coords]:
        """All group elements in mixed-radix order; index 0 is the identity."""
        return list(itertools.product(*(range(d) for d in self.orders)))

    @cached_property
    def _strides(self) -> Tuple[int, ...]:
        strides, acc = [], 1
        for d in reversed(self.orders):
            strides.append(acc)
            acc *= d
        return tuple(reversed(strides))

    def index(self, c: Sequence[int]) -> int:
        return sum((int(x) % d) * s for x, d, s in zip(c, self.orders, self._strides))

    def normalize(self, c: Sequence[int]) -> Coords:
        return tuple(int(x) % d for x, d in zip(c, self.orders))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Coords:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def scale(self, n: int, a: Sequence[int]) -> Coords:
        return tuple((n * x) % d for x, d in zip(a, self.orders))

    def q_scaled(self, c: Sequence[int]) -> int:
        """den·q(c) reduced mod 2·den."""
        v = np.array(c, dtype=object)
        return int(v.dot(self._scaled).dot(v)) % (2 * self.denominator) if self.rank else 0

    def b_scaled(self, c: Sequence[int], c2: Sequence[int]) -> int:
        """den·b(c, c2) reduced mod den."""
        if not self.rank:
            return 0
        return int(np.array(c, dtype=object).dot(self._scaled).dot(np.array(c2, dtype=object))) % self.denominator

    def q_value(self, c: Sequence[int]):
        return QQ(self.q_scaled(c), self.denominator)

    def b_value(self, c: Sequence[int], c2: Sequence[int]):
        return QQ(self.b_scaled(c, c2), self.denominator)

    @cached_property
    def element_matrix(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64).reshape(len(self.elements), self.rank)

    def indices_of(self, coords: np.ndarray) -> np.ndarray:
        """Element indices of the rows of an integer coordinate array (reduced here)."""
        coords = np.asarray(coords, dtype=np.int64) % np.array(self.orders, dtype=np.int64)
        return coords @ np.array(self._strides, dtype=np.int64)

    @cached_property
    def q_table(self) -> np.ndarray:
        return np.array([self.q_scaled(c) for c in self.elements], dtype=np.int64)

    def b_column(self, y: Sequence[int]) -> np.ndarray:
        """den·b(x, y) mod den for every element x, in element order."""
        if not self.rank:
            return np.zeros(1, dtype=np.int64)
        scaled = self._scaled.astype(np.int64)
        column = scaled @ np.array(y, dtype=np.int64)
        return (self.element_matrix @ column) % self.denominator

    @cached_property
    def element_orders(self) -> np.ndarray:
        out = []
        for c in self.elements:
            o = 1
            for x, d in zip(c, self.orders):
                o = lcm(o, d // gcd(x, d))
            out.append(o)
        return np.array(out, dtype=np.int64)

    def negated(self) -> "FiniteQuadraticForm":
        """The form -q on the same group (the discriminant form of L(-1))."""
        return FiniteQuadraticForm(self.orders, [[-x for x in row] for row in self.products], None)

    def direct_sum(self, other: "FiniteQuadraticForm") -> "FiniteQuadraticForm":
        k, m = self.rank, other.rank
        P = [[QQ(0)] * (k + m) for _ in range(k + m)]
        for i in range(k):
            for j in range(k):
                P[i][j] = self.products[i][j]
        for i in range(m):
            for j in range(m):
                P[k + i][k + j] = other.products[i][j]
        return FiniteQuadraticForm(self.orders + other.orders, P)

    def is_trivial(self) -> bool:
        return self.rank == 0

    def describe(self) -> str:
        if self.is_trivial():
            return "trivial form"
        group = " x ".join(f"Z/{d}" for d in self.orders)
        qs = ", ".join(str(self.products[i][i]) for i in range(self.rank))
        return f"{group}; q(gens) = [{qs}] mod 2"

    def __repr__(self) -> str:
        return f"FiniteQuadraticForm({self.describe()})"


class DiscriminantGroup:
    """L^#/L with explicit generator lifts in L ⊗ Q (row coordinates in the basis of L).

    Args:
        lattice (GramLattice): The even lattice L.
        lifts: Optional rational generator lifts; the Smith normal form lifts are used otherwise.
    """

    def __init__(self, lattice: GramLattice, lifts: Optional[Sequence[Sequence]] = None):
        self.lattice = lattice
        n = lattice.rank
        if n:
            D, S, T = smith_normal_decomp(lattice.matrix())
            D, S, T = to_int_rows(D), to_int_rows(S), to_int_rows(T)
        else:
            D, S, T = [], [], []
        snf = [abs(D[i][i]) for i in range(n)]
        if any(x == 0 for x in snf):
            raise LatticeInputError("degenerate lattice")
        self._snf_factors = snf
        self._snf_transform = T
        self._snf_positions = [i for i, x in enumerate(snf) if x > 1]
        snf_lifts = [[QQ(S[i][j], snf[i]) for j in range(n)] for i in self._snf_positions]
        if lifts is None:
            self.lifts = snf_lifts
            self.invariant_factors = tuple(snf[i] for i in self._snf_positions)
            self._from_snf: Optional[Dict[Coords, Coords]] = None
        else:
            self.lifts = [[QQ(x) for x in v] for v in lifts]
            self.invariant_factors = tuple(self._order_of(v) for v in self.lifts)
            self._from_snf = self._coordinate_table()
        if self.order != abs(lattice.det):
            raise InvariantViolation("discriminant group order differs from |det|")

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.invariant_factors, 1)

    def _pairing(self, x: Sequence) -> List:
        g = self.lattice.gram
        n = self.lattice.rank
        return [sum(QQ(x[i]) * g[i][j] for i in range(n)) for j in range(n)]

    def _snf_key(self, x: Sequence) -> Coords:
        y = self._pairing(x)
        if any(v.denominator != 1 for v in y):
            raise LatticeInputError(f"vector {list(map(str, x))} is not in the dual lattice")
        T = self._snf_transform
        n = self.lattice.rank
        key = []
        for pos in self._snf_positions:
            value = sum(int(y[i]) * T[i][pos] for i in range(n))
            key.append(value % self._snf_factors[pos])
        return tuple(key)

    def _order_of(self, v: Sequence) -> int:
        key = self._snf_key(v)
        o = 1
        for x, pos in zip(key, self._snf_positions):
            d = self._snf_factors[pos]
            o = lcm(o, d // gcd(x, d))
        if o == 1:
            raise LatticeInputError("generator lift lies in the lattice")
        return o

    def _coordinate_table(self) -> Dict[Coords, Coords]:
        keys = [self._snf_key(v) for v in self.lifts]
        moduli = [self._snf_factors[pos] for pos in self._snf_positions]
        table = {}
        for c in itertools.product(*(range(d) for d in self.invariant_factors)):
            key = tuple(sum(ci * k[t] for ci, k in zip(c, keys)) % moduli[t] for t in range(len(moduli)))
            if key in table:
                raise LatticeInputError("generator lifts are not independent in L^#/L")
            table[key] = c
        return table

    def coordinates(self, x: Sequence) -> Coords:
        """Generator coordinates of the class of x in L^#/L."""
        key = self._snf_key(x)
        return key if self._from_snf is None else self._from_snf[key]

    def products(self) -> List[List]:
        g = self.lattice.gram
        n = self.lattice.rank
        out = []
        for u in self.lifts:
            gu = [sum(u[i] * g[i][j] for i in range(n)) for j in range(n)]
            out.append([sum(gu[j] * v[j] for j in range(n)) for v in self.lifts])
        return out

    def action_of(self, A: Sequence[Sequence[int]]) -> List[Coords]:
        """Images of the generators under x -> x·A for an isometry A of L."""
        n = self.lattice.rank
        images = []
        for u in self.lifts:
            ua = [sum(u[i] * A[i][j] for i in range(n)) for j in range(n)]
            images.append(self.coordinates(ua))
        return images


def discriminant_group(L: GramLattice, lifts: Optional[Sequence[Sequence]] = None) -> DiscriminantGroup:
    return DiscriminantGroup(L, lifts)


def discriminant_form(L: GramLattice, lifts: Optional[Sequence[Sequence]] = None) -> FiniteQuadraticForm:
    """Discriminant form q(x) = x² mod 2Z on L^#/L.

    Raises:
        LatticeInputError: L is odd or degenerate.
    """
    L.require_even("discriminant_form")
    group = discriminant_group(L, lifts)
    return FiniteQuadraticForm(group.invariant_factors, group.products(), group)


def half_basis_lifts(rank: int) -> List[List]:
    """Lifts t_i/2 of a basis, the usual presentation of 2-elementary forms."""
    return [[QQ(1, 2) if i == j else QQ(0) for j in range(rank)] for i in range(rank)]
