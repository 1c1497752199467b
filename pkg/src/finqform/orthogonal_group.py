"""Orthogonal groups O(q) of finite quadratic forms, materialized as Cayley tables."""
import logging
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.lattice.discriminant import FiniteQuadraticForm
from src.utils.exceptions import EnumerationCapExceeded, InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)

DEFAULT_CAP = 10**8


class FiniteIsometry:
    """An isometry between finite quadratic forms, given by generator images.

    Row i of `rows` holds the target coordinates of the image of source generator i; an element c
    maps to c·rows reduced modulo the target orders.

    Raises:
        LatticeInputError: the rows do not define a bijective map preserving q.
    """

    def __init__(self, source: FiniteQuadraticForm, target: FiniteQuadraticForm, rows: Sequence[Sequence[int]]):
        if len(rows) != source.rank or any(len(r) != target.rank for r in rows):
            raise LatticeInputError("isometry matrix has the wrong shape")
        self.source = source
        self.target = target
        self.rows: Tuple[Tuple[int, ...], ...] = tuple(target.normalize(r) for r in rows)
        for d, r in zip(source.orders, self.rows):
            if any(target.scale(d, r)):
                raise LatticeInputError("generator image has the wrong order")
        self.perm = _permutation(source, target, self.rows)
        if len(np.unique(self.perm)) != len(self.perm):
            raise LatticeInputError("matrix does not define a bijection of discriminant groups")
        # q on every element also fixes b by polarization
        if not _same_q(source, target, self.perm):
            raise LatticeInputError("matrix does not preserve the quadratic form")

    @property
    def key(self) -> Tuple[Tuple[int, ...], ...]:
        return self.rows

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteIsometry) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"FiniteIsometry({[list(r) for r in self.rows]})"


def _unit(k: int, i: int) -> Tuple[int, ...]:
    return tuple(int(i == j) for j in range(k))


def _permutation(source: FiniteQuadraticForm, target: FiniteQuadraticForm, rows) -> np.ndarray:
    if not source.rank:
        return np.zeros(1, dtype=np.int64)
    images = source.element_matrix @ np.array(rows, dtype=np.int64).reshape(source.rank, target.rank)
    return target.indices_of(images)


def _same_q(source: FiniteQuadraticForm, target: FiniteQuadraticForm, perm: np.ndarray) -> bool:
    lhs = target.q_table[perm].astype(object) * source.denominator
    rhs = source.q_table.astype(object) * target.denominator
    return bool(np.all(lhs == rhs))


def _aligned(source: FiniteQuadraticForm, target: FiniteQuadraticForm) -> int:
    """Common denominator used to compare scaled q- and b-values of two forms."""
    return int(np.lcm(source.denominator, target.denominator))


class _Search:
    """Backtracking over generator images constrained by order, q and b.

    Leaves are isometries source -> target; the caller owns the cap accounting.
    """

    def __init__(self, source: FiniteQuadraticForm, target: FiniteQuadraticForm, cap: int):
        self.source = source
        self.target = target
        self.cap = cap
        self.visited = 0
        den = _aligned(source, target)
        self.src_scale = den // source.denominator
        self.dst_scale = den // target.denominator
        self.den = den
        src_gens = [_unit(source.rank, i) for i in range(source.rank)]
        self.want_q = [source.q_scaled(g) * self.src_scale for g in src_gens]
        self.want_b = [[source.b_scaled(g, h) * self.src_scale for h in src_gens] for g in src_gens]
        dst_q = target.q_table * self.dst_scale
        self.pools = [
            np.flatnonzero((target.element_orders == d) & (dst_q == self.want_q[i]))
            for i, d in enumerate(source.orders)
        ]

    def first_level(self) -> List[int]:
        return list(self.pools[0]) if self.pools else []

    def run(self, prefix: List[int]) -> Iterator[List[int]]:
        """Yield lists of target element indices, one per source generator."""
        k = self.source.rank
        if len(prefix) == k:
            yield list(prefix)
            return
        i = len(prefix)
        pool = self.pools[i]
        mask = np.ones(len(pool), dtype=bool)
        for j, y in enumerate(prefix):
            col = self.target.b_column(self.target.elements[y])[pool] * self.dst_scale
            mask &= col == self.want_b[i][j]
        self.visited += len(pool)
        if self.visited > self.cap:
            raise EnumerationCapExceeded("finite isometry search", self.cap)
        for x in pool[mask]:
            prefix.append(int(x))
            yield from self.run(prefix)
            prefix.pop()

    def leaves(self, prefix: List[int]) -> List[Tuple[int, ...]]:
        """All bijective leaves below a prefix, as rows of target coordinates."""
        out = []
        for leaf in self.run(list(prefix)):
            rows = [self.target.elements[y] for y in leaf]
            perm = _permutation(self.source, self.target, rows)
            if len(np.unique(perm)) == len(perm):
                out.append(tuple(rows))
        return out


def _branch(source, target, cap, first) -> Tuple[List[Tuple], int]:
    search = _Search(source, target, cap)
    leaves = search.leaves([first])
    return leaves, search.visited


class FiniteOrthGroup:
    """O(q) with every element materialized.

    Elements are FiniteIsometry objects of q; index 0 is the identity. The Cayley table uses
    the row convention: table[i, j] is the element x -> (x·g_i)·g_j, written g_i g_j.

    Args:
        form (FiniteQuadraticForm): The ambient form q.
        elements (List[FiniteIsometry]): All of O(q), identity first.
    """

    def __init__(self, form: FiniteQuadraticForm, elements: List[FiniteIsometry]):
        self.form = form
        self.elements = elements
        self.perms = np.array([e.perm for e in elements], dtype=np.int64).reshape(len(elements), -1)
        self._gen_columns = np.array(
            [form.index(_unit(form.rank, i)) for i in range(form.rank)], dtype=np.int64
        )
        keys = self._keys(self.perms[:, self._gen_columns]) if form.rank else np.zeros(1, dtype=np.int64)
        self._order_by_key = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[self._order_by_key]
        if len(np.unique(keys)) != len(keys):
            raise InvariantViolation("duplicate elements in orthogonal group")

    def _keys(self, images: np.ndarray) -> np.ndarray:
        n = max(self.form.order, 1)
        weights = np.array([n ** t for t in range(images.shape[1])], dtype=object)
        if n ** images.shape[1] < 2**62:
            weights = weights.astype(np.int64)
        return images @ weights

    def lookup(self, gen_images: np.ndarray) -> np.ndarray:
        """Element indices from arrays of generator image indices (last axis = generators)."""
        if not self.form.rank:
            return np.zeros(gen_images.shape[:-1], dtype=np.int64)
        keys = self._keys(gen_images)
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.clip(pos, 0, len(self._sorted_keys) - 1)
        if not np.all(self._sorted_keys[pos] == keys):
            raise InvariantViolation("product of isometries left the group")
        return self._order_by_key[pos]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def table(self) -> np.ndarray:
        """Cayley table; entries are element indices."""
        n = self.order
        out = np.empty((n, n), dtype=np.int64)
        cols = self._gen_columns
        for i in range(n):
            # x -> (x·g_i)·g_j for all j: apply perm_j to the images of the generators under g_i
            out[i] = self.lookup(self.perms[:, self.perms[i][cols]]) if self.form.rank else 0
        return out

    @cached_property
    def inverses(self) -> np.ndarray:
        return np.argmax(self.table == 0, axis=1)

    def index_of(self, g: FiniteIsometry) -> int:
        """Position of an isometry of the same form in the element list.

        Raises:
            LatticeInputError: g is not an element of this group.
        """
        if g.source.orders != self.form.orders:
            raise LatticeInputError("isometry acts on a different group")
        try:
            return int(self.lookup(g.perm[self._gen_columns][None, :])[0])
        except InvariantViolation:
            raise LatticeInputError(f"{g} is not an element of O(q)") from None

    def index_of_perm(self, perm: np.ndarray) -> int:
        return int(self.lookup(np.asarray(perm)[self._gen_columns][None, :])[0])

    @cached_property
    def element_orders(self) -> np.ndarray:
        table = self.table
        out = np.ones(self.order, dtype=np.int64)
        power = np.arange(self.order)
        current = power.copy()
        pending = current != 0
        k = 1
        while pending.any():
            k += 1
            current = table[current, power]
            hit = pending & (current == 0)
            out[hit] = k
            pending &= ~hit
        return out

    @cached_property
    def generators(self) -> List[int]:
        """A small generating set, chosen greedily in element order."""
        gens: List[int] = []
        reached = np.zeros(self.order, dtype=bool)
        reached[0] = True
        for i in range(1, self.order):
            if not reached[i]:
                gens.append(i)
                reached[:] = False
                reached[closure(self, gens)] = True
        return gens

    def __contains__(self, g: FiniteIsometry) -> bool:
        try:
            self.index_of(g)
            return True
        except LatticeInputError:
            return False

    def __repr__(self) -> str:
        return f"FiniteOrthGroup(order={self.order}, form={self.form.describe()})"


def closure(group: FiniteOrthGroup, generators: Iterable[int]) -> np.ndarray:
    """Sorted element indices of the subgroup generated by `generators`."""
    table = group.table
    gens = np.array(sorted(set(int(g) for g in generators)), dtype=np.int64)
    seen = np.zeros(group.order, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while len(frontier) and len(gens):
        products = table[np.ix_(frontier, gens)].ravel()
        fresh = np.unique(products[~seen[products]])
        seen[fresh] = True
        frontier = fresh
    return np.flatnonzero(seen)


def _identity(form: FiniteQuadraticForm) -> FiniteIsometry:
    return FiniteIsometry(form, form, [_unit(form.rank, i) for i in range(form.rank)])


def orthogonal_group(q: FiniteQuadraticForm, cap: int = DEFAULT_CAP, n_jobs: int = 1) -> FiniteOrthGroup:
    """Enumerate O(q) by backtracking over generator images.

    Args:
        q (FiniteQuadraticForm): A nondegenerate finite quadratic form.
        cap (int): Maximum number of candidate images examined.
        n_jobs (int): joblib workers over the first-level branches.

    Raises:
        EnumerationCapExceeded: the search examined more than `cap` candidates.
    """
    if q.is_trivial():
        return FiniteOrthGroup(q, [_identity(q)])
    search = _Search(q, q, cap)
    firsts = search.first_level()
    if n_jobs == 1:
        results = [_branch(q, q, cap, first) for first in firsts]
    else:
        results = Parallel(n_jobs=n_jobs)(delayed(_branch)(q, q, cap, first) for first in firsts)
    visited = sum(v for _, v in results)
    if visited > cap:
        raise EnumerationCapExceeded("orthogonal group enumeration", cap)
    identity = _identity(q)
    elements = [identity]
    for leaves, _ in results:
        for rows in leaves:
            g = FiniteIsometry(q, q, rows)
            if g != identity:
                elements.append(g)
    logger.info(f"|O(q)| = {len(elements)} for {q.describe()} ({visited} candidates)")
    return FiniteOrthGroup(q, elements)


def are_isometric(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm, cap: int = DEFAULT_CAP) -> Optional[FiniteIsometry]:
    """An isometry q1 -> q2, or None when the forms are not isometric."""
    if q1.order != q2.order:
        return None
    if q1.is_trivial():
        return FiniteIsometry(q1, q2, [])
    if sorted(zip(q1.element_orders.tolist(), _scaled_q(q1, q2))) != sorted(zip(q2.element_orders.tolist(), _scaled_q(q2, q1))):
        return None
    search = _Search(q1, q2, cap)
    for leaf in search.run([]):
        rows = [q2.elements[y] for y in leaf]
        perm = _permutation(q1, q2, rows)
        if len(np.unique(perm)) == len(perm):
            return FiniteIsometry(q1, q2, rows)
    return None


def _scaled_q(q: FiniteQuadraticForm, other: FiniteQuadraticForm) -> List[int]:
    den = _aligned(q, other)
    return (q.q_table * (den // q.denominator)).tolist()


def transport(phi: FiniteIsometry, group: FiniteOrthGroup, perm: np.ndarray) -> int:
    """Index in `group` of phi^-1·gamma·phi, for gamma (a permutation of phi.source) acting on phi.target."""
    inv = np.empty_like(phi.perm)
    inv[phi.perm] = np.arange(len(phi.perm))
    conjugated = phi.perm[np.asarray(perm)[inv]]
    return group.index_of_perm(conjugated)


def isometry_from_rows(group: FiniteOrthGroup, rows: Sequence[Sequence[int]]) -> int:
    """Index of the isometry with the given generator images."""
    return group.index_of(FiniteIsometry(group.form, group.form, rows))
