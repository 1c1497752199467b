"""Hodge isometry subgroups of O(T^#).

The Hodge isometries of T form a cyclic group of even order n containing -id, with phi(n) | rank T.
A generator A satisfies Phi_n(A) = 0. We search integral lifts with bounded entries row by row: the
relation A + A^-1 = M (M = c·I, or a self-adjoint M found first) is linear in the rows of A once
A·T·A^T = T is imposed.
"""
import itertools
import logging
from dataclasses import dataclass, field
from math import lcm
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ, Poly, cos, cyclotomic_poly, minimal_polynomial, pi, symbols, totient

from src.finqform.orthogonal_group import DEFAULT_CAP, FiniteIsometry, FiniteOrthGroup, isometry_from_rows, orthogonal_group
from src.finqform.subgroups import Subgroup, class_labels, conjugacy_classes, is_conjugate_subgroup, subgroup_generated
from src.lattice.discriminant import FiniteQuadraticForm, discriminant_form
from src.lattice.gram_lattice import GramLattice, domain_matrix, mat_mul
from src.utils.exceptions import EnumerationCapExceeded, InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)

_x = symbols("x")
_CHUNK = 1 << 18

IntMatrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class HodgeSpec:
    """How O^#_hdg(T) is chosen.

    mode: "explicit" (generator rows acting on T^#), "order" (|O^#_hdg| = order) or "enumerate".
    kernel_size: |ker(O_hdg(T) -> O(T^#))|; None derives it from the action of -id.
    """

    mode: str = "enumerate"
    generator: Optional[Tuple[Tuple[int, ...], ...]] = None
    order: Optional[int] = None
    kernel_size: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("explicit", "order", "enumerate"):
            raise LatticeInputError(f"unknown Hodge mode {self.mode!r}")
        if self.mode == "explicit" and self.generator is None:
            raise LatticeInputError("explicit Hodge mode needs a generator")
        if self.mode == "order" and (self.order is None or self.order < 1):
            raise LatticeInputError("order-only Hodge mode needs an order m >= 1")
        if self.kernel_size is not None and (self.kernel_size < 1 or self.kernel_size % 2 and self.kernel_size != 1):
            raise LatticeInputError("kernel size must be 1 or even")


@dataclass(frozen=True)
class HodgeCandidate:
    """One admissible O^#_hdg(T): a cyclic subgroup of order m up to conjugacy."""

    order: int
    lift_order: int
    class_index: int
    image: int
    lift: Optional[IntMatrix] = field(default=None, compare=False)
    entry_bound: Optional[int] = None

    @property
    def label(self) -> str:
        return f"h{self.order}[class {self.class_index}]"


def minus_identity(rank: int) -> IntMatrix:
    return tuple(tuple(-int(i == j) for j in range(rank)) for i in range(rank))


def minus_identity_image(group: FiniteOrthGroup, q: FiniteQuadraticForm) -> int:
    return group.index_of(FiniteIsometry(q, q, q.group.action_of(minus_identity(q.group.lattice.rank))))


def auto_kernel_size(group: FiniteOrthGroup, q: FiniteQuadraticForm) -> int:
    """2 when -id acts trivially on T^#, else 1."""
    return 2 if minus_identity_image(group, q) == 0 else 1


def _free_grid(count: int, bound: int) -> Iterator[np.ndarray]:
    """All points of [-bound, bound]^count, in chunks of at most _CHUNK rows."""
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    if count == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    tail = min(count, max(1, int(np.log(_CHUNK) / np.log(max(len(axis), 2)))))
    grid = np.stack(np.meshgrid(*([axis] * tail), indexing="ij"), axis=-1).reshape(-1, tail)
    for head in itertools.product(axis.tolist(), repeat=count - tail):
        yield np.hstack([np.tile(np.array(head, dtype=np.int64), (len(grid), 1)), grid])


def _row_solutions(
    constraints: Sequence[Sequence[int]],
    values: Sequence[int],
    r: int,
    bound: int,
    keep: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """Integer vectors a in [-bound, bound]^r with constraints·a = values, filtered by `keep`."""
    pivots: Tuple[int, ...] = ()
    rows: List[List] = []
    if constraints:
        aug = domain_matrix([[int(x) for x in w] + [int(v)] for w, v in zip(constraints, values)], QQ)
        R, pivots = aug.rref()
        if r in pivots:
            return np.zeros((0, r), dtype=np.int64)
        rows = R.to_list()[: len(pivots)]
    free = [c for c in range(r) if c not in pivots]
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, int(x.denominator))
    # pivot_k = (rhs_k - sum_f coeff_kf x_f) / den after scaling by den
    scaled = np.array([[int(x * den) for x in row] for row in rows], dtype=np.int64).reshape(len(rows), r + 1)
    out = []
    for F in _free_grid(len(free), bound):
        X = np.zeros((len(F), r), dtype=np.int64)
        X[:, free] = F
        mask = np.ones(len(F), dtype=bool)
        for k, pc in enumerate(pivots):
            num = scaled[k, r] - F @ scaled[k, free]
            mask &= (num % den == 0) & (np.abs(num) <= bound * den)
            X[:, pc] = num // den
        X = X[mask]
        if len(X):
            X = X[keep(X)]
        if len(X):
            out.append(X)
    return np.vstack(out) if out else np.zeros((0, r), dtype=np.int64)


class _RowSearch:
    """Backtracking over rows a_0, a_1, ... of an r x r integer matrix."""

    def __init__(self, r: int, cap: int):
        self.r = r
        self.cap = cap
        self.visited = 0

    def rows(self, i: int, prefix: List[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def run(self) -> Iterator[np.ndarray]:
        prefix: List[np.ndarray] = []

        def extend() -> Iterator[np.ndarray]:
            i = len(prefix)
            if i == self.r:
                yield np.array(prefix, dtype=np.int64)
                return
            candidates = self.rows(i, prefix)
            self.visited += len(candidates)
            if self.visited > self.cap:
                raise EnumerationCapExceeded("Hodge lift search", self.cap)
            for a in candidates:
                prefix.append(a)
                yield from extend()
                prefix.pop()

        yield from extend()


class _LiftSearch(_RowSearch):
    """Isometries A of T with A·T + T·A^T = S."""

    def __init__(self, T: np.ndarray, S: np.ndarray, bound: int, cap: int):
        super().__init__(len(T), cap)
        self.T, self.S, self.bound = T, S, bound

    def rows(self, i, prefix):
        T, S = self.T, self.S
        cons, vals = [list(2 * T[:, i])], [int(S[i, i])]
        for j, a in enumerate(prefix):
            cons.append(list(T[:, j]))
            vals.append(int(S[i, j] - a @ T[:, i]))
            cons.append(list(T @ a))
            vals.append(int(T[i, j]))
        return _row_solutions(cons, vals, self.r, self.bound, lambda X: np.einsum("ij,jk,ik->i", X, T, X) == T[i, i])


class _SelfAdjointSearch(_RowSearch):
    """M with M·T symmetric and M² = u·M - w·I."""

    def __init__(self, T: np.ndarray, u: int, w: int, bound: int, cap: int):
        super().__init__(len(T), cap)
        self.T, self.u, self.w, self.bound = T, u, w, bound

    def rows(self, i, prefix):
        T, u, w = self.T, self.u, self.w
        cons, vals = [], []
        for j, m in enumerate(prefix):
            cons.append(list(T[:, j]))
            vals.append(int(m @ T[:, i]))
            cons.append(list(T @ m - u * T[:, j]))
            vals.append(int(-w * T[i, j]))

        def keep(X):
            return np.einsum("ij,jk,ik->i", X, T, X) - u * (X @ T[:, i]) == -w * T[i, i]

        return _row_solutions(cons, vals, self.r, self.bound, keep)


def _satisfies(A: np.ndarray, n: int) -> bool:
    coeffs = [int(c) for c in Poly(cyclotomic_poly(n, _x), _x).all_coeffs()]
    M = [[int(x) for x in row] for row in A.tolist()]
    r = len(M)
    acc = [[0] * r for _ in range(r)]
    for c in coeffs:
        acc = mat_mul(acc, M)
        for k in range(r):
            acc[k][k] += c
    return all(v == 0 for row in acc for v in row)


def lifts_of_order(T: GramLattice, n: int, entry_bound: int, cap: int = DEFAULT_CAP) -> Iterator[np.ndarray]:
    """Integral A with A·T·A^T = T and Phi_n(A) = 0, entries bounded by entry_bound.

    Raises:
        LatticeInputError: phi(n) > 4, where no bounded search is implemented.
    """
    r = T.rank
    G = np.array(T.gram, dtype=np.int64)
    if n in (1, 2):
        yield np.eye(r, dtype=np.int64) * (1 if n == 1 else -1)
        return
    psi = Poly(minimal_polynomial(2 * cos(2 * pi / n), _x), _x).all_coeffs()
    if len(psi) == 2:
        c = -int(psi[1])
        for A in _LiftSearch(G, c * G, entry_bound, cap).run():
            if _satisfies(A, n):
                yield A
        return
    if len(psi) == 3:
        u, w = -int(psi[1]), int(psi[2])
        for M in _SelfAdjointSearch(G, u, w, 2 * entry_bound, cap).run():
            for A in _LiftSearch(G, M @ G, entry_bound, cap).run():
                if _satisfies(A, n):
                    yield A
        return
    raise LatticeInputError(f"no lift search for Hodge isometries of order {n} (phi(n) > 4)")


def hodge_candidates(
    T: GramLattice,
    entry_bound: int = 10,
    kernel_size: Optional[int] = None,
    q: Optional[FiniteQuadraticForm] = None,
    group: Optional[FiniteOrthGroup] = None,
    orders: Optional[Sequence[int]] = None,
    cap: int = DEFAULT_CAP,
    max_rank: int = 6,
) -> List[HodgeCandidate]:
    """Admissible O^#_hdg(T) found by the bounded lift search, one per (order, conjugacy class).

    An order m without candidates means no lift was found within entry_bound; this is a bounded
    search, not a proof of non-existence.
    """
    q = q or discriminant_form(T)
    group = group or orthogonal_group(q, cap)
    kernel = kernel_size or auto_kernel_size(group, q)
    labels = class_labels(group, conjugacy_classes(group))
    element_orders = group.element_orders
    available = sorted(set(int(o) for o in element_orders))
    out: List[HodgeCandidate] = []
    for m in orders or available:
        n = m * kernel
        if n % 2 or T.rank % int(totient(n)):
            logger.debug(f"order {m}: lift order {n} is not admissible for rank {T.rank}")
            continue
        if n > 2 and T.rank > max_rank:
            logger.warning(f"order {m}: no lift search above rank {max_rank}; list may be incomplete")
            continue
        if int(totient(n)) > 4:
            logger.warning(f"order {m}: lifts of order {n} are not searched (phi({n}) > 4); list may be incomplete")
            continue
        targets = {int(labels[g]) for g in np.flatnonzero(element_orders == m)}
        if not targets:
            continue
        found: Dict[int, HodgeCandidate] = {}
        images: Dict[bytes, int] = {}
        exponent = q.exponent
        for A in lifts_of_order(T, n, entry_bound, cap):
            key = (A % exponent).tobytes()
            if key not in images:
                rows = q.group.action_of(A.tolist())
                images[key] = group.index_of(FiniteIsometry(q, q, rows))
            g = images[key]
            if int(element_orders[g]) != m:
                continue
            c = int(labels[g])
            if c not in found:
                found[c] = HodgeCandidate(m, n, c, g, tuple(tuple(int(v) for v in row) for row in A), entry_bound)
                logger.info(f"Hodge order {m}: lift of order {n} in class {c}")
                if set(found) == targets:
                    break
        out.extend(found[c] for c in sorted(found))
        if not found:
            logger.info(f"Hodge order {m}: no lift within entry bound {entry_bound}")
    return out


def hodge_subgroup(group: FiniteOrthGroup, q: FiniteQuadraticForm, image: int, name: Optional[str] = None) -> Subgroup:
    """The cyclic subgroup generated by `image` and the image of -id.

    Raises:
        InvariantViolation: the result is not cyclic.
    """
    H = subgroup_generated(group, [image, minus_identity_image(group, q)], name)
    if not H.is_cyclic():
        raise InvariantViolation(f"Hodge subgroup {name} is not cyclic")
    return H


def resolve_hodge(
    spec: HodgeSpec,
    T: GramLattice,
    q: FiniteQuadraticForm,
    group: FiniteOrthGroup,
    entry_bound: int = 10,
    cap: int = DEFAULT_CAP,
    max_rank: int = 6,
) -> List[Tuple[str, Subgroup]]:
    """Concrete subgroups H for a HodgeSpec; several when the choice is ambiguous."""
    if spec.mode == "explicit":
        H = hodge_subgroup(group, q, isometry_from_rows(group, spec.generator))
        return [(f"|H|={H.order}", H)]
    orders = [spec.order] if spec.mode == "order" else None
    candidates = hodge_candidates(T, entry_bound, spec.kernel_size, q, group, orders, cap, max_rank)
    if spec.mode == "order" and not candidates:
        raise LatticeInputError(f"no Hodge isometry with image of order {spec.order} within entry bound {entry_bound}")
    by_order: Dict[int, int] = {}
    for c in candidates:
        by_order[c.order] = by_order.get(c.order, 0) + 1
    out = []
    for c in candidates:
        label = f"|H|={c.order}" if by_order[c.order] == 1 else f"|H|={c.order} class {c.class_index}"
        out.append((label, hodge_subgroup(group, q, c.image, label)))
    return out


def merge_published(
    group: FiniteOrthGroup,
    q: FiniteQuadraticForm,
    searched: Sequence[Tuple[str, Subgroup]],
    published: Dict[int, Sequence[Sequence[int]]],
) -> List[Tuple[str, Subgroup]]:
    """Searched Hodge options, each replaced by the published subgroup of its order when the two are conjugate.

    A published generator that matches no searched class is kept under its own label and logged, so a
    bounded search never hides a published choice.
    """
    out: List[Tuple[str, Subgroup]] = []
    matched = set()
    for label, H in searched:
        rows = published.get(H.order)
        if rows is not None and H.order not in matched:
            P = hodge_subgroup(group, q, isometry_from_rows(group, rows), label)
            if is_conjugate_subgroup(group, H, P)[0]:
                matched.add(H.order)
                out.append((label, P))
                continue
        out.append((label, H))
    labels = {label for label, _ in out}
    for m in sorted(published):
        if m in matched:
            continue
        P = hodge_subgroup(group, q, isometry_from_rows(group, published[m]))
        label = f"|H|={P.order}"
        if label in labels:
            logger.warning(f"published Hodge generator of order {m} is not conjugate to a searched class")
            label = f"{label} published"
        else:
            logger.info(f"|H|={P.order}: published generator, not reached by the lift search")
        out.append((label, P))
        labels.add(label)
    return sorted(out, key=lambda option: option[1].order)
