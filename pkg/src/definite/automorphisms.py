"""Automorphism groups and isometry tests for definite lattices.

O(W) splits as Weyl(W_root) ⋊ Stab(C) for a Weyl chamber C. Stab(C) permutes the simple roots
and preserves N = W_root^⊥, so it is found by backtracking over Dynkin diagram symmetries and
over images of a reduced basis of N among short vectors of N, keeping integral matrices only.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher

from src.definite.roots import RootDatum, mordell_weil, root_classification
from src.definite.short_vectors import definite_sign, short_vectors
from src.lattice.ade import dynkin_graph
from src.lattice.gram_lattice import GramLattice, complement_basis, domain_matrix, mat_mul, transpose
from src.lattice.reduction import lll_reduce
from src.utils.exceptions import EnumerationCapExceeded, InvariantViolation

logger = logging.getLogger(__name__)

DEFAULT_CAP = 10**8
_BATCH = 4096

IntMatrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class AutomorphismGroup:
    """O(W) through its Weyl part and the stabilizer of the fundamental chamber."""

    lattice: GramLattice
    datum: RootDatum
    weyl_order: int
    reflections: Tuple[IntMatrix, ...]
    chamber_stabilizer: Tuple[IntMatrix, ...]

    @property
    def order(self) -> int:
        return self.weyl_order * len(self.chamber_stabilizer)

    @property
    def generators(self) -> List[IntMatrix]:
        identity = tuple(tuple(int(i == j) for j in range(self.lattice.rank)) for i in range(self.lattice.rank))
        return list(self.reflections) + [g for g in self.chamber_stabilizer if g != identity]


def reflection_matrix(W: GramLattice, root: Sequence[int]) -> IntMatrix:
    """Row-convention matrix of w -> w - 2(w·v)/(v·v) v."""
    norm = W.norm(root)
    if norm not in (2, -2):
        raise InvariantViolation(f"{root} is not a root")
    gv = [sum(W.gram[i][j] * root[j] for j in range(W.rank)) for i in range(W.rank)]
    factor = 2 // norm
    return tuple(
        tuple(int(i == j) - factor * gv[i] * root[j] for j in range(W.rank)) for i in range(W.rank)
    )


def is_isometry(A: Sequence[Sequence[int]], G1: Sequence[Sequence[int]], G2: Sequence[Sequence[int]]) -> bool:
    """A·G2·A^T == G1: rows of A are images of the G1-basis in G2-coordinates."""
    return mat_mul(mat_mul(A, G2), transpose(A)) == [list(r) for r in G1]


@lru_cache(maxsize=None)
def _diagram_symmetries(kind: str, n: int) -> Tuple[Tuple[int, ...], ...]:
    graph = dynkin_graph(kind, n)
    matcher = GraphMatcher(graph, graph)
    perms = sorted(tuple(m[k] for k in range(n)) for m in matcher.isomorphisms_iter())
    return tuple(perms)


def _root_candidates(src: RootDatum, dst: RootDatum, cap: int) -> Iterator[np.ndarray]:
    """Blocks of index arrays: simple root t of src maps to simple root row[t] of dst."""
    src_groups: Dict[Tuple[str, int], List[int]] = {}
    dst_groups: Dict[Tuple[str, int], List[int]] = {}
    offsets_src, offsets_dst = [], []
    pos = 0
    for c in src.components:
        offsets_src.append(pos)
        pos += c.rank
    pos = 0
    for c in dst.components:
        offsets_dst.append(pos)
        pos += c.rank
    for i, c in enumerate(src.components):
        src_groups.setdefault((c.kind, c.rank), []).append(i)
    for i, c in enumerate(dst.components):
        dst_groups.setdefault((c.kind, c.rank), []).append(i)
    if sorted(src_groups) != sorted(dst_groups) or any(
        len(src_groups[t]) != len(dst_groups[t]) for t in src_groups
    ):
        return
    # per type: all (component permutation, symmetry per component) choices
    per_type = []
    total = 1
    for (kind, n), comps in src_groups.items():
        syms = _diagram_symmetries(kind, n)
        targets = dst_groups[(kind, n)]
        options = []
        for perm in itertools.permutations(targets):
            for choice in itertools.product(syms, repeat=len(comps)):
                pairs = []
                for s_comp, d_comp, sym in zip(comps, perm, choice):
                    for k in range(n):
                        pairs.append((offsets_src[s_comp] + k, offsets_dst[d_comp] + sym[k]))
                options.append(pairs)
        per_type.append(options)
        total *= len(options)
    if total > cap:
        raise EnumerationCapExceeded("Dynkin diagram symmetries", cap)
    m = src.rank
    block = []
    for combo in itertools.product(*per_type):
        row = np.empty(m, dtype=np.int64)
        for pairs in combo:
            for s, d in pairs:
                row[s] = d
        block.append(row)
        if len(block) == _BATCH:
            yield np.array(block)
            block = []
    if block or m == 0:
        yield np.array(block) if block else np.zeros((1, 0), dtype=np.int64)


class _Frame:
    """Root datum plus a reduced basis of the complement N, in W-coordinates."""

    def __init__(self, W: GramLattice, datum: Optional[RootDatum] = None):
        self.W = W
        self.sign = definite_sign(W)
        self.datum = datum or root_classification(W)
        self.simple = [list(v) for v in self.datum.simple_roots]
        basis = complement_basis(W, self.simple) if self.simple else [
            [int(i == j) for j in range(W.rank)] for i in range(W.rank)
        ]
        if basis:
            N = W.change_basis(basis)
            _, H = lll_reduce(N)
            basis = mat_mul(H, basis)
        self.complement = basis

    @property
    def complement_lattice(self) -> GramLattice:
        return self.W.change_basis(self.complement)

    def complement_vectors(self, bound: int, cap: int) -> List[Tuple[int, ...]]:
        """Vectors of N with |v²| <= bound, both signs, in W-coordinates."""
        if not self.complement:
            return []
        half = short_vectors(self.complement_lattice, bound, cap)
        out = []
        for y in half:
            v = tuple(sum(y[k] * self.complement[k][j] for k in range(len(self.complement))) for j in range(self.W.rank))
            out.append(v)
            out.append(tuple(-x for x in v))
        return out


def _complement_images(src: _Frame, dst: _Frame, cap: int) -> List[Tuple[Tuple[int, ...], ...]]:
    """All images of src's N-basis in dst's N preserving inner products."""
    basis = src.complement
    s = len(basis)
    if s == 0:
        return [()]
    gram = [[src.W.inner(a, b) for b in basis] for a in basis]
    bound = max(abs(gram[i][i]) for i in range(s))
    pool = dst.complement_vectors(bound, cap)
    if not pool:
        return []
    V = np.array(pool, dtype=object)
    VG = V.dot(np.array(dst.W.gram, dtype=object))
    norms = np.array([int(VG[i].dot(V[i])) for i in range(len(pool))], dtype=object)
    leaves: List[Tuple[Tuple[int, ...], ...]] = []
    visited = 0

    def extend(prefix: List[int]) -> None:
        nonlocal visited
        i = len(prefix)
        if i == s:
            leaves.append(tuple(pool[j] for j in prefix))
            return
        mask = norms == gram[i][i]
        for j, p in enumerate(prefix):
            mask &= VG.dot(V[p]) == gram[i][j]
        candidates = np.flatnonzero(mask)
        visited += len(candidates)
        if visited > cap:
            raise EnumerationCapExceeded("complement isometry search", cap)
        for c in candidates:
            prefix.append(int(c))
            extend(prefix)
            prefix.pop()

    extend([])
    return leaves


def _adjugate(B: List[List[int]]) -> Tuple[List[List[int]], int]:
    M = domain_matrix(B)
    det = int(M.det())
    if det == 0:
        raise InvariantViolation("roots and complement do not span a full-rank sublattice")
    inv = M.to_field().inv()
    adj = [[int(x * det) for x in row] for row in inv.to_list()]
    return adj, det


def _search(src: _Frame, dst: _Frame, cap: int, first_only: bool) -> List[np.ndarray]:
    """Integral isometries src.W -> dst.W mapping simple roots to simple roots."""
    r = src.W.rank
    B = src.simple + [list(v) for v in src.complement]
    adj, det = _adjugate(B)
    dst_simple = np.array(dst.simple, dtype=object).reshape(len(dst.simple), r)
    n_images = _complement_images(src, dst, cap)
    if not n_images:
        return []
    bound = max(abs(x) for row in adj for x in row) * max(
        [abs(x) for row in dst.simple for x in row] + [abs(x) for img in n_images for v in img for x in v] + [1]
    ) * r
    dtype = np.int64 if bound < 2**62 else object
    adj_arr = np.array(adj, dtype=dtype)
    dst_simple = dst_simple.astype(dtype)
    found: List[np.ndarray] = []
    visited = 0
    for block in _root_candidates(src.datum, dst.datum, cap):
        for img in n_images:
            tail = np.array(img, dtype=dtype).reshape(len(img), r)
            heads = dst_simple[block] if block.shape[1] else np.zeros((len(block), 0, r), dtype=dtype)
            images = np.concatenate([heads, np.broadcast_to(tail, (len(block),) + tail.shape)], axis=1)
            numer = adj_arr @ images
            ok = np.all(numer % det == 0, axis=(1, 2))
            visited += len(block)
            if visited > cap:
                raise EnumerationCapExceeded("chamber stabilizer search", cap)
            for idx in np.flatnonzero(ok):
                A = (numer[idx] // det).astype(object)
                found.append(A)
                if first_only:
                    return found
    return found


def _to_tuple(A: np.ndarray) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in A)


def automorphism_group(W: GramLattice, datum: Optional[RootDatum] = None, cap: int = DEFAULT_CAP) -> AutomorphismGroup:
    """O(W) as reflections in the simple roots plus the full chamber stabilizer.

    Raises:
        EnumerationCapExceeded: the backtracking examined more than `cap` candidates.
        InvariantViolation: a produced matrix is not an isometry.
    """
    frame = _Frame(W, datum)
    stabilizer = [_to_tuple(A) for A in _search(frame, frame, cap, first_only=False)]
    for A in stabilizer:
        if not is_isometry(A, W.gram, W.gram):
            raise InvariantViolation("chamber stabilizer element is not an isometry")
    reflections = tuple(reflection_matrix(W, v) for v in frame.simple)
    for R in reflections:
        if not is_isometry(R, W.gram, W.gram):
            raise InvariantViolation("reflection is not an isometry")
    group = AutomorphismGroup(W, frame.datum, frame.datum.weyl_order, reflections, tuple(sorted(stabilizer)))
    logger.debug(f"|O(W)| = {group.order} for root type {frame.datum.symbol} (|Stab(C)| = {len(stabilizer)})")
    return group


def isometric(W1: GramLattice, W2: GramLattice, cap: int = DEFAULT_CAP) -> Optional[IntMatrix]:
    """An isometry W1 -> W2 (rows: images of the W1-basis in W2-coordinates), or None."""
    if W1.rank != W2.rank or W1.det != W2.det:
        return None
    if W1.rank and definite_sign(W1) != definite_sign(W2):
        return None
    f1, f2 = _Frame(W1), _Frame(W2)
    if f1.datum.symbol != f2.datum.symbol or f1.datum.root_count != f2.datum.root_count:
        return None
    if mordell_weil(W1, f1.datum) != mordell_weil(W2, f2.datum):
        return None
    if f1.complement and f1.complement_lattice.det != f2.complement_lattice.det:
        return None
    found = _search(f1, f2, cap, first_only=True)
    if not found:
        return None
    A = _to_tuple(found[0])
    if not is_isometry(A, W1.gram, W2.gram):
        raise InvariantViolation("isometry search produced a non-isometry")
    return A
