"""Kneser p-neighbors of even definite lattices.

For x in L \\ pL with x² ≡ 0 mod 2p², the neighbor is L_x + Z·x/p where L_x = {y : x·y ≡ 0 mod p}.
"""
import itertools
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from sympy.polys.matrices.normalforms import smith_normal_decomp

from src.genus.descriptor import GenusDescriptor, genus_descriptor
from src.lattice.gram_lattice import GramLattice, domain_matrix, mat_mul, to_int_rows, transpose
from src.lattice.reduction import lll_gram
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]

# full enumeration of isotropic lines is used below this many projective points
FULL_LINE_LIMIT = 20000


def _positive(L: GramLattice) -> Tuple[int, List[List[int]]]:
    if L.is_positive_definite():
        return 1, [list(r) for r in L.gram]
    if L.is_negative_definite():
        return -1, [[-x for x in r] for r in L.gram]
    raise LatticeInputError(f"neighbors need a definite lattice, got signature {L.signature()}")


def _norm(gram: Sequence[Sequence[int]], x: Sequence[int]) -> int:
    n = len(gram)
    return sum(x[i] * gram[i][j] * x[j] for i in range(n) if x[i] for j in range(n) if x[j])


def normalize_line(x: Sequence[int], p: int) -> Optional[Vector]:
    """Representative of the line through x mod p with first nonzero coordinate 1."""
    x = [v % p for v in x]
    for v in x:
        if v:
            inv = pow(v, -1, p)
            return tuple(u * inv % p for u in x)
    return None


def is_isotropic(gram: Sequence[Sequence[int]], x: Sequence[int], p: int) -> bool:
    """x² ≡ 0 mod 2p, i.e. q(x) = x²/2 vanishes mod p."""
    return _norm(gram, x) % (2 * p) == 0


def _pairing_row(gram: Sequence[Sequence[int]], x: Sequence[int]) -> List[int]:
    n = len(gram)
    return [sum(x[i] * gram[i][j] for i in range(n)) for j in range(n)]


def _lift(gram: Sequence[Sequence[int]], x: Sequence[int], p: int) -> Optional[List[int]]:
    """Adjust x by p·L so that x² ≡ 0 mod 2p²; None when x lies in p·L^#."""
    x = list(x)
    xg = _pairing_row(gram, x)
    pivots = [j for j in range(len(x)) if xg[j] % p]
    if not pivots:
        return None
    j = pivots[0]
    norm = _norm(gram, x)
    if p == 2:
        if norm % 8:
            x[j] += 2
    else:
        a = (norm // p) % p
        c = -a * pow(2 * xg[j], -1, p) % p
        x[j] += p * c
    if _norm(gram, x) % (2 * p * p):
        raise InvariantViolation("neighbor lift failed")
    return x


def _sublattice_basis(gram: Sequence[Sequence[int]], x: Sequence[int], p: int) -> List[List[int]]:
    """Basis of L_x, in L-coordinates."""
    n = len(x)
    xg = _pairing_row(gram, x)
    j = next(k for k in range(n) if xg[k] % p)
    inv = pow(xg[j], -1, p)
    rows = []
    for i in range(n):
        row = [0] * n
        if i == j:
            row[j] = p
        else:
            row[i] = 1
            row[j] = -(xg[i] * inv % p)
        rows.append(row)
    return rows


def neighbor_gram(gram: Sequence[Sequence[int]], x: Sequence[int], p: int) -> Optional[List[List[int]]]:
    """LLL-reduced Gram matrix of the p-neighbor through the line of x (positive definite input)."""
    n = len(gram)
    lifted = _lift(gram, x, p)
    if lifted is None:
        return None
    generators = [[p * v for v in row] for row in _sublattice_basis(gram, lifted, p)] + [lifted]
    _, s, _ = smith_normal_decomp(domain_matrix(generators))
    basis = mat_mul(to_int_rows(s), generators)[:n]
    scaled = mat_mul(mat_mul(basis, gram), transpose(basis))
    if any(v % (p * p) for row in scaled for v in row):
        raise InvariantViolation("neighbor Gram matrix is not integral")
    new = [[v // (p * p) for v in row] for row in scaled]
    _, reduced = lll_gram(new)
    return reduced


def isotropic_lines(
    L: GramLattice,
    p: int,
    limit: Optional[int] = None,
    seed: int = 0,
    hints: Iterable[Sequence[int]] = (),
) -> List[Vector]:
    """Isotropic lines of L/pL; all of them when few enough, else hints plus a random sample.

    Args:
        limit: Maximum number of lines returned (None: no limit, full enumeration).
        seed: Seed of the sampling generator.
        hints: Vectors tried first, typically short vectors of L.
    """
    _, gram = _positive(L)
    n = L.rank
    total = (p**n - 1) // (p - 1)
    found: List[Vector] = []
    seen = set()

    def offer(v: Sequence[int]) -> bool:
        line = normalize_line(v, p)
        if line is not None and line not in seen and is_isotropic(gram, line, p):
            seen.add(line)
            found.append(line)
        return limit is not None and len(found) >= limit

    for v in hints:
        if offer(v):
            return found
    if limit is None or total <= min(limit * 4, FULL_LINE_LIMIT):
        for k in range(n):
            for tail in itertools.product(range(p), repeat=n - k - 1):
                if offer((0,) * k + (1,) + tail):
                    return found
        return found
    rng = np.random.default_rng(seed)
    G = np.array(gram, dtype=np.int64) % (2 * p)
    attempts = 0
    while len(found) < limit and attempts < 64 * limit:
        batch = rng.integers(0, p, size=(4 * limit, n), dtype=np.int64)
        values = np.einsum("ij,jk,ik->i", batch, G, batch) % (2 * p)
        attempts += len(batch)
        for row in batch[values == 0]:
            if offer(tuple(int(v) for v in row)):
                break
    return found


def _build(gram: List[List[int]], sign: int, lines: Sequence[Vector], p: int) -> List[List[List[int]]]:
    out = []
    for x in lines:
        reduced = neighbor_gram(gram, x, p)
        if reduced is not None:
            out.append([[sign * v for v in row] for row in reduced])
    return out


def neighbors(
    L: GramLattice,
    p: int,
    limit: Optional[int] = None,
    seed: int = 0,
    hints: Iterable[Sequence[int]] = (),
    descriptor: Optional[GenusDescriptor] = None,
    verify: bool = True,
    n_jobs: int = 1,
) -> List[GramLattice]:
    """p-neighbors of an even definite lattice, one per isotropic line tried.

    Returns an empty list when L/pL has no isotropic line.

    Raises:
        LatticeInputError: L is odd or indefinite.
        InvariantViolation: a neighbor leaves the genus of L.
    """
    L.require_even("neighbors")
    sign, gram = _positive(L)
    if L.det % p == 0:
        logger.warning(f"neighbor prime {p} divides det {L.det}; neighbors may leave the genus")
    lines = isotropic_lines(L, p, limit, seed, hints)
    if not lines:
        return []
    if n_jobs == 1 or len(lines) < 64:
        grams = _build(gram, sign, lines, p)
    else:
        chunks = [lines[i:i + 64] for i in range(0, len(lines), 64)]
        parts = Parallel(n_jobs=n_jobs)(delayed(_build)(gram, sign, chunk, p) for chunk in chunks)
        grams = [g for part in parts for g in part]
    result = [GramLattice(g, label=None) for g in grams]
    if verify:
        descriptor = descriptor or genus_descriptor(L)
        for M in result:
            if M.det != L.det or not M.is_even or not descriptor.contains(M):
                raise InvariantViolation(f"{p}-neighbor left the genus of {L}")
    logger.debug(f"{len(result)} {p}-neighbors from {len(lines)} isotropic lines")
    return result
