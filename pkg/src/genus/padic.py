"""p-adic Jordan decompositions of integral Gram matrices, computed exactly over QQ."""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from sympy import QQ
from sympy.ntheory import legendre_symbol

from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JordanConstituent:
    """The p^scale-modular constituent of a Jordan decomposition.

    `det_unit` is the determinant unit as a residue: mod 8 for p = 2, mod p otherwise.
    `type_one` and `oddity` only carry information for p = 2.
    """

    p: int
    scale: int
    dimension: int
    det_unit: int
    type_one: bool = False
    oddity: int = 0

    @property
    def sign(self) -> int:
        """The unit square class: Legendre symbol for odd p, Kronecker (det/2) for p = 2."""
        if self.dimension == 0:
            return 1
        if self.p == 2:
            return 1 if self.det_unit % 8 in (1, 7) else -1
        return legendre_symbol(self.det_unit % self.p, self.p)

    @property
    def octane(self) -> int:
        return (self.oddity + (4 if self.sign == -1 else 0)) % 8

    def symbol(self) -> str:
        sign = "+" if self.sign == 1 else "-"
        q = self.p ** self.scale
        if self.p != 2:
            return f"{q}^{sign}{self.dimension}"
        suffix = f"_{self.oddity}" if self.type_one else ""
        return f"[{q}^{sign}{self.dimension}]{suffix}"


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = QQ(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = int(x.numerator), int(x.denominator)
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_residue(x, p: int, modulus: int) -> int:
    """x / p^v(x) reduced modulo `modulus` (a power of p)."""
    x = QQ(x)
    v = valuation(x, p)
    u = x / QQ(p) ** v
    return int(u.numerator) * pow(int(u.denominator), -1, modulus) % modulus


def _blocks(gram: Sequence[Sequence[int]], p: int) -> List[Tuple[int, List]]:
    """Diagonalize by p-integral congruences into 1x1 and (p = 2 only) 2x2 blocks.

    Returns (scale, block) with block a list of rationals [a] or [a, b, c] for [[a, b], [b, c]].
    """
    n = len(gram)
    A = [[QQ(x) for x in row] for row in gram]
    active = list(range(n))
    out: List[Tuple[int, List]] = []
    while active:
        entries = [(valuation(A[i][j], p), i != j, i, j) for i in active for j in active if j >= i and A[i][j] != 0]
        if not entries:
            raise LatticeInputError("degenerate lattice")
        v_min = min(e[0] for e in entries)
        diagonal = [e for e in entries if e[0] == v_min and not e[1]]
        if diagonal:
            i = diagonal[0][2]
            pivot = A[i][i]
            active.remove(i)
            for k in active:
                f = A[k][i] / pivot
                if f:
                    for l in active:
                        A[k][l] -= f * A[i][l]
            out.append((v_min, [pivot]))
            continue
        _, _, i, j = next(e for e in entries if e[0] == v_min)
        if p != 2:
            # e_i -> e_i + e_j creates a diagonal entry of minimal valuation
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            continue
        a, b, c = A[i][i], A[i][j], A[j][j]
        det = a * c - b * b
        active.remove(i)
        active.remove(j)
        for k in active:
            x, y = A[k][i], A[k][j]
            if not x and not y:
                continue
            # row_k -= (x, y) B^-1 (row_i, row_j)
            s = (x * c - y * b) / det
            t = (y * a - x * b) / det
            for l in active:
                A[k][l] -= s * A[i][l] + t * A[j][l]
        out.append((v_min, [a, b, c]))
    return out


def jordan_decomposition(L: GramLattice, p: int) -> List[JordanConstituent]:
    """Jordan constituents of L ⊗ Z_p, sorted by scale; negative definite input is negated.

    Raises:
        LatticeInputError: L is degenerate.
    """
    gram = L.gram
    if L.rank and L.is_negative_definite():
        gram = [[-x for x in row] for row in gram]
    modulus = 8 if p == 2 else p
    collected = {}
    for scale, block in _blocks(gram, p):
        entry = collected.setdefault(scale, {"dim": 0, "det": 1, "type_one": False, "oddity": 0})
        if len(block) == 1:
            u = unit_residue(block[0], p, modulus)
            entry["dim"] += 1
            entry["det"] = entry["det"] * u % modulus
            if p == 2:
                entry["type_one"] = True
                entry["oddity"] = (entry["oddity"] + u) % 8
        else:
            a, b, c = block
            entry["dim"] += 2
            entry["det"] = entry["det"] * unit_residue(a * c - b * b, p, modulus) % modulus
    return [
        JordanConstituent(p, s, e["dim"], e["det"], e["type_one"], e["oddity"])
        for s, e in sorted(collected.items())
    ]


def dense_constituents(constituents: List[JordanConstituent], p: int) -> List[JordanConstituent]:
    """Fill every missing scale (and one on each side) with a zero-dimensional constituent."""
    if not constituents:
        return []
    by_scale = {c.scale: c for c in constituents}
    lo, hi = min(by_scale) - 1, max(by_scale) + 1
    return [by_scale.get(k, JordanConstituent(p, k, 0, 1)) for k in range(lo, hi + 1)]


def genus_symbol(L: GramLattice, primes: Sequence[int]) -> str:
    """Compact local symbol string, e.g. '2: [1^+2][2^-2] | 3: 1^+1 3^-1'."""
    parts = []
    for p in primes:
        parts.append(f"{p}: " + " ".join(c.symbol() for c in jordan_decomposition(L, p)))
    return " | ".join(parts)
