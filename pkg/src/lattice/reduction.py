"""Integral LLL on Gram matrices (delta = 3/4), integer arithmetic only."""
import logging
from typing import List, Tuple

from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)


def lll_gram(gram) -> Tuple[List[List[int]], List[List[int]]]:
    """Reduce a positive definite Gram matrix.

    Args:
        gram: Symmetric positive definite integer matrix.

    Returns:
        Tuple[List[List[int]], List[List[int]]]: (H, B) with H unimodular and B = H·G·H^T reduced.
    """
    n = len(gram)
    B = [[0] * (n + 1)] + [[0] + [int(x) for x in row] for row in gram]
    H = [[0] * (n + 1)] + [[0] + [int(i == j) for j in range(n)] for i in range(n)]
    if n <= 1:
        return [row[1:] for row in H[1:]], [row[1:] for row in B[1:]]
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d = [0] * (n + 1)
    d[0], d[1] = 1, B[1][1]
    if d[1] <= 0:
        raise LatticeInputError("LLL needs a positive definite Gram matrix")

    def reduce_pair(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) <= d[l]:
            return
        q = (2 * lam[k][l] + d[l]) // (2 * d[l])
        H[k] = [a - q * b for a, b in zip(H[k], H[l])]
        for j in range(1, n + 1):
            B[k][j] -= q * B[l][j]
        for j in range(1, n + 1):
            if j != k:
                B[j][k] = B[k][j]
        B[k][k] -= q * B[k][l]
        lam[k][l] -= q * d[l]
        for i in range(1, l):
            lam[k][i] -= q * lam[l][i]

    def swap(k: int, kmax: int) -> None:
        H[k], H[k - 1] = H[k - 1], H[k]
        B[k], B[k - 1] = B[k - 1], B[k]
        for row in B:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        new_d = (d[k - 2] * d[k] + mu * mu) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - mu * t) // d[k - 1]
            lam[i][k - 1] = (new_d * t + mu * lam[i][k]) // d[k]
        d[k - 1] = new_d

    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = B[k][j]
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise LatticeInputError("LLL needs a positive definite Gram matrix")
                    d[k] = u
        reduce_pair(k, k - 1)
        if 4 * d[k] * d[k - 2] < 3 * d[k - 1] ** 2 - 4 * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(2, k - 1)
            continue
        for l in range(k - 2, 0, -1):
            reduce_pair(k, l)
        k += 1
    return [row[1:] for row in H[1:]], [row[1:] for row in B[1:]]


def lll_reduce(L: GramLattice) -> Tuple[GramLattice, List[List[int]]]:
    """LLL-reduce a definite lattice; negative definite input is reduced through its negation.

    Returns:
        Tuple[GramLattice, List[List[int]]]: the reduced lattice (same sign convention as L) and the
        unimodular transform H whose rows are the new basis in L-coordinates.
    """
    sign = 1
    if L.rank and not L.is_positive_definite():
        if not L.is_negative_definite():
            raise LatticeInputError("LLL reduction needs a definite lattice")
        sign = -1
    H, B = lll_gram([[sign * x for x in row] for row in L.gram])
    reduced = GramLattice([[sign * x for x in row] for row in B], L.label)
    return reduced, H
