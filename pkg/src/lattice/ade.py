"""Standard lattices: ADE root lattices (negative definite), U, U(n) and [k]."""
import re
from math import factorial
from typing import List, Tuple

import networkx as nx

from src.lattice.gram_lattice import GramLattice, direct_sum, rescale
from src.utils.exceptions import LatticeInputError

_TOKEN = re.compile(r"(?:(?P<ade>[ADE])_?(?P<n>\d+)|(?P<u>U)|\[(?P<k>[+-]?\d+)\])(?:\((?P<scale>[+-]?\d+)\))?(?:\^(?P<power>\d+))?")
_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")


def dynkin_graph(kind: str, n: int) -> nx.Graph:
    """Dynkin diagram of A_n, D_n or E_n with nodes 0..n-1."""
    _check_ade(kind, n)
    graph = nx.path_graph(n if kind == "A" else n - 1)
    if kind == "D":
        graph.add_edge(n - 3, n - 1)
    elif kind == "E":
        graph.add_edge(2, n - 1)
    return graph


def _check_ade(kind: str, n: int) -> None:
    valid = (kind == "A" and n >= 1) or (kind == "D" and n >= 4) or (kind == "E" and n in (6, 7, 8))
    if not valid:
        raise LatticeInputError(f"invalid ADE symbol {kind}{n}")


def ade_gram(kind: str, n: int) -> List[List[int]]:
    """Negative definite Cartan Gram matrix: -2 on the diagonal, 1 on edges."""
    graph = dynkin_graph(kind, n)
    gram = [[0] * n for _ in range(n)]
    for i in range(n):
        gram[i][i] = -2
    for i, j in graph.edges:
        gram[i][j] = gram[j][i] = 1
    return gram


def ade_lattice(symbol: str) -> GramLattice:
    """One block: A_n, D_n, E_n, U, U(n) or [k], e.g. 'D11', 'E_8', 'U(2)' or '[-4]'.

    Raises:
        LatticeInputError: the symbol is not a single block.
    """
    match = _TOKEN.fullmatch(symbol.strip())
    if not match or match.group("power"):
        raise LatticeInputError(f"not a single lattice block: {symbol!r}")
    lattice, _ = _block(match)
    return lattice


def root_count(kind: str, n: int) -> int:
    _check_ade(kind, n)
    if kind == "A":
        return n * (n + 1)
    if kind == "D":
        return 2 * n * (n - 1)
    return {6: 72, 7: 126, 8: 240}[n]


def weyl_order(kind: str, n: int) -> int:
    _check_ade(kind, n)
    if kind == "A":
        return factorial(n + 1)
    if kind == "D":
        return 2 ** (n - 1) * factorial(n)
    return {6: 51840, 7: 2903040, 8: 696729600}[n]


def _block(match: re.Match) -> Tuple[GramLattice, int]:
    if match.group("ade"):
        kind, n = match.group("ade"), int(match.group("n"))
        lattice = GramLattice(ade_gram(kind, n), f"{kind}{n}")
    elif match.group("u"):
        lattice = GramLattice([[0, 1], [1, 0]], "U")
    else:
        k = int(match.group("k"))
        lattice = GramLattice([[k]], f"[{k}]")
    if match.group("scale"):
        lattice = rescale(lattice, int(match.group("scale")))
    return lattice, int(match.group("power") or 1)


def parse_lattice_symbol(symbol: str) -> GramLattice:
    """Parse sums like 'D4+D4+E8', 'U+U(2)', 'U(2)^2 + [-4]', 'A1^6 D8' or 'D4²E8'."""
    text = re.sub(r"[⁰¹²³⁴⁵⁶⁷⁸⁹]+", lambda m: "^" + m.group(0).translate(_SUPERSCRIPTS), symbol)
    text = re.sub(r"[+⊕\s]+", "", text)
    if not text:
        raise LatticeInputError("empty lattice symbol")
    blocks, pos = [], 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise LatticeInputError(f"invalid lattice symbol {symbol!r} at {text[pos:]!r}")
        lattice, power = _block(match)
        blocks.extend([lattice] * power)
        pos = match.end()
    result = direct_sum(*blocks)
    result.label = symbol.strip()
    return result
