"""Root systems of definite lattices: simple roots, ADE components and W/W_root."""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher
from sympy.polys.matrices.normalforms import smith_normal_form

from src.definite.short_vectors import Vector, definite_sign, short_vectors
from src.lattice.ade import dynkin_graph, root_count, weyl_order
from src.lattice.gram_lattice import GramLattice, domain_matrix, to_int_rows
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)

_KIND_ORDER = {"A": 0, "D": 1, "E": 2}


@dataclass(frozen=True)
class RootComponent:
    """One irreducible component; simple roots listed in the standard Dynkin labelling."""

    kind: str
    rank: int
    simple_roots: Tuple[Vector, ...]

    @property
    def symbol(self) -> str:
        return f"{self.kind}{self.rank}"

    @property
    def sort_key(self) -> Tuple[int, int]:
        return _KIND_ORDER[self.kind], self.rank


@dataclass(frozen=True)
class RootDatum:
    """Roots of W: count, ADE components and a simple-root basis of W_root in W-coordinates."""

    root_count: int
    components: Tuple[RootComponent, ...]
    positive_roots: Tuple[Vector, ...] = field(repr=False, default=())

    @property
    def simple_roots(self) -> List[Vector]:
        return [r for c in self.components for r in c.simple_roots]

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.components)

    @property
    def symbol(self) -> str:
        return format_root_type([(c.kind, c.rank) for c in self.components])

    @property
    def weyl_order(self) -> int:
        out = 1
        for c in self.components:
            out *= weyl_order(c.kind, c.rank)
        return out


@dataclass(frozen=True)
class MordellWeil:
    """W/W_root as free rank plus torsion invariant factors."""

    free_rank: int
    torsion: Tuple[int, ...]

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def symbol(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        for d, k in sorted(Counter(self.torsion).items()):
            parts.append(f"Z/{d}" if k == 1 else f"(Z/{d})^{k}")
        return "+".join(parts) if parts else "0"


def format_root_type(components: Sequence[Tuple[str, int]]) -> str:
    """Canonical symbol such as 'A1^3D6E7'; '0' for no roots."""
    counts = Counter(components)
    parts = []
    for (kind, n) in sorted(counts, key=lambda c: (_KIND_ORDER[c[0]], c[1])):
        k = counts[(kind, n)]
        parts.append(f"{kind}{n}" if k == 1 else f"{kind}{n}^{k}")
    return "".join(parts) if parts else "0"


def all_roots(W: GramLattice) -> List[Vector]:
    """Roots up to sign: vectors with v² = -2 (or +2 for positive definite W)."""
    sign = definite_sign(W)
    return [v for v in short_vectors(W, 2) if W.norm(v) == 2 * sign]


def _generic_functional(roots: Sequence[Vector]) -> List[int]:
    bound = max((abs(x) for r in roots for x in r), default=0)
    base = 2 * bound + 1
    return [base ** i for i in range(len(roots[0]))] if roots else []


def _identify(graph: nx.Graph) -> Tuple[str, int, Dict[int, int]]:
    n = graph.number_of_nodes()
    for kind in ("A", "D", "E"):
        try:
            reference = dynkin_graph(kind, n)
        except LatticeInputError:
            continue
        matcher = GraphMatcher(reference, graph)
        if matcher.is_isomorphic():
            return kind, n, next(matcher.isomorphisms_iter())
    raise InvariantViolation(f"root component with {n} simple roots is not of ADE type")


def root_classification(W: GramLattice) -> RootDatum:
    """Simple roots from a generic functional, split into ADE components.

    Raises:
        InvariantViolation: a component fails the Cartan matrix check.
    """
    sign = definite_sign(W)
    pairs = all_roots(W)
    if not pairs:
        return RootDatum(0, (), ())
    f = _generic_functional(pairs)
    positive = []
    for r in pairs:
        value = sum(a * b for a, b in zip(f, r))
        positive.append(r if value > 0 else tuple(-x for x in r))
    positive_set = set(positive)
    simple = [
        a for a in positive
        if not any(tuple(x - y for x, y in zip(a, b)) in positive_set for b in positive if b != a)
    ]
    graph = nx.Graph()
    graph.add_nodes_from(range(len(simple)))
    for i in range(len(simple)):
        for j in range(i + 1, len(simple)):
            product = W.inner(simple[i], simple[j])
            if product:
                if product != -sign:
                    raise InvariantViolation("simple roots with inner product outside {0, 1}")
                graph.add_edge(i, j)
    components = []
    for nodes in nx.connected_components(graph):
        sub = nx.convert_node_labels_to_integers(graph.subgraph(sorted(nodes)), label_attribute="root")
        kind, n, mapping = _identify(sub)
        ordered = tuple(simple[sub.nodes[mapping[k]]["root"]] for k in range(n))
        components.append(RootComponent(kind, n, ordered))
    components.sort(key=lambda c: (c.sort_key, c.simple_roots))
    datum = RootDatum(2 * len(pairs), tuple(components), tuple(sorted(positive)))
    expected = sum(root_count(c.kind, c.rank) for c in components)
    if expected != datum.root_count:
        raise InvariantViolation(f"root count {datum.root_count} does not match {datum.symbol}")
    logger.debug(f"Root type {datum.symbol} with {datum.root_count} roots")
    return datum


def mordell_weil(W: GramLattice, datum: Optional[RootDatum] = None) -> MordellWeil:
    """W/W_root from the Smith normal form of the simple-root matrix."""
    datum = datum or root_classification(W)
    if not datum.components:
        return MordellWeil(W.rank, ())
    D = to_int_rows(smith_normal_form(domain_matrix(datum.simple_roots)))
    factors = [abs(D[i][i]) for i in range(min(len(D), len(D[0])))]
    if any(d == 0 for d in factors):
        raise InvariantViolation("simple roots are linearly dependent")
    torsion = tuple(d for d in factors if d > 1)
    return MordellWeil(W.rank - datum.rank, torsion)
