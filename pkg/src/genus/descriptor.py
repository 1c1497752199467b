"""Genus descriptors: signature plus discriminant form up to isometry."""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

from src.finqform.orthogonal_group import DEFAULT_CAP, are_isometric
from src.lattice.discriminant import FiniteQuadraticForm, discriminant_form
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)

K3_LATTICE_RANK = 22


@dataclass(frozen=True)
class GenusDescriptor:
    """A genus of even lattices.

    `representative` is optional; the mass needs one to read off local data.
    """

    signature: Tuple[int, int]
    form: FiniteQuadraticForm = field(compare=False)
    representative: Optional[GramLattice] = field(default=None, compare=False)

    def __post_init__(self):
        if self.form.order != abs(self.determinant):
            raise LatticeInputError(
                f"discriminant form of order {self.form.order} does not match determinant {self.determinant}"
            )

    @property
    def rank(self) -> int:
        return self.signature[0] + self.signature[1]

    @property
    def determinant(self) -> int:
        if self.representative is not None:
            return self.representative.det
        return (-1) ** self.signature[1] * self.form.order

    def contains(self, L: GramLattice, cap: int = DEFAULT_CAP) -> bool:
        """Membership test: even, same signature, isometric discriminant form."""
        if not L.is_even or L.signature() != self.signature:
            return False
        return are_isometric(discriminant_form(L), self.form, cap) is not None

    def with_representative(self, L: GramLattice) -> "GenusDescriptor":
        if not self.contains(L):
            raise LatticeInputError("seed not in frame genus")
        return GenusDescriptor(self.signature, self.form, L)

    def describe(self) -> str:
        return f"genus of signature {self.signature}, discriminant {self.form.describe()}"


def genus_descriptor(L: GramLattice) -> GenusDescriptor:
    """The genus of an even lattice, with L itself as representative."""
    return GenusDescriptor(L.signature(), discriminant_form(L), L)


def frame_genus_descriptor(T: GramLattice) -> GenusDescriptor:
    """The frame genus of a K3 surface with transcendental lattice T.

    Frames W have rank 20 - rank(T), are negative definite, and q_W = -q_T.

    Raises:
        LatticeInputError: T is odd, has rank outside 1..20 or signature other than (2, rank - 2).
    """
    T.require_even("frame_genus_descriptor")
    if not 1 <= T.rank <= 20:
        raise LatticeInputError(f"transcendental lattice must have rank 1..20, got {T.rank}")
    if T.signature() != (2, T.rank - 2):
        raise LatticeInputError(f"transcendental lattice must have signature (2, {T.rank - 2}), got {T.signature()}")
    rank = K3_LATTICE_RANK - 2 - T.rank
    descriptor = GenusDescriptor((0, rank), discriminant_form(T).negated())
    logger.debug(f"Frame genus: rank {rank}, {descriptor.form.describe()}")
    return descriptor


def in_same_genus(L1: GramLattice, L2: GramLattice, cap: int = DEFAULT_CAP) -> bool:
    """Equal signatures and isometric discriminant forms (both lattices even).

    Raises:
        LatticeInputError: either lattice is odd.
    """
    L1.require_even("in_same_genus")
    L2.require_even("in_same_genus")
    if L1.signature() != L2.signature() or abs(L1.det) != abs(L2.det):
        return False
    return are_isometric(discriminant_form(L1), discriminant_form(L2), cap) is not None
