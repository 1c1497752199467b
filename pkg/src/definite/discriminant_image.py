"""The image O^#(W) of O(W) in O(W^#)."""
import logging
from typing import List, Optional, Sequence

from src.finqform.orthogonal_group import FiniteIsometry, FiniteOrthGroup, orthogonal_group
from src.finqform.subgroups import Subgroup, subgroup_generated
from src.lattice.discriminant import FiniteQuadraticForm, discriminant_form
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)


def induced_isometry(q: FiniteQuadraticForm, A: Sequence[Sequence[int]]) -> FiniteIsometry:
    """The isometry of W^# induced by an automorphism A of W.

    Raises:
        InvariantViolation: A does not map W^# to itself compatibly with q.
    """
    if q.group is None:
        raise LatticeInputError("finite form carries no lattice data")
    try:
        return FiniteIsometry(q, q, q.group.action_of(A))
    except LatticeInputError as e:
        raise InvariantViolation(f"automorphism does not act on the discriminant group: {e}") from e


def discriminant_image(
    W: GramLattice,
    autgens: Sequence[Sequence[Sequence[int]]],
    q: Optional[FiniteQuadraticForm] = None,
    group: Optional[FiniteOrthGroup] = None,
) -> Subgroup:
    """O^#(W) as the subgroup of O(q_W) generated by the images of `autgens`."""
    q = q or discriminant_form(W)
    group = group or orthogonal_group(q)
    images: List[int] = sorted({group.index_of(induced_isometry(q, A)) for A in autgens})
    image = subgroup_generated(group, images, "O#(W)")
    logger.debug(f"|O#(W)| = {image.order} inside |O(q)| = {group.order}")
    return image
