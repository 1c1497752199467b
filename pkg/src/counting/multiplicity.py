"""Frame multiplicities |H \\ O(T^#) / O^#(W)| and the total number of jacobian fibrations."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed
from sympy import primefactors

from src.counting.hodge import HodgeSpec, hodge_subgroup, minus_identity_image, resolve_hodge
from src.definite.automorphisms import DEFAULT_CAP, automorphism_group
from src.definite.discriminant_image import induced_isometry
from src.definite.roots import mordell_weil, root_classification
from src.finqform.orthogonal_group import FiniteIsometry, FiniteOrthGroup, are_isometric, orthogonal_group, transport
from src.finqform.subgroups import Subgroup, double_coset_count, image_subgroup, right_coset_count
from src.genus.descriptor import GenusDescriptor, frame_genus_descriptor
from src.genus.enumerate import GenusList, WalkOptions, enumerate_genus
from src.lattice.ade import parse_lattice_symbol
from src.lattice.discriminant import FiniteQuadraticForm, discriminant_form
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)


@dataclass
class FrameData:
    """Invariants of one frame W and the image of O(W) transported into O(T^#)."""

    index: int
    lattice: GramLattice
    root_type: str
    mordell_weil: str
    mw_free_rank: int
    mw_torsion: Tuple[int, ...]
    root_count: int
    automorphism_order: int
    image: Subgroup

    @property
    def name(self) -> str:
        return f"W{self.index:02d}"

    @property
    def quadruple(self) -> Tuple[str, str, int, int]:
        return self.root_type, self.mordell_weil, self.root_count, self.automorphism_order


@dataclass
class FibrationCount:
    """Multiplicities of every frame for one choice of H."""

    hodge_label: str
    hodge_order: int
    multiplicities: List[int]
    total: int
    frames: List[FrameData] = field(repr=False, default_factory=list)


@dataclass(frozen=True)
class UniformBounds:
    lower: int
    upper: int
    hodge_label: str
    frame_map_injective: bool
    all_images_full: bool


def frame_image(
    W: GramLattice,
    q_T: FiniteQuadraticForm,
    group: FiniteOrthGroup,
    generators: Optional[Sequence] = None,
    phi: Optional[FiniteIsometry] = None,
    cap: int = DEFAULT_CAP,
) -> Subgroup:
    """O^#(W) carried into O(T^#) through an isometry W^# -> T^#(-1).

    Raises:
        InvariantViolation: W^# is not isometric to T^#(-1), so W is not a frame of T.
    """
    q_W = discriminant_form(W)
    if phi is None:
        phi = are_isometric(q_W, q_T.negated(), cap)
        if phi is None:
            raise InvariantViolation(f"{W} is not in the frame genus: discriminant forms differ")
    if generators is None:
        generators = automorphism_group(W, cap=cap).generators
    images = sorted({transport(phi, group, induced_isometry(q_W, A).perm) for A in generators})
    return image_subgroup(group, images, "O#(W)")


def analyse_frame(
    index: int,
    W: GramLattice,
    q_T: FiniteQuadraticForm,
    group: FiniteOrthGroup,
    cap: int = DEFAULT_CAP,
) -> FrameData:
    datum = root_classification(W)
    mw = mordell_weil(W, datum)
    aut = automorphism_group(W, datum, cap)
    image = frame_image(W, q_T, group, aut.generators, cap=cap)
    logger.info(f"W{index:02d}: {datum.symbol}, MW {mw.symbol}, |O(W)| = {aut.order}, |O#(W)| = {image.order}")
    return FrameData(index, W, datum.symbol, mw.symbol, mw.free_rank, mw.torsion, datum.root_count, aut.order, image)


def _check_hodge(group: FiniteOrthGroup, q_T: FiniteQuadraticForm, H: Subgroup) -> None:
    if H.group is not group:
        raise LatticeInputError("Hodge subgroup lives in a different group")
    if minus_identity_image(group, q_T) not in H:
        raise InvariantViolation("Hodge subgroup does not contain the image of -id")
    if not H.is_cyclic():
        raise InvariantViolation("Hodge subgroup is not cyclic")


def frame_multiplicity(group: FiniteOrthGroup, H: Subgroup, K: Subgroup, odd_rank: bool = False) -> int:
    """|H \\ G / K|; for odd rank T also checked against |G| / |K|.

    Raises:
        InvariantViolation: the count is outside [1, |H\\G|] or disagrees with the odd-rank shortcut.
    """
    count = double_coset_count(group, H, K)
    if not 1 <= count <= right_coset_count(group, H):
        raise InvariantViolation(f"multiplicity {count} outside [1, {right_coset_count(group, H)}]")
    if odd_rank and count * K.order != group.order:
        raise InvariantViolation(f"odd-rank shortcut: {count} * {K.order} != {group.order}")
    return count


def multiplicity(
    T: GramLattice,
    W: GramLattice,
    hodge: Union[HodgeSpec, Subgroup],
    q_T: Optional[FiniteQuadraticForm] = None,
    group: Optional[FiniteOrthGroup] = None,
    entry_bound: int = 10,
    cap: int = DEFAULT_CAP,
) -> int:
    """Number of jacobian fibrations with frame W, up to automorphisms.

    Raises:
        LatticeInputError: the HodgeSpec resolves to more than one subgroup.
        InvariantViolation: H is not a cyclic subgroup containing -id, or a consistency check fails.
    """
    q_T = q_T or discriminant_form(T)
    group = group or orthogonal_group(q_T, cap)
    if isinstance(hodge, HodgeSpec):
        options = resolve_hodge(hodge, T, q_T, group, entry_bound, cap)
        if len(options) != 1:
            raise LatticeInputError(f"Hodge choice is ambiguous: {', '.join(label for label, _ in options)}")
        hodge = options[0][1]
    _check_hodge(group, q_T, hodge)
    K = frame_image(W, q_T, group, cap=cap)
    return frame_multiplicity(group, hodge, K, T.rank % 2 == 1)


def default_seed(descriptor: GenusDescriptor) -> Optional[GramLattice]:
    """The only lattice of a rank one frame genus."""
    if descriptor.rank == 1:
        return GramLattice([[-abs(descriptor.determinant)]], f"[{-abs(descriptor.determinant)}]")
    return None


class FrameGenusAnalysis:
    """The frame genus of T enumerated once, with O^#(W) of every frame inside O(T^#).

    Args:
        T (GramLattice): The transcendental lattice, signature (2, rank - 2).
        seed (Optional[GramLattice]): A frame; required when the frame genus has rank >= 2.
        lifts: Optional generator lifts fixing the coordinates of T^#.
        genus (Optional[GenusList]): A precomputed genus list.
    """

    def __init__(
        self,
        T: GramLattice,
        seed: Optional[GramLattice] = None,
        lifts=None,
        walk: Optional[WalkOptions] = None,
        cache_dir: Optional[str] = None,
        genus: Optional[GenusList] = None,
        entry_bound: int = 10,
        n_jobs: int = 1,
        hodge_max_rank: int = 6,
    ):
        self.T = T
        self.hodge_max_rank = hodge_max_rank
        self.walk = walk or WalkOptions()
        self.cap = self.walk.cap
        self.entry_bound = entry_bound
        self.n_jobs = n_jobs
        self.descriptor = frame_genus_descriptor(T)
        self.q = discriminant_form(T, lifts)
        self.group = orthogonal_group(self.q, self.cap, n_jobs)
        if genus is None:
            seed = seed or default_seed(self.descriptor)
            if seed is None:
                raise LatticeInputError("a seed frame is needed for a frame genus of rank >= 2")
            self.descriptor = self.descriptor.with_representative(seed)
            genus = enumerate_genus(seed, self.walk, cache_dir)
        self.genus = genus
        self.frames = [analyse_frame(i + 1, W, self.q, self.group, self.cap) for i, W in enumerate(genus.representatives)]

    def hodge_options(self, spec: HodgeSpec) -> List[Tuple[str, Subgroup]]:
        return resolve_hodge(spec, self.T, self.q, self.group, self.entry_bound, self.cap, self.hodge_max_rank)

    def count(self, label: str, H: Subgroup) -> FibrationCount:
        _check_hodge(self.group, self.q, H)
        odd = self.T.rank % 2 == 1
        if self.n_jobs == 1:
            counts = [frame_multiplicity(self.group, H, f.image, odd) for f in self.frames]
        else:
            counts = Parallel(n_jobs=self.n_jobs, prefer="threads")(
                delayed(frame_multiplicity)(self.group, H, f.image, odd) for f in self.frames
            )
        total = sum(counts)
        logger.info(f"{label}: {total} jacobian fibrations over {len(self.frames)} frames")
        return FibrationCount(label, H.order, counts, total, self.frames)

    def bounds(self, label: str, H: Subgroup) -> UniformBounds:
        lower = len(self.frames)
        upper = lower * right_coset_count(self.group, H)
        full = all(f.image.order == self.group.order for f in self.frames)
        return UniformBounds(lower, upper, label, lower == upper, full)


def count_fibrations(
    T: GramLattice,
    hodge: HodgeSpec = HodgeSpec(),
    seed: Optional[GramLattice] = None,
    lifts=None,
    walk: Optional[WalkOptions] = None,
    cache_dir: Optional[str] = None,
    entry_bound: int = 10,
    n_jobs: int = 1,
) -> List[FibrationCount]:
    """|J_X / Aut(X)| = sum of multiplicities over the frame genus, one result per admissible H."""
    analysis = FrameGenusAnalysis(T, seed, lifts, walk, cache_dir, entry_bound=entry_bound, n_jobs=n_jobs)
    return [analysis.count(label, H) for label, H in analysis.hodge_options(hodge)]


def uniform_bounds(
    T: GramLattice,
    hodge: HodgeSpec = HodgeSpec(),
    seed: Optional[GramLattice] = None,
    walk: Optional[WalkOptions] = None,
    cache_dir: Optional[str] = None,
) -> List[UniformBounds]:
    """|W_X| <= |J_X / Aut(X)| <= |W_X| * |H \\ O(T^#)| for each admissible H."""
    analysis = FrameGenusAnalysis(T, seed, walk=walk, cache_dir=cache_dir)
    return [analysis.bounds(label, H) for label, H in analysis.hodge_options(hodge)]


def picard_rank_three_lattice(d: int) -> GramLattice:
    """T = U + E8(-1)^2 + [2d], the transcendental lattice when S_X = U + [-2d]."""
    if d < 1:
        raise LatticeInputError("d must be a positive integer")
    return parse_lattice_symbol(f"U+E8+E8+[{2 * d}]")


def picard_rank_three_count(d: int) -> int:
    """Jacobian fibrations of a K3 surface with S_X = U + [-2d] and generic Hodge structure."""
    if d < 1:
        raise LatticeInputError("d must be a positive integer")
    if d == 1:
        return 1
    return 2 ** (len(primefactors(d)) - 1)


def trivial_hodge(group: FiniteOrthGroup, q: FiniteQuadraticForm) -> Subgroup:
    """The image of {+-id}."""
    return hodge_subgroup(group, q, minus_identity_image(group, q), "+-id")

