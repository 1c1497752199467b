"""Genus enumeration by Kneser neighbor walks, certified by the mass formula."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from joblib import Memory
from sympy import Rational
from tqdm import tqdm

from src.definite.automorphisms import DEFAULT_CAP, automorphism_group, isometric
from src.definite.roots import mordell_weil, root_classification
from src.definite.short_vectors import iter_short_vectors, theta_coefficients
from src.genus.descriptor import GenusDescriptor, genus_descriptor
from src.genus.mass import mass
from src.genus.neighbors import is_isotropic, neighbors
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import GenusWalkIncomplete, InvariantViolation
from src.utils.helpers import primes_coprime_to

logger = logging.getLogger(__name__)

InvariantKey = Tuple


@dataclass
class WalkOptions:
    """Tuning of the neighbor walk; every field is part of the cache key."""

    primes: Tuple[int, ...] = ()
    max_candidates: int = 400
    max_rounds: int = 12
    max_primes: int = 4
    theta_norm: int = 2
    hint_norm: int = 12
    hint_share: float = 0.5
    random_seed: int = 20240601
    retries: int = 4
    cap: int = DEFAULT_CAP
    n_jobs: int = 1
    progress: bool = True


@dataclass
class GenusList:
    """Representatives of a genus with their automorphism group orders.

    `mass_history[i]` is the accumulated mass after the first i + 1 classes.
    """

    descriptor: GenusDescriptor
    representatives: List[GramLattice] = field(default_factory=list)
    automorphism_orders: List[int] = field(default_factory=list)
    expected_mass: Rational = Rational(0)
    mass_history: List[Rational] = field(default_factory=list)
    primes_used: List[int] = field(default_factory=list)
    candidates_tried: int = 0

    @property
    def mass(self) -> Rational:
        return self.mass_history[-1] if self.mass_history else Rational(0)

    @property
    def complete(self) -> bool:
        return self.mass == self.expected_mass

    def __len__(self) -> int:
        return len(self.representatives)

    def add(self, W: GramLattice, order: int) -> None:
        self.representatives.append(W)
        self.automorphism_orders.append(order)
        self.mass_history.append(self.mass + Rational(1, order))


def class_invariants(W: GramLattice, theta_norm: int = 2) -> InvariantKey:
    """Isometry invariants used to bucket candidates before isometry testing."""
    datum = root_classification(W)
    mw = mordell_weil(W, datum)
    theta = theta_coefficients(W, theta_norm) if theta_norm > 2 else (datum.root_count,)
    return W.det, datum.symbol, mw.symbol, theta


def _prime_schedule(det: int, options: WalkOptions) -> List[int]:
    if options.primes:
        return list(options.primes)
    odd = primes_coprime_to(det, options.max_primes, start=3)
    if det % 2:
        odd = odd[: max(options.max_primes - 1, 1)] + [2]
    return odd


def _hints(W: GramLattice, p: int, count: int, norm: int, skip: int = 0) -> List[Tuple[int, ...]]:
    """Short vectors of W that are isotropic mod p, after the first `skip` of them."""
    if count <= 0:
        return []
    sign = 1 if W.is_positive_definite() else -1
    gram = [[sign * x for x in row] for row in W.gram]
    found = (v for _, v in iter_short_vectors(W, norm) if is_isotropic(gram, v, p))
    return list(itertools.islice(found, skip, skip + count))


class _Walk:
    def __init__(self, seed: GramLattice, options: WalkOptions):
        self.options = options
        self.genus = GenusList(genus_descriptor(seed))
        self.buckets: Dict[InvariantKey, List[int]] = {}
        self.genus.expected_mass = mass(seed)
        self.attempt = 0
        self.bar = tqdm(desc="genus classes", unit="class", disable=not options.progress)

    def offer(self, W: GramLattice) -> bool:
        """Add W unless it is isometric to a known class; returns True for a new class."""
        key = class_invariants(W, self.options.theta_norm)
        bucket = self.buckets.setdefault(key, [])
        for index in bucket:
            if isometric(W, self.genus.representatives[index], self.options.cap) is not None:
                return False
        order = automorphism_group(W, cap=self.options.cap).order
        bucket.append(len(self.genus))
        self.genus.add(W, order)
        self.bar.update(1)
        logger.info(
            f"class {len(self.genus)}: {key[1]}, |O(W)| = {order}, mass {self.genus.mass} of {self.genus.expected_mass}"
        )
        if self.genus.mass > self.genus.expected_mass:
            raise InvariantViolation("accumulated mass exceeds the mass of the genus")
        return True

    def run_prime(self, p: int) -> None:
        opts = self.options
        hint_count = int(opts.max_candidates * opts.hint_share)
        frontier = list(range(len(self.genus)))
        stale = 0
        for rnd in range(opts.max_rounds):
            if self.genus.complete:
                return
            fresh = []
            for index in frontier:
                W = self.genus.representatives[index]
                step = rnd + self.attempt * opts.max_rounds
                hints = _hints(W, p, hint_count, opts.hint_norm, skip=step * hint_count)
                candidates = neighbors(
                    W, p, limit=opts.max_candidates, seed=opts.random_seed + 7919 * step + index,
                    hints=hints, descriptor=self.genus.descriptor, n_jobs=opts.n_jobs,
                )
                self.genus.candidates_tried += len(candidates)
                for M in candidates:
                    if self.offer(M):
                        fresh.append(len(self.genus) - 1)
                        if self.genus.complete:
                            return
            logger.debug(f"p = {p}, round {rnd + 1}: {len(fresh)} new classes")
            stale = 0 if fresh else stale + 1
            if stale == 2:
                return
            # resample every class when a round brought nothing new
            frontier = fresh or list(range(len(self.genus)))


def _enumerate(seed: GramLattice, options: WalkOptions) -> GenusList:
    seed.require_even("enumerate_genus")
    walk = _Walk(seed, options)
    try:
        walk.offer(seed)
        schedule = _prime_schedule(seed.det, options)
        # a retry reruns the schedule with fresh samples, keeping the classes found so far
        for attempt in range(options.retries + 1):
            walk.attempt = attempt
            for p in schedule:
                if walk.genus.complete:
                    break
                walk.genus.primes_used.append(p)
                logger.info(f"Neighbor walk at p = {p} (attempt {attempt + 1})")
                walk.run_prime(p)
            if walk.genus.complete:
                break
    finally:
        walk.bar.close()
    genus = walk.genus
    if not genus.complete:
        raise GenusWalkIncomplete(genus.mass, genus.expected_mass, len(genus))
    logger.info(f"Genus complete: {len(genus)} classes, mass {genus.mass}")
    return genus


def enumerate_genus(
    seed: GramLattice,
    options: Optional[WalkOptions] = None,
    cache_dir: Optional[str] = None,
) -> GenusList:
    """All classes in the genus of an even definite seed.

    Raises:
        LatticeInputError: the seed is odd or indefinite.
        GenusWalkIncomplete: every prime was tried without reaching the mass of the genus.
    """
    options = options or WalkOptions()
    if cache_dir:
        memory = Memory(cache_dir, verbose=0)
        cached = memory.cache(_enumerate_cached, ignore=["progress", "n_jobs"])
        return cached(seed.gram, seed.label, options.primes, options.max_candidates, options.max_rounds,
                      options.max_primes, options.theta_norm, options.hint_norm, options.hint_share,
                      options.random_seed, options.retries, options.cap, options.progress, options.n_jobs)
    return _enumerate(seed, options)


def _enumerate_cached(gram, label, primes, max_candidates, max_rounds, max_primes, theta_norm, hint_norm,
                      hint_share, random_seed, retries, cap, progress, n_jobs) -> GenusList:
    options = WalkOptions(tuple(primes), max_candidates, max_rounds, max_primes, theta_norm, hint_norm,
                          hint_share, random_seed, retries, cap, n_jobs, progress)
    return _enumerate(GramLattice(gram, label), options)


def walk_options_from_settings(settings, primes: Sequence[int] = (), progress: bool = True) -> WalkOptions:
    """WalkOptions from validated PipelineSettings; explicit primes win over the configured list."""
    return WalkOptions(
        primes=tuple(primes or settings.neighbor_primes),
        max_candidates=settings.max_candidates,
        max_rounds=settings.max_rounds,
        max_primes=settings.max_primes,
        theta_norm=settings.dedup_theta_norm,
        hint_norm=settings.short_vector_norm,
        hint_share=settings.short_vector_share,
        random_seed=settings.random_seed,
        retries=settings.mass_retry_limit,
        cap=settings.enumeration_cap,
        n_jobs=settings.n_jobs,
        progress=progress,
    )
