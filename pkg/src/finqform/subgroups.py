"""Subgroups, conjugacy classes and double cosets inside a materialized FiniteOrthGroup."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.finqform.orthogonal_group import FiniteIsometry, FiniteOrthGroup, closure
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of an ambient FiniteOrthGroup, kept as a sorted index array."""

    group: FiniteOrthGroup
    members: Tuple[int, ...]
    generators: Tuple[int, ...] = ()
    name: Optional[str] = None

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, index: int) -> bool:
        return int(index) in self.member_set

    @property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)

    def is_normal(self) -> bool:
        table, inv = self.group.table, self.group.inverses
        members = self.array
        mask = np.zeros(self.group.order, dtype=bool)
        mask[members] = True
        for g in self.group.generators:
            if not mask[table[table[g, members], inv[g]]].all():
                return False
        return True

    def is_cyclic(self) -> bool:
        return bool((self.group.element_orders[self.array] == self.order).any())

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"Subgroup(order={self.order}{label})"


def subgroup_generated(group: FiniteOrthGroup, gens: Sequence, name: Optional[str] = None) -> Subgroup:
    """Closure of `gens` (element indices or FiniteIsometry objects) inside the group.

    Raises:
        LatticeInputError: a generator is not an element of the group.
    """
    indices = [group.index_of(g) if isinstance(g, FiniteIsometry) else int(g) for g in gens]
    for i in indices:
        if not 0 <= i < group.order:
            raise LatticeInputError(f"element index {i} outside the group")
    members = closure(group, indices)
    return Subgroup(group, tuple(int(m) for m in members), tuple(indices), name)


def image_subgroup(group: FiniteOrthGroup, elements: Sequence, name: Optional[str] = None) -> Subgroup:
    """The subgroup generated by images of automorphisms (e.g. O^#(W) inside O(T^#))."""
    return subgroup_generated(group, elements, name)


def trivial_subgroup(group: FiniteOrthGroup) -> Subgroup:
    return Subgroup(group, (0,), (), "1")


def whole_group(group: FiniteOrthGroup) -> Subgroup:
    return Subgroup(group, tuple(range(group.order)), tuple(group.generators), "G")


@dataclass(frozen=True)
class ConjugacyClass:
    representative: int
    size: int
    element_order: int
    members: Tuple[int, ...]


def conjugacy_classes(group: FiniteOrthGroup) -> List[ConjugacyClass]:
    """Partition of the group into classes, ordered by first element index."""
    table, inv = group.table, group.inverses
    everything = np.arange(group.order)
    label = np.full(group.order, -1, dtype=np.int64)
    classes: List[ConjugacyClass] = []
    for h in range(group.order):
        if label[h] >= 0:
            continue
        # g^-1 h g for every g
        orbit = np.unique(table[table[inv, h], everything])
        label[orbit] = len(classes)
        classes.append(ConjugacyClass(h, len(orbit), int(group.element_orders[h]), tuple(int(x) for x in orbit)))
    if sum(c.size for c in classes) != group.order:
        raise InvariantViolation("conjugacy classes do not partition the group")
    return classes


def class_labels(group: FiniteOrthGroup, classes: Optional[List[ConjugacyClass]] = None) -> np.ndarray:
    classes = classes if classes is not None else conjugacy_classes(group)
    labels = np.empty(group.order, dtype=np.int64)
    for i, c in enumerate(classes):
        labels[list(c.members)] = i
    return labels


def conjugate(subgroup: Subgroup, g: int) -> Subgroup:
    """g·K·g^-1."""
    group = subgroup.group
    table, inv = group.table, group.inverses
    members = np.unique(table[table[g, subgroup.array], inv[g]])
    gens = tuple(int(table[table[g, x], inv[g]]) for x in subgroup.generators)
    return Subgroup(group, tuple(int(m) for m in members), gens, subgroup.name)


def is_conjugate_subgroup(group: FiniteOrthGroup, K1: Subgroup, K2: Subgroup) -> Tuple[bool, Optional[int]]:
    """Whether g·K1·g^-1 = K2 for some g, scanning the group; returns that g when it exists."""
    if K1.order != K2.order:
        return False, None
    table, inv = group.table, group.inverses
    target = K2.array
    k1 = K1.array
    orders1 = np.sort(group.element_orders[k1])
    if not np.array_equal(orders1, np.sort(group.element_orders[target])):
        return False, None
    for g in range(group.order):
        image = np.unique(table[table[g, k1], inv[g]])
        if np.array_equal(image, target):
            return True, g
    return False, None


def _double_cosets_by_partition(group: FiniteOrthGroup, H: Subgroup, K: Subgroup) -> List[np.ndarray]:
    table = group.table
    h, k = H.array, K.array
    assigned = np.zeros(group.order, dtype=bool)
    cosets = []
    for g in range(group.order):
        if assigned[g]:
            continue
        coset = np.unique(table[table[h, g][:, None], k[None, :]])
        assigned[coset] = True
        cosets.append(coset)
    return cosets


def _double_cosets_by_fixed_points(group: FiniteOrthGroup, H: Subgroup, K: Subgroup) -> int:
    classes = conjugacy_classes(group)
    labels = class_labels(group, classes)
    n_h = np.bincount(labels[H.array], minlength=len(classes))
    n_k = np.bincount(labels[K.array], minlength=len(classes))
    # (h, k) fixes g exactly when g^-1 h g = k; centralizer order is |G| / |class|
    total = Fraction(0)
    for c, cls in enumerate(classes):
        if n_h[c] and n_k[c]:
            total += Fraction(int(n_h[c]) * int(n_k[c]) * group.order, cls.size)
    count = total / (H.order * K.order)
    if count.denominator != 1:
        raise InvariantViolation(f"Cauchy-Frobenius sum {count} is not an integer")
    return int(count)


def double_cosets(group: FiniteOrthGroup, H: Subgroup, K: Subgroup) -> List[np.ndarray]:
    return _double_cosets_by_partition(group, H, K)


def double_coset_count(group: FiniteOrthGroup, H: Subgroup, K: Subgroup) -> int:
    """|H\\G/K|, by direct partition and by the Cauchy-Frobenius sum.

    Raises:
        InvariantViolation: the two computations disagree or the cosets do not cover G.
    """
    cosets = _double_cosets_by_partition(group, H, K)
    if sum(len(c) for c in cosets) != group.order:
        raise InvariantViolation("double cosets do not partition the group")
    by_fixed_points = _double_cosets_by_fixed_points(group, H, K)
    if by_fixed_points != len(cosets):
        raise InvariantViolation(
            f"double coset count mismatch: partition {len(cosets)} vs Cauchy-Frobenius {by_fixed_points}"
        )
    return len(cosets)


def right_coset_count(group: FiniteOrthGroup, H: Subgroup) -> int:
    return group.order // H.order


def subgroups_by_name(group: FiniteOrthGroup, named: Dict[str, List[List[List[int]]]]) -> Dict[str, Subgroup]:
    """Subgroups generated by named lists of generator matrices (from a subgroup data file)."""
    out = {}
    for name, matrices in named.items():
        gens = [FiniteIsometry(group.form, group.form, m) for m in matrices]
        out[name] = subgroup_generated(group, gens, name)
    return out
