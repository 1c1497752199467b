# Tests for finite quadratic forms, O(q), conjugacy classes and double cosets
import random
from pathlib import Path

import numpy as np
import pytest

from src.finqform.datafiles import format_subgroup_sections, parse_subgroup_text, read_subgroup_file
from src.finqform.orthogonal_group import FiniteIsometry, are_isometric, isometry_from_rows, orthogonal_group, transport
from src.finqform.subgroups import (
    conjugacy_classes,
    conjugate,
    double_coset_count,
    double_cosets,
    image_subgroup,
    is_conjugate_subgroup,
    right_coset_count,
    subgroup_generated,
    subgroups_by_name,
    trivial_subgroup,
    whole_group,
)
from src.lattice.ade import parse_lattice_symbol
from src.lattice.discriminant import discriminant_form, half_basis_lifts
from src.utils.exceptions import LatticeInputError

SUBGROUPS = Path(__file__).resolve().parents[1] / "data" / "subgroups"


def _half_form(symbol):
    T = parse_lattice_symbol(symbol)
    return discriminant_form(T, half_basis_lifts(T.rank))


@pytest.fixture(scope="module")
def kummer_group():
    return orthogonal_group(_half_form("U(2)+U(2)"))


@pytest.fixture(scope="module")
def oguiso_subgroups(kummer_group):
    return subgroups_by_name(kummer_group, read_subgroup_file(SUBGROUPS / "oguiso.txt"))


@pytest.fixture(scope="module")
def kloosterman_group():
    return orthogonal_group(_half_form("U(2)+U(2)+[-2]+[-2]"))


def test_trivial_form_has_trivial_group():
    group = orthogonal_group(discriminant_form(parse_lattice_symbol("E8")))
    assert group.order == 1
    assert len(conjugacy_classes(group)) == 1


@pytest.mark.parametrize("symbol,order", [
    ("U+U(2)", 2),
    ("U+[12]", 4),
    ("D4", 6),
    ("A2", 2),
])
def test_small_orthogonal_groups(symbol, order):
    assert orthogonal_group(discriminant_form(parse_lattice_symbol(symbol))).order == order


def test_kummer_group(kummer_group):
    assert kummer_group.order == 72
    assert len(conjugacy_classes(kummer_group)) == 9
    assert kummer_group.elements[0].rows == ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def test_kloosterman_group(kloosterman_group):
    assert kloosterman_group.order == 1440
    assert len(conjugacy_classes(kloosterman_group)) == 22


def test_kumar_group():
    assert orthogonal_group(discriminant_form(parse_lattice_symbol("U(2)+U(2)+[-4]"))).order == 1440


def test_cayley_table_is_a_group_law(kummer_group):
    table = kummer_group.table
    n = kummer_group.order
    assert np.array_equal(table[0], np.arange(n))
    assert np.array_equal(table[:, 0], np.arange(n))
    assert all(table[i, kummer_group.inverses[i]] == 0 for i in range(n))
    rng = random.Random(1)
    for _ in range(50):
        a, b, c = (rng.randrange(n) for _ in range(3))
        assert table[table[a, b], c] == table[a, table[b, c]]


def test_element_orders_divide_group_order(kummer_group):
    assert all(kummer_group.order % int(o) == 0 for o in kummer_group.element_orders)
    assert kummer_group.element_orders[0] == 1


def test_non_isometry_is_rejected():
    q = _half_form("U(2)+U(2)")
    with pytest.raises(LatticeInputError):
        FiniteIsometry(q, q, [[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]])
    with pytest.raises(LatticeInputError):
        FiniteIsometry(q, q, [[1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def test_are_isometric():
    q = discriminant_form(parse_lattice_symbol("A2"))
    assert are_isometric(q, q) is not None
    assert are_isometric(q, q.negated()) is None
    assert are_isometric(q, discriminant_form(parse_lattice_symbol("D4"))) is None
    # A2 and E6 have opposite forms on Z/3
    e6 = discriminant_form(parse_lattice_symbol("E6"))
    assert are_isometric(q.negated(), e6) is not None


def test_transport_of_identity_is_identity(kummer_group):
    q = kummer_group.form
    phi = are_isometric(q, q)
    assert transport(phi, kummer_group, np.arange(q.order)) == 0


def test_published_hodge_generators_have_their_orders(kummer_group):
    named = read_subgroup_file(SUBGROUPS / "oguiso.txt")
    subgroups = subgroups_by_name(kummer_group, named)
    assert subgroups["h2"].order == 2
    assert subgroups["h3"].order == 3
    assert subgroups["h6"].order == 6
    assert subgroups["h4"].order == 4
    assert subgroups["K8"].order == 8
    assert subgroups["K12"].order == 12
    assert subgroups["K36"].order == 36
    assert all(subgroups[name].is_cyclic() for name in ("h2", "h3", "h6", "h4"))


def test_kloosterman_generators(kloosterman_group):
    subgroups = subgroups_by_name(kloosterman_group, read_subgroup_file(SUBGROUPS / "kloosterman.txt"))
    assert subgroups["h2"].order == 2
    assert subgroups["h3"].order == 3


def test_double_cosets_with_trivial_and_whole_subgroups(kummer_group):
    one = trivial_subgroup(kummer_group)
    G = whole_group(kummer_group)
    assert double_coset_count(kummer_group, one, one) == 72
    assert double_coset_count(kummer_group, one, G) == 1
    assert right_coset_count(kummer_group, one) == 72
    assert G.is_normal() and one.is_normal()


def test_double_coset_counts_on_random_cyclic_pairs(kummer_group):
    rng = random.Random(7)
    for _ in range(20):
        H = subgroup_generated(kummer_group, [rng.randrange(kummer_group.order)])
        K = subgroup_generated(kummer_group, [rng.randrange(kummer_group.order), rng.randrange(kummer_group.order)])
        # double_coset_count cross-checks the partition against the Cauchy-Frobenius sum
        count = double_coset_count(kummer_group, H, K)
        assert count == len(double_cosets(kummer_group, H, K))
        g = rng.randrange(kummer_group.order)
        assert double_coset_count(kummer_group, H, conjugate(K, g)) == count
        assert 1 <= count <= right_coset_count(kummer_group, H)


def test_subgroup_file_parsing():
    sections = parse_subgroup_text("# comment\n[a]\n1 0\n0 1\n\n0 1\n1 0\n[b]\n")
    assert list(sections) == ["a", "b"]
    assert sections["a"] == [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    assert sections["b"] == []
    assert parse_subgroup_text(format_subgroup_sections(sections)) == sections


def test_subgroup_file_errors():
    with pytest.raises(LatticeInputError):
        parse_subgroup_text("1 0\n0 1\n")
    with pytest.raises(LatticeInputError) as info:
        parse_subgroup_text("[a]\n1 0 0\n0 1 0\n")
    assert info.value.line is not None
    with pytest.raises(LatticeInputError):
        parse_subgroup_text("[a]\n[a]\n")


@pytest.mark.parametrize("hodge,frame,expected", [
    ("h2", "K8", 6),
    ("h6", "K36", 2),
    (None, "K12", 6),
])
def test_kummer_double_coset_counts(kummer_group, oguiso_subgroups, hodge, frame, expected):
    H = oguiso_subgroups[hodge] if hodge else trivial_subgroup(kummer_group)
    assert double_coset_count(kummer_group, H, oguiso_subgroups[frame]) == expected


def test_kummer_subgroup_normality(kummer_group, oguiso_subgroups):
    K36 = oguiso_subgroups["K36"]
    assert right_coset_count(kummer_group, K36) == 2
    assert K36.is_normal()
    assert not oguiso_subgroups["K8"].is_normal()


def test_is_conjugate_subgroup(kummer_group, oguiso_subgroups):
    K8, K12 = oguiso_subgroups["K8"], oguiso_subgroups["K12"]
    assert is_conjugate_subgroup(kummer_group, K8, K8) == (True, 0)
    assert is_conjugate_subgroup(kummer_group, K8, K12) == (False, None)
    rng = random.Random(3)
    for _ in range(5):
        g = rng.randrange(kummer_group.order)
        moved = conjugate(K8, g)
        found, witness = is_conjugate_subgroup(kummer_group, K8, moved)
        assert found
        assert conjugate(K8, witness).member_set == moved.member_set


def test_image_subgroup_matches_generated_subgroup(kummer_group, oguiso_subgroups):
    K12 = oguiso_subgroups["K12"]
    by_index = image_subgroup(kummer_group, list(K12.generators), "O#(W)")
    by_isometry = image_subgroup(kummer_group, [kummer_group.elements[g] for g in K12.generators])
    assert by_index.members == K12.members
    assert by_isometry.members == K12.members
    assert by_index.name == "O#(W)"


def test_isometry_from_rows(kummer_group):
    named = read_subgroup_file(SUBGROUPS / "oguiso.txt")
    assert isometry_from_rows(kummer_group, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]) == 0
    g = isometry_from_rows(kummer_group, named["h3"][0])
    assert kummer_group.element_orders[g] == 3
    with pytest.raises(LatticeInputError):
        isometry_from_rows(kummer_group, [[1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
