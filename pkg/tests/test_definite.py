# Tests for short vectors, root systems, O(W) and its discriminant image
from pathlib import Path

import pytest

from src.definite.automorphisms import automorphism_group, is_isometry, isometric, reflection_matrix
from src.definite.discriminant_image import discriminant_image, induced_isometry
from src.definite.roots import MordellWeil, format_root_type, mordell_weil, root_classification
from src.definite.short_vectors import minimum, short_vectors, short_vectors_by_norm, theta_coefficients
from src.genus.enumerate import WalkOptions, enumerate_genus
from src.lattice.ade import parse_lattice_symbol
from src.lattice.discriminant import discriminant_form
from src.lattice.gram_lattice import GramLattice
from src.pipeline.presets import load_preset
from src.utils.exceptions import LatticeInputError

PRESETS = Path(__file__).resolve().parents[1] / "data" / "presets"


def test_e8_theta_series():
    E8 = parse_lattice_symbol("E8")
    assert theta_coefficients(E8, 4) == (0, 240, 0, 2160)
    assert len(short_vectors(E8, 2)) == 120
    assert minimum(E8) == 2


def test_short_vectors_are_sorted_and_signed():
    A2 = parse_lattice_symbol("A2")
    vectors = short_vectors(A2, 2)
    assert len(vectors) == 3
    assert all(A2.norm(v) == -2 for v in vectors)
    assert all(next(x for x in v if x) > 0 for v in vectors)
    by_norm = short_vectors_by_norm(A2, 6)
    assert sorted(by_norm) == [2, 6]
    assert len(by_norm[6]) == 3


def test_short_vectors_of_a_skewed_basis():
    skewed = parse_lattice_symbol("A2").change_basis([[1, 0], [9, 1]])
    assert len(short_vectors(skewed, 2)) == 3
    assert minimum(GramLattice([[-4]])) == 4


def test_short_vectors_need_a_definite_lattice():
    with pytest.raises(LatticeInputError):
        short_vectors(parse_lattice_symbol("U"), 2)
    with pytest.raises(LatticeInputError):
        short_vectors(parse_lattice_symbol("E8"), 0)


@pytest.mark.parametrize("symbol,root_type,roots", [
    ("D4+D4+E8", "D4^2E8", 288),
    ("E8+A1+A1+D6+D6", "A1^2D6^2E8", 4 + 60 + 60 + 240),
    ("A2", "A2", 6),
    ("D8+E8", "D8E8", 112 + 240),
])
def test_root_classification(symbol, root_type, roots):
    datum = root_classification(parse_lattice_symbol(symbol))
    assert datum.symbol == root_type
    assert datum.root_count == roots


def test_lattice_without_roots():
    datum = root_classification(GramLattice([[-4, 1], [1, -4]]))
    assert datum.symbol == "0"
    assert datum.root_count == 0
    assert mordell_weil(GramLattice([[-4, 1], [1, -4]]), datum).symbol == "Z^2"


def test_mordell_weil_free_part():
    W = parse_lattice_symbol("A1+[-4]")
    assert root_classification(W).symbol == "A1"
    mw = mordell_weil(W)
    assert mw.free_rank == 1
    assert mw.symbol == "Z"


def test_mordell_weil_symbols():
    assert MordellWeil(0, ()).symbol == "0"
    assert MordellWeil(1, (2, 2)).symbol == "Z+(Z/2)^2"
    assert MordellWeil(2, (2,)).symbol == "Z^2+Z/2"
    assert MordellWeil(0, (6,)).symbol == "Z/6"
    assert MordellWeil(1, (3,)).symbol == "Z+Z/3"
    assert MordellWeil(1, (2, 2)).torsion_order == 4


def test_root_type_symbols():
    assert format_root_type([("D", 6), ("A", 1), ("D", 6), ("A", 1)]) == "A1^2D6^2"
    assert format_root_type([("E", 7), ("A", 11)]) == "A11E7"
    assert format_root_type([]) == "0"


@pytest.mark.parametrize("symbol,order", [
    ("E8", 696729600),
    ("A2", 12),
    ("D4", 1152),
    ("A1+A1", 8),
    ("A3", 48),
    ("[-4]", 2),
])
def test_automorphism_group_orders(symbol, order):
    W = parse_lattice_symbol(symbol)
    group = automorphism_group(W)
    assert group.order == order
    assert all(is_isometry(A, W.gram, W.gram) for A in group.generators)


def test_isometric():
    A2 = parse_lattice_symbol("A2")
    skewed = A2.change_basis([[1, 0], [4, 1]])
    A = isometric(A2, skewed)
    assert A is not None
    assert is_isometry(A, A2.gram, skewed.gram)
    assert isometric(parse_lattice_symbol("A1+A1"), GramLattice([[-2, 0], [0, -4]])) is None
    assert isometric(parse_lattice_symbol("D4"), parse_lattice_symbol("A1^4")) is None


@pytest.mark.parametrize("symbol,order", [("A2", 12), ("D4", 1152), ("A1+A2", 24), ("[-4]", 2)])
def test_automorphism_order_and_isometry_class_survive_a_change_of_basis(symbol, order, random_unimodular):
    W = parse_lattice_symbol(symbol)
    for seed in range(3):
        M = W.change_basis(random_unimodular(W.rank, seed))
        assert automorphism_group(M).order == order
        A = isometric(W, M)
        assert A is not None
        assert is_isometry(A, W.gram, M.gram)


def test_weyl_reflections_act_trivially_on_discriminant():
    for symbol in ("D4", "A3", "D4+A2", "A1+A1"):
        W = parse_lattice_symbol(symbol)
        q = discriminant_form(W)
        identity = tuple(tuple(int(i == j) for j in range(q.rank)) for i in range(q.rank))
        for R in automorphism_group(W).reflections:
            assert induced_isometry(q, R).rows == identity


@pytest.mark.slow
@pytest.mark.parametrize("name", ["barth-peters", "oguiso"])
def test_reflections_act_trivially_on_every_frame_discriminant(name):
    preset = load_preset(name, PRESETS)
    genus = enumerate_genus(preset.seed_lattice, WalkOptions(progress=False))
    for W in genus.representatives:
        q = discriminant_form(W)
        identity = tuple(tuple(int(i == j) for j in range(q.rank)) for i in range(q.rank))
        for root in root_classification(W).simple_roots:
            assert induced_isometry(q, reflection_matrix(W, root)).rows == identity


@pytest.mark.parametrize("symbol,image_order", [
    ("D4", 6),
    ("A2", 2),
    ("A1+A1", 2),
])
def test_discriminant_image(symbol, image_order):
    W = parse_lattice_symbol(symbol)
    assert discriminant_image(W, automorphism_group(W).generators).order == image_order
