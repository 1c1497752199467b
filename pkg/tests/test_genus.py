# Tests for p-adic data, mass formula, neighbors and genus enumeration
from pathlib import Path

import pytest
from sympy import Rational

from src.counting.report import load_reference
from src.genus.descriptor import frame_genus_descriptor, genus_descriptor, in_same_genus
from src.genus.enumerate import GenusList, WalkOptions, class_invariants, enumerate_genus
from src.genus.mass import mass
from src.genus.neighbors import isotropic_lines, neighbors
from src.genus.padic import genus_symbol, jordan_decomposition
from src.lattice.ade import parse_lattice_symbol
from src.lattice.gram_lattice import GramLattice
from src.pipeline.presets import PRESET_NAMES, load_preset
from src.utils.exceptions import LatticeInputError

PRESETS = Path(__file__).resolve().parents[1] / "data" / "presets"


@pytest.fixture
def quiet_walk():
    return WalkOptions(progress=False)


@pytest.mark.parametrize("symbol,expected", [
    ("E8", Rational(1, 696729600)),
    ("A2", Rational(1, 12)),
    ("D4", Rational(1, 1152)),
    ("A3", Rational(1, 48)),
    ("A1+A1", Rational(1, 8)),
    ("[-4]", Rational(1, 2)),
])
def test_mass_of_single_class_genera(symbol, expected):
    assert mass(parse_lattice_symbol(symbol)) == expected


def test_mass_of_a_descriptor_needs_a_representative():
    descriptor = frame_genus_descriptor(parse_lattice_symbol("U(2)+U(2)"))
    with pytest.raises(LatticeInputError):
        mass(descriptor)
    seed = parse_lattice_symbol("D4+D4+E8")
    assert mass(descriptor.with_representative(seed)) == mass(seed)


def test_mass_rejects_indefinite_lattices():
    with pytest.raises(LatticeInputError):
        mass(parse_lattice_symbol("U"))


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_reference_tables_sum_to_the_mass(name):
    preset = load_preset(name, PRESETS)
    rows = load_reference(preset.reference_path)
    assert len(rows) == preset.expected.frames
    total = sum(Rational(1, row.aut_order) for row in rows)
    assert mass(preset.seed_lattice) == total
    if preset.expected.mass_value is not None:
        assert total == preset.expected.mass_value


def test_jordan_decomposition():
    constituents = jordan_decomposition(parse_lattice_symbol("A2"), 3)
    assert [(c.scale, c.dimension) for c in constituents] == [(0, 1), (1, 1)]
    (unimodular,) = jordan_decomposition(parse_lattice_symbol("E8"), 2)
    assert unimodular.dimension == 8
    assert not unimodular.type_one


@pytest.mark.parametrize("symbol,p", [("D4", 2), ("A1+A1+A2", 2), ("A1+A1+A2", 3), ("D4+D4+E8", 2)])
def test_jordan_constituents_account_for_the_determinant(symbol, p):
    L = parse_lattice_symbol(symbol)
    constituents = jordan_decomposition(L, p)
    assert sum(c.dimension for c in constituents) == L.rank
    det_part = 1
    while L.det % (det_part * p) == 0:
        det_part *= p
    assert p ** sum(c.scale * c.dimension for c in constituents) == det_part


def test_genus_symbol_names_every_prime():
    symbol = genus_symbol(parse_lattice_symbol("A2"), [2, 3])
    assert symbol.startswith("2: ")
    assert " | 3: " in symbol


def test_genus_descriptors():
    assert in_same_genus(parse_lattice_symbol("A2"), parse_lattice_symbol("A2").change_basis([[1, 0], [3, 1]]))
    assert not in_same_genus(parse_lattice_symbol("A1+A1"), GramLattice([[-2, 0], [0, -6]]))
    assert not in_same_genus(parse_lattice_symbol("A3"), parse_lattice_symbol("A1+A1+A1"))
    assert genus_descriptor(parse_lattice_symbol("D4")).rank == 4


def test_frame_genus_descriptor():
    descriptor = frame_genus_descriptor(parse_lattice_symbol("U(2)+U(2)"))
    assert descriptor.signature == (0, 16)
    assert descriptor.form.order == 16
    assert descriptor.contains(parse_lattice_symbol("D4+D4+E8"))
    assert not descriptor.contains(parse_lattice_symbol("D8+E8"))
    with pytest.raises(LatticeInputError, match="seed not in frame genus"):
        descriptor.with_representative(parse_lattice_symbol("D8+E8"))


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_seeds_lie_in_their_frame_genus(name):
    preset = load_preset(name, PRESETS)
    descriptor = frame_genus_descriptor(preset.lattice)
    assert descriptor.signature == (0, 20 - preset.lattice.rank)
    assert descriptor.contains(preset.seed_lattice)


def test_frame_genus_descriptor_rejects_bad_transcendental_lattices():
    with pytest.raises(LatticeInputError):
        frame_genus_descriptor(parse_lattice_symbol("E8"))
    with pytest.raises(LatticeInputError):
        frame_genus_descriptor(GramLattice([[0, 1], [1, 1]]))


def test_neighbors_of_e8_stay_in_the_genus():
    E8 = parse_lattice_symbol("E8")
    found = neighbors(E8, 3, limit=4, seed=1)
    assert found
    for W in found:
        assert W.rank == 8
        assert W.det == 1
        assert W.is_even and W.is_negative_definite()


def test_isotropic_lines_are_isotropic():
    D4 = parse_lattice_symbol("D4")
    gram = [[-x for x in row] for row in D4.gram]
    for line in isotropic_lines(D4, 3):
        value = sum(line[i] * gram[i][j] * line[j] for i in range(4) for j in range(4))
        assert value % 3 == 0


def test_class_invariants_separate_root_types():
    assert class_invariants(parse_lattice_symbol("D8+E8")) != class_invariants(parse_lattice_symbol("D4+D4+E8"))


def test_single_class_genera(quiet_walk):
    for symbol in ("E8", "A1+A1", "A2"):
        genus = enumerate_genus(parse_lattice_symbol(symbol), quiet_walk)
        assert isinstance(genus, GenusList)
        assert len(genus) == 1
        assert genus.complete
        assert genus.mass == mass(parse_lattice_symbol(symbol))


def test_odd_seed_is_rejected(quiet_walk):
    with pytest.raises(LatticeInputError):
        enumerate_genus(GramLattice([[-1]]), quiet_walk)


@pytest.mark.slow
def test_rank_sixteen_unimodular_genus(quiet_walk):
    genus = enumerate_genus(parse_lattice_symbol("E8+E8"), quiet_walk)
    assert len(genus) == 2
    assert sorted(genus.automorphism_orders) == [2 * 696729600**2, 2**15 * 20922789888000]
    assert genus.mass == Rational(691, 277667181515243520000)


@pytest.mark.slow
@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_frame_genera(name, quiet_walk):
    preset = load_preset(name, PRESETS)
    genus = enumerate_genus(preset.seed_lattice, quiet_walk)
    assert len(genus) == preset.expected.frames
    assert genus.complete
    if preset.expected.mass_value is not None:
        assert genus.mass == preset.expected.mass_value
