# Tests for Hodge choices, frame multiplicities and reports
import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.counting.hodge import (
    HodgeSpec,
    auto_kernel_size,
    hodge_candidates,
    hodge_subgroup,
    lifts_of_order,
    merge_published,
    minus_identity_image,
    resolve_hodge,
)
from src.counting.multiplicity import (
    FrameData,
    count_fibrations,
    frame_multiplicity,
    multiplicity,
    picard_rank_three_count,
    picard_rank_three_lattice,
    trivial_hodge,
    uniform_bounds,
)
from src.counting.report import (
    FrameReport,
    ReferenceRow,
    compare_with_reference,
    frame_reports,
    load_reference,
    match_reference,
    render_table,
)
from src.finqform.datafiles import read_subgroup_file
from src.finqform.orthogonal_group import isometry_from_rows, orthogonal_group
from src.finqform.subgroups import (
    class_labels,
    conjugacy_classes,
    conjugate,
    subgroup_generated,
    trivial_subgroup,
    whole_group,
)
from src.lattice.ade import parse_lattice_symbol
from src.lattice.discriminant import discriminant_form, half_basis_lifts
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import LatticeInputError


SUBGROUPS = Path(__file__).resolve().parents[1] / "data" / "subgroups"


@pytest.fixture(scope="module")
def kummer():
    T = parse_lattice_symbol("U(2)+U(2)")
    q = discriminant_form(T, half_basis_lifts(T.rank))
    return T, q, orthogonal_group(q)


@pytest.mark.parametrize("d,expected", [(1, 1), (2, 1), (6, 2), (30, 4), (12, 2), (7, 1), (210, 8)])
def test_picard_rank_three_formula(d, expected):
    assert picard_rank_three_count(d) == expected


def test_picard_rank_three_lattice():
    T = picard_rank_three_lattice(3)
    assert T.rank == 19
    assert T.signature() == (2, 17)
    assert abs(T.det) == 6
    with pytest.raises(LatticeInputError):
        picard_rank_three_lattice(0)
    with pytest.raises(LatticeInputError):
        picard_rank_three_count(-1)


@pytest.mark.parametrize("d", [1, 2, 6, 12])
def test_picard_rank_three_formula_matches_the_general_count(d):
    counts = count_fibrations(picard_rank_three_lattice(d))
    assert len(counts) == 1
    assert counts[0].total == picard_rank_three_count(d)
    assert len(counts[0].frames) == 1
    assert counts[0].frames[0].lattice.gram == ((-2 * d,),)


def test_multiplicity_of_a_single_frame():
    T = picard_rank_three_lattice(6)
    assert multiplicity(T, GramLattice([[-12]]), HodgeSpec()) == 2


def test_uniform_bounds():
    (bounds,) = uniform_bounds(picard_rank_three_lattice(6))
    assert (bounds.lower, bounds.upper) == (1, 2)
    assert not bounds.frame_map_injective
    assert not bounds.all_images_full
    (bounds,) = uniform_bounds(picard_rank_three_lattice(2))
    assert (bounds.lower, bounds.upper) == (1, 1)
    assert bounds.frame_map_injective
    assert bounds.all_images_full


def test_kernel_size_follows_minus_identity(kummer):
    T, q, group = kummer
    assert minus_identity_image(group, q) == 0
    assert auto_kernel_size(group, q) == 2
    T12 = parse_lattice_symbol("U+[12]")
    q12 = discriminant_form(T12)
    group12 = orthogonal_group(q12)
    assert auto_kernel_size(group12, q12) == 1
    assert trivial_hodge(group12, q12).order == 2


def test_frame_multiplicity_extremes(kummer):
    _, _, group = kummer
    one, G = trivial_subgroup(group), whole_group(group)
    assert frame_multiplicity(group, one, G) == 1
    assert frame_multiplicity(group, G, one) == 1
    assert frame_multiplicity(group, one, one) == 72
    K = subgroup_generated(group, [1])
    assert frame_multiplicity(group, one, K, odd_rank=True) * K.order == 72


def test_minus_identity_lift():
    T = parse_lattice_symbol("U+[12]")
    (A,) = list(lifts_of_order(T, 2, 10))
    assert A.tolist() == [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]


def test_explicit_hodge_generator(kummer):
    T, q, group = kummer
    h2 = ((0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0))
    ((label, H),) = resolve_hodge(HodgeSpec("explicit", h2), T, q, group)
    assert label == "|H|=2"
    assert H.order == 2


def test_hodge_spec_validation():
    with pytest.raises(LatticeInputError):
        HodgeSpec("explicit")
    with pytest.raises(LatticeInputError):
        HodgeSpec("order")
    with pytest.raises(LatticeInputError):
        HodgeSpec("guess")
    with pytest.raises(LatticeInputError):
        HodgeSpec(kernel_size=3)


def test_hodge_candidates_with_a_two_element_group():
    T = parse_lattice_symbol("U+U(2)")
    q = discriminant_form(T)
    group = orthogonal_group(q)
    assert group.order == 2
    candidates = hodge_candidates(T, 10, q=q, group=group)
    assert [(c.order, c.lift_order, c.class_index) for c in candidates] == [(1, 2, 0)]
    assert candidates[0].entry_bound == 10


@pytest.mark.slow
def test_hodge_candidates_for_the_kummer_lattice(kummer):
    T, q, group = kummer
    candidates = hodge_candidates(T, 10, q=q, group=group)
    assert sorted(c.order for c in candidates) == [1, 2, 3, 6]
    assert all(c.entry_bound == 10 for c in candidates)
    named = read_subgroup_file(SUBGROUPS / "oguiso.txt")
    labels = class_labels(group, conjugacy_classes(group))
    for c in candidates:
        if c.order == 1:
            assert c.image == minus_identity_image(group, q)
            continue
        published = isometry_from_rows(group, named[f"h{c.order}"][0])
        assert labels[c.image] == labels[published]


def test_merge_published_prefers_conjugate_published_subgroups(kummer):
    _, q, group = kummer
    named = read_subgroup_file(SUBGROUPS / "oguiso.txt")
    P2 = hodge_subgroup(group, q, isometry_from_rows(group, named["h2"][0]))
    g = next(g for g in range(group.order) if conjugate(P2, g).member_set != P2.member_set)
    searched = [("|H|=1", trivial_hodge(group, q)), ("|H|=2", conjugate(P2, g))]
    merged = merge_published(group, q, searched, {2: named["h2"][0], 3: named["h3"][0]})
    assert [label for label, _ in merged] == ["|H|=1", "|H|=2", "|H|=3"]
    assert merged[1][1].member_set == P2.member_set
    assert merged[2][1].order == 3


def test_merge_published_keeps_a_non_conjugate_search_result(kummer):
    _, q, group = kummer
    named = read_subgroup_file(SUBGROUPS / "oguiso.txt")
    h2 = isometry_from_rows(group, named["h2"][0])
    labels = class_labels(group, conjugacy_classes(group))
    other = next(
        g for g in range(group.order) if group.element_orders[g] == 2 and labels[g] != labels[h2]
    )
    searched = [("|H|=1", trivial_hodge(group, q)), ("|H|=2", hodge_subgroup(group, q, other))]
    merged = merge_published(group, q, searched, {2: named["h2"][0]})
    assert [label for label, _ in merged] == ["|H|=1", "|H|=2", "|H|=2 published"]
    assert other in merged[1][1]
    assert h2 in merged[2][1]


@pytest.mark.slow
def test_hodge_candidates_for_the_kloosterman_lattice():
    T = parse_lattice_symbol("U(2)+U(2)+[-2]+[-2]")
    q = discriminant_form(T, half_basis_lifts(T.rank))
    group = orthogonal_group(q)
    candidates = hodge_candidates(T, 10, q=q, group=group)
    assert sorted(c.order for c in candidates) == [1, 2, 3]
    named = read_subgroup_file(SUBGROUPS / "kloosterman.txt")
    labels = class_labels(group, conjugacy_classes(group))
    for c in candidates:
        if c.order > 1:
            assert labels[c.image] == labels[isometry_from_rows(group, named[f"h{c.order}"][0])]


def _frames():
    q = discriminant_form(parse_lattice_symbol("A2"))
    group = orthogonal_group(q)
    image = whole_group(group)
    W = parse_lattice_symbol("D4")
    return [
        FrameData(1, W, "D4", "0", 0, (), 24, 1152, image),
        FrameData(2, W, "A1^4", "Z/2", 0, (2,), 8, 384, trivial_subgroup(group)),
    ]


def _reference():
    return [
        ReferenceRow(frame="R2", root_type="A1^4", mordell_weil="Z/2", roots=8, aut_order=384,
                     image_order=1, multiplicities={2: 2}),
        ReferenceRow(frame="R1", root_type="D4", mordell_weil="0", roots=24, aut_order=1152,
                     multiplicities={2: 1}),
    ]


def test_match_reference_by_invariants():
    assert match_reference(_frames(), _reference()) == {"W01": "R1", "W02": "R2"}


def test_reference_rows_must_be_separated():
    frames = _frames()
    frames.append(FrameData(3, frames[0].lattice, "D4", "0", 0, (), 24, 1152, frames[0].image))
    with pytest.raises(LatticeInputError):
        match_reference(frames, _reference())


def test_compare_with_reference():
    reports = frame_reports(_frames(), [1, 2], _reference())
    assert [r.reference for r in reports] == ["R1", "R2"]
    assert compare_with_reference(reports, _reference(), 2) == []
    wrong = frame_reports(_frames(), [1, 1], _reference())
    assert compare_with_reference(wrong, _reference(), 2) == ["W02/R2: multiplicity 1 != 2"]


def test_frame_report_rejects_zero_multiplicity():
    with pytest.raises(ValidationError):
        FrameReport(frame="W01", root_type="D4", mordell_weil="0", roots=24, aut_order=1152, image_order=2,
                    multiplicity=0)


def test_render_table():
    text = render_table(frame_reports(_frames(), [1, 2]), "example", 3)
    lines = text.splitlines()
    assert lines[0] == "example"
    assert lines[1].split() == ["frame", "root", "type", "W/W_root", "|Delta|", "|O(W)|", "|O#(W)|", "mult"]
    assert set(lines[2].replace(" ", "")) == {"-"}
    assert lines[3].split() == ["W01", "D4", "0", "24", "1152", "2", "1"]
    assert lines[-1] == "total: 3"
    assert render_table(frame_reports(_frames(), [1, 2])) == render_table(frame_reports(_frames(), [1, 2]))


def test_load_reference(tmp_path):
    path = tmp_path / "ref.jsonl"
    path.write_text(json.dumps({"frame": "W1", "root_type": "D16", "mordell_weil": "0", "roots": 480,
                                "aut_order": 1371195958099968000, "multiplicities": {"1": 1}}) + "\n")
    (row,) = load_reference(path)
    assert row.multiplicities == {1: 1}
    assert row.quadruple == ("D16", "0", 480, 1371195958099968000)
    assert load_reference(tmp_path / "absent.jsonl") is None
    path.write_text("{not json\n")
    assert load_reference(path) is None
    assert load_reference(None) is None
