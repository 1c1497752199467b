# Tests for settings, presets, the pipeline runner and the command line
import json
from pathlib import Path

import pytest
from sympy import Rational

from src.counting.multiplicity import picard_rank_three_lattice
from src.lattice.ade import parse_lattice_symbol
from src.lattice.io import write_lattice_file
from src.pipeline import FibrationPipeline
from src.pipeline.__main__ import main
from src.pipeline.presets import PRESET_NAMES, load_preset
from src.utils.config_loader import load_settings
from src.utils.exceptions import ConfigurationError, GenusWalkIncomplete, LatticeInputError

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(autouse=True)
def in_repo_root(monkeypatch):
    monkeypatch.chdir(ROOT)
    monkeypatch.delenv("K3F_THREADS", raising=False)
    monkeypatch.delenv("K3F_CACHE_DIR", raising=False)


@pytest.fixture
def pipeline():
    return FibrationPipeline(load_settings("config.yaml", {"threads": 1}), progress=False)


@pytest.fixture
def rank_three_file(tmp_path):
    return str(write_lattice_file(picard_rank_three_lattice(6), tmp_path / "T.txt"))


def test_settings_defaults_and_overrides(tmp_path, monkeypatch):
    settings = load_settings(str(tmp_path / "missing.yaml"), {"max_candidates": 50})
    assert settings.max_candidates == 50
    assert settings.enumeration_cap == 10**8
    monkeypatch.setenv("K3F_THREADS", "3")
    assert load_settings(str(tmp_path / "missing.yaml")).n_jobs == 3
    assert load_settings(str(tmp_path / "missing.yaml"), {"threads": 0}).n_jobs == -1


def test_invalid_settings(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("enumeration_cap: -5\n")
    with pytest.raises(ConfigurationError):
        load_settings(str(path))
    with pytest.raises(ConfigurationError):
        load_settings(str(tmp_path / "missing.yaml"), {"threads": -2})


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_load(name):
    preset = load_preset(name)
    assert preset.name == name
    assert preset.lattice.signature() == (2, preset.lattice.rank - 2)
    assert preset.seed_lattice.rank == 20 - preset.lattice.rank
    assert preset.reference_path.exists()


def test_unknown_preset():
    with pytest.raises(LatticeInputError):
        load_preset("fermat")


def test_preset_hodge_generators():
    preset = load_preset("oguiso")
    assert preset.hodge_generator(2) == [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    assert preset.hodge_generator(4) is None
    assert load_preset("kumar").hodge_generator(2) is None


def test_resolve_input(pipeline, rank_three_file):
    run = pipeline.resolve_input(preset="oguiso")
    assert run.name == "oguiso"
    assert run.lifts is not None
    run = pipeline.resolve_input(lattice=rank_three_file)
    assert run.preset is None and run.seed is None
    with pytest.raises(LatticeInputError):
        pipeline.resolve_input()
    with pytest.raises(LatticeInputError):
        pipeline.resolve_input(preset="oguiso", lattice=rank_three_file)


def test_hodge_spec_prefers_published_generators(pipeline):
    run = pipeline.resolve_input(preset="oguiso")
    assert pipeline.hodge_spec(run, order=3).mode == "explicit"
    assert pipeline.hodge_spec(run, order=1).mode == "order"
    assert pipeline.hodge_spec(run).mode == "enumerate"


@pytest.mark.parametrize("name,line", [
    ("oguiso", "|O(q)| = 72, 9 classes"),
    ("kloosterman", "|O(q)| = 1440, 22 classes"),
    ("barth-peters", "|O(q)| = 2, 2 classes"),
    ("apery-fermi", "|O(q)| = 4, 4 classes"),
])
def test_discriminant_lines(pipeline, name, line):
    assert line in pipeline.discriminant(pipeline.resolve_input(preset=name))


def test_cli_discriminant_of_a_trivial_form(tmp_path, capsys):
    path = write_lattice_file(parse_lattice_symbol("E8"), tmp_path / "e8.txt")
    assert main(["discriminant", "--lattice", str(path), "--quiet"]) == 0
    assert capsys.readouterr().out == "E8: trivial form, 1 class\n"


def test_cli_input_errors(tmp_path, capsys):
    assert main(["discriminant", "--lattice", str(tmp_path / "absent.txt"), "--quiet"]) == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n2 1\n")
    assert main(["discriminant", "--lattice", str(bad), "--quiet"]) == 3
    assert main(["discriminant", "--preset", "oguiso", "--threads", "-1", "--quiet"]) == 3
    assert capsys.readouterr().out == ""


def test_cli_seed_outside_the_frame_genus(tmp_path):
    seed = write_lattice_file(parse_lattice_symbol("D8+E8"), tmp_path / "seed.txt")
    assert main(["genus", "--preset", "oguiso", "--seed", str(seed), "--threads", "1", "--quiet"]) == 3


def test_cli_reports_an_incomplete_walk(monkeypatch, capsys):
    def incomplete(self, run, primes=(), out=None):
        raise GenusWalkIncomplete(Rational(1, 3), Rational(1, 2), 4)

    monkeypatch.setattr(FibrationPipeline, "genus", incomplete)
    assert main(["genus", "--preset", "barth-peters", "--quiet"]) == 2
    assert capsys.readouterr().out == "mass 1/3 of 1/2 FAILED\n"


def test_cli_genus_writes_the_output_directory(tmp_path, rank_three_file, capsys):
    out = tmp_path / "genus"
    assert main(["genus", "--lattice", rank_three_file, "--out", str(out), "--threads", "1", "--quiet"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "mass 1/2 OK"
    assert (out / "W01.txt").exists()
    (record,) = [json.loads(line) for line in (out / "manifest.jsonl").read_text().splitlines()]
    assert record["class"] == "W01"
    assert record["aut_order"] == 2
    summary = json.loads((out / "summary.json").read_text())
    assert summary["classes"] == 1
    assert summary["mass"] == "1/2"


def test_cli_count_for_picard_rank_three(tmp_path, rank_three_file, capsys):
    out = tmp_path / "count"
    assert main(["count", "--lattice", rank_three_file, "--out", str(out), "--threads", "1", "--quiet"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "2"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["totals"] == {"|H|=2": 2}
    assert summary["bounds"]["|H|=2"]["upper"] == 2
    assert (out / "report.txt").read_text().endswith("total: 2\n")


@pytest.mark.slow
@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_totals(pipeline, name):
    run = pipeline.resolve_input(preset=name)
    spec = pipeline.hodge_spec(run) if run.preset.hodge_generators else None
    outcome = pipeline.count(run, spec)
    assert {c.hodge_order: c.total for c in outcome.counts} == run.preset.expected.totals
    assert not any(outcome.problems.values())
    assert len(outcome.counts[0].frames) == run.preset.expected.frames


@pytest.mark.slow
def test_cli_count_all_hodge_for_kummer_surfaces(capsys):
    assert main(["count", "--preset", "oguiso", "--all-hodge", "--threads", "1", "--quiet"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "59 / 38 / 23 / 16"
