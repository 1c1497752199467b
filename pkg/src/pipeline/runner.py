"""Orchestration of the discriminant, genus and count commands."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from src.counting.hodge import HodgeSpec, merge_published
from src.counting.multiplicity import FibrationCount, FrameGenusAnalysis, UniformBounds, trivial_hodge
from src.counting.report import (
    FrameReport,
    compare_with_reference,
    count_records,
    frame_reports,
    genus_records,
    load_reference,
    render_table,
    write_report,
)
from src.finqform.orthogonal_group import orthogonal_group
from src.finqform.subgroups import conjugacy_classes
from src.genus.enumerate import walk_options_from_settings
from src.genus.padic import genus_symbol
from src.lattice.discriminant import discriminant_form
from src.lattice.gram_lattice import GramLattice
from src.lattice.io import read_lattice_file, write_lattice_file
from src.pipeline.presets import CaseStudyPreset, load_preset
from src.utils.config_loader import PipelineSettings
from src.utils.exceptions import LatticeInputError
from src.utils.helpers import prime_divisors, save_json, save_jsonl

logger = logging.getLogger(__name__)


@dataclass
class RunInput:
    """The transcendental lattice of a run and where it came from."""

    lattice: GramLattice
    seed: Optional[GramLattice] = None
    preset: Optional[CaseStudyPreset] = None
    lifts: Optional[list] = None

    @property
    def name(self) -> str:
        return self.preset.name if self.preset else (self.lattice.label or "T")


@dataclass
class CountOutcome:
    counts: List[FibrationCount]
    reports: Dict[str, List[FrameReport]] = field(default_factory=dict)
    problems: Dict[str, List[str]] = field(default_factory=dict)
    bounds: Dict[str, UniformBounds] = field(default_factory=dict)

    @property
    def totals(self) -> List[Tuple[str, int]]:
        return [(c.hodge_label, c.total) for c in self.counts]


class FibrationPipeline:
    """Runs the library end to end with one set of validated settings."""

    def __init__(self, settings: PipelineSettings, progress: bool = True):
        self.settings = settings
        self.progress = progress

    def resolve_input(
        self, preset: Optional[str] = None, lattice: Optional[str] = None, seed: Optional[str] = None
    ) -> RunInput:
        """Load T (and a seed frame) from a preset name or lattice files.

        Raises:
            LatticeInputError: neither or both of preset and lattice were given, or a file is invalid.
        """
        if (preset is None) == (lattice is None):
            raise LatticeInputError("give exactly one of --preset and --lattice")
        if preset is not None:
            p = load_preset(preset, self.settings.presets_dir, self.settings.subgroups_dir)
            seed_lattice = read_lattice_file(seed) if seed else p.seed_lattice
            return RunInput(p.lattice, seed_lattice, p, p.lifts)
        return RunInput(read_lattice_file(lattice), read_lattice_file(seed) if seed else None)

    def discriminant(self, run: RunInput) -> List[str]:
        """Lines describing q_T, |O(q_T)| and its conjugacy classes."""
        q = discriminant_form(run.lattice, run.lifts)
        if q.is_trivial():
            return [f"{run.name}: trivial form, 1 class"]
        group = orthogonal_group(q, self.settings.enumeration_cap, self.settings.n_jobs)
        classes = conjugacy_classes(group)
        lines = [f"{run.name}: {q.describe()}", f"|O(q)| = {group.order}, {len(classes)} classes"]
        if run.lattice.rank > 1:
            for p in prime_divisors(2 * run.lattice.det):
                lines.append(f"  {genus_symbol(run.lattice, [p])}")
        return lines

    def _analysis(self, run: RunInput, primes: Sequence[int] = ()) -> FrameGenusAnalysis:
        walk = walk_options_from_settings(self.settings, primes, self.progress)
        return FrameGenusAnalysis(
            run.lattice,
            run.seed,
            run.lifts,
            walk,
            self.settings.cache_dir,
            entry_bound=self.settings.entry_bound,
            n_jobs=self.settings.n_jobs,
            hodge_max_rank=self.settings.hodge_max_rank,
        )

    def genus(self, run: RunInput, primes: Sequence[int] = (), out: Optional[str] = None) -> Tuple[FrameGenusAnalysis, List[str]]:
        """Enumerate the frame genus; returns the analysis and the printed lines."""
        analysis = self._analysis(run, primes)
        genus = analysis.genus
        reference = load_reference(run.preset.reference_path) if run.preset else None
        reports = frame_reports(analysis.frames, reference=reference)
        lines = [render_table(reports, f"Frame genus of {run.name}: {len(genus)} classes").rstrip("\n")]
        lines.append(f"mass {genus.mass} OK")
        if out:
            directory = Path(out)
            for i, W in enumerate(genus.representatives):
                write_lattice_file(W, directory / f"W{i + 1:02d}.txt", [f"root type {analysis.frames[i].root_type}"])
            save_jsonl(genus_records(genus, analysis.frames), directory / "manifest.jsonl")
            save_json(
                {
                    "lattice": run.name,
                    "classes": len(genus),
                    "mass": str(genus.mass),
                    "expected_mass": str(genus.expected_mass),
                    "primes": genus.primes_used,
                    "candidates_tried": genus.candidates_tried,
                },
                directory / "summary.json",
            )
            logger.info(f"Wrote {len(genus)} frames to {directory}")
        return analysis, lines

    def hodge_spec(
        self,
        run: RunInput,
        order: Optional[int] = None,
        generator: Optional[Sequence[Sequence[int]]] = None,
    ) -> HodgeSpec:
        """HodgeSpec for the command line choice; a preset's published generator replaces the search."""
        if generator is not None:
            return HodgeSpec("explicit", tuple(tuple(r) for r in generator))
        if order is not None:
            published = run.preset.hodge_generator(order) if run.preset else None
            if published is not None:
                return HodgeSpec("explicit", tuple(tuple(r) for r in published))
            return HodgeSpec("order", order=order)
        return HodgeSpec("enumerate")

    def _published_options(self, run: RunInput, analysis: FrameGenusAnalysis, spec: HodgeSpec):
        """The lift search, cross-checked against and completed by the preset's published generators."""
        published = {m: run.preset.hodge_generator(m) for m in run.preset.hodge_generators}
        return merge_published(analysis.group, analysis.q, analysis.hodge_options(spec), published)

    def count(
        self,
        run: RunInput,
        spec: Optional[HodgeSpec] = None,
        primes: Sequence[int] = (),
        out: Optional[str] = None,
        analysis: Optional[FrameGenusAnalysis] = None,
    ) -> CountOutcome:
        """Multiplicity tables for each H; no HodgeSpec means a generic Hodge structure, H = {+-1}."""
        analysis = analysis or self._analysis(run, primes)
        if spec is None:
            H = trivial_hodge(analysis.group, analysis.q)
            options = [(f"|H|={H.order}", H)]
        elif spec.mode == "enumerate" and run.preset and run.preset.hodge_generators:
            options = self._published_options(run, analysis, spec)
        else:
            options = analysis.hodge_options(spec)
        reference = load_reference(run.preset.reference_path) if run.preset else None
        outcome = CountOutcome([analysis.count(label, H) for label, H in options])
        for label, H in options:
            outcome.bounds[label] = analysis.bounds(label, H)
        for c in outcome.counts:
            reports = frame_reports(c.frames, c.multiplicities, reference)
            outcome.reports[c.hodge_label] = reports
            if reference:
                problems = compare_with_reference(reports, reference, c.hodge_order)
                for problem in problems:
                    logger.warning(f"{c.hodge_label}: {problem}")
                outcome.problems[c.hodge_label] = problems
        if out:
            self._write_count(run, outcome, Path(out))
        return outcome

    def _write_count(self, run: RunInput, outcome: CountOutcome, directory: Path) -> None:
        text = "\n".join(
            render_table(outcome.reports[c.hodge_label], f"{run.name}, {c.hodge_label}", c.total)
            for c in outcome.counts
        )
        write_report(directory / "report.txt", text)
        records = [r for c in outcome.counts for r in count_records(c, outcome.reports[c.hodge_label])]
        save_jsonl(records, directory / "manifest.jsonl")
        bounds = {label: {"lower": b.lower, "upper": b.upper, "frame_map_injective": b.frame_map_injective}
                  for label, b in outcome.bounds.items()}
        save_json({"lattice": run.name, "totals": dict(outcome.totals), "bounds": bounds}, directory / "summary.json")
        logger.info(f"Wrote count report to {directory}")
