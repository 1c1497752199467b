"""Report records, reference manifests and the frame table."""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, validator

from src.counting.multiplicity import FibrationCount, FrameData
from src.genus.enumerate import GenusList
from src.utils.exceptions import LatticeInputError
from src.utils.helpers import load_jsonl

logger = logging.getLogger(__name__)


class FrameReport(BaseModel):
    """One row of a frame table; field order is the manifest field order."""

    frame: str
    root_type: str
    mordell_weil: str
    roots: int
    aut_order: int
    image_order: int
    multiplicity: Optional[int] = None
    reference: Optional[str] = None

    @validator("multiplicity")
    def _surjective(cls, value):
        if value is not None and value < 1:
            raise ValueError("every frame has multiplicity >= 1")
        return value


class ReferenceRow(BaseModel):
    """A published table row; multiplicities are keyed by |H|."""

    frame: str
    root_type: str
    mordell_weil: str
    roots: int
    aut_order: int
    image_order: Optional[int] = None
    multiplicities: Dict[int, int] = {}

    @property
    def quadruple(self):
        return self.root_type, self.mordell_weil, self.roots, self.aut_order


def load_reference(path) -> Optional[List[ReferenceRow]]:
    """Rows of a reference manifest, or None when the file is missing or unreadable."""
    if path is None:
        return None
    try:
        return [ReferenceRow(**record) for record in load_jsonl(path)]
    except FileNotFoundError:
        logger.warning(f"Reference manifest {path} not found")
    except (ValueError, TypeError) as e:
        logger.error(f"Error reading reference manifest {path}: {e}")
    return None


def match_reference(frames: Sequence[FrameData], rows: Sequence[ReferenceRow]) -> Dict[str, str]:
    """Frame name -> reference frame name, by (root type, W/W_root, |Delta|, |O(W)|), then |O^#(W)|.

    Raises:
        LatticeInputError: two frames claim the same reference row.
    """
    out: Dict[str, str] = {}
    for f in frames:
        hits = [r for r in rows if r.quadruple == f.quadruple]
        if len(hits) > 1:
            hits = [r for r in hits if r.image_order in (None, f.image.order)]
        if len(hits) == 1:
            out[f.name] = hits[0].frame
        else:
            logger.warning(f"{f.name} ({f.root_type}, {f.mordell_weil}) matches {len(hits)} reference rows")
    claimed = list(out.values())
    if len(set(claimed)) != len(claimed):
        raise LatticeInputError("reference rows are not separated by the frame invariants")
    return out


def frame_reports(
    frames: Sequence[FrameData],
    multiplicities: Optional[Sequence[int]] = None,
    reference: Optional[Sequence[ReferenceRow]] = None,
) -> List[FrameReport]:
    names = match_reference(frames, reference) if reference else {}
    reports = []
    for i, f in enumerate(frames):
        reports.append(
            FrameReport(
                frame=f.name,
                root_type=f.root_type,
                mordell_weil=f.mordell_weil,
                roots=f.root_count,
                aut_order=f.automorphism_order,
                image_order=f.image.order,
                multiplicity=None if multiplicities is None else multiplicities[i],
                reference=names.get(f.name),
            )
        )
    return reports


def genus_records(genus: GenusList, frames: Optional[Sequence[FrameData]] = None) -> List[Dict]:
    """Manifest records of a genus listing, one per class."""
    records = []
    for i in range(len(genus)):
        record = {"class": f"W{i + 1:02d}", "aut_order": genus.automorphism_orders[i],
                  "mass": str(genus.mass_history[i])}
        if frames is not None:
            f = frames[i]
            record.update(root_type=f.root_type, mordell_weil=f.mordell_weil, roots=f.root_count,
                          image_order=f.image.order)
        records.append(record)
    return records


def count_records(count: FibrationCount, reports: Sequence[FrameReport]) -> List[Dict]:
    return [dict(hodge=count.hodge_label, hodge_order=count.hodge_order, **r.dict(), total=count.total)
            for r in reports]


def compare_with_reference(
    reports: Sequence[FrameReport], reference: Sequence[ReferenceRow], hodge_order: int
) -> List[str]:
    """Differences between computed rows and the reference; empty when everything agrees."""
    by_name = {r.frame: r for r in reference}
    problems = []
    matched = {r.reference for r in reports if r.reference}
    for name in sorted(set(by_name) - matched):
        problems.append(f"reference row {name} has no computed frame")
    for r in reports:
        if r.reference is None:
            problems.append(f"{r.frame} has no reference row")
            continue
        row = by_name[r.reference]
        if row.image_order is not None and row.image_order != r.image_order:
            problems.append(f"{r.frame}/{row.frame}: |O#(W)| {r.image_order} != {row.image_order}")
        expected = row.multiplicities.get(hodge_order)
        if expected is not None and r.multiplicity != expected:
            problems.append(f"{r.frame}/{row.frame}: multiplicity {r.multiplicity} != {expected}")
    return problems


_NUMERIC = {"roots", "aut_order", "image_order", "multiplicity"}

_COLUMNS = [
    ("frame", "frame"),
    ("ref", "reference"),
    ("root type", "root_type"),
    ("W/W_root", "mordell_weil"),
    ("|Delta|", "roots"),
    ("|O(W)|", "aut_order"),
    ("|O#(W)|", "image_order"),
    ("mult", "multiplicity"),
]


def render_table(reports: Sequence[FrameReport], title: str = "", total: Optional[int] = None) -> str:
    """Plain text table of frame rows, one line per frame."""
    columns = [(h, k) for h, k in _COLUMNS if any(getattr(r, k) is not None for r in reports)]
    cells = [[h for h, _ in columns]]
    for r in reports:
        cells.append([str(getattr(r, k)) if getattr(r, k) is not None else "-" for _, k in columns])
    widths = [max(len(row[c]) for row in cells) for c in range(len(columns))]
    lines = [title] if title else []
    for n, row in enumerate(cells):
        padded = [v.rjust(w) if k in _NUMERIC else v.ljust(w) for v, w, (_, k) in zip(row, widths, columns)]
        lines.append("  ".join(padded).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    if total is not None:
        lines.append(f"total: {total}")
    return "\n".join(lines) + "\n"


def write_report(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
