import logging
from pathlib import Path
from typing import List, Optional

from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)


def parse_lattice_text(text: str, source: str = "<string>") -> GramLattice:
    """Parse the plain lattice format: '#' comments, the rank, then rank rows of integers."""
    rows: List[List[int]] = []
    rank: Optional[int] = None
    label = None
    last_line = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if label is None and line.lower().startswith("# label:"):
                label = line.split(":", 1)[1].strip()
            continue
        last_line = number
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError:
            raise LatticeInputError(f"non-integer entry in {line!r}", source, number)
        if rank is None:
            if len(values) != 1 or values[0] < 0:
                raise LatticeInputError("first line must hold the rank", source, number)
            rank = values[0]
            continue
        if len(rows) == rank:
            raise LatticeInputError(f"extra row beyond rank {rank}", source, number)
        if len(values) != rank:
            raise LatticeInputError(f"expected {rank} entries, found {len(values)}", source, number)
        rows.append(values)
    if rank is None:
        raise LatticeInputError("missing rank line", source, 1)
    if len(rows) != rank:
        raise LatticeInputError(f"expected {rank} rows, found {len(rows)}", source, last_line)
    try:
        return GramLattice(rows, label)
    except LatticeInputError as e:
        raise LatticeInputError(str(e), source) from e


def read_lattice_file(path) -> GramLattice:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LatticeInputError(f"cannot read lattice file: {e.strerror}", str(path))
    lattice = parse_lattice_text(text, str(path))
    logger.info(f"Read {lattice} from {path}")
    return lattice


def format_lattice(L: GramLattice, comments: Optional[List[str]] = None) -> str:
    lines = []
    if L.label:
        lines.append(f"# label: {L.label}")
    lines.extend(f"# {c}" for c in comments or [])
    lines.append(str(L.rank))
    width = max((len(str(x)) for row in L.gram for x in row), default=1)
    lines.extend(" ".join(str(x).rjust(width) for x in row) for row in L.gram)
    return "\n".join(lines) + "\n"


def write_lattice_file(L: GramLattice, path, comments: Optional[List[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_lattice(L, comments), encoding="utf-8")
    return path
