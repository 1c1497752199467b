import logging
from pathlib import Path
from typing import Dict, List

from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)


def parse_subgroup_text(text: str, source: str = "<string>") -> Dict[str, List[List[List[int]]]]:
    """Parse named generator lists.

    A section starts with a line '[name]'; its matrices follow, separated by blank lines.
    Entries are generator-image coordinates in the preset's discriminant basis.
    """
    sections: Dict[str, List[List[List[int]]]] = {}
    name = None
    current: List[List[int]] = []

    def flush(line_no: int) -> None:
        nonlocal current
        if not current:
            return
        if name is None:
            raise LatticeInputError("matrix before the first [name] header", source, line_no)
        width = len(current[0])
        if len(current) != width or any(len(r) != width for r in current):
            raise LatticeInputError(f"matrix in [{name}] is not square", source, line_no)
        sections[name].append(current)
        current = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            flush(number)
            continue
        if line.startswith("[") and line.endswith("]"):
            flush(number)
            name = line[1:-1].strip()
            if name in sections:
                raise LatticeInputError(f"duplicate section [{name}]", source, number)
            sections[name] = []
            continue
        try:
            current.append([int(tok) for tok in line.split()])
        except ValueError:
            raise LatticeInputError(f"non-integer entry in {line!r}", source, number)
    flush(len(text.splitlines()))
    return sections


def read_subgroup_file(path) -> Dict[str, List[List[List[int]]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LatticeInputError(f"cannot read subgroup file: {e.strerror}", str(path))
    sections = parse_subgroup_text(text, str(path))
    logger.info(f"Loaded {len(sections)} named generator lists from {path}")
    return sections


def format_subgroup_sections(sections: Dict[str, List[List[List[int]]]]) -> str:
    blocks = []
    for name, matrices in sections.items():
        body = "\n\n".join("\n".join(" ".join(str(x) for x in row) for row in m) for m in matrices)
        blocks.append(f"[{name}]\n{body}" if body else f"[{name}]")
    return "\n\n".join(blocks) + "\n"
