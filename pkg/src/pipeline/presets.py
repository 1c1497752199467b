"""Case-study presets: transcendental lattice, seed frame and published reference data."""
import logging
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from pydantic import BaseModel, ValidationError, validator
from sympy import Rational

from src.finqform.datafiles import read_subgroup_file
from src.lattice.ade import parse_lattice_symbol
from src.lattice.discriminant import half_basis_lifts
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import LatticeInputError

logger = logging.getLogger(__name__)

PRESET_NAMES = ("barth-peters", "oguiso", "kumar", "kloosterman", "apery-fermi")


class Expected(BaseModel):
    group_order: int
    conjugacy_classes: Optional[int] = None
    frames: int
    mass: Optional[str] = None
    totals: Dict[int, int]

    @validator("mass")
    def _fraction(cls, value):
        if value is not None:
            Rational(value)
        return value

    @property
    def mass_value(self) -> Optional[Rational]:
        return Rational(self.mass) if self.mass else None


class CaseStudyPreset(BaseModel):
    """A preset file under data/presets; the reference path is relative to that directory."""

    name: str
    title: str
    transcendental: str
    seed: str
    discriminant_basis: Optional[str] = None
    subgroups: Optional[str] = None
    hodge_generators: Dict[int, str] = {}
    reference: Optional[str] = None
    expected: Expected
    directory: Path = Path(".")
    subgroups_dir: Optional[Path] = None

    @validator("discriminant_basis")
    def _basis(cls, value):
        if value not in (None, "half"):
            raise ValueError("discriminant_basis must be 'half' or omitted")
        return value

    @property
    def lattice(self) -> GramLattice:
        T = parse_lattice_symbol(self.transcendental)
        T.label = self.name
        return T

    @property
    def seed_lattice(self) -> GramLattice:
        return parse_lattice_symbol(self.seed)

    @property
    def lifts(self) -> Optional[List[List]]:
        return half_basis_lifts(self.lattice.rank) if self.discriminant_basis == "half" else None

    @property
    def reference_path(self) -> Optional[Path]:
        return self.directory / self.reference if self.reference else None

    @property
    def subgroups_path(self) -> Optional[Path]:
        if self.subgroups is None:
            return None
        return (self.subgroups_dir or self.directory.parent / "subgroups") / self.subgroups

    def named_subgroups(self) -> Dict[str, List[List[List[int]]]]:
        if self.subgroups_path is None:
            return {}
        return read_subgroup_file(self.subgroups_path)

    def hodge_generator(self, order: int) -> Optional[List[List[int]]]:
        """The published generator of O^#_hdg of the given order, if the preset names one."""
        name = self.hodge_generators.get(order)
        if name is None:
            return None
        matrices = self.named_subgroups().get(name)
        if not matrices:
            raise LatticeInputError(f"preset {self.name}: no section [{name}] in {self.subgroups}")
        return matrices[0]


def preset_path(name: str, presets_dir) -> Path:
    return Path(presets_dir) / f"{name}.yaml"


def load_preset(name: str, presets_dir="data/presets", subgroups_dir=None) -> CaseStudyPreset:
    """Load a preset by name. Subgroup files default to a `subgroups` directory next to `presets_dir`.

    Raises:
        LatticeInputError: unknown name, missing file or invalid content.
    """
    if name not in PRESET_NAMES:
        raise LatticeInputError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    path = preset_path(name, presets_dir)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise LatticeInputError(f"cannot read preset: {e.strerror}", str(path))
    try:
        preset = CaseStudyPreset(
            directory=path.parent, subgroups_dir=Path(subgroups_dir) if subgroups_dir else None, **data
        )
    except ValidationError as e:
        raise LatticeInputError(f"invalid preset: {e}", str(path)) from e
    logger.info(f"Loaded preset {preset.name}: T = {preset.transcendental}, seed {preset.seed}")
    return preset
