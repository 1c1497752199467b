# Script to write the preset lattices as Gram matrix files
import argparse
import os
import sys
from pathlib import Path
import logging

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.lattice.io import write_lattice_file
from src.pipeline.presets import PRESET_NAMES, load_preset
from src.utils.logger import setup_logging

logger = logging.getLogger(__name__)


def main():
    parser = argparse.ArgumentParser(description="Write T and the seed frame of every preset as lattice files")
    parser.add_argument('--presets-dir', type=str, default="data/presets", help="Directory of preset YAML files")
    parser.add_argument('--out', type=str, default="data/lattices", help="Output directory")
    args = parser.parse_args()

    setup_logging()
    out_dir = Path(args.out)
    for name in PRESET_NAMES:
        preset = load_preset(name, args.presets_dir)
        write_lattice_file(preset.lattice, out_dir / f"{name}_T.txt", [preset.transcendental])
        write_lattice_file(preset.seed_lattice, out_dir / f"{name}_seed.txt", [f"seed frame of {name}"])
        logger.info(f"Wrote {name}: T = {preset.transcendental}, seed {preset.seed}")


if __name__ == "__main__":
    main()
