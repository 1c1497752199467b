# Script to run every case-study preset
import argparse
import os
import sys
from pathlib import Path
import logging

# Add the parent directory of src to the Python path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.counting.hodge import HodgeSpec
from src.pipeline import FibrationPipeline
from src.pipeline.presets import PRESET_NAMES
from src.utils.config_loader import load_settings
from src.utils.exceptions import K3FibrationError
from src.utils.logger import setup_logging

logger = logging.getLogger(__name__)


def run_preset(pipeline: FibrationPipeline, name: str, out_dir: Path) -> bool:
    """Genus listing and all multiplicity tables of one preset; True when the reference agrees."""
    run = pipeline.resolve_input(preset=name)
    analysis, lines = pipeline.genus(run, out=str(out_dir / name / "genus"))
    spec = HodgeSpec("enumerate") if run.preset.hodge_generators else None
    outcome = pipeline.count(run, spec, out=str(out_dir / name / "count"), analysis=analysis)
    expected = run.preset.expected.totals
    totals = {c.hodge_order: c.total for c in outcome.counts}
    ok = all(totals.get(order) == total for order, total in expected.items())
    ok = ok and not any(outcome.problems.values())
    logger.info(f"{name}: {lines[-1]}, totals {totals} ({'OK' if ok else 'MISMATCH'})")
    return ok


def main():
    parser = argparse.ArgumentParser(description="Run the case-study presets in batch")
    parser.add_argument('--config', type=str, default="config.yaml", help="Path to configuration file")
    parser.add_argument('--out', type=str, default=None, help="Output directory (default: output_dir from config)")
    parser.add_argument('--only', type=str, nargs="*", choices=PRESET_NAMES, help="Presets to run")
    args = parser.parse_args()

    setup_logging()
    settings = load_settings(args.config)
    out_dir = Path(args.out or settings.output_dir)
    pipeline = FibrationPipeline(settings)
    failures = []
    for name in args.only or PRESET_NAMES:
        try:
            if not run_preset(pipeline, name, out_dir):
                failures.append(name)
        except K3FibrationError as e:
            logger.error(f"{name}: {e}")
            failures.append(name)
    if failures:
        logger.error(f"Presets with problems: {', '.join(failures)}")
        sys.exit(1)
    logger.info(f"All {len(args.only or PRESET_NAMES)} presets agree with their references")


if __name__ == "__main__":
    main()
