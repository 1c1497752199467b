import argparse
import logging
import sys
from typing import List, Optional

from src.counting.report import render_table
from src.finqform.datafiles import read_subgroup_file
from src.pipeline.presets import PRESET_NAMES
from src.pipeline.runner import FibrationPipeline
from src.utils.config_loader import load_settings
from src.utils.exceptions import GenusWalkIncomplete, K3FibrationError, LatticeInputError
from src.utils.helpers import parse_int_list
from src.utils.logger import setup_logging

logger = logging.getLogger(__name__)


def _input_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=PRESET_NAMES, help="Case-study preset")
    source.add_argument("--lattice", type=str, help="Gram matrix file of the transcendental lattice T")
    parser.add_argument("--seed", type=str, help="Gram matrix file of one frame (seed of the genus walk)")


def _walk_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--primes", type=str, help="Comma separated neighbor primes, e.g. 3,5")
    parser.add_argument("--out", type=str, help="Directory for lattice files, manifest and summary")
    parser.add_argument("--max-candidates", type=int, help="Neighbor candidates per class and round")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default="config.yaml", help="Path to configuration file")
    common.add_argument("--logging-config", type=str, default="config/logging_config.yaml",
                        help="Path to logging configuration file")
    common.add_argument("--threads", type=int, help="Worker count; 0 uses every core")
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    common.add_argument("--no-progress", action="store_true", help="Hide progress bars")

    parser = argparse.ArgumentParser(
        prog="python -m src.pipeline",
        description="Count jacobian elliptic fibrations on K3 surfaces up to automorphisms",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    disc = commands.add_parser("discriminant", parents=[common], help="Discriminant form, |O(q)| and conjugacy classes")
    _input_arguments(disc)

    genus = commands.add_parser("genus", parents=[common], help="Enumerate the frame genus and check its mass")
    _input_arguments(genus)
    _walk_arguments(genus)

    count = commands.add_parser("count", parents=[common], help="Multiplicity table and number of jacobian fibrations")
    _input_arguments(count)
    _walk_arguments(count)
    hodge = count.add_mutually_exclusive_group()
    hodge.add_argument("--hodge-order", type=int, help="Order of the image of O_hdg(T) in O(T#)")
    hodge.add_argument("--hodge-gen", type=str, help="Subgroup file whose first matrix generates the image")
    hodge.add_argument("--all-hodge", action="store_true", help="Every admissible image, one table each")
    return parser


def _hodge_generator(path: str) -> List[List[int]]:
    sections = read_subgroup_file(path)
    for matrices in sections.values():
        if matrices:
            return matrices[0]
    raise LatticeInputError("no matrix in Hodge generator file", path)


def _run(args: argparse.Namespace) -> int:
    overrides = {"threads": args.threads, "max_candidates": getattr(args, "max_candidates", None)}
    settings = load_settings(args.config, overrides)
    pipeline = FibrationPipeline(settings, progress=not (args.quiet or args.no_progress))
    run = pipeline.resolve_input(args.preset, args.lattice, args.seed)
    if args.command == "discriminant":
        print("\n".join(pipeline.discriminant(run)))
        return 0

    primes = parse_int_list(args.primes) if args.primes else ()
    if args.command == "genus":
        _, lines = pipeline.genus(run, primes, args.out)
        print("\n".join(lines))
        return 0

    spec = None
    if args.hodge_gen:
        spec = pipeline.hodge_spec(run, generator=_hodge_generator(args.hodge_gen))
    elif args.hodge_order is not None:
        spec = pipeline.hodge_spec(run, order=args.hodge_order)
    elif args.all_hodge:
        spec = pipeline.hodge_spec(run)
    outcome = pipeline.count(run, spec, primes, args.out)
    for c in outcome.counts:
        print(render_count_table(outcome, c.hodge_label, run.name))
    print(" / ".join(str(total) for _, total in outcome.totals))
    return 0


def render_count_table(outcome, label: str, name: str) -> str:
    count = next(c for c in outcome.counts if c.hodge_label == label)
    return render_table(outcome.reports[label], f"{name}, {label}", count.total)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.logging_config, args.quiet)
    try:
        return _run(args)
    except GenusWalkIncomplete as e:
        logger.error(f"Genus walk failed: {e}")
        print(f"mass {e.found} of {e.expected} FAILED")
        return e.exit_code
    except K3FibrationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
