# cli/app.py
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from cli.commands import COMMANDS, EXIT_INPUT_ERROR, EXIT_NUMERICAL_FAILURE, CommandResult, jsonable
from cli.models import Manifest
from config_services import NumericsConfig, get_service_config
from di_container import get_service, setup_di_container
from exceptions import (
    ConfigurationException,
    ContractViolationError,
    ManifestException,
    NumericalFailureError,
    StructuralError,
)
from interfaces import IManifestLoader
from logging_config import setup_logging
from services.paths.evolution import SOLVERS

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", default=None, metavar="PATH",
                        help="manifest file (default: LIEEXT_MANIFEST or manifest.json)")
    common.add_argument("--json", action="store_true", help="print the JSON payload instead of tables")
    common.add_argument("--tol-ode", type=float, default=None, metavar="X")
    common.add_argument("--steps", type=int, default=None, metavar="N")
    common.add_argument("--seed", type=int, default=None, metavar="S",
                        help="seed for grids generated from random potentials")
    common.add_argument("--rep", default=None, metavar="NAME",
                        help="representation: a manifest entry or a builtin name")
    common.add_argument("--solver", choices=sorted(SOLVERS), default=None)
    common.add_argument("--log-level", default=None, metavar="LEVEL")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="lieext",
                                     description="Extensions of Lie algebras: checks, cohomology, spectral "
                                                 "sequences, transport and monodromy.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate = subparsers.add_parser("validate", parents=[common], help="run the structural checks of an entry")
    validate.add_argument("name")

    cohomology = subparsers.add_parser("cohomology", parents=[common], help="Betti numbers of an algebra")
    cohomology.add_argument("algebra")

    spectral = subparsers.add_parser("spectral", parents=[common], help="pages and abutment of a couple")
    spectral.add_argument("couple")
    spectral.add_argument("--max-page", type=int, default=None, metavar="R")

    extend = subparsers.add_parser("extend", parents=[common], help="bracket table of the total algebra")
    extend.add_argument("couple")

    transport = subparsers.add_parser("transport", parents=[common], help="parallel transport along a base path")
    transport.add_argument("couple")
    transport.add_argument("path")
    transport.add_argument("--t", type=float, default=1.0)

    monodromy = subparsers.add_parser("monodromy", parents=[common], help="monodromy of a base homotopy")
    monodromy.add_argument("couple")
    monodromy.add_argument("grid")
    monodromy.add_argument("--sphere", action="store_true", help="treat the grid as a sphere (connecting map)")

    homotopy = subparsers.add_parser("homotopy-check", parents=[common], help="decide whether a grid is a homotopy")
    homotopy.add_argument("grid")
    homotopy.add_argument("--couple", default=None, help="check the grid's kernel family in split form")
    homotopy.add_argument("--cross-check", action="store_true")
    return parser


def apply_overrides(numerics_config: NumericsConfig, manifest: Manifest, args: argparse.Namespace) -> None:
    """Flags over manifest defaults over the environment."""
    defaults = manifest.defaults
    if defaults.tol_ode is not None:
        numerics_config.tol_ode = defaults.tol_ode
    if defaults.steps is not None:
        numerics_config.steps = defaults.steps
    if args.tol_ode is not None:
        numerics_config.tol_ode = args.tol_ode
    if args.steps is not None:
        numerics_config.steps = args.steps
    if args.solver is not None:
        numerics_config.solver = args.solver


def emit(result: CommandResult, as_json: bool, indent: int) -> None:
    if as_json:
        print(json.dumps(jsonable(result.payload), indent=indent, sort_keys=True))
    else:
        print("\n".join(result.lines))


def _load_manifest(loader: IManifestLoader, explicit: Optional[str], default: str) -> Manifest:
    """An explicit --manifest must exist; a missing default manifest means builtins only."""
    if explicit is None and not Path(default).is_file():
        logger.debug(f"[CLI] [MANIFEST] {default} not found, using builtin entries only")
        return Manifest()
    return loader.load(explicit or default)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        setup_logging(args.log_level)
    else:
        setup_logging()
    try:
        config = get_service_config()
        setup_di_container()
        loader = get_service(IManifestLoader)
        manifest = _load_manifest(loader, args.manifest, config.cli.manifest_path)
        apply_overrides(config.numerics, manifest, args)
        result = COMMANDS[args.command](manifest, args, loader)
    except NumericalFailureError as e:
        logger.error(f"[CLI] {args.command}: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except (ManifestException, StructuralError, ContractViolationError, ConfigurationException) as e:
        logger.error(f"[CLI] {args.command}: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    emit(result, args.json, config.cli.json_indent)
    logger.info(f"[CLI] {args.command} finished with exit code {result.exit_code}")
    return result.exit_code
