# cli/commands.py
import argparse
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from cli.manifest import JsonManifestLoader
from cli.models import Manifest
from config_services import numerics
from di_container import get_service
from exceptions import ContractViolationError
from interfaces import IEvolutionSolver
from services.extension.build import build_extension
from services.extension.couple import Couple, is_admissible, make_couple
from services.extension.gauge import GaugeTransform, apply_gauge, shift_isomorphism_residual
from services.extension.standard import STANDARD_COUPLES
from services.holonomy.monodromy import connecting_partial2, monodromy_partial
from services.holonomy.splitting import split_homotopy_check
from services.holonomy.transport import parallel_transport
from services.liealg.algebra import check_jacobi, check_representation, derivation_residual
from services.liealg.cohomology import cohomology_dims, euler_characteristic
from services.paths.evolution import is_homotopy
from services.paths.models import ASphere, grid_tolerance, morphism_residual
from services.spectral.pages import spectral_sequence
from utils.linalg import EXACT, mode_of

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


@dataclass
class CommandResult:
    """Outcome of one command: text lines for people, payload for --json"""
    ok: bool
    lines: List[str] = field(default_factory=list)
    payload: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.ok else EXIT_CHECK_FAILED


def jsonable(value: Any) -> Any:
    """Plain JSON types; exact scalars become "p/q" strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) + 0.0
    return value


def _number(value: Any) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return f"{round(float(value), 10) + 0.0:.10f}"


def _matrix_lines(matrix: np.ndarray, indent: str = "  ") -> List[str]:
    return [indent + " ".join(f"{_number(x):>14}" for x in row) for row in np.asarray(matrix)]


def _status(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def _check_line(label: str, ok: bool, residual: float) -> str:
    return f"  {label:<32} {_status(ok)}  {residual:.3e}"


def _solver() -> IEvolutionSolver:
    return get_service(IEvolutionSolver)


def _gauge_probe(cpl: Couple, seed: int) -> List[Tuple[str, bool, float, dict]]:
    """Admissibility and the shift isomorphism under a seeded integer Delta."""
    tol = 0.0 if cpl.mode == EXACT else numerics().approx_tol
    delta = np.random.default_rng(seed).integers(-2, 3, size=(cpl.n_kernel, cpl.n_base))
    gauge = GaugeTransform.from_values(delta)
    gauged = is_admissible(apply_gauge(cpl, gauge))
    residual = shift_isomorphism_residual(cpl, gauge)
    logger.debug(f"[CLI] [VALIDATE] gauge probe seed={seed}: admissible={gauged.ok}, shift residual {residual:.3e}")
    return [
        ("gauge admissibility", gauged.ok, max(gauged.closure_residual, gauged.curvature_residual),
         dict(gauged.to_dict(), delta=delta)),
        ("shift isomorphism", residual <= tol, residual, {"residual": residual}),
    ]


def cmd_validate(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    """Jacobi, derivation and admissibility checks of one named entry."""
    name = args.name
    checks = []
    if name in manifest.couples or name in STANDARD_COUPLES:
        kind = "couple"
        base, kernel, D, omega = loader.couple_parts(manifest, name)
        for label, algebra in (("base", base), ("kernel", kernel)):
            report = check_jacobi(algebra)
            checks.append((f"{label} jacobi", report.ok, report.max_residual, report.to_dict()))
        tol = 0.0 if mode_of(D) == EXACT else numerics().approx_tol
        derivations_ok = True
        for i in range(base.dim):
            residual = derivation_residual(kernel, D[i])
            derivations_ok = derivations_ok and residual <= tol
            checks.append((f"D[{i + 1}] derivation", residual <= tol, residual, {"residual": residual}))
        if derivations_ok and all(ok for _, ok, _, _ in checks):
            cpl = make_couple(base, kernel, D, omega, name=name)
            admissibility = is_admissible(cpl)
            checks.append(("closure", admissibility.closure_ok, admissibility.closure_residual,
                           admissibility.to_dict()["closure"]))
            checks.append(("curvature_identity", admissibility.curvature_ok, admissibility.curvature_residual,
                           admissibility.to_dict()["curvature_identity"]))
            if admissibility.ok and args.seed is not None:
                checks += _gauge_probe(cpl, args.seed)
    else:
        kind, obj = loader.resolve(manifest, "any", name, args.seed)
        if kind == "algebra":
            report = check_jacobi(obj)
            checks.append(("jacobi", report.ok, report.max_residual, report.to_dict()))
        elif kind == "representation":
            report = check_representation(obj)
            checks.append(("representation", report.ok, report.residual, {"residual": report.residual}))
            checks.append(("faithful", obj.is_faithful(), 0.0, {}))
        elif kind == "grid":
            if obj.b is not None:
                residual, tol = morphism_residual(obj), grid_tolerance(obj)
                checks.append(("morphism", residual <= tol, residual, {"residual": residual, "tolerance": tol}))
            report = is_homotopy(obj, solver=_solver())
            checks.append(("homotopy", report.ok, report.residual, report.to_dict()))
        else:
            checks.append(("shape", True, 0.0, {}))

    ok = all(passed for _, passed, _, _ in checks)
    lines = [f"validate {name} ({kind})"]
    lines += [_check_line(label, passed, residual) for label, passed, residual, _ in checks]
    lines.append(f"result: {_status(ok)}")
    payload = {
        "name": name,
        "kind": kind,
        "ok": ok,
        "checks": [dict(detail, check=label, ok=passed) for label, passed, _, detail in checks],
    }
    logger.info(f"[CLI] [VALIDATE] {name}: {_status(ok)}")
    return CommandResult(ok=ok, lines=lines, payload=payload)


def cmd_cohomology(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    algebra = loader.algebra(manifest, args.algebra)
    rep = loader.representation(manifest, args.rep, algebra) if args.rep else None
    dims = cohomology_dims(algebra, rep)
    payload = {
        "algebra": args.algebra,
        "representation": args.rep,
        "dims": dims,
        "euler_characteristic": euler_characteristic(dims),
    }
    return CommandResult(ok=True, lines=[" ".join(str(d) for d in dims)], payload=payload)


def _page_lines(page_) -> List[str]:
    ps = sorted({p for p, _ in page_.dims})
    qs = sorted({q for _, q in page_.dims}, reverse=True)
    lines = [f"E_{page_.r}"]
    for q in qs:
        lines.append(f"  q={q}: " + " ".join(f"{page_.dimension(p, q):>3}" for p in ps))
    lines.append("       " + " ".join(f"{p:>3}" for p in ps) + "  (p)")
    return lines


def cmd_spectral(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    cpl = loader.couple(manifest, args.couple)
    if not is_admissible(cpl).ok:
        raise ContractViolationError("spectral", f"couple {args.couple} is not admissible")
    sequence = spectral_sequence(cpl, args.max_page)
    lines = []
    for page_ in sequence.pages:
        lines += _page_lines(page_)
    report = sequence.abutment
    lines.append(f"abutment {' '.join(str(b) for b in report.betti)}"
                 f" ({'matches' if report.ok else 'E_inf totals ' + ' '.join(str(e) for e in report.e_infinity)})")
    payload = dict(sequence.to_dict(), couple=args.couple, e_infinity=report.e_infinity)
    return CommandResult(ok=report.ok, lines=lines, payload=payload)


def cmd_extend(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    """Total algebra of a couple: basis, nonzero brackets and their Jacobi check."""
    cpl = loader.couple(manifest, args.couple)
    ext = build_extension(cpl)
    total = ext.total
    names = total.basis_names
    brackets, lines = [], [f"basis: {' '.join(names)}"]
    for i in range(total.dim):
        for j in range(i + 1, total.dim):
            terms = [(k, total.constants[i, j, k]) for k in range(total.dim) if total.constants[i, j, k] != 0]
            if not terms:
                continue
            lines.append(f"  [{names[i]}, {names[j]}] = " + " + ".join(f"{_short(v)} {names[k]}" for k, v in terms))
            brackets += [{"i": i + 1, "j": j + 1, "k": k + 1, "value": v} for k, v in terms]
    jacobi = check_jacobi(total)
    lines.append(f"jacobi: {_status(jacobi.ok)}")
    payload = {
        "couple": args.couple,
        "basis": list(names),
        "kernel_dim": ext.n_kernel,
        "brackets": brackets,
        "jacobi": jacobi.to_dict(),
    }
    return CommandResult(ok=jacobi.ok, lines=lines, payload=payload)


def _short(value: Any) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return f"{float(value):.10g}"


def cmd_transport(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    cpl = loader.couple(manifest, args.couple)
    path = loader.path(manifest, args.path)
    transport = parallel_transport(cpl, path, args.t)
    lines = [f"transport of {args.couple} along {args.path} over [0, {args.t}]"]
    lines += _matrix_lines(transport.matrix)
    lines.append(f"morphism residual {transport.morphism_residual:.3e}")
    payload = dict(transport.to_dict(), couple=args.couple, path=args.path)
    return CommandResult(ok=True, lines=lines, payload=payload)


def cmd_monodromy(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    """Monodromy of a base homotopy, or the connecting map of a sphere with --sphere."""
    cpl = loader.couple(manifest, args.couple)
    grid = loader.grid(manifest, args.grid, args.seed)
    rep = loader.representation(manifest, args.rep, cpl.kernel) if args.rep else None
    if args.sphere:
        element = connecting_partial2(cpl, ASphere(grid), rep, solver=_solver())
    else:
        element = monodromy_partial(cpl, grid, rep)
    label = "connecting map" if args.sphere else "monodromy"
    lines = [f"{label} of {args.couple} over {args.grid}: kernel path with {element.kpath.N + 1} samples"]
    payload = dict(element.to_dict(), couple=args.couple, grid=args.grid, sphere=bool(args.sphere))
    if "abelian_value" in payload:
        lines.append("abelian value: " + " ".join(_number(x) for x in payload["abelian_value"]))
    if element.group_element is not None:
        lines.append("group element:")
        lines += _matrix_lines(element.group_element)
    return CommandResult(ok=True, lines=lines, payload=payload)


def cmd_homotopy_check(manifest: Manifest, args: argparse.Namespace, loader: JsonManifestLoader) -> CommandResult:
    grid = loader.grid(manifest, args.grid, args.seed)
    if args.couple:
        cpl = loader.couple(manifest, args.couple)
        kernel = loader.kernel_family(manifest, args.grid)
        if kernel is None:
            raise ContractViolationError("homotopy-check", f"grid {args.grid} has no kernel family")
        report = split_homotopy_check(cpl, grid, kernel, solver=_solver(), cross_check=args.cross_check)
    else:
        report = is_homotopy(grid, solver=_solver())
    lines = [f"homotopy residual {report.residual:.3e} (tolerance {report.tolerance:.1e}): {_status(report.ok)}"]
    payload = dict(report.to_dict(), grid=args.grid, couple=args.couple)
    return CommandResult(ok=report.ok, lines=lines, payload=payload)


COMMANDS: Dict[str, Callable[[Manifest, argparse.Namespace, JsonManifestLoader], CommandResult]] = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "spectral": cmd_spectral,
    "extend": cmd_extend,
    "transport": cmd_transport,
    "monodromy": cmd_monodromy,
    "homotopy-check": cmd_homotopy_check,
}
