# cli/manifest.py
import json
import logging
from pathlib import Path
from typing import Any, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from cli.models import AlgebraEntry, CoupleEntry, GridEntry, Manifest, RepresentationFile
from exceptions import ContractViolationError, ManifestFormatError, ManifestReferenceError
from interfaces import IManifestLoader
from services.extension.couple import Couple, central, make_couple, semidirect
from services.extension.standard import STANDARD_COUPLES
from services.liealg.algebra import LieAlgebra, LieRep, check_representation, from_brackets, from_constants, make_rep
from services.liealg.catalog import REPRESENTATIONS, builtin_algebra, builtin_rep
from services.paths.generators import SinePotential, homotopy_from_potential
from services.paths.models import APath, HomotopyGrid
from utils.linalg import as_array, literal_mode, zeros
from utils.retry import retry_file_operation

logger = logging.getLogger(__name__)

KINDS = ("algebra", "representation", "couple", "path", "grid")


@retry_file_operation
def _read_text(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _omega_array(entry: CoupleEntry, n_base: int, n_kernel: int) -> np.ndarray:
    literals = [value for *_, vector in entry.omega for value in vector]
    mode = literal_mode(literals)
    omega = zeros((n_base, n_base, n_kernel), mode)
    for i, j, vector in entry.omega:
        if j > n_base:
            raise ContractViolationError("couple omega", f"entry ({i}, {j}) outside a {n_base}-dimensional base")
        values = as_array(vector, mode)
        if values.shape != (n_kernel,):
            raise ContractViolationError("couple omega", f"entry ({i}, {j}) has {len(vector)} components, "
                                                         f"expected {n_kernel}")
        omega[i - 1, j - 1] = values
        omega[j - 1, i - 1] = -values
    return omega


class JsonManifestLoader(IManifestLoader):
    """Manifest files in JSON, validated with the pydantic models of cli.models."""

    def load(self, path: str) -> Manifest:
        location = Path(path)
        try:
            text = _read_text(location)
        except OSError as e:
            raise ManifestFormatError(str(path), f"cannot read file: {e}") from e
        try:
            manifest = Manifest.model_validate(json.loads(text))
        except json.JSONDecodeError as e:
            raise ManifestFormatError(str(path), f"invalid JSON: {e}") from e
        except ValidationError as e:
            raise ManifestFormatError(str(path), str(e)) from e
        self._check_references(manifest)
        logger.info(f"[CLI] [MANIFEST] loaded {path}: {len(manifest.algebras)} algebras, "
                    f"{len(manifest.couples)} couples, {len(manifest.paths)} paths, {len(manifest.grids)} grids")
        return manifest

    def _check_references(self, manifest: Manifest) -> None:
        for entry in manifest.representations.values():
            self._require_algebra(manifest, entry.algebra)
            if entry.builtin is not None and entry.builtin not in REPRESENTATIONS:
                raise ManifestReferenceError("builtin representation", entry.builtin)
        for entry in manifest.couples.values():
            if entry.standard is not None:
                if entry.standard not in STANDARD_COUPLES:
                    raise ManifestReferenceError("standard couple", entry.standard)
                continue
            self._require_algebra(manifest, entry.base)
            if entry.kernel is not None:
                self._require_algebra(manifest, entry.kernel)
        for entry in list(manifest.paths.values()) + list(manifest.grids.values()):
            self._require_algebra(manifest, entry.algebra)
        for entry in manifest.grids.values():
            if entry.potential is not None and entry.potential.rep not in manifest.representations \
                    and entry.potential.rep not in REPRESENTATIONS:
                raise ManifestReferenceError("representation", entry.potential.rep)

    @staticmethod
    def _require_algebra(manifest: Manifest, name: str) -> None:
        if name not in manifest.algebras:
            builtin_algebra(name)

    def resolve(self, manifest: Manifest, kind: str, name: str, seed: Optional[int] = None) -> Tuple[str, Any]:
        if kind == "any":
            for candidate in KINDS:
                if name in self._section(manifest, candidate):
                    return self.resolve(manifest, candidate, name, seed)
            if name in STANDARD_COUPLES:
                return "couple", self.couple(manifest, name)
            try:
                return "algebra", builtin_algebra(name)
            except ManifestReferenceError:
                raise ManifestReferenceError("entry", name) from None
        if kind == "algebra":
            return kind, self.algebra(manifest, name)
        if kind == "representation":
            return kind, self.representation(manifest, name)
        if kind == "couple":
            return kind, self.couple(manifest, name)
        if kind == "path":
            return kind, self.path(manifest, name)
        if kind == "grid":
            return kind, self.grid(manifest, name, seed)
        raise ContractViolationError("resolve", f"unknown kind {kind!r}")

    @staticmethod
    def _section(manifest: Manifest, kind: str) -> dict:
        return {
            "algebra": manifest.algebras,
            "representation": manifest.representations,
            "couple": manifest.couples,
            "path": manifest.paths,
            "grid": manifest.grids,
        }[kind]

    def algebra(self, manifest: Manifest, name: str) -> LieAlgebra:
        entry: Optional[AlgebraEntry] = manifest.algebras.get(name)
        if entry is None:
            return builtin_algebra(name)
        if entry.builtin is not None:
            return builtin_algebra(entry.builtin)
        if entry.constants is not None:
            return from_constants(entry.constants, entry.basis, name=name)
        n = len(entry.basis)
        for i, j, k, _ in entry.brackets:
            if not all(1 <= index <= n for index in (i, j, k)):
                raise ContractViolationError(f"algebra {name}", f"bracket ({i}, {j}, {k}) outside 1..{n}")
        brackets = [(i - 1, j - 1, k - 1, value) for i, j, k, value in entry.brackets]
        return from_brackets(entry.basis, brackets, name=name)

    def representation(self, manifest: Manifest, name: str, algebra: Optional[LieAlgebra] = None) -> LieRep:
        """A manifest representation, a builtin one applied to ``algebra``, or a --rep file path."""
        entry = manifest.representations.get(name)
        if entry is None:
            if algebra is None:
                raise ManifestReferenceError("representation", name)
            if name not in REPRESENTATIONS and Path(name).is_file():
                return self.representation_file(name, algebra)
            return builtin_rep(name, algebra)
        target = self.algebra(manifest, entry.algebra)
        if algebra is not None and algebra.dim != target.dim:
            raise ContractViolationError(f"representation {name}",
                                         f"defined on a {target.dim}-dimensional algebra, "
                                         f"used on a {algebra.dim}-dimensional one")
        if entry.builtin is not None:
            return builtin_rep(entry.builtin, target)
        return make_rep(target, entry.matrices, name=name)

    def representation_file(self, path: str, algebra: LieAlgebra) -> LieRep:
        """A representation file {"dim": m, "rho": [...]} with one matrix per basis element of ``algebra``."""
        try:
            contents = RepresentationFile.model_validate(json.loads(_read_text(Path(path))))
        except OSError as e:
            raise ManifestFormatError(path, f"cannot read file: {e}") from e
        except json.JSONDecodeError as e:
            raise ManifestFormatError(path, f"invalid JSON: {e}") from e
        except ValidationError as e:
            raise ManifestFormatError(path, str(e)) from e
        if len(contents.rho) != algebra.dim:
            raise ContractViolationError(f"representation {path}",
                                         f"{len(contents.rho)} matrices for a {algebra.dim}-dimensional algebra")
        rep = make_rep(algebra, contents.rho, name=Path(path).stem)
        report = check_representation(rep)
        if not report.ok:
            raise ContractViolationError(f"representation {path}",
                                         f"not a representation (residual {report.residual:.3e})")
        logger.debug(f"[CLI] [MANIFEST] representation of dimension {contents.dim} from {path}")
        return rep

    def couple_parts(self, manifest: Manifest, name: str) -> Tuple[LieAlgebra, LieAlgebra, np.ndarray, np.ndarray]:
        entry = manifest.couples.get(name)
        if entry is None or entry.standard is not None:
            cpl = self.couple(manifest, name)
            return cpl.base, cpl.kernel, cpl.D, cpl.omega
        base = self.algebra(manifest, entry.base)
        if entry.kind == "central" and entry.kernel is None:
            kernel = builtin_algebra(f"abelian{entry.kernel_dim}")
        else:
            kernel = self.algebra(manifest, entry.kernel)
        if entry.D is None:
            D = zeros((base.dim, kernel.dim, kernel.dim), kernel.mode)
        else:
            D = np.asarray(entry.D, dtype=object)
            D = as_array(D, literal_mode(D.flat))
        return base, kernel, D, _omega_array(entry, base.dim, kernel.dim)

    def couple(self, manifest: Manifest, name: str) -> Couple:
        entry = manifest.couples.get(name)
        if entry is None:
            if name not in STANDARD_COUPLES:
                raise ManifestReferenceError("couple", name)
            return STANDARD_COUPLES[name]()
        if entry.standard is not None:
            return STANDARD_COUPLES[entry.standard]()
        base, kernel, D, omega = self.couple_parts(manifest, name)
        if entry.kind == "semidirect":
            return semidirect(base, kernel, D, name=name)
        if entry.kind == "central":
            return central(base, kernel.dim, omega, name=name)
        return make_couple(base, kernel, D, omega, name=name)

    def path(self, manifest: Manifest, name: str) -> APath:
        entry = manifest.paths.get(name)
        if entry is None:
            raise ManifestReferenceError("path", name)
        return APath(self.algebra(manifest, entry.algebra), np.asarray(entry.samples, dtype=float))

    def grid(self, manifest: Manifest, name: str, seed: Optional[int] = None) -> HomotopyGrid:
        entry: Optional[GridEntry] = manifest.grids.get(name)
        if entry is None:
            raise ManifestReferenceError("grid", name)
        algebra = self.algebra(manifest, entry.algebra)
        if entry.potential is None:
            b = None if entry.b is None else np.asarray(entry.b, dtype=float)
            return HomotopyGrid(algebra, np.asarray(entry.a, dtype=float), b)
        if seed is None:
            raise ContractViolationError(f"grid {name}", "a generated grid needs --seed")
        settings = entry.potential
        rep = self.representation(manifest, settings.rep, algebra)
        potential = SinePotential.random(algebra.dim, np.random.default_rng(seed), count=settings.count,
                                         scale=settings.scale, max_frequency=settings.max_frequency,
                                         drift=settings.drift, bend=settings.bend)
        N = entry.N or manifest.defaults.N
        M = entry.M or manifest.defaults.M
        logger.debug(f"[CLI] [MANIFEST] grid {name} from potential, seed={seed}, {N + 1}x{M + 1}")
        return homotopy_from_potential(rep, potential, N, M)

    def kernel_family(self, manifest: Manifest, name: str) -> Optional[np.ndarray]:
        entry = manifest.grids.get(name)
        if entry is None:
            raise ManifestReferenceError("grid", name)
        return None if entry.kernel is None else np.asarray(entry.kernel, dtype=float)
