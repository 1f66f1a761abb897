# services/spectral/pages.py
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from config_services import get_service_config
from exceptions import ContractViolationError
from services.extension.build import ExtendedAlgebra, build_extension
from services.extension.couple import Couple, is_admissible
from services.liealg.algebra import LieRep, make_rep
from services.liealg.cohomology import alternating_differential, cohomology_dims
from services.spectral.bigraded import Bidegree, bidegree_dim, block_offsets, decomposition_matrix
from utils.exterior import exterior_power_dual_action, subsets
from utils.linalg import EXACT, ExactBackend, backend_for, matmul, max_abs, zeros

logger = logging.getLogger(__name__)


def _exact_backend() -> ExactBackend:
    return backend_for(EXACT)


def _quotient_basis(denominator: np.ndarray, space: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Basis of ``denominator`` and representatives of space / denominator.

    Both are chosen among the given columns by one reduced row echelon pass
    over [denominator | space].
    """
    combined = np.concatenate([denominator, space], axis=1)
    if combined.shape[1] == 0 or combined.shape[0] == 0:
        return denominator[:, :0], space[:, :0]
    _, pivots = _exact_backend().rref(combined)
    split = denominator.shape[1]
    kept = [c for c in pivots if c < split]
    reps = [c - split for c in pivots if c >= split]
    return denominator[:, kept], space[:, reps]


class FilteredComplex:
    """
    Cochains of the total algebra in bigraded coordinates with the filtration
    by base degree: F^p C^k is spanned by the blocks (p', k - p') with p' >= p.

    The differential in these coordinates is the total differential conjugated
    by the decomposition; it is square-zero for admissible couples only.
    """

    def __init__(self, cpl: Couple, ext: Optional[ExtendedAlgebra] = None):
        if cpl.mode != EXACT:
            raise ContractViolationError("spectral sequence", "pages are computed in exact arithmetic only")
        report = is_admissible(cpl)
        if not report.ok:
            raise ContractViolationError("spectral sequence",
                                         f"couple is not admissible (closure {report.closure_residual:.3e}, "
                                         f"curvature {report.curvature_residual:.3e}); d does not square to zero")
        self.couple = cpl
        self.extension = ext if ext is not None else build_extension(cpl)
        self.n = self.extension.total.dim
        self.n_base = cpl.n_base
        self.n_kernel = cpl.n_kernel
        self._differentials: Dict[int, np.ndarray] = {}
        self._block_of: Dict[int, List[int]] = {}
        self._cycles: Dict[Tuple[int, int, int], np.ndarray] = {}
        self._quotients: Dict[Tuple[int, int, int], Tuple[np.ndarray, np.ndarray]] = {}

    def dim(self, k: int) -> int:
        return len(subsets(self.n, k))

    def block_of(self, k: int) -> List[int]:
        """Base degree p of every bigraded coordinate in degree k."""
        if k not in self._block_of:
            labels: List[int] = []
            for (p, q) in block_offsets(self.n_base, self.n_kernel, k):
                labels.extend([p] * bidegree_dim(self.n_base, self.n_kernel, p, q))
            self._block_of[k] = labels
        return self._block_of[k]

    def differential(self, k: int) -> np.ndarray:
        """d: C^k -> C^(k+1) in bigraded coordinates."""
        if k not in self._differentials:
            if k < 0 or k > self.n:
                self._differentials[k] = zeros((self.dim(k + 1), self.dim(k)), EXACT)
            else:
                total = self.extension.total
                d_total = alternating_differential(total.constants, None, k, EXACT)
                inverse = decomposition_matrix(self.extension, k).T
                self._differentials[k] = matmul(matmul(decomposition_matrix(self.extension, k + 1), d_total), inverse)
        return self._differentials[k]

    def filtration_basis(self, p: int, k: int) -> np.ndarray:
        """Columns spanning F^p C^k."""
        chosen = [i for i, block in enumerate(self.block_of(k)) if block >= p]
        basis = zeros((self.dim(k), len(chosen)), EXACT)
        for column, index in enumerate(chosen):
            basis[index, column] = 1
        return basis

    def cycles(self, r: int, p: int, k: int) -> np.ndarray:
        """Z_r^p in degree k: x in F^p C^k with dx in F^(p+r) C^(k+1)."""
        key = (r, p, k)
        if key in self._cycles:
            return self._cycles[key]
        size = self.dim(k)
        columns = np.array([i for i, block in enumerate(self.block_of(k)) if block >= p], dtype=int)
        if r <= 0 or columns.size == 0:
            result = self.filtration_basis(p, k)
        else:
            rows = np.array([i for i, block in enumerate(self.block_of(k + 1)) if block < p + r], dtype=int)
            restricted = self.differential(k)[np.ix_(rows, columns)]
            kernel = _exact_backend().nullspace(restricted)
            result = zeros((size, kernel.shape[1]), EXACT)
            result[columns, :] = kernel
        self._cycles[key] = result
        return result

    def denominator(self, r: int, p: int, k: int) -> np.ndarray:
        """Z_(r-1)^(p+1) + d Z_(r-1)^(p-r+1), spanning columns in degree k."""
        upper = self.cycles(r - 1, p + 1, k)
        if k == 0:
            return upper
        boundaries = matmul(self.differential(k - 1), self.cycles(r - 1, p - r + 1, k - 1))
        return np.concatenate([upper, boundaries], axis=1)

    def quotient(self, r: int, p: int, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """(denominator basis, representatives) of E_r^{p, k-p}."""
        key = (r, p, k)
        if key not in self._quotients:
            self._quotients[key] = _quotient_basis(self.denominator(r, p, k), self.cycles(r, p, k))
        return self._quotients[key]

    def page_differential(self, r: int, p: int, q: int) -> np.ndarray:
        """Matrix of d_r: E_r^{p,q} -> E_r^{p+r, q-r+1} on the chosen representatives."""
        k = p + q
        _, source = self.quotient(r, p, k)
        target_p, target_q = p + r, q - r + 1
        if not self.in_range(target_p, target_q):
            return zeros((0, source.shape[1]), EXACT)
        target_den, target_reps = self.quotient(r, target_p, k + 1)
        result = zeros((target_reps.shape[1], source.shape[1]), EXACT)
        if source.shape[1] == 0 or target_reps.shape[1] == 0:
            return result
        images = matmul(self.differential(k), source)
        frame = np.concatenate([target_den, target_reps], axis=1)
        split = target_den.shape[1]
        for column in range(source.shape[1]):
            solution = _exact_backend().solve(frame, images[:, column])
            if solution is None:
                raise ContractViolationError("page differential",
                                             f"image of E_{r}^({p},{q}) leaves Z_{r}^{target_p}")
            result[:, column] = solution[split:]
        return result

    def in_range(self, p: int, q: int) -> bool:
        return 0 <= p <= self.n_base and 0 <= q <= self.n_kernel


@dataclass
class Page:
    """E_r with dimensions, representative cocycles and the differential d_r"""
    r: int
    dims: Dict[Bidegree, int]
    representatives: Dict[Bidegree, np.ndarray] = field(default_factory=dict)
    differentials: Dict[Bidegree, np.ndarray] = field(default_factory=dict)

    def dimension(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def table(self) -> List[List[int]]:
        return [[p, q, dim] for (p, q), dim in sorted(self.dims.items())]

    def total_dims(self) -> List[int]:
        """sum over p + q = k of dim E_r^{p,q}, for k = 0..max degree"""
        top = max((p + q for p, q in self.dims), default=-1)
        totals = [0] * (top + 1)
        for (p, q), dim in self.dims.items():
            totals[p + q] += dim
        return totals

    def square_zero_residual(self) -> float:
        worst = 0.0
        for (p, q), d in self.differentials.items():
            following = self.differentials.get((p + self.r, q - self.r + 1))
            if following is None:
                continue
            worst = max(worst, max_abs(matmul(following, d)))
        return worst

    def to_dict(self) -> dict:
        return {"r": self.r, "table": self.table()}


def _page_from(complex_: FilteredComplex, r: int) -> Page:
    dims, reps, differentials = {}, {}, {}
    for p in range(complex_.n_base + 1):
        for q in range(complex_.n_kernel + 1):
            _, representatives = complex_.quotient(r, p, p + q)
            dims[(p, q)] = representatives.shape[1]
            reps[(p, q)] = representatives
            differentials[(p, q)] = complex_.page_differential(r, p, q)
    result = Page(r=r, dims=dims, representatives=reps, differentials=differentials)
    logger.debug(f"[SPECTRAL] [PAGE] E_{r} of {complex_.couple.name or 'couple'}: {result.table()}")
    return result


def page(cpl: Couple, r: int) -> Page:
    """E_r for r >= 0 by the Z_r / (Z_(r-1) + d Z_(r-1)) recipe."""
    if r < 0:
        raise ContractViolationError("page", f"page index {r} is negative")
    return _page_from(FilteredComplex(cpl), r)


@dataclass
class AbutmentReport:
    """E-infinity totals against the Betti numbers of the built extension"""
    ok: bool
    page_index: int
    e_infinity: List[int]
    betti: List[int]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "page": self.page_index, "e_infinity": self.e_infinity, "betti": self.betti}


def _infinity_index(complex_: FilteredComplex, max_page: Optional[int]) -> int:
    if max_page is not None:
        return max_page
    configured = get_service_config().spectral.max_page
    return configured if configured is not None else complex_.n + 1


def _abutment_of(complex_: FilteredComplex, infinity: Page) -> AbutmentReport:
    betti = cohomology_dims(complex_.extension.total)
    totals = infinity.total_dims()
    totals = totals + [0] * (len(betti) - len(totals))
    report = AbutmentReport(ok=totals == betti, page_index=infinity.r, e_infinity=totals, betti=betti)
    if report.ok:
        logger.info(f"[SPECTRAL] [ABUTMENT] {complex_.couple.name or 'couple'}: {betti}")
    else:
        logger.warning(f"[SPECTRAL] [ABUTMENT] {complex_.couple.name or 'couple'}: "
                       f"E_inf totals {totals} differ from Betti numbers {betti}")
    return report


def abutment(cpl: Couple, max_page: Optional[int] = None) -> AbutmentReport:
    """sum_{p+q=k} dim E_inf^{p,q} = b_k of the built extension, for every k"""
    complex_ = FilteredComplex(cpl)
    return _abutment_of(complex_, _page_from(complex_, _infinity_index(complex_, max_page)))


@dataclass
class SpectralSequence:
    couple: Couple
    pages: List[Page]
    abutment: AbutmentReport

    @property
    def e_infinity(self) -> Page:
        return self.pages[-1]

    def monotone(self) -> bool:
        """Page dimensions never grow with r."""
        for earlier, later in zip(self.pages, self.pages[1:]):
            if any(later.dimension(p, q) > dim for (p, q), dim in earlier.dims.items()):
                return False
        return True

    def square_zero_residual(self) -> float:
        return max((page_.square_zero_residual() for page_ in self.pages), default=0.0)

    def to_dict(self) -> dict:
        return {"pages": [page_.to_dict() for page_ in self.pages], "abutment": self.abutment.betti,
                "abutment_ok": self.abutment.ok}


def spectral_sequence(cpl: Couple, max_page: Optional[int] = None) -> SpectralSequence:
    """All pages E_0 .. E_inf and the abutment check."""
    complex_ = FilteredComplex(cpl)
    last = _infinity_index(complex_, max_page)
    pages = [_page_from(complex_, r) for r in range(last + 1)]
    return SpectralSequence(couple=cpl, pages=pages, abutment=_abutment_of(complex_, pages[-1]))


def kernel_cohomology_representation(cpl: Couple, q: int) -> LieRep:
    """
    Action of the base on H^q(K) induced by the dual action of D.

    Well defined for admissible couples: Curv_D is inner and inner
    derivations act trivially on Lie algebra cohomology.
    """
    if cpl.mode != EXACT:
        raise ContractViolationError("kernel_cohomology_representation", "exact arithmetic required")
    if not 0 <= q <= cpl.n_kernel:
        raise ContractViolationError("kernel_cohomology_representation", f"degree {q} outside 0..{cpl.n_kernel}")
    _, ck, d, _ = cpl.arrays
    backend = _exact_backend()
    cocycles = backend.nullspace(alternating_differential(ck, None, q, EXACT))
    if q == 0:
        coboundaries = zeros((1, 0), EXACT)
    else:
        coboundaries = alternating_differential(ck, None, q - 1, EXACT)
    basis, classes = _quotient_basis(coboundaries, cocycles)
    frame = np.concatenate([basis, classes], axis=1)
    split = basis.shape[1]
    b = classes.shape[1]
    matrices = zeros((cpl.n_base, b, b), EXACT)
    for i in range(cpl.n_base):
        if b == 0:
            break
        images = matmul(exterior_power_dual_action(d[i], q), classes)
        for column in range(b):
            solution = backend.solve(frame, images[:, column])
            if solution is None:
                raise ContractViolationError("kernel_cohomology_representation",
                                             f"D[{i + 1}] does not preserve the degree-{q} cocycles")
            matrices[i, :, column] = solution[split:]
    return make_rep(cpl.base, matrices, name=f"H^{q}({cpl.kernel.name or 'K'})")


@dataclass
class DimensionCheck:
    """Per-bidegree comparison of a page against an independent dimension formula"""
    page_index: int
    expected: Dict[Bidegree, int]
    actual: Dict[Bidegree, int]

    @property
    def mismatches(self) -> List[Tuple[int, int, int, int]]:
        return [(p, q, want, self.actual.get((p, q), 0)) for (p, q), want in sorted(self.expected.items())
                if self.actual.get((p, q), 0) != want]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def e1_dimension_check(cpl: Couple) -> DimensionCheck:
    """dim E_1^{p,q} = C(n_B, p) b_q(K)"""
    kernel_betti = cohomology_dims(cpl.kernel)
    expected = {(p, q): comb(cpl.n_base, p) * kernel_betti[q]
                for p in range(cpl.n_base + 1) for q in range(cpl.n_kernel + 1)}
    first = page(cpl, 1)
    return DimensionCheck(page_index=1, expected=expected, actual=dict(first.dims))


def e2_dimension_check(cpl: Couple) -> DimensionCheck:
    """dim E_2^{p,q} = dim H^p(g_B; H^q(K))"""
    expected = {}
    for q in range(cpl.n_kernel + 1):
        dims = cohomology_dims(cpl.base, kernel_cohomology_representation(cpl, q))
        for p in range(cpl.n_base + 1):
            expected[(p, q)] = dims[p]
    second = page(cpl, 2)
    return DimensionCheck(page_index=2, expected=expected, actual=dict(second.dims))
