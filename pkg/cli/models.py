# cli/models.py
from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator


def _check_rational(value: Union[int, float, str]) -> Union[int, float, str]:
    if isinstance(value, str):
        try:
            Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational literal: {value!r}") from e
    return value


# Exact literals are ints or "p/q" strings; floats switch the entry to approximate arithmetic
RationalLiteral = Annotated[Union[int, float, str], AfterValidator(_check_rational)]


class ManifestModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class Defaults(ManifestModel):
    tol_ode: Optional[float] = Field(default=None, gt=0)
    steps: Optional[int] = Field(default=None, ge=1)
    N: int = Field(default=64, ge=4)
    M: int = Field(default=16, ge=4)


class AlgebraEntry(ManifestModel):
    """Either a builtin name, a bracket list (1-based indices) or a full constants array."""
    builtin: Optional[str] = None
    basis: Optional[List[str]] = None
    brackets: List[Tuple[int, int, int, RationalLiteral]] = Field(default_factory=list)
    constants: Optional[List[List[List[RationalLiteral]]]] = None

    @model_validator(mode="after")
    def _one_source(self) -> 'AlgebraEntry':
        sources = [self.builtin is not None, self.basis is not None and self.constants is None,
                   self.constants is not None]
        if sum(sources) != 1:
            raise ValueError("give exactly one of 'builtin', 'basis' with 'brackets', or 'constants'")
        if self.brackets and self.basis is None:
            raise ValueError("'brackets' needs 'basis'")
        return self


class RepresentationEntry(ManifestModel):
    algebra: str
    builtin: Optional[str] = None
    matrices: Optional[List[List[List[RationalLiteral]]]] = None

    @model_validator(mode="after")
    def _one_source(self) -> 'RepresentationEntry':
        if (self.builtin is None) == (self.matrices is None):
            raise ValueError("give exactly one of 'builtin' or 'matrices'")
        return self


class CoupleEntry(ManifestModel):
    """
    A standard couple by name, or (base, kernel, D, omega).

    ``omega`` lists the entries omega(e_i, e_j) for i < j as [i, j, vector],
    1-based; the remaining entries follow by antisymmetry.
    """
    standard: Optional[str] = None
    kind: Literal["general", "semidirect", "central"] = "general"
    base: Optional[str] = None
    kernel: Optional[str] = None
    kernel_dim: Optional[int] = Field(default=None, ge=1)
    D: Optional[List[List[List[RationalLiteral]]]] = None
    omega: List[Tuple[int, int, List[RationalLiteral]]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _shape(self) -> 'CoupleEntry':
        if self.standard is not None:
            return self
        if self.base is None:
            raise ValueError("'base' is required unless 'standard' is given")
        if self.kind == "central":
            if self.D is not None:
                raise ValueError("a central couple has no 'D'")
            if self.kernel is None and self.kernel_dim is None:
                raise ValueError("a central couple needs 'kernel' or 'kernel_dim'")
        elif self.kernel is None:
            raise ValueError("'kernel' is required")
        if self.kind == "semidirect" and self.omega:
            raise ValueError("a semidirect couple has no 'omega'")
        for i, j, _ in self.omega:
            if not 1 <= i < j:
                raise ValueError(f"omega entry ({i}, {j}) must have 1 <= i < j")
        return self


class PathEntry(ManifestModel):
    algebra: str
    samples: List[List[float]]


class PotentialEntry(ManifestModel):
    """Random group-valued potential; the seed comes from --seed."""
    rep: str = "adjoint"
    count: int = Field(default=2, ge=1)
    scale: float = 0.5
    max_frequency: int = Field(default=2, ge=1)
    drift: bool = False
    bend: bool = False


class GridEntry(ManifestModel):
    algebra: str
    a: Optional[List[List[List[float]]]] = None
    b: Optional[List[List[List[float]]]] = None
    kernel: Optional[List[List[List[float]]]] = None
    potential: Optional[PotentialEntry] = None
    N: Optional[int] = Field(default=None, ge=4)
    M: Optional[int] = Field(default=None, ge=4)

    @model_validator(mode="after")
    def _one_source(self) -> 'GridEntry':
        if (self.a is None) == (self.potential is None):
            raise ValueError("give exactly one of 'a' or 'potential'")
        if self.potential is not None and self.b is not None:
            raise ValueError("'b' comes from the potential")
        return self


class Manifest(ManifestModel):
    version: int = 1
    defaults: Defaults = Field(default_factory=Defaults)
    algebras: Dict[str, AlgebraEntry] = Field(default_factory=dict)
    representations: Dict[str, RepresentationEntry] = Field(default_factory=dict)
    couples: Dict[str, CoupleEntry] = Field(default_factory=dict)
    paths: Dict[str, PathEntry] = Field(default_factory=dict)
    grids: Dict[str, GridEntry] = Field(default_factory=dict)


class RepresentationFile(ManifestModel):
    """Standalone representation file for --rep: one dim x dim matrix per basis element."""
    dim: int = Field(ge=1)
    rho: List[List[List[RationalLiteral]]]

    @model_validator(mode="after")
    def _square(self) -> 'RepresentationFile':
        for index, matrix in enumerate(self.rho):
            if len(matrix) != self.dim or any(len(row) != self.dim for row in matrix):
                raise ValueError(f"rho[{index}] is not {self.dim} x {self.dim}")
        return self
