"""JSON wire documents for symbols, lacunary systems, idempotent sets and dyadic functions."""

from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, field_validator

from harmonic.exceptions import DegenerateInputError
from harmonic.martingale import Atom, AtomicDecomposition, DyadicFunction, DyadicInterval
from harmonic.poly import ComplexArray
from harmonic.symbols import IdemSet2D, LacunarySystem, Symbol, idem_contains, lacunary_check

# [re, im]
ComplexPair = tuple[float, float]


def _pairs(values: ComplexArray) -> list[ComplexPair]:
    return [(float(v.real), float(v.imag)) for v in values]


def _fraction(value: str) -> str:
    Fraction(value)
    return value


class LacunarySystemDocument(BaseModel):
    """A lacunary system; ``alpha`` is an exact rational string such as ``"1/2"``."""

    model_config = ConfigDict(extra="forbid")

    d: list[int]
    alpha: str | None
    D: list[int]
    m: list[int] = Field(default_factory=list)
    M: list[int] = Field(default_factory=list)
    C_alpha_est: float | None = None
    symbol_values: list[str] = Field(default_factory=list)

    @field_validator("alpha")
    @classmethod
    def alpha_is_rational(cls, v: str | None) -> str | None:
        return None if v is None else _fraction(v)

    @field_validator("symbol_values")
    @classmethod
    def values_are_rational(cls, v: list[str]) -> list[str]:
        return [_fraction(x) for x in v]


class IdemSetDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d: list[int]
    N: list[int]
    contains: dict[str, bool] = Field(default_factory=dict)


class DyadicFunctionDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    depth: int = Field(ge=0)
    values: list[ComplexPair]

    @field_validator("values")
    @classmethod
    def non_empty(cls, v: list[ComplexPair]) -> list[ComplexPair]:
        if not v:
            raise ValueError("values must not be empty")
        return v


class IntervalDocument(BaseModel):
    m: int = Field(ge=0)
    i: int = Field(ge=0)


class AtomDocument(BaseModel):
    interval: IntervalDocument
    values: list[ComplexPair]


class DecompositionDocument(BaseModel):
    depth: int
    coeffs: list[float]
    residual_mean: ComplexPair
    atoms: list[AtomDocument]
    coefficient_sum: float
    h1_delta_norm: float
    ratio: float | None


# --- Conversions ---


def symbol_document(system: LacunarySystem, mu: Symbol) -> LacunarySystemDocument:
    return LacunarySystemDocument(
        d=list(system.d),
        alpha=None if system.alpha is None else str(system.alpha),
        D=list(system.D),
        m=list(system.m),
        M=list(system.M),
        C_alpha_est=system.c_alpha_est,
        symbol_values=[str(v) for v in mu.values],
    )


def system_from_document(doc: LacunarySystemDocument) -> LacunarySystem:
    """Rebuild the system from ``d`` and ``C_alpha_est``; the derived fields must agree."""
    system = lacunary_check(doc.d, doc.C_alpha_est)
    expected_alpha = None if system.alpha is None else str(system.alpha)
    if (expected_alpha, list(system.D)) != (doc.alpha, doc.D):
        raise DegenerateInputError(f"Document alpha/D {doc.alpha}/{doc.D} do not match d={doc.d}")
    return system


def symbol_from_document(doc: LacunarySystemDocument) -> Symbol:
    return Symbol.from_values(doc.symbol_values)


def idem_set_document(A: IdemSet2D, queries: list[tuple[int, int]] | None = None) -> IdemSetDocument:
    contains = {f"{n1},{n2}": idem_contains(A, n1, n2) for n1, n2 in queries or []}
    return IdemSetDocument(d=list(A.d), N=list(A.N), contains=contains)


def dyadic_document(f: DyadicFunction) -> DyadicFunctionDocument:
    return DyadicFunctionDocument(depth=f.depth, values=_pairs(f.values))


def dyadic_from_document(doc: DyadicFunctionDocument) -> DyadicFunction:
    if len(doc.values) != 2**doc.depth:
        raise DegenerateInputError(f"depth {doc.depth} needs {2**doc.depth} values, got {len(doc.values)}")
    return DyadicFunction.from_values([complex(re, im) for re, im in doc.values])


def decomposition_document(dec: AtomicDecomposition, norm: float) -> DecompositionDocument:
    total = dec.coefficient_sum
    return DecompositionDocument(
        depth=dec.depth,
        coeffs=list(dec.coefficients),
        residual_mean=(dec.residual_mean.real, dec.residual_mean.imag),
        atoms=[
            AtomDocument(
                interval=IntervalDocument(m=a.interval.level, i=a.interval.index),
                values=_pairs(a.function.values),
            )
            for a in dec.atoms
        ],
        coefficient_sum=total,
        h1_delta_norm=norm,
        ratio=total / norm if norm > 0 else None,
    )


def decomposition_from_document(doc: DecompositionDocument) -> AtomicDecomposition:
    atoms = tuple(
        Atom(
            DyadicInterval(a.interval.m, a.interval.i),
            DyadicFunction.from_values([complex(re, im) for re, im in a.values]),
        )
        for a in doc.atoms
    )
    return AtomicDecomposition(tuple(doc.coeffs), atoms, complex(*doc.residual_mean), doc.depth)
