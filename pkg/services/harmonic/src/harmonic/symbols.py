"""Fourier multiplier constructions over a lacunary sequence.

All symbol values and the lacunarity constant are exact rationals, so the Stein
hypothesis ``|mu(n)| <= C, (n+1)|mu(n+1) - mu(n)| <= C`` is checked without rounding.
"""

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate, pairwise

import numpy as np
import numpy.typing as npt

from harmonic.exceptions import DegenerateInputError, LacunarityError, LevelError
from harmonic.poly import CoefficientSequence, FloatArray, fejer_kernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Symbol:
    """Multiplier sequence ``mu(0..nmax)``, extended by zero past the horizon."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise DegenerateInputError("A symbol needs at least mu(0)")

    @classmethod
    def from_values(cls, values: Iterable[int | Fraction | str]) -> "Symbol":
        return cls(tuple(Fraction(v) for v in values))

    @property
    def nmax(self) -> int:
        return len(self.values) - 1

    def __call__(self, n: int) -> Fraction:
        return self.values[n] if 0 <= n <= self.nmax else Fraction(0)

    def as_array(self) -> FloatArray:
        return np.array([float(v) for v in self.values], dtype=np.float64)


@dataclass(frozen=True, slots=True)
class LacunarySystem:
    """A validated lacunary sequence with its derived quantities.

    ``alpha`` is the largest value with ``d_{k+1} >= (1 + alpha) d_k``; it is ``None`` when
    there are fewer than two terms and the ratio condition is vacuous.  The dyadic levels
    ``m`` and ``M = 2^m`` are only present once ``c_alpha_est`` is known.
    """

    d: tuple[int, ...]
    alpha: Fraction | None
    D: tuple[int, ...]
    c_alpha_est: float | None = None
    m: tuple[int, ...] = ()
    M: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.d)

    @property
    def horizon(self) -> int:
        """Last frequency of the block structure, ``3 D_n``."""
        return 3 * self.D[-1] if self.D else 0

    @property
    def has_levels(self) -> bool:
        return len(self.m) == len(self.d) and bool(self.d)

    def D_before(self, k: int) -> int:
        """``D_{k-1}`` for the 1-based index k (``D_0 = 0``)."""
        return self.D[k - 2] if k >= 2 else 0

    def block_base(self, k: int) -> int:
        return 3 * self.D_before(k)

    def block_support(self, k: int) -> tuple[int, int]:
        """``[3D_{k-1} + d_k, 3D_{k-1} + 2d_k]``, where the sign symbol is constant."""
        self._check_index(k)
        base, dk = self.block_base(k), self.d[k - 1]
        return base + dk, base + 2 * dk

    def _check_index(self, k: int) -> None:
        if not 1 <= k <= len(self.d):
            raise LevelError(f"Block index {k} outside 1..{len(self.d)}")


def dyadic_level(c_alpha_est: float, dk: int) -> int:
    """Smallest m >= 0 with ``2^m >= 3 C d_k``, i.e. ``ceil(log2(3 C d_k))``."""
    x = 3.0 * c_alpha_est * dk
    if x <= 1.0:
        return 0
    m = max(0, math.ceil(math.log2(x)))
    while 2.0**m < x:
        m += 1
    while m > 0 and 2.0 ** (m - 1) >= x:
        m -= 1
    return m


def _build_system(d: Sequence[int], c_alpha_est: float | None, *, allow_empty: bool) -> LacunarySystem:
    seq = tuple(int(x) for x in d)
    if not seq and not allow_empty:
        raise LacunarityError("A lacunary sequence needs at least one term")
    if any(x < 1 for x in seq):
        raise LacunarityError(f"Terms must be positive integers, got {seq}")
    if any(b <= a for a, b in pairwise(seq)):
        raise LacunarityError(f"Sequence {seq} is not strictly increasing")

    alpha = min((Fraction(b, a) for a, b in pairwise(seq)), default=None)
    alpha = alpha - 1 if alpha is not None else None
    partial = tuple(accumulate(seq))

    bound = 1 + (1 / alpha if alpha is not None else Fraction(0))
    for dk, Dk in zip(seq, partial, strict=True):
        if Dk > bound * dk:
            raise LacunarityError(f"D_k={Dk} exceeds (1+1/alpha) d_k={bound * dk}")

    m: tuple[int, ...] = ()
    levels: tuple[int, ...] = ()
    if c_alpha_est is not None:
        if c_alpha_est <= 0:
            raise LacunarityError(f"C_alpha estimate must be positive, got {c_alpha_est}")
        m = tuple(dyadic_level(c_alpha_est, dk) for dk in seq)
        levels = tuple(2**mk for mk in m)
        if alpha is not None and alpha > 1 and any(b <= a for a, b in pairwise(m)):
            raise LacunarityError(f"Levels {m} are not increasing although alpha={alpha} > 1")

    return LacunarySystem(d=seq, alpha=alpha, D=partial, c_alpha_est=c_alpha_est, m=m, M=levels)


def lacunary_check(d: Sequence[int], c_alpha_est: float | None = None) -> LacunarySystem:
    """Validate ``d`` and compute alpha (exactly), the partial sums D_k and, given C_alpha, the levels m_k."""
    return _build_system(d, c_alpha_est, allow_empty=False)


def with_c_alpha(system: LacunarySystem, c_alpha_est: float) -> LacunarySystem:
    return _build_system(system.d, c_alpha_est, allow_empty=not system.d)


def m_sequence(system: LacunarySystem) -> tuple[int, ...]:
    if system.c_alpha_est is None:
        raise LacunarityError("Dyadic levels need a C_alpha estimate")
    return system.m


def stein_slope_bound(system: LacunarySystem) -> Fraction:
    """``max(1, 3(1 + 1/alpha))``, the Stein constant the block geometry guarantees."""
    inv = 1 / system.alpha if system.alpha is not None else Fraction(0)
    return max(Fraction(1), 3 * (1 + inv))


def stein_constant(mu: Symbol) -> Fraction:
    """``max(sup |mu(n)|, sup (n+1)|mu(n+1) - mu(n)|)`` over the horizon."""
    if mu.nmax < 1:
        raise DegenerateInputError("The Stein constant needs a horizon of at least 1")
    sup_value = max(abs(v) for v in mu.values)
    sup_jump = max((n + 1) * abs(b - a) for n, (a, b) in enumerate(pairwise(mu.values)))
    return max(sup_value, sup_jump)


def _piecewise_affine(system: LacunarySystem, nodes: Callable[[int], tuple[Fraction, ...]]) -> Symbol:
    """Affine interpolation between the nodes ``3D_{k-1} + j d_k`` (j = 0..3) of every block."""
    values: list[Fraction | None] = [None] * (system.horizon + 1)
    for k, dk in enumerate(system.d, start=1):
        base = system.block_base(k)
        node_values = nodes(k)
        for j in range(3):
            lo, hi = node_values[j], node_values[j + 1]
            start = base + j * dk
            for t in range(dk + 1):
                value = lo + (hi - lo) * Fraction(t, dk)
                existing = values[start + t]
                if existing is not None and existing != value:
                    raise LacunarityError(f"Conflicting node values at n={start + t}: {existing} vs {value}")
                values[start + t] = value
    return Symbol(tuple(v if v is not None else Fraction(0) for v in values))


def build_mu_eps(system: LacunarySystem, signs: Sequence[int]) -> Symbol:
    """Sign symbol: ``eps_k`` at ``3D_{k-1} + j d_k`` for j in {1, 2}, zero for j in {0, 3}."""
    if len(signs) != len(system.d):
        raise DegenerateInputError(f"Expected {len(system.d)} signs, got {len(signs)}")
    if any(s not in (-1, 1) for s in signs):
        raise DegenerateInputError(f"Signs must be +1 or -1, got {tuple(signs)}")

    def nodes(k: int) -> tuple[Fraction, ...]:
        eps = Fraction(signs[k - 1])
        return Fraction(0), eps, eps, Fraction(0)

    return _piecewise_affine(system, nodes)


def build_K_hat(system: LacunarySystem) -> Symbol:
    """Fejer-type symbol: 0 at j in {0, 1}, 1 at j = 2, 0 at the block boundary."""
    zero, one = Fraction(0), Fraction(1)
    return _piecewise_affine(system, lambda _k: (zero, zero, one, zero))


def modulated_fejer(system: LacunarySystem, k: int) -> CoefficientSequence:
    """``K_{d_k}`` modulated to peak at frequency ``3D_{k-1} + 2d_k``."""
    system._check_index(k)
    center = system.block_base(k) + 2 * system.d[k - 1]
    return fejer_kernel(system.d[k - 1]).shifted(center)


def split_subsequences(system: LacunarySystem, q: int) -> list[LacunarySystem]:
    """The ``q`` stride-q subsequences ``d_r, d_{r+q}, ...``; each has alpha >= (1+alpha)^q - 1."""
    if q < 1:
        raise DegenerateInputError(f"Stride must be positive, got {q}")
    parts = [_build_system(system.d[r::q], system.c_alpha_est, allow_empty=True) for r in range(q)]
    if system.alpha is not None:
        floor = (1 + system.alpha) ** q - 1
        for part in parts:
            if part.alpha is not None and part.alpha < floor:
                raise LacunarityError(f"Subsequence {part.d} has alpha={part.alpha} below (1+alpha)^q-1={floor}")
    return parts


# --- Two-dimensional idempotent set ---


@dataclass(frozen=True, slots=True)
class IdemSet2D:
    """``A = union_k {(n1, n2): n1 + n2 = d_k, N_k | n1}``."""

    d: tuple[int, ...]
    N: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.d) != len(self.N):
            raise DegenerateInputError(f"d and N must have equal length, got {len(self.d)} and {len(self.N)}")
        if any(b <= a for a, b in pairwise(self.d)):
            raise LacunarityError(f"Diagonals {self.d} are not strictly increasing")
        if any(n < 1 for n in self.N):
            raise DegenerateInputError(f"Divisors must be positive, got {self.N}")

    @classmethod
    def of(cls, d: Sequence[int], N: Sequence[int]) -> "IdemSet2D":
        return cls(tuple(int(x) for x in d), tuple(int(x) for x in N))

    def mask(self, shape: tuple[int, int]) -> npt.NDArray[np.bool_]:
        """Membership of every ``(n1, n2)`` with ``0 <= n_i < shape[i]``."""
        n1 = np.arange(shape[0])[:, None]
        n2 = np.arange(shape[1])[None, :]
        total = n1 + n2
        out = np.zeros(shape, dtype=bool)
        for dk, Nk in zip(self.d, self.N, strict=True):
            out |= (total == dk) & (n1 % Nk == 0)
        return out


def idem_contains(A: IdemSet2D, n1: int, n2: int) -> bool:
    if n1 < 0 or n2 < 0:
        raise DegenerateInputError(f"Frequencies must be non-negative, got ({n1}, {n2})")
    return any(n1 + n2 == dk and n1 % Nk == 0 for dk, Nk in zip(A.d, A.N, strict=True))
