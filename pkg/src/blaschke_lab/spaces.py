"""Truncated analytic-function arithmetic and weighted coefficient spaces.

Functions are held as finite Taylor coefficient vectors. The space with
weight exponent alpha has squared norm sum_k |a_k|^2 (k+1)^alpha; alpha = -1
is the Bergman space, alpha = 0 the Hardy space H^2, alpha = 1 the Dirichlet
space. Operators are dense matrices acting on the monomial coefficient basis.

Everything here is immutable and pure; values can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Settings, safe_degree
from .errors import CompositionDivergenceError, DimensionMismatchError


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightAlpha:
    """Weight exponent of the coefficient norm sum |a_k|^2 (k+1)^alpha."""

    alpha: float

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    def diagonal(self, D: int) -> np.ndarray:
        """Weights (k+1)^alpha for k = 0..D."""
        return (np.arange(D + 1) + 1.0) ** self.alpha


def as_weight(w: "WeightAlpha | float") -> WeightAlpha:
    return w if isinstance(w, WeightAlpha) else WeightAlpha(float(w))


@dataclass(frozen=True)
class TaylorPoly:
    """An analytic function truncated at degree D: coeffs[k] is the k-th
    Taylor coefficient, len(coeffs) == D + 1."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", _freeze(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, D: int = 0) -> "TaylorPoly":
        return cls(np.zeros(D + 1))

    @classmethod
    def one(cls, D: int = 0) -> "TaylorPoly":
        c = np.zeros(D + 1, dtype=complex)
        c[0] = 1.0
        return cls(c)

    @classmethod
    def monomial(cls, m: int, D: int | None = None) -> "TaylorPoly":
        """z^m truncated at degree D (default m)."""
        if D is None:
            D = m
        if m > D:
            raise ValueError("monomial exponent exceeds truncation degree")
        c = np.zeros(D + 1, dtype=complex)
        c[m] = 1.0
        return cls(c)

    def pad(self, D: int) -> "TaylorPoly":
        """Zero-extend (or cut) to degree D."""
        if D == self.degree:
            return self
        c = np.zeros(D + 1, dtype=complex)
        n = min(D, self.degree) + 1
        c[:n] = self.coeffs[:n]
        return TaylorPoly(c)

    def __add__(self, other: "TaylorPoly") -> "TaylorPoly":
        D = max(self.degree, other.degree)
        return TaylorPoly(self.pad(D).coeffs + other.pad(D).coeffs)

    def __sub__(self, other: "TaylorPoly") -> "TaylorPoly":
        D = max(self.degree, other.degree)
        return TaylorPoly(self.pad(D).coeffs - other.pad(D).coeffs)

    def __mul__(self, scalar: complex) -> "TaylorPoly":
        return TaylorPoly(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __call__(self, z: complex) -> complex:
        """Horner evaluation of the truncated series at a point."""
        acc = 0.0 + 0.0j
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc


def as_coeffs(f: TaylorPoly, D: int) -> np.ndarray:
    """Coefficients of f zero-padded (or windowed) to length D + 1."""
    return f.pad(D).coeffs


@dataclass(frozen=True)
class OperatorMatrix:
    """Finite section of an operator: a dense (D+1) x (D+1) matrix acting on
    monomial coefficients, tagged with the weight its adjoints refer to."""

    entries: np.ndarray
    alpha: WeightAlpha = field(default_factory=lambda: WeightAlpha(0.0))

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        object.__setattr__(self, "entries", _freeze(m))
        object.__setattr__(self, "alpha", as_weight(self.alpha))

    @property
    def degree(self) -> int:
        return self.entries.shape[0] - 1

    @classmethod
    def identity(cls, D: int, w: WeightAlpha | float = 0.0) -> "OperatorMatrix":
        return cls(np.eye(D + 1), as_weight(w))


# ---------------------------------------------------------------------------
# inner products and norms


def weighted_inner(f: TaylorPoly, g: TaylorPoly, w: WeightAlpha | float) -> complex:
    """<f, g>_alpha = sum_k f_k conj(g_k) (k+1)^alpha over shared indices.

    The shorter input is zero-padded, so the sum effectively runs over the
    indices where either carries coefficients.
    """
    w = as_weight(w)
    L = min(len(f.coeffs), len(g.coeffs))
    k = np.arange(L) + 1.0
    return complex(np.sum(f.coeffs[:L] * np.conj(g.coeffs[:L]) * k ** w.alpha))


def weighted_norm(f: TaylorPoly, w: WeightAlpha | float) -> float:
    """||f||_alpha, guaranteed real nonnegative."""
    v = weighted_inner(f, f, w)
    return float(np.sqrt(max(v.real, 0.0)))


# ---------------------------------------------------------------------------
# arithmetic


def multiply(f: TaylorPoly, g: TaylorPoly, D: int) -> TaylorPoly:
    """Cauchy product truncated at degree D. Exact for polynomial inputs
    whenever deg f + deg g <= D."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    c = np.convolve(f.coeffs, g.coeffs)[: D + 1]
    out = np.zeros(D + 1, dtype=complex)
    out[: len(c)] = c
    return TaylorPoly(out)


def _trunc_mul(a: np.ndarray, b: np.ndarray, D: int) -> np.ndarray:
    c = np.convolve(a, b)[: D + 1]
    if len(c) < D + 1:
        c = np.pad(c, (0, D + 1 - len(c)))
    return c


def compose_truncated(
    f: TaylorPoly,
    B: TaylorPoly,
    D: int,
    *,
    settings: Settings = DEFAULT,
) -> TaylorPoly:
    """Taylor coefficients of f(B(z)) through degree D.

    Accumulates sum_k a_k B^k with truncated powers. B(0) may be nonzero
    (B is typically a Blaschke product), so the sum is genuinely infinite
    for series inputs; the caller must supply f to enough terms. Terms stop
    early once the largest remaining |a_k| times the current truncated-power
    norm falls below settings.tol_compose; if that never happens within
    settings.compose_max_terms_factor * D terms a divergence error is
    raised. Polynomial inputs of degree below the term budget are summed
    exactly.
    """
    max_terms = settings.compose_max_terms_factor * max(D, 1)
    a = f.coeffs
    # largest coefficient magnitude still ahead of position k
    remaining = np.maximum.accumulate(np.abs(a)[::-1])[::-1]
    acc = np.zeros(D + 1, dtype=complex)
    power = np.zeros(D + 1, dtype=complex)
    power[0] = 1.0
    bc = as_coeffs(B, D)
    for k in range(len(a)):
        if k > 0:
            power = _trunc_mul(power, bc, D)
        acc += a[k] * power
        tail_bound = remaining[k + 1] * np.linalg.norm(power) if k + 1 < len(a) else 0.0
        if tail_bound < settings.tol_compose:
            break
        if k + 1 >= max_terms:
            raise CompositionDivergenceError(
                f"composition did not converge within {max_terms} terms "
                f"(remaining term bound {tail_bound:.3e} >= {settings.tol_compose:.1e})"
            )
    return TaylorPoly(acc)


# ---------------------------------------------------------------------------
# operators


def toeplitz_matrix(g: TaylorPoly, D: int, w: WeightAlpha | float = 0.0) -> OperatorMatrix:
    """Multiplication by g as a lower-triangular Toeplitz matrix: entry
    (j, k) = g_{j-k}. Column k holds the coefficients of g * z^k."""
    gc = as_coeffs(g, D)
    m = np.zeros((D + 1, D + 1), dtype=complex)
    for k in range(D + 1):
        m[k:, k] = gc[: D + 1 - k]
    return OperatorMatrix(m, as_weight(w))


def weighted_adjoint(A: OperatorMatrix, w: WeightAlpha | float | None = None) -> OperatorMatrix:
    """Adjoint with respect to <.,.>_alpha: Lambda^-1 A^H Lambda with
    Lambda = diag((k+1)^alpha). Defaults to the weight stored on A."""
    w = A.alpha if w is None else as_weight(w)
    lam = w.diagonal(A.degree)
    m = (A.entries.conj().T * lam[None, :]) / lam[:, None]
    return OperatorMatrix(m, w)


def apply(A: OperatorMatrix, f: TaylorPoly) -> TaylorPoly:
    """Matrix-vector action on coefficients; f is zero-padded if shorter."""
    if f.degree > A.degree:
        raise DimensionMismatchError(
            f"function degree {f.degree} exceeds operator degree {A.degree}"
        )
    return TaylorPoly(A.entries @ as_coeffs(f, A.degree))


def operator_norm_safe(
    X: np.ndarray,
    w: WeightAlpha | float,
    D_safe: int,
) -> float:
    """Largest singular value of the safe-block section of X, measured in
    the alpha geometry (similarity by Lambda^(1/2))."""
    w = as_weight(w)
    sub = X[: D_safe + 1, : D_safe + 1]
    sq = np.sqrt(w.diagonal(D_safe))
    scaled = sq[:, None] * sub / sq[None, :]
    return float(np.linalg.svd(scaled, compute_uv=False)[0])


def commutator_residual(
    A: np.ndarray,
    Bmat: np.ndarray,
    w: WeightAlpha | float,
    D: int,
    guard: int | None = None,
) -> float:
    """Safe-block operator norm of A B - B A."""
    return operator_norm_safe(A @ Bmat - Bmat @ A, w, safe_degree(D, guard))
