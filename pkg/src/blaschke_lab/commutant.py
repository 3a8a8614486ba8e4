"""Commutant of T_B realized as n x n matrices of polynomial multipliers.

A matrix Phi = (phi_jk) of polynomials acts on the shell components of a
function; conjugating that action by the shell isomorphism realizes a dense
operator commuting with T_B. Polynomial entries are multipliers of every
weighted space, which keeps the construction weight-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .blaschke import BlaschkeProduct, ModelSpaceBasis, model_basis
from .config import DEFAULT, Settings, safe_degree
from .errors import NotInCommutantError
from .spaces import (
    OperatorMatrix,
    TaylorPoly,
    WeightAlpha,
    apply,
    as_coeffs,
    as_weight,
    commutator_residual,
    operator_norm_safe,
    toeplitz_matrix,
    weighted_adjoint,
)
from .wold import _check_tail, analyze, cell_matrix

__all__ = [
    "MultiplierMatrix",
    "CommutantOperator",
    "IdempotentReport",
    "build",
    "apply_formula",
    "extract_symbols",
    "symbols_to_matrix",
    "commutation_residual",
    "idempotent_residual",
    "cowen_residual",
]

#: fixed interior sample points for pointwise rank checks (plus the origin).
RANK_SAMPLE_POINTS = (0.0 + 0.0j, 0.35 + 0.0j, -0.2 + 0.4j, 0.45 - 0.15j)


class MultiplierMatrix:
    """Square array of polynomial multipliers (TaylorPoly entries)."""

    __slots__ = ("entries", "n")

    def __init__(self, entries: Sequence[Sequence[TaylorPoly]], *, settings: Settings = DEFAULT):
        rows = tuple(tuple(self._coerce(e) for e in row) for row in entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("multiplier matrix must be square")
        dmax = max(e.degree for row in rows for e in row)
        if dmax > settings.max_symbol_degree:
            raise ValueError(
                f"entry degree {dmax} exceeds max_symbol_degree {settings.max_symbol_degree}"
            )
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "n", n)

    @staticmethod
    def _coerce(e) -> TaylorPoly:
        return e if isinstance(e, TaylorPoly) else TaylorPoly(np.atleast_1d(np.asarray(e, dtype=complex)))

    def __setattr__(self, *a):
        raise AttributeError("MultiplierMatrix is immutable")

    def __getitem__(self, jk: tuple[int, int]) -> TaylorPoly:
        j, k = jk
        return self.entries[j][k]

    @classmethod
    def identity(cls, n: int) -> "MultiplierMatrix":
        return cls.from_scalars(np.eye(n))

    @classmethod
    def from_scalars(cls, m) -> "MultiplierMatrix":
        m = np.asarray(m, dtype=complex)
        return cls([[TaylorPoly([v]) for v in row] for row in m])

    @property
    def max_entry_degree(self) -> int:
        return max(e.degree for row in self.entries for e in row)

    def evaluate_at(self, z: complex) -> np.ndarray:
        return np.array([[e(z) for e in row] for row in self.entries])

    def matmul(self, other: "MultiplierMatrix") -> "MultiplierMatrix":
        """Entrywise-polynomial matrix product, degrees summed exactly."""
        if other.n != self.n:
            raise ValueError("size mismatch")
        n = self.n
        D = self.max_entry_degree + other.max_entry_degree
        out = []
        for j in range(n):
            row = []
            for k in range(n):
                acc = np.zeros(D + 1, dtype=complex)
                for l in range(n):
                    prod = np.convolve(self.entries[j][l].coeffs, other.entries[l][k].coeffs)
                    acc[: len(prod)] += prod
                row.append(TaylorPoly(acc))
            out.append(row)
        return MultiplierMatrix(out, settings=DEFAULT.with_overrides(max_symbol_degree=max(D, DEFAULT.max_symbol_degree)))

    def __sub__(self, other: "MultiplierMatrix") -> "MultiplierMatrix":
        D = max(self.max_entry_degree, other.max_entry_degree)
        return MultiplierMatrix(
            [
                [self.entries[j][k] - other.entries[j][k] for k in range(self.n)]
                for j in range(self.n)
            ],
            settings=DEFAULT.with_overrides(max_symbol_degree=max(D, DEFAULT.max_symbol_degree)),
        )

    def coefficient_norm(self) -> float:
        """sqrt of the summed squared coefficient norms of all entries."""
        return float(
            np.sqrt(sum(np.sum(np.abs(e.coeffs) ** 2) for row in self.entries for e in row))
        )

    def to_json(self) -> list:
        return [
            [[[c.real, c.imag] for c in e.coeffs] for e in row] for row in self.entries
        ]

    @classmethod
    def from_json(cls, obj, *, settings: Settings = DEFAULT) -> "MultiplierMatrix":
        return cls(
            [[TaylorPoly([complex(re, im) for re, im in e]) for e in row] for row in obj],
            settings=settings,
        )


@dataclass(frozen=True)
class CommutantOperator:
    """A commutant element: multiplier matrix, the product it refers to, the
    ambient weight, and its dense finite-section realization."""

    phi: MultiplierMatrix
    B: BlaschkeProduct
    alpha: WeightAlpha
    realization: OperatorMatrix
    shell_count: int


def _component_map(
    phi: MultiplierMatrix, M: int, M_out: int
) -> np.ndarray:
    """Matrix of the action (f_k) -> (sum_k phi_jk f_k) on stacked shell
    coordinates, cell order k-major: index k * n + j."""
    n = phi.n
    V = np.zeros((n * (M_out + 1), n * (M + 1)), dtype=complex)
    for j in range(n):
        for k in range(n):
            p = phi.entries[j][k].coeffs
            for t in range(len(p)):
                if p[t] == 0:
                    continue
                for r in range(M + 1):
                    s = r + t
                    if s <= M_out:
                        V[s * n + j, r * n + k] += p[t]
    return V


def build(
    phi: MultiplierMatrix,
    B: BlaschkeProduct,
    w: WeightAlpha | float,
    M: int,
    D: int,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> CommutantOperator:
    """Realize the commutant element of Phi as a dense matrix.

    Column m of the realization is the synthesis of Phi applied to the
    shell components of z^m. Output shells extend to M + deg(Phi) so the
    polynomial action loses nothing. Accuracy of the safe block improves
    with M; M around D/n makes the commutation residual hit rounding level
    for zeros of moderate modulus.
    """
    w = as_weight(w)
    if phi.n != B.degree:
        raise ValueError("multiplier matrix size must equal deg B")
    _check_tail(B, M, D, settings)
    if basis is None:
        basis = model_basis(B, D, settings=settings)
    M_out = M + phi.max_entry_degree
    E_out = cell_matrix(basis, B, M_out, D)
    E = E_out[:, : B.degree * (M + 1)]  # analysis cells are a prefix
    V = _component_map(phi, M, M_out)
    W = E_out @ (V @ E.conj().T)
    return CommutantOperator(
        phi=phi,
        B=B,
        alpha=w,
        realization=OperatorMatrix(W, w),
        shell_count=M,
    )


def apply_formula(
    phi: MultiplierMatrix,
    B: BlaschkeProduct,
    f: TaylorPoly,
    M: int,
    D: int,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> TaylorPoly:
    """Action through the decomposition: analyze f, multiply the component
    vector by Phi, synthesize. Agrees with the built realization on the
    safe block."""
    dec = analyze(f, B, M, D, basis=basis, settings=settings)
    M_out = M + phi.max_entry_degree
    V = _component_map(phi, M, M_out)
    g = V @ dec.coefficients.T.reshape(-1)
    E_out = cell_matrix(dec.basis, B, M_out, D)
    return TaylorPoly(E_out @ g)


def commutation_residual(
    A: OperatorMatrix,
    B: BlaschkeProduct,
    w: WeightAlpha | float,
    D: int | None = None,
    *,
    guard: int | None = None,
) -> float:
    """Safe-block operator norm of A T_B - T_B A (alpha geometry)."""
    if D is None:
        D = A.degree
    TB = toeplitz_matrix(B.taylor(D), D, w)
    return commutator_residual(A.entries, TB.entries, w, D, guard)


def extract_symbols(
    W: OperatorMatrix,
    B: BlaschkeProduct,
    M: int,
    D: int,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> list[TaylorPoly]:
    """phi_k = W u_k for the orthonormal basis u_k; requires W to commute
    with T_B on the safe block (extraction is meaningless otherwise)."""
    res = commutation_residual(W, B, W.alpha, D)
    if res > settings.tol_commute:
        raise NotInCommutantError(
            f"commutation residual {res:.3e} exceeds tol_commute {settings.tol_commute:.1e}"
        )
    if basis is None:
        basis = model_basis(B, D, settings=settings)
    return [apply(W, u) for u in basis.orthonormal]


def symbols_to_matrix(
    phis: Sequence[TaylorPoly],
    B: BlaschkeProduct,
    M: int,
    D: int,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> MultiplierMatrix:
    """Column k of Phi = shell components of phi_k (its decomposition in the
    {u_j B^m} system)."""
    if basis is None:
        basis = model_basis(B, D, settings=settings)
    cols = []
    for ph in phis:
        dec = analyze(ph, B, M, D, basis=basis, settings=settings)
        cols.append([TaylorPoly(row) for row in dec.coefficients])
    n = len(phis)
    return MultiplierMatrix(
        [[cols[k][j] for k in range(n)] for j in range(n)],
        settings=settings.with_overrides(max_symbol_degree=max(M, settings.max_symbol_degree)),
    )


class IdempotentReport(NamedTuple):
    residual: float
    rank: int
    trace: complex
    ranks_by_point: tuple[int, ...]
    rank_consistent: bool


def idempotent_residual(
    phi: MultiplierMatrix, *, settings: Settings = DEFAULT
) -> IdempotentReport:
    """Diagnostics for Phi as a candidate projection symbol.

    Returns the coefficient norm of Phi^2 - Phi (entry products exact), the
    numerical rank at the origin, and the trace evaluated at 0. Rank is also
    sampled at three fixed interior points; a rank-1, trace-1 idempotent
    signals a candidate minimal projection.
    """
    n = phi.n
    D = 2 * phi.max_entry_degree
    sq = 0.0
    for j in range(n):
        for k in range(n):
            acc = np.zeros(D + 1, dtype=complex)
            for l in range(n):
                prod = np.convolve(phi.entries[j][l].coeffs, phi.entries[l][k].coeffs)
                acc[: len(prod)] += prod
            acc -= as_coeffs(phi.entries[j][k], D)
            sq += float(np.sum(np.abs(acc) ** 2))
    ranks = []
    for z in RANK_SAMPLE_POINTS:
        s = np.linalg.svd(phi.evaluate_at(z), compute_uv=False)
        ranks.append(int(np.sum(s > settings.rank_point_tol)))
    trace = complex(sum(phi.entries[j][j](0.0) for j in range(phi.n)))
    return IdempotentReport(
        residual=float(np.sqrt(sq)),
        rank=ranks[0],
        trace=trace,
        ranks_by_point=tuple(ranks),
        rank_consistent=len(set(ranks)) == 1,
    )


def cowen_residual(
    W: OperatorMatrix,
    B: BlaschkeProduct,
    a: complex,
    D: int | None = None,
    *,
    guard: int | None = None,
    settings: Settings = DEFAULT,
) -> float:
    """max_m |<W* k_a, (B - B(a)) z^m>_0| over m up to the safe degree.

    Vanishing at a non-Blaschke sampling set characterizes membership in the
    commutant on H^2; a finite set can only falsify, not certify. W is read
    as an operator on the unweighted space (the criterion lives on H^2).
    """
    from .blaschke import reproducing_kernel

    if abs(a) >= 1.0:
        raise ValueError("sample point must lie in the open disc")
    if D is None:
        D = W.degree
    D_safe = safe_degree(D, guard)
    ka = as_coeffs(reproducing_kernel(a, D), D)
    Wstar_ka = weighted_adjoint(W, 0.0).entries @ ka
    shifted = as_coeffs(B.taylor(D), D).copy()
    shifted[0] -= B.eval(a, settings=settings)
    worst = 0.0
    for m in range(D_safe + 1):
        g = np.zeros(D + 1, dtype=complex)
        g[m:] = shifted[: D + 1 - m]
        worst = max(worst, abs(np.sum(Wstar_ka * np.conj(g))))
    return worst
