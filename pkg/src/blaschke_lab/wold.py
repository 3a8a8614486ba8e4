"""Shell decomposition f = sum_k h_k B^k with h_k in the model space.

In H^2 the system {u_j B^k} (u_j the orthonormal model-space basis) is an
orthonormal basis, so analysis is a family of plain inner products. Because
truncation only removes coefficients beyond the window, those inner products
are exact for any input supported inside the window; accuracy of a round
trip is limited by the expansion tail beyond the largest computed shell, not
by the truncation itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, ModelSpaceBasis, model_basis
from .config import DEFAULT, Settings
from .errors import TailError, ZeroFunctionError
from .spaces import TaylorPoly, WeightAlpha, as_coeffs, as_weight, weighted_norm

__all__ = [
    "ShellDecomposition",
    "analyze",
    "analyze_by_least_squares",
    "synthesize",
    "b_norm",
    "norm_equivalence_ratio",
    "cell_matrix",
    "default_shell_count",
    "power_tail",
]


def default_shell_count(B: BlaschkeProduct, D: int) -> int:
    """M = floor(D / (2 n)): shells filling the lower half of the window."""
    return D // (2 * B.degree)


def power_tail(B: BlaschkeProduct, M: int, D: int) -> float:
    """Fraction of B^M's unit H^2 mass lost beyond degree D.

    B^M is inner, so its full coefficient sequence has norm exactly 1 and
    the out-of-window mass is 1 - ||truncation||^2.
    """
    captured = float(np.sum(np.abs(B.power_taylor(M, D).coeffs) ** 2))
    return float(np.sqrt(max(0.0, 1.0 - captured)))


def cell_matrix(
    basis: ModelSpaceBasis,
    B: BlaschkeProduct,
    M: int,
    D: int,
) -> np.ndarray:
    """Columns u_j B^k truncated at D, ordered k-major then j: column index
    k * n + j. Shape (D+1, n*(M+1))."""
    n = basis.dim
    powers = B.power_list(M, D)
    E = np.empty((D + 1, n * (M + 1)), dtype=complex)
    for k in range(M + 1):
        pk = powers[k].coeffs
        for j in range(n):
            E[:, k * n + j] = np.convolve(basis.orthonormal[j].coeffs, pk)[: D + 1]
    return E


@dataclass(frozen=True)
class ShellDecomposition:
    """Coefficients c[j, k] of f against the orthonormal system {u_j B^k}.

    Row j of c is also the coefficient sequence of the component function
    f_{j+1}(w) = sum_k c[j, k] w^k, so shells and components are two views
    of the same array.
    """

    B: BlaschkeProduct
    basis: ModelSpaceBasis
    coefficients: np.ndarray  # (n, M+1)
    degree: int

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.ndim != 2 or c.shape[0] != self.basis.dim:
            raise ValueError("coefficient array must be n x (M+1)")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def shell_count(self) -> int:
        return self.coefficients.shape[1] - 1

    @property
    def shells(self) -> list[np.ndarray]:
        """Coordinate vectors of h_k in the orthonormal basis, k = 0..M."""
        return [self.coefficients[:, k] for k in range(self.shell_count + 1)]

    @property
    def components(self) -> list[TaylorPoly]:
        """f_1, ..., f_n with (f_j)_k = c[j, k]."""
        return [TaylorPoly(row) for row in self.coefficients]

    def shell_functions(self, D: int | None = None) -> list[TaylorPoly]:
        """h_k = sum_j c[j, k] u_j as truncated functions."""
        if D is None:
            D = self.degree
        out = []
        for k in range(self.shell_count + 1):
            acc = np.zeros(D + 1, dtype=complex)
            for j in range(self.basis.dim):
                acc += self.coefficients[j, k] * as_coeffs(self.basis.orthonormal[j], D)
            out.append(TaylorPoly(acc))
        return out

    def to_json(self) -> dict:
        return {
            "B": self.B.to_json(),
            "M": self.shell_count,
            "c": [[[v.real, v.imag] for v in row] for row in self.coefficients],
        }


def _check_tail(B: BlaschkeProduct, M: int, D: int, settings: Settings) -> None:
    tail = power_tail(B, M, D)
    if tail > settings.tol_tail:
        raise TailError(
            f"B^{M} keeps only {(1 - tail**2) * 100:.1f}% of its mass below degree "
            f"{D}; increase D or lower M (tail {tail:.3f} > tol_tail {settings.tol_tail})"
        )


def analyze(
    f: TaylorPoly,
    B: BlaschkeProduct,
    M: int | None = None,
    D: int | None = None,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> ShellDecomposition:
    """Shell coefficients c[j, k] = <f, u_j B^k>_0 for k = 0..M.

    This is the orthogonal projection of f onto span{u_j B^k} in H^2; the
    returned decomposition minimizes the H^2 residual over that span.
    """
    if D is None:
        D = f.degree
    if M is None:
        M = default_shell_count(B, D)
    if f.degree > D:
        f = f.pad(D)  # drop nothing: callers pass D >= deg f in practice
    _check_tail(B, M, D, settings)
    if basis is None:
        basis = model_basis(B, D, settings=settings)
    E = cell_matrix(basis, B, M, D)
    c = (E.conj().T @ as_coeffs(f, D)).reshape(M + 1, basis.dim).T
    return ShellDecomposition(B=B, basis=basis, coefficients=c, degree=D)


def analyze_by_least_squares(
    f: TaylorPoly,
    B: BlaschkeProduct,
    M: int,
    D: int,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> ShellDecomposition:
    """Cross-check oracle: invert the finite-section synthesis map in the
    least-squares sense instead of using orthogonality."""
    if basis is None:
        basis = model_basis(B, D, settings=settings)
    E = cell_matrix(basis, B, M, D)
    c, *_ = np.linalg.lstsq(E, as_coeffs(f, D), rcond=None)
    return ShellDecomposition(
        B=B, basis=basis, coefficients=c.reshape(M + 1, basis.dim).T, degree=D
    )


def synthesize(dec: ShellDecomposition, D: int | None = None) -> TaylorPoly:
    """sum_{k<=M} sum_j c[j, k] u_j B^k truncated at degree D."""
    if D is None:
        D = dec.degree
    E = cell_matrix(dec.basis, dec.B, dec.shell_count, D)
    flat = dec.coefficients.T.reshape(-1)  # k-major matching cell_matrix
    return TaylorPoly(E @ flat)


def b_norm(dec: ShellDecomposition, w: WeightAlpha | float) -> float:
    """Norm of the expansion: (sum_k (k+1)^alpha ||h_k||_0^2)^(1/2), with
    ||h_k||_0 read off the orthonormal shell coordinates."""
    w = as_weight(w)
    k = np.arange(dec.shell_count + 1) + 1.0
    per_shell = np.sum(np.abs(dec.coefficients) ** 2, axis=0)
    return float(np.sqrt(np.sum(k ** w.alpha * per_shell)))


def norm_equivalence_ratio(
    f: TaylorPoly,
    B: BlaschkeProduct,
    w: WeightAlpha | float,
    M: int | None = None,
    D: int | None = None,
    *,
    basis: ModelSpaceBasis | None = None,
    settings: Settings = DEFAULT,
) -> float:
    """b_norm(analyze(f))^2 / ||f||_alpha^2, the empirical equivalence ratio."""
    nf = weighted_norm(f, w)
    if nf == 0.0:
        raise ZeroFunctionError("norm ratio undefined for the zero function")
    dec = analyze(f, B, M, D, basis=basis, settings=settings)
    return (b_norm(dec, w) / nf) ** 2
