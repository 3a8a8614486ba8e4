"""Finite Blaschke products, their Taylor expansions, and model-space bases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Settings
from .errors import EvaluationDomainError, PoleError, RankError
from .spaces import TaylorPoly, _trunc_mul, multiply

__all__ = [
    "BlaschkeProduct",
    "ModelSpaceBasis",
    "model_basis",
    "reproducing_kernel",
    "blaschke_factor_taylor",
]


class BlaschkeProduct:
    """e^(i theta) * prod_i ((z - a_i)/(1 - conj(a_i) z))^(m_i) with all
    zeros a_i strictly inside the disc.

    Zeros are stored as (value, multiplicity) pairs; equal values are
    merged. The product must be nonconstant (degree >= 1).
    """

    __slots__ = ("theta", "zeros", "degree")

    def __init__(self, theta: float, zeros, *, rho_max: float | None = None):
        if rho_max is None:
            rho_max = DEFAULT.rho_max
        merged: dict[complex, int] = {}
        for entry in zeros:
            if isinstance(entry, tuple):
                a, mult = complex(entry[0]), int(entry[1])
            else:
                a, mult = complex(entry), 1
            if mult < 1:
                raise ValueError("multiplicities must be positive")
            if abs(a) > rho_max:
                raise ValueError(
                    f"zero {a} has modulus {abs(a):.4f} > rho_max = {rho_max}"
                )
            merged[a] = merged.get(a, 0) + mult
        degree = sum(merged.values())
        if degree < 1:
            raise ValueError("a Blaschke product here must be nonconstant")
        object.__setattr__(self, "theta", float(theta))
        object.__setattr__(self, "zeros", tuple(sorted(merged.items(), key=lambda t: (t[0].real, t[0].imag))))
        object.__setattr__(self, "degree", degree)

    def __setattr__(self, *a):
        raise AttributeError("BlaschkeProduct is immutable")

    def __repr__(self):
        return f"BlaschkeProduct(theta={self.theta!r}, zeros={self.zeros!r})"

    def __eq__(self, other):
        return (
            isinstance(other, BlaschkeProduct)
            and self.theta == other.theta
            and self.zeros == other.zeros
        )

    def __hash__(self):
        return hash((self.theta, self.zeros))

    @classmethod
    def monomial(cls, n: int) -> "BlaschkeProduct":
        """B(z) = z^n."""
        return cls(0.0, [(0.0, n)])

    def expanded_zeros(self) -> list[complex]:
        """Zeros repeated according to multiplicity."""
        return [a for a, m in self.zeros for _ in range(m)]

    # -- evaluation ---------------------------------------------------------

    def eval(self, z: complex, *, settings: Settings = DEFAULT) -> complex:
        """Product-formula value at a point of the closed disc."""
        z = complex(z)
        if abs(z) > 1.0 + 1e-12:
            raise EvaluationDomainError(f"|z| = {abs(z):.6f} lies outside the closed disc")
        out = np.exp(1j * self.theta)
        for a, mult in self.zeros:
            den = 1.0 - np.conj(a) * z
            if abs(den) < settings.pole_tol:
                raise PoleError(f"denominator vanished at zero {a}")
            out *= ((z - a) / den) ** mult
        return complex(out)

    # -- Taylor expansions ---------------------------------------------------

    def taylor(self, D: int) -> TaylorPoly:
        """Taylor coefficients through degree D, built factor by factor."""
        acc = np.zeros(D + 1, dtype=complex)
        acc[0] = np.exp(1j * self.theta)
        for a in self.expanded_zeros():
            acc = _trunc_mul(acc, blaschke_factor_taylor(a, D).coeffs, D)
        return TaylorPoly(acc)

    def power_taylor(self, m: int, D: int) -> TaylorPoly:
        """Truncated Taylor series of B^m; m = 0 gives the constant 1."""
        if m < 0:
            raise ValueError("power must be nonnegative")
        return self.power_list(m, D)[m]

    def power_list(self, M: int, D: int) -> list[TaylorPoly]:
        """[B^0, B^1, ..., B^M] truncated at degree D."""
        out = [TaylorPoly.one(D)]
        if M == 0:
            return out
        b = self.taylor(D)
        for _ in range(M):
            out.append(multiply(out[-1], b, D))
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "zeros": [
                {"re": a.real, "im": a.imag, "mult": m} for a, m in self.zeros
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, *, rho_max: float | None = None) -> "BlaschkeProduct":
        zeros = [
            (complex(z.get("re", 0.0), z.get("im", 0.0)), int(z.get("mult", 1)))
            for z in obj["zeros"]
        ]
        return cls(float(obj.get("theta", 0.0)), zeros, rho_max=rho_max)


def blaschke_factor_taylor(a: complex, D: int) -> TaylorPoly:
    """(z - a)/(1 - conj(a) z) = -a + (1 - |a|^2) sum_{k>=1} conj(a)^(k-1) z^k."""
    c = np.zeros(D + 1, dtype=complex)
    c[0] = -a
    if D >= 1:
        c[1:] = (1.0 - abs(a) ** 2) * np.conj(a) ** np.arange(D)
    return TaylorPoly(c)


def reproducing_kernel(a: complex, D: int) -> TaylorPoly:
    """H^2 kernel k_a(z) = 1/(1 - conj(a) z) truncated at degree D."""
    if abs(a) >= 1.0:
        raise EvaluationDomainError("kernel point must lie in the open disc")
    return TaylorPoly(np.conj(a) ** np.arange(D + 1))


@dataclass(frozen=True)
class ModelSpaceBasis:
    """Algebraic and H^2-orthonormal bases of the n-dimensional model space
    H^2 minus B H^2."""

    raw: tuple[TaylorPoly, ...]
    orthonormal: tuple[TaylorPoly, ...]
    kind: str  # "monomial" | "cauchy" | "confluent"

    @property
    def dim(self) -> int:
        return len(self.raw)


def _mgs_h2(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt in the plain (H^2) coefficient metric, with one
    re-orthogonalization pass; columns processed in index order."""
    Q = columns.astype(complex).copy()
    n = Q.shape[1]
    for j in range(n):
        v = Q[:, j]
        for _pass in range(2):
            for i in range(j):
                v = v - (Q[:, i].conj() @ v) * Q[:, i]
        nrm = np.linalg.norm(v)
        Q[:, j] = v / nrm
    return Q


def model_basis(B: BlaschkeProduct, D: int, *, settings: Settings = DEFAULT) -> ModelSpaceBasis:
    """Bases of the model space attached to B, truncated at degree D.

    Raw basis by case: monomials 1, z, ..., z^(n-1) when B = z^n; Cauchy
    kernels 1/(1 - conj(a_i) z) when the zeros are distinct; otherwise the
    confluent family z^j / prod_i (1 - conj(a_i) z). The orthonormal basis
    comes from Gram-Schmidt under the H^2 inner product (always H^2, even
    when the ambient weight differs).
    """
    n = B.degree
    zeros = B.expanded_zeros()
    if all(a == 0 for a in zeros):
        raw = [TaylorPoly.monomial(j, D) for j in range(n)]
        kind = "monomial"
    elif len(B.zeros) == n:  # all multiplicities 1, pairwise distinct
        raw = [reproducing_kernel(a, D) for a, _ in B.zeros]
        kind = "cauchy"
    else:
        den = TaylorPoly.one(D)
        for a in zeros:
            den = multiply(den, reproducing_kernel(a, D), D)
        raw = [
            TaylorPoly(np.concatenate([np.zeros(j, dtype=complex), den.coeffs[: D + 1 - j]]))
            for j in range(n)
        ]
        kind = "confluent"

    cols = np.stack([f.coeffs for f in raw], axis=1)
    normed = cols / np.linalg.norm(cols, axis=0)
    svals = np.linalg.svd(normed, compute_uv=False)
    if svals[-1] < settings.basis_rank_tol:
        raise RankError(
            f"raw model-space basis is numerically singular "
            f"(smallest normalized singular value {svals[-1]:.2e})"
        )
    Q = _mgs_h2(cols)
    ortho = tuple(TaylorPoly(Q[:, j]) for j in range(n))
    return ModelSpaceBasis(raw=tuple(raw), orthonormal=ortho, kind=kind)
