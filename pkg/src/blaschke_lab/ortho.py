"""Orthogonal decompositions driven by the range filtration of T_B.

X_k is the alpha-orthogonal complement of B^(k+1) A inside B^k A; each block
has dimension N = deg B and T_B shifts the chain upward. Commutant elements
are block lower triangular against this chain, and self-adjoint ones are
block diagonal. Dividing B^k back out of X_k recovers the K_k spaces of the
non-orthogonal expansion A = K_0 + B K_1 + B^2 K_2 + ...
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .blaschke import BlaschkeProduct
from .config import DEFAULT, Settings, safe_degree
from .errors import ConditioningError, DimensionGapError, NotSelfAdjointError
from .spaces import (
    OperatorMatrix,
    TaylorPoly,
    WeightAlpha,
    as_weight,
    operator_norm_safe,
    toeplitz_matrix,
    weighted_adjoint,
)

__all__ = [
    "XSpaceChain",
    "x_spaces",
    "k_spaces",
    "block_matrix",
    "selfadjoint_block_check",
    "SelfAdjointReport",
]


@dataclass(frozen=True)
class XSpaceChain:
    """Orthonormal bases (under the stored weight) of X_0 .. X_kmax, plus the
    weighted orthonormal basis of the remaining span B^(kmax+1) A used to
    close residual computations."""

    B: BlaschkeProduct
    alpha: WeightAlpha
    blocks: tuple[tuple[TaylorPoly, ...], ...]
    kmax: int
    degree: int
    guard: int
    gaps: tuple[float, ...]
    tail_span: np.ndarray  # weighted-coordinate ONB of B^(kmax+1) columns

    @property
    def block_dim(self) -> int:
        return len(self.blocks[0])

    def block_matrix_stack(self) -> np.ndarray:
        """Blocks as an (kmax+1, D+1, N) array of coefficient columns."""
        return np.stack(
            [np.stack([v.coeffs for v in blk], axis=1) for blk in self.blocks]
        )


def _power_columns(
    B: BlaschkeProduct, k: int, m_max: int, D: int
) -> np.ndarray:
    """Columns B^k z^m, m = 0..m_max, truncated at D."""
    bk = B.power_taylor(k, D).coeffs
    cols = np.zeros((D + 1, m_max + 1), dtype=complex)
    for m in range(m_max + 1):
        cols[m:, m] = bk[: D + 1 - m]
    return cols


def x_spaces(
    B: BlaschkeProduct,
    w: WeightAlpha | float,
    kmax: int,
    D: int,
    *,
    guard: int | None = None,
    settings: Settings = DEFAULT,
) -> XSpaceChain:
    """Compute the chain X_0, ..., X_kmax at truncation degree D.

    Block k is the weighted orthogonal complement of the column span of
    {B^(k+1) z^m} inside that of {B^k z^m}. Column counts stop guard short
    of the truncation edge (m <= D - k N - guard, default guard N) so the
    complement is not inflated by edge junk. Block dimension is detected by
    the largest successive singular-value gap and must equal N.
    """
    w = as_weight(w)
    N = B.degree
    if guard is None:
        guard = N
    if D < (kmax + 2) * N + guard:
        raise ValueError(f"D = {D} too small for kmax = {kmax} (need >= {(kmax + 2) * N + guard})")
    sq = np.sqrt(w.diagonal(D))

    onbs = []
    for k in range(kmax + 2):
        m_max = D - k * N - guard
        cols = _power_columns(B, k, m_max, D)
        Q, _ = np.linalg.qr(sq[:, None] * cols)
        onbs.append(Q)

    blocks = []
    gaps = []
    for k in range(kmax + 1):
        Qk, Qnext = onbs[k], onbs[k + 1]
        resid = Qk - Qnext @ (Qnext.conj().T @ Qk)
        U, s, _ = np.linalg.svd(resid)
        # genuine complement directions sit entirely outside the next span
        # (singular value 1 up to truncation tails); anything detached from
        # unity is edge junk, not a complement direction
        detected = int(np.sum(s > 1.0 - settings.gap_tol))
        s_ext = np.concatenate([s, [0.0]])
        gap = float(s_ext[N - 1] - s_ext[N])
        if detected != N:
            raise DimensionGapError(
                f"block {k}: {detected} singular values within {settings.gap_tol:.1e} "
                f"of unity (expected {N}); increase D"
            )
        basis = tuple(TaylorPoly(U[:, i] / sq) for i in range(N))
        blocks.append(basis)
        gaps.append(gap)

    return XSpaceChain(
        B=B,
        alpha=w,
        blocks=tuple(blocks),
        kmax=kmax,
        degree=D,
        guard=guard,
        gaps=tuple(gaps),
        tail_span=onbs[kmax + 1],
    )


def k_spaces(
    chain: XSpaceChain, *, settings: Settings = DEFAULT
) -> list[list[TaylorPoly]]:
    """Recover K_k from X_k by dividing out B^k: solve T_B^k g = x in least
    squares for each block vector x. K_0 equals X_0 identically."""
    D = chain.degree
    w = chain.alpha
    sq = np.sqrt(w.diagonal(D))
    N = chain.B.degree
    TB = toeplitz_matrix(chain.B.taylor(D), D, w).entries
    out = []
    TBk = np.eye(D + 1, dtype=complex)
    for k, blk in enumerate(chain.blocks):
        if k > 0:
            TBk = TBk @ TB
        if k == 0:
            out.append(list(blk))
            continue
        m_max = D - k * N - chain.guard
        A = (sq[:, None] * TBk)[:, : m_max + 1]
        recovered = []
        for x in blk:
            g, *_ = np.linalg.lstsq(A, sq * x.coeffs, rcond=None)
            res = float(np.linalg.norm(A @ g - sq * x.coeffs))
            if res > settings.kspace_residual_tol:
                raise ConditioningError(
                    f"division by B^{k} left residual {res:.3e} "
                    f"(> {settings.kspace_residual_tol:.1e})"
                )
            full = np.zeros(D + 1, dtype=complex)
            full[: m_max + 1] = g
            recovered.append(TaylorPoly(full))
        out.append(recovered)
    return out


def block_matrix(W: OperatorMatrix, chain: XSpaceChain) -> np.ndarray:
    """Array of blocks <W x_k, x_l>_alpha, shape (kmax+1, kmax+1, N, N);
    index [l, k] holds the (target l, source k) block."""
    if W.degree != chain.degree:
        raise ValueError("operator and chain degrees differ")
    D = chain.degree
    lam = chain.alpha.diagonal(D)
    stacks = chain.block_matrix_stack()  # (kmax+1, D+1, N)
    K = chain.kmax + 1
    N = chain.block_dim
    out = np.empty((K, K, N, N), dtype=complex)
    for k in range(K):
        img = W.entries @ stacks[k]
        for l in range(K):
            out[l, k] = stacks[l].conj().T @ (lam[:, None] * img)
    return out


class SelfAdjointReport(NamedTuple):
    off_diag_max: float
    block_defect_max: float
    input_defect: float


def selfadjoint_block_check(
    W: OperatorMatrix,
    chain: XSpaceChain,
    *,
    settings: Settings = DEFAULT,
    guard: int | None = None,
) -> SelfAdjointReport:
    """For self-adjoint W: off-diagonal blocks should vanish and diagonal
    blocks should be Hermitian. Rejects inputs that are not self-adjoint to
    settings.selfadjoint_tol on the safe block."""
    D = chain.degree
    D_safe = safe_degree(D, guard)
    defect_mat = W.entries - weighted_adjoint(W, chain.alpha).entries
    input_defect = operator_norm_safe(defect_mat, chain.alpha, D_safe)
    if input_defect > settings.selfadjoint_tol:
        raise NotSelfAdjointError(
            f"input self-adjointness defect {input_defect:.3e} exceeds "
            f"{settings.selfadjoint_tol:.1e}"
        )
    blocks = block_matrix(W, chain)
    K = chain.kmax + 1
    off = 0.0
    herm = 0.0
    for l in range(K):
        for k in range(K):
            nrm = float(np.linalg.norm(blocks[l, k], 2))
            if l != k:
                off = max(off, nrm)
            else:
                herm = max(
                    herm, float(np.linalg.norm(blocks[l, k] - blocks[l, k].conj().T, 2))
                )
    return SelfAdjointReport(off_diag_max=off, block_defect_max=herm, input_defect=input_defect)
