"""Tolerance and truncation configuration.

All numerical guards used by the library live here as documented defaults;
no operation hard-codes a magic constant. Pass a modified Settings to any
operation to override.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    #: largest admissible modulus for a Blaschke zero. Keeps Taylor
    #: truncation error geometric with a uniform ratio.
    rho_max: float = 0.8

    #: composition terminates early once the remaining terms are provably
    #: below this coefficient-norm level.
    tol_compose: float = 1e-14

    #: composition errors out after max_terms = factor * D terms without
    #: meeting tol_compose.
    compose_max_terms_factor: int = 4

    #: reject shell counts M for which the truncated B^M has lost more than
    #: this fraction of its unit H^2 mass past the window. A coarse junk
    #: guard: analysis inner products are window-exact regardless, so only
    #: grossly out-of-window shells are dangerous.
    tol_tail: float = 0.75

    #: commutation residual above which an operator is not accepted as a
    #: commutant element.
    tol_commute: float = 1e-8

    #: singular values below this threshold count as "inside the span" when
    #: detecting X-space block dimensions.
    gap_tol: float = 1e-6

    #: smallest normalized singular value of a raw model-space basis before
    #: it is declared rank deficient.
    basis_rank_tol: float = 1e-10

    #: |1 - conj(a) z| below this is treated as a pole hit.
    pole_tol: float = 1e-14

    #: singular-value threshold for pointwise rank of a multiplier matrix.
    rank_point_tol: float = 1e-8

    #: max entry degree accepted in a MultiplierMatrix.
    max_symbol_degree: int = 64

    #: least-squares residual above which k_spaces refuses to divide by B^k.
    kspace_residual_tol: float = 1e-6

    #: tolerance for the H^2 model-space membership check.
    membership_tol: float = 1e-8

    #: self-adjointness input tolerance for block diagnostics.
    selfadjoint_tol: float = 1e-8

    #: Mobius-power frame: generators enter the projection sum while their
    #: in-window mass fraction stays above this.
    mobius_include_tol: float = 1e-14

    #: Mobius-power frame: a generator is reported in the basis only when
    #: its out-of-window mass fraction is below this.
    mobius_clean_tol: float = 1e-10

    #: maximal Gram deviation from identity tolerated for a frame that is
    #: analytically orthonormal.
    gram_tol: float = 1e-8

    def with_overrides(self, **kw) -> "Settings":
        return replace(self, **kw)


DEFAULT = Settings()


def safe_degree(D: int, guard: int | None = None) -> int:
    """Largest degree on which finite sections are trusted.

    Residuals that compare operators are measured after projecting inputs
    and outputs to degree <= safe_degree(D). The default guard D//2 keeps
    comparisons away from the truncation edge.
    """
    if guard is None:
        guard = D // 2
    if guard < 0 or guard > D:
        raise ValueError(f"guard must lie in [0, {D}], got {guard}")
    return D - guard
