"""Check batteries behind the CLI commands.

Each battery turns a validated experiment configuration into a list of
CheckRecords (plus optional payload data). All randomness flows from the
config seed through numpy's default_rng (PCG64); records are assembled in a
fixed order so reports are reproducible byte for byte.
"""

from __future__ import annotations

import time

import numpy as np

from . import commutant as cm
from . import ortho as ox
from . import reducing as rd
from . import wold
from .blaschke import BlaschkeProduct, model_basis
from .config import Settings, safe_degree
from .errors import BlaschkeLabError, ConfigError
from .report import CheckRecord
from .spaces import (
    OperatorMatrix,
    TaylorPoly,
    as_coeffs,
    as_weight,
    toeplitz_matrix,
    weighted_adjoint,
)

#: default tolerances per check family (overridable through config).
CHECK_TOLERANCES = {
    "roundtrip": 1e-8,
    "commute": 1e-8,
    "symbol_roundtrip": 1e-7,
    "reducing_monomial": 1e-10,
    "reducing_mobius": 1e-6,
    "k0_orthogonality": 1e-8,
    "projection_law": 1e-10,
    "block_orthogonality": 1e-9,
    "shift_action": 1e-8,
    "triangularity": 1e-7,
    "unitarity": 1e-10,
    "intertwining": 1e-13,
    "bnorm_identity": 1e-9,
    "shell_shift": 1e-8,
    "cowen_member": 1e-12,
    "witness_margin": 1.0,
}


def _timed(records: list[CheckRecord], name: str, tolerance: float, fn, *, strict: bool):
    t0 = time.perf_counter()
    try:
        residual = float(fn())
        err = None
    except BlaschkeLabError as exc:
        if strict:
            raise
        residual = float("nan")
        err = f"{type(exc).__name__}: {exc}"
    ms = (time.perf_counter() - t0) * 1e3
    passed = np.isfinite(residual) and residual < tolerance
    records.append(
        CheckRecord(
            name=name,
            residual=residual,
            tolerance=tolerance,
            passed=bool(passed),
            wall_time_ms=ms,
            error=err,
        )
    )


def _random_poly(rng: np.random.Generator, degree: int) -> TaylorPoly:
    return TaylorPoly(rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1))


def _random_phi(rng: np.random.Generator, n: int, deg: int) -> cm.MultiplierMatrix:
    return cm.MultiplierMatrix(
        [[_random_poly(rng, deg) for _ in range(n)] for _ in range(n)]
    )


def _tol(cfg, key: str) -> float:
    return float(cfg.check_tolerances.get(key, CHECK_TOLERANCES[key]))


# ---------------------------------------------------------------------------


def decompose_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    """Round-trip residuals of the shell decomposition on the safe block."""
    records: list[CheckRecord] = []
    data: dict = {}
    B, D = cfg.blaschke, cfg.degree
    # deeper than the analysis default: round trips need ~12 shells of decay
    # margin past deg(f)/n to reach the tolerance
    M = cfg.shells if cfg.shells is not None else max(1, (3 * D) // (4 * B.degree))
    basis = model_basis(B, D, settings=settings)
    D_safe = safe_degree(D)
    tol = _tol(cfg, "roundtrip")

    inputs = []
    explicit = cfg.inputs.get("f")
    if explicit is not None:
        inputs.append(("explicit", TaylorPoly([complex(re, im) for re, im in explicit])))
    else:
        num = int(cfg.inputs.get("num_samples", 5))
        max_deg = int(cfg.inputs.get("max_degree", min(16, max(D // 4, 1))))
        for i in range(num):
            inputs.append((f"sample_{i}", _random_poly(rng, int(rng.integers(0, max_deg + 1)))))

    for label, f in inputs:
        def roundtrip(f=f):
            dec = wold.analyze(f, B, M, D, basis=basis, settings=settings)
            g = wold.synthesize(dec, D)
            diff = (g - f.pad(D)).coeffs[: D_safe + 1]
            return np.linalg.norm(diff)

        _timed(records, f"decompose/{label}/roundtrip_h2", tol, roundtrip, strict=strict)

    if explicit is not None:
        f = inputs[0][1]
        dec = wold.analyze(f, B, M, D, basis=basis, settings=settings)
        data["components"] = [[[c.real, c.imag] for c in comp.coeffs] for comp in dec.components]
        data["decomposition"] = dec.to_json()
    return records, data


def commutant_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    """Forward commutation and symbol round trips for built operators."""
    records: list[CheckRecord] = []
    B, D, w = cfg.blaschke, cfg.degree, as_weight(cfg.alpha)
    n = B.degree
    M = cfg.shells if cfg.shells is not None else D // n
    basis = model_basis(B, D, settings=settings)

    phis = []
    if cfg.inputs.get("phi") is not None:
        explicit = cm.MultiplierMatrix.from_json(cfg.inputs["phi"], settings=settings)
        if explicit.n != n:
            raise ConfigError(f"phi is {explicit.n} x {explicit.n} but deg B = {n}")
        phis.append(("explicit", explicit))
    else:
        num = int(cfg.inputs.get("num_samples", 3))
        deg = int(cfg.inputs.get("symbol_degree", 4))
        for i in range(num):
            phis.append((f"phi_{i}", _random_phi(rng, n, deg)))

    for label, phi in phis:
        built = {}

        def commute(phi=phi, built=built):
            op = cm.build(phi, B, w, M, D, basis=basis, settings=settings)
            built["op"] = op
            return cm.commutation_residual(op.realization, B, w, D)

        _timed(records, f"commutant/{label}/commutation", _tol(cfg, "commute"), commute, strict=strict)

        def roundtrip(phi=phi, built=built):
            if "op" not in built:
                built["op"] = cm.build(phi, B, w, M, D, basis=basis, settings=settings)
            syms = cm.extract_symbols(built["op"].realization, B, M, D, basis=basis, settings=settings)
            phi2 = cm.symbols_to_matrix(syms, B, M, D, basis=basis, settings=settings)
            worst = 0.0
            for j in range(n):
                for k in range(n):
                    a = as_coeffs(phi.entries[j][k], 10)
                    b = as_coeffs(phi2.entries[j][k], 10)
                    worst = max(worst, float(np.max(np.abs(a - b))))
            return worst

        _timed(records, f"commutant/{label}/symbol_roundtrip", _tol(cfg, "symbol_roundtrip"), roundtrip, strict=strict)
    return records, {}


def reducing_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    records: list[CheckRecord] = []
    data: dict = {}
    B, D = cfg.blaschke, cfg.degree
    w = as_weight(cfg.alpha)
    family = cfg.inputs.get("family", "monomial")

    if family == "monomial":
        N = B.degree
        for j in range(N):
            P = rd.monomial_reducing_projection(N, j, w, D)

            def law(P=P):
                return max(rd.projection_defects(P))

            _timed(records, f"reducing/monomial_{j}/projection_laws", _tol(cfg, "projection_law"), law, strict=strict)
            _timed(
                records,
                f"reducing/monomial_{j}/residual",
                _tol(cfg, "reducing_monomial"),
                lambda P=P: rd.reducing_residual(P, B, w, D),
                strict=strict,
            )
    elif family == "mobius_power":
        a = complex(*cfg.inputs.get("a", [0.5, 0.0]))
        N = B.degree
        zeros = B.expanded_zeros()
        if any(z != a for z in zeros):
            raise ConfigError(
                "mobius_power family requires B to be a power of the factor through a"
            )

        def k0(a=a):
            # derivative-kernel family z^j/(1-conj(a) z)^(j+2) against B A
            from math import comb

            TB = toeplitz_matrix(B.taylor(D), D, w)
            lam = w.diagonal(D)
            worst = 0.0
            for j in range(N):
                g = np.zeros(D + 1, dtype=complex)
                k = np.arange(D + 1 - j)
                g[j:] = np.array([comb(int(i) + j + 1, j + 1) for i in k]) * np.conj(a) ** k
                for m in range(safe_degree(D) + 1):
                    col = TB.entries[:, m]
                    worst = max(worst, abs(np.sum(g * np.conj(col) * lam)))
            return worst

        _timed(records, "reducing/mobius/k0_orthogonality", _tol(cfg, "k0_orthogonality"), k0, strict=strict)
        for j in range(N):
            _timed(
                records,
                f"reducing/mobius_{j}/residual",
                _tol(cfg, "reducing_mobius"),
                lambda j=j: rd.reducing_residual(
                    rd.mobius_power_reducing_projection(a, N, j, D, settings=settings), B, -1.0, D
                ),
                strict=strict,
            )
    elif family == "custom":
        basis_payload = cfg.inputs.get("basis")
        if not basis_payload:
            raise ConfigError("custom family requires inputs.basis")
        funcs = [TaylorPoly([complex(re, im) for re, im in f]) for f in basis_payload]
        P = rd.projection_from_basis(funcs, w, D, settings=settings)
        expect = cfg.inputs.get("expected", "report-only")
        tol = _tol(cfg, "reducing_mobius") if expect == "reducing" else float("inf")
        _timed(records, "reducing/custom/residual", tol, lambda: rd.reducing_residual(P, B, w, D), strict=strict)
        idem, sa = rd.projection_defects(P)
        data["custom_projection"] = {"idempotency_defect": idem, "selfadjoint_defect": sa}
    else:
        raise ConfigError(f"unknown reducing family {family!r}")
    return records, data


def ortho_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    records: list[CheckRecord] = []
    data: dict = {}
    B, D, w = cfg.blaschke, cfg.degree, as_weight(cfg.alpha)
    kmax = int(cfg.inputs.get("kmax", 3))
    state = {}

    def build_chain():
        state["chain"] = ox.x_spaces(B, w, kmax, D, settings=settings)
        return 0.0

    _timed(records, "ortho/chain_constructed", 0.5, build_chain, strict=strict)
    chain = state.get("chain")
    if chain is None:
        return records, data
    data["block_dims"] = [len(b) for b in chain.blocks]
    data["gaps"] = list(chain.gaps)

    def orthogonality():
        lam = w.diagonal(D)
        stacks = chain.block_matrix_stack()
        worst = 0.0
        for k in range(kmax + 1):
            for l in range(k + 1, kmax + 1):
                G = stacks[k].conj().T @ (lam[:, None] * stacks[l])
                worst = max(worst, float(np.max(np.abs(G))))
        return worst

    _timed(records, "ortho/block_orthogonality", _tol(cfg, "block_orthogonality"), orthogonality, strict=strict)

    def shift_action():
        lam = w.diagonal(D)
        sq = np.sqrt(lam)
        TB = toeplitz_matrix(B.taylor(D), D, w).entries
        TBw = sq[:, None] * TB / sq[None, :]
        stacks = chain.block_matrix_stack()
        worst = 0.0
        for k in range(kmax):
            img = TBw @ (sq[:, None] * stacks[k])
            for l in range(k + 1, kmax + 1):
                Q = sq[:, None] * stacks[l]
                img = img - Q @ (Q.conj().T @ img)
            Q = chain.tail_span
            img = img - Q @ (Q.conj().T @ img)
            worst = max(worst, float(np.linalg.norm(img, 2)))
        return worst

    _timed(records, "ortho/shift_action", _tol(cfg, "shift_action"), shift_action, strict=strict)

    def triangularity():
        n = B.degree
        M = D // n
        phi = _random_phi(rng, n, 4)
        op = cm.build(phi, B, w, M, D, settings=settings)
        blocks = ox.block_matrix(op.realization, chain)
        worst = 0.0
        for k in range(kmax + 1):
            for l in range(k):
                worst = max(worst, float(np.linalg.norm(blocks[l, k], 2)))
        return worst

    _timed(records, "ortho/commutant_triangularity", _tol(cfg, "triangularity"), triangularity, strict=strict)
    return records, data


def shift_equiv_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    records: list[CheckRecord] = []
    B, D, w = cfg.blaschke, cfg.degree, as_weight(cfg.alpha)
    mode = cfg.inputs.get("mode", "monomial" if B == BlaschkeProduct.monomial(B.degree) else "general")

    if mode == "monomial":
        J = rd.shift_equiv_monomial(B.degree, w, D)
        _timed(records, "shift_equiv/unitarity", _tol(cfg, "unitarity"), lambda: rd.unitarity_defect(J), strict=strict)
        _timed(records, "shift_equiv/intertwining", _tol(cfg, "intertwining"), lambda: rd.intertwining_residual(J), strict=strict)
    else:
        # image count kept a third of the window so the analysis shells used
        # in the residuals stay clean of edge tails
        M = cfg.shells if cfg.shells is not None else max(2, D // (3 * B.degree))
        basis = model_basis(B, D, settings=settings)
        if cfg.inputs.get("h") is not None:
            h = TaylorPoly([complex(re, im) for re, im in cfg.inputs["h"]])
        else:
            h = basis.orthonormal[0]
        J = rd.shift_equiv_general(B, h, w, M, D, settings=settings)

        def bnorm_identity():
            worst = 0.0
            for k, img in enumerate(J.images):
                dec = wold.analyze(img, B, M + 2, D, basis=basis, settings=settings)
                worst = max(worst, abs(wold.b_norm(dec, w) - (k + 1.0) ** (w.alpha / 2)))
            return worst

        _timed(records, "shift_equiv/bnorm_identity", _tol(cfg, "bnorm_identity"), bnorm_identity, strict=strict)
        _timed(
            records,
            "shift_equiv/shell_shift",
            _tol(cfg, "shell_shift"),
            lambda: rd.shell_shift_residual(J, M + 2, D, settings=settings),
            strict=strict,
        )
    return records, {}


def cowen_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    records: list[CheckRecord] = []
    B, D = cfg.blaschke, cfg.degree
    num = int(cfg.inputs.get("num_points", 20))
    radius = float(cfg.inputs.get("radius", 0.5))
    pts = [
        radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        for _ in range(num)
    ]
    TB = toeplitz_matrix(B.taylor(D), D, 0.0)
    ident = np.eye(D + 1)

    def member(W):
        return lambda: max(cm.cowen_residual(W, B, a, D, settings=settings) for a in pts)

    _timed(records, "cowen/T_B", _tol(cfg, "cowen_member"), member(TB), strict=strict)
    _timed(records, "cowen/identity", _tol(cfg, "cowen_member"), member(OperatorMatrix(ident, 0.0)), strict=strict)

    def witness():
        shift_adj = weighted_adjoint(toeplitz_matrix(TaylorPoly([0, 1]), D, 0.0), 0.0)
        worst = max(cm.cowen_residual(shift_adj, B, a, D, settings=settings) for a in pts)
        return 1e-2 / max(worst, 1e-300)  # pass iff the witness exceeds 1e-2

    _timed(records, "cowen/adjoint_shift_witness_margin", _tol(cfg, "witness_margin"), witness, strict=strict)
    return records, {}


def suite_checks(cfg, settings: Settings, rng: np.random.Generator, *, strict=False):
    """Fixed-order composition of the per-command batteries."""
    records: list[CheckRecord] = []
    data: dict = {}
    for name, fn in (
        ("decompose", decompose_checks),
        ("commutant", commutant_checks),
        ("ortho", ortho_checks),
        ("shift-equiv", shift_equiv_checks),
        ("cowen", cowen_checks),
    ):
        recs, d = fn(cfg, settings, rng, strict=strict)
        records.extend(recs)
        if d:
            data[name] = d
    # reducing battery: monomial family on z^N with the config degree
    mono_cfg = cfg.with_updates(
        blaschke=BlaschkeProduct.monomial(cfg.blaschke.degree),
        inputs={"family": "monomial"},
    )
    recs, d = reducing_checks(mono_cfg, settings, rng, strict=strict)
    records.extend(recs)
    if d:
        data["reducing"] = d
    return records, data


BATTERIES = {
    "decompose": decompose_checks,
    "commutant": commutant_checks,
    "reducing": reducing_checks,
    "ortho": ortho_checks,
    "shift-equiv": shift_equiv_checks,
    "cowen": cowen_checks,
    "suite": suite_checks,
}
