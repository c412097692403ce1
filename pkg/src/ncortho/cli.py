"""Command-line front end.

Every command prints (or writes to ``--out``) a report.  JSON reports carry
the tolerance used, the largest residual observed and an ``ok`` flag.  The
exit status is 0 when every checked identity holds, 1 on a tolerance or
invariant failure and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import classical_cases as cc
from . import fock_multivar as fm
from . import hermitian_jacobi as hj
from . import io as nio
from . import ortho_one_var as ov
from . import schur_params as sp
from . import szego_kernels as sk
from .words import Word, enumerate_words

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Malformed or unreadable input."""


@dataclass
class Result:
    """What a command produced: a JSON-able report plus optional CSV rows."""

    report: dict
    tolerance: float
    max_residual: float
    csv_rows: Optional[list] = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.max_residual <= self.tolerance) and self.report.get("ok", True)


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load(loader: Callable, *a):
    try:
        return loader(*a)
    except InputError:
        raise
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise InputError(str(exc)) from exc


def _params_input(args) -> sp.GammaParams1D:
    if args.inp:
        return _load(nio.params_from_json, _read_json(args.inp))
    return sp.GammaParams1D.random(_rng(args), args.horizon, radius=0.9)


def _kernel_input(args) -> sp.MomentKernel1D:
    if args.inp:
        text = _read_text(args.inp)
        if text.lstrip().startswith("{"):
            p = _load(nio.params_from_json, json.loads(text))
            return sp.moments_from_params(p)
        return _load(nio.kernel_from_csv, text)
    return sp.moments_from_params(sp.GammaParams1D.random(_rng(args), args.horizon))


def _max(values) -> float:
    vals = [float(v) for v in values]
    return max(vals) if vals else 0.0


# --- commands ------------------------------------------------------------------

def cmd_params2moments(args) -> Result:
    p = _params_input(args)
    K = sp.moments_from_params(p)
    back = sp.params_from_moments(K)
    err = float(np.max(np.abs(back.gamma - p.gamma), initial=0.0))
    rows = [[complex(v) for v in row] for row in K.entries]
    return Result({"command": "params2moments", "horizon": p.horizon,
                   "kernel": nio.complex_matrix_to_json(K.entries),
                   "roundtrip_error": err}, args.tol or 1e-9, err, rows)


def cmd_moments2params(args) -> Result:
    K = _kernel_input(args)
    p = sp.params_from_moments(K)
    err = float(np.max(np.abs(sp.moments_from_params(p).entries - K.entries)))
    rows = [["k", "j", "gamma"]] + [[k, j, complex(p.gamma[k, j])] for k, j in p.pairs()]
    report = {"command": "moments2params", **nio.params_to_json(p), "forward_error": err}
    return Result(report, args.tol or 1e-9, err, rows)


def cmd_orthopoly(args) -> Result:
    K = _kernel_input(args)
    p = sp.params_from_moments(K)
    H = K.horizon
    rec = ov.ortho_recurrence(p)
    gs = ov.ortho_gram_schmidt(K)
    table, rows = [], [["degree", "route", "coefficients"]]
    worst = 0.0
    for n in range(H + 1):
        det = ov.ortho_determinant(K, n)
        a, b = rec.phi[n, 0], gs.phi[n, 0]
        worst = max(worst, float(np.max(np.abs(a - det))), float(np.max(np.abs(a - b))))
        entry = {"degree": n}
        for name, c in (("recurrence", a), ("determinant", det), ("gram_schmidt", b)):
            entry[name] = [nio.format_complex(v) for v in c]
            rows.append([n, name, " ".join(nio.format_complex(v) for v in c)])
        table.append(entry)
    return Result({"command": "orthopoly", "horizon": H, "polynomials": table,
                   "max_disagreement": worst}, args.tol or 1e-8, worst, rows)


def cmd_catalan(args) -> Result:
    if args.l is None or args.l < 1:
        raise InputError("catalan needs --l >= 1")
    terms = sp.lattice_expand(args.l)
    p = sp.GammaParams1D.random(_rng(args), args.l)
    total = sum(t.evaluate(p) for t in terms)
    err = abs(total - sp.normalized_moment(p, 0, args.l))
    rows = [["term"]] + [[str(t)] for t in terms]
    return Result({"command": "catalan", "l": args.l, "count": len(terms),
                   "catalan_number": sp.catalan_count(args.l),
                   "terms": [str(t) for t in terms], "numeric_error": float(err),
                   "ok": len(terms) == sp.catalan_count(args.l)},
                  args.tol or 1e-10, float(err), rows)


def cmd_szego_limits(args) -> Result:
    p = _params_input(args)
    K = sp.moments_from_params(p)
    H = p.horizon
    ratio_rows, worst = [], 0.0
    for q in range(1, H + 1):
        for r in range(q):
            lhs, rhs = ov.szego_ratio_sides(K, r, q)
            dev = abs(lhs / rhs - 1)
            worst = max(worst, dev)
            ratio_rows.append({"r": r, "q": q, "det_ratio": lhs, "inverse_sharp_sq": rhs})
    first = [{"r": r, "g": ov.szego_first_limit(p, r)} for r in range(H + 1)]
    strong = []
    for n in range(H + 1):
        ratio, L = ov.szego_strong_limit(p, n)
        worst = max(worst, abs(ratio * L - 1))
        strong.append({"n": n, "ratio": ratio, "limit": L})
    rows = [["n", "ratio", "limit", "product"]] + [[s["n"], s["ratio"], s["limit"], s["ratio"] * s["limit"]]
                                                   for s in strong]
    return Result({"command": "szego-limits", "horizon": H, "ratio_identity": ratio_rows,
                   "first_limit": first, "strong_limit": strong,
                   "szego_margin": sp.szego_class_margin(p)}, args.tol or 1e-9, worst, rows)


def cmd_spectral_factor(args) -> Result:
    K = _kernel_input(args)
    theta = sp.spectral_factor(K)
    err = float(np.max(np.abs(theta.kernel() - K.entries)))
    report = {"command": "spectral-factor", "horizon": K.horizon,
              "factor": nio.complex_matrix_to_json(theta.entries), "factorization_error": err}
    try:
        p = sp.params_from_moments(K)
        margin = sp.szego_class_margin(p)
        diag_min = float(np.min(theta.entries.diagonal().real))
        report["szego_margin"] = margin
        report["min_diagonal"] = diag_min
        err = max(err, abs(margin - diag_min))
    except sp.PositivityError:
        report["szego_margin"] = None
    rows = [[complex(v) for v in row] for row in theta.entries]
    return Result(report, args.tol or 1e-9, err, rows)


def cmd_gegenbauer(args) -> Result:
    lams = args.lam or [0.5, 1.0, 2.5]
    lmax = 4 if args.l is None else args.l
    degree = args.horizon if args.horizon_given else 8
    rows = [["lambda", "l", "n", "h_closed", "h_quadrature", "lead_closed", "lead_quadrature",
             "phi0_closed", "phi0_quadrature", "gamma_closed"]]
    worst, odd_max = 0.0, 0.0
    table = []
    for lam in lams:
        for l in range(lmax + 1):
            lead, zero = cc.gegenbauer_pipeline(lam, l, degree)
            for n in range(degree + 1):
                h, k, z = cc.gegenbauer_closed(cc.GegenbauerSpec(lam, l, n))
                hq = cc.modified_gegenbauer_norm_quadrature(lam, l, n) if n else 1.0
                g = cc.gegenbauer_gamma(lam, l, n) if n else 0.0
                if n % 2:
                    odd_max = max(odd_max, abs(g))
                dev = max(abs(h - hq) / abs(h), abs(k - lead[n]) / abs(k),
                          abs(z - zero[n]) / max(1.0, abs(z)))
                worst = max(worst, dev)
                rows.append([lam, l, n, h, hq, k, lead[n], z, zero[n], g])
                table.append({"lambda": lam, "l": l, "n": n, "h": h, "h_quadrature": hq,
                              "lead": k, "lead_quadrature": float(lead[n]),
                              "phi0": z, "phi0_quadrature": float(zero[n]), "gamma": g})
    return Result({"command": "gegenbauer", "rows": table, "odd_gamma_max": odd_max,
                   "ok": odd_max == 0.0}, args.tol or 1e-7, worst, rows)


def _ct_input(args) -> fm.GammaParamsCT:
    if args.inp:
        return _load(nio.ct_params_from_json, _read_json(args.inp))
    return fm.GammaParamsCT.random(_rng(args), args.N, args.max_len)


def cmd_ct_kernel(args) -> Result:
    p = _ct_input(args)
    K = fm.ct_kernel_from_gamma(p)
    D = K.dense()
    min_eig = float(np.linalg.eigvalsh(D).min())
    fam = fm.ct_ortho_recurrence(p)
    gram_err = float(np.max(np.abs(fm.ct_gram(fam, K) - np.eye(len(D)))))
    stat = K.stationarity_residual()
    dense_err = float(np.max(np.abs(D - fm.ct_dense_forward(p))))
    worst = max(gram_err, stat, dense_err)
    items = nio.ct_kernel_to_json(K)
    rows = [["sigma", "tau", "re", "im"]] + [[i["sigma"], i["tau"], i["re"], i["im"]] for i in items]
    return Result({"command": "ct-kernel", "N": p.N, "max_len": p.max_len, "kernel": items,
                   "stationarity_residual": stat, "sparsity_ok": K.sparsity_ok(),
                   "min_eigenvalue": min_eig, "dense_forward_error": dense_err,
                   "orthonormality_error": gram_err,
                   "ok": K.sparsity_ok() and min_eig > 0}, args.tol or 1e-8, worst, rows)


def cmd_cuntz_check(args) -> Result:
    p = _ct_input(args)
    U = fm.cuntz_isometries(p)
    res = fm.cuntz_residual(U)
    prod = fm.cuntz_condition(p)
    rows = [["k", "row", "col", "value"]]
    for k, u in enumerate(U, start=1):
        for (i, j), v in np.ndenumerate(u):
            if v != 0:
                rows.append([k, i, j, complex(v)])
    return Result({"command": "cuntz-check", "N": p.N, "max_len": p.max_len,
                   "isometry_residual": res, "partial_product": prod,
                   "regime": "Cuntz-Toeplitz" if prod > 1e-6 else "undetermined at this truncation",
                   "shapes": [list(u.shape) for u in U]}, args.tol or 1e-10, res, rows)


def cmd_matrix_units(args) -> Result:
    if args.sigma:
        sigmas = [_load(Word.parse, args.sigma, args.N)]
    else:
        sigmas = [w for w in enumerate_words(args.N, args.max_len) if len(w)]
    reports = [fm.verify_matrix_units(s, args.dim_factor) for s in sigmas]
    worst = _max(max(r.adjoint_product_error, r.vanishing_error) for r in reports)
    rows = [["sigma", "adjoint_error", "vanishing_error", "words_checked", "rank", "full_rank",
             "max_row_norm"]]
    out = []
    for r in reports:
        rows.append([r.sigma, r.adjoint_product_error, r.vanishing_error, r.words_checked,
                     r.stacked_rank, r.full_rank, max(r.contraction_norms)])
        out.append({"sigma": r.sigma, "adjoint_product_error": r.adjoint_product_error,
                    "vanishing_error": r.vanishing_error, "words_checked": r.words_checked,
                    "stacked_rank": r.stacked_rank, "full_rank": r.full_rank,
                    "row_norms": r.contraction_norms, "ok": r.ok})
    return Result({"command": "matrix-units", "N": args.N, "reports": out,
                   "ok": all(r.ok for r in reports)}, args.tol or 1e-14, worst, rows)


def cmd_favard(args) -> Result:
    if args.inp:
        J = _load(nio.jacobi_from_json, _read_json(args.inp))
    elif args.preset == "semicircle":
        J = hj.semicircle_family(args.depth)
    elif args.preset == "free":
        J = hj.JacobiFamily.free(args.N, args.depth)
    else:
        J = hj.JacobiFamily.random(_rng(args), args.N, args.depth)
    rep = hj.favard_roundtrip(J)
    worst = max(rep.block_error, rep.coeff_error, rep.residual)
    moments = nio.moments_to_json(rep.moments)
    report = {"command": "favard", "N": J.N, "depth": J.depth,
              "block_error": rep.block_error, "coefficient_error": rep.coeff_error,
              "three_term_residual": rep.residual, "selfadjoint_error": rep.selfadjoint_error,
              "moments": moments}
    if J.N == 1:
        report["moment_sequence"] = [float(rep.moments[Word((1,) * n, 1)].real)
                                     for n in range(2 * J.depth + 1)]
    rows = [["word", "value"]] + [[m["word"], m["value"]] for m in moments]
    return Result(report, args.tol or 1e-8, worst, rows)


def cmd_szego_kernel(args) -> Result:
    rng = _rng(args)
    H = args.horizon
    pts = [sk.PointB1.random(rng, H) for _ in range(5)]
    seq_min = min(float(np.linalg.eigvalsh(m).min()) for m in sk.szego_block_kernel(pts))
    theta = sk.H2Element(np.tril(rng.normal(size=(H + 1, H + 1)) + 1j * rng.normal(size=(H + 1, H + 1))))
    repro_seq = _max(np.max(np.abs(sk.h2_eval(theta, z) - sk.module_inner(theta, sk.s_z_array(z))))
                     for z in pts)
    totality = sk.totality_residuals(theta, [sk.PointB1.random(rng, H) for _ in range(H + 2)])
    N, L, dim = args.N, args.max_len, 2
    ops = [sk.OperatorPoint.random(rng, N, dim) for _ in range(4)]
    fock_min = float(np.linalg.eigvalsh(sk.fock_block_kernel(ops, L)).min())
    repro_fock = 0.0
    for Z in ops:
        S = sk.fock_szego(Z, L)
        th = {w: rng.normal(size=dim) + 1j * rng.normal(size=dim) for w in S.words}
        stacked = np.concatenate([th[w] for w in S.words])
        repro_fock = max(repro_fock, float(np.max(np.abs(S.eval(stacked) - sk.fock_eval_direct(Z, th)))))
    siegel = [sk.cayley(Z) for Z in ops]
    sections = np.hstack([sk.siegel_section(W, L) for W in siegel])
    siegel_min = float(np.linalg.eigvalsh(sections.conj().T @ sections).min())
    worst = max(repro_seq, repro_fock, max(0.0, -seq_min), max(0.0, -fock_min), max(0.0, -siegel_min))
    rows = [["points", "totality_residual"]] + [[i + 1, r] for i, r in enumerate(totality)]
    return Result({"command": "szego-kernel", "horizon": H,
                   "sequence_kernel_min_eigenvalue": seq_min,
                   "sequence_reproducing_error": repro_seq,
                   "fock_kernel_min_eigenvalue": fock_min,
                   "fock_reproducing_error": repro_fock,
                   "siegel_kernel_min_eigenvalue": siegel_min,
                   "totality_residuals": totality}, args.tol or 1e-10, worst, rows)


COMMANDS = {
    "params2moments": cmd_params2moments,
    "moments2params": cmd_moments2params,
    "orthopoly": cmd_orthopoly,
    "catalan": cmd_catalan,
    "szego-limits": cmd_szego_limits,
    "spectral-factor": cmd_spectral_factor,
    "gegenbauer": cmd_gegenbauer,
    "ct-kernel": cmd_ct_kernel,
    "cuntz-check": cmd_cuntz_check,
    "matrix-units": cmd_matrix_units,
    "favard": cmd_favard,
    "szego-kernel": cmd_szego_kernel,
}

# commands whose natural artifact is a table
CSV_DEFAULT = {"params2moments", "spectral-factor"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncortho", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--horizon", type=int, default=None)
    parser.add_argument("--max-len", type=int, default=3)
    parser.add_argument("--depth", type=int, default=3)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--in", dest="inp", default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=["json", "csv"], default=None)
    parser.add_argument("--N", type=int, default=2, help="alphabet size")
    parser.add_argument("--l", type=int, default=None, help="offset or level")
    parser.add_argument("--lam", type=float, action="append", help="Gegenbauer parameter (repeatable)")
    parser.add_argument("--sigma", default=None, help="word for matrix-units")
    parser.add_argument("--dim-factor", type=int, default=1)
    parser.add_argument("--preset", choices=["semicircle", "free", "random"], default="random")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.horizon_given = args.horizon is not None
    if args.horizon is None:
        args.horizon = 8
    fmt = args.format or ("csv" if args.command in CSV_DEFAULT else "json")
    try:
        if args.horizon < 0 or args.max_len < 0 or args.depth < 0 or args.N < 1:
            raise InputError("sizes must be nonnegative and N positive")
        result = COMMANDS[args.command](args)
    except InputError as exc:
        sys.stderr.write(nio.dumps({"error": "malformed input", "detail": str(exc)}))
        return EXIT_INPUT
    except (sp.PositivityError, ArithmeticError, ValueError) as exc:
        sys.stderr.write(nio.dumps({"error": "invariant violated", "detail": str(exc)}))
        return EXIT_FAIL
    report = dict(result.report)
    report.pop("ok", None)
    report["tolerance"] = result.tolerance
    report["max_residual"] = result.max_residual
    report["ok"] = result.ok
    if fmt == "csv" and result.csv_rows is not None:
        buf = _io.StringIO()
        nio.write_csv_rows(result.csv_rows, buf)
        _emit(buf.getvalue(), args.out)
    else:
        _emit(nio.dumps(report), args.out)
    if not result.ok:
        sys.stderr.write(nio.dumps({"error": "tolerance exceeded", "tolerance": result.tolerance,
                                    "max_residual": result.max_residual}))
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
