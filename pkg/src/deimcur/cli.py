"""Command line: generate test matrices, compute SVDs, factor and sweep ranks.

Exit codes: 0 success, 1 usage error, 2 data error (singular or rank
deficient input), 3 I/O error.
"""
import argparse
import json
import sys

import numpy as np

from . import synthgen
from .cur import METHODS, VARIANTS, build_cur, error_certificate, rank_sweep, select_indices
from .densecore import economy_svd, truncate_svd
from .errors import DataError, MatrixMarketError, RankDeficiencyError
from .incqr import approx_svd_from_qr, incremental_qr
from .mmio import (SweepRecord, iter_matrix_market_columns, read_matrix_market,
                   write_indices, write_matrix_market, write_sweep_csv, write_vector)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3
PRESETS = ("eq61", "eq62", "growth")
ENGINES = ("exact", "incremental")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; we want 1
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _nonneg_float(s):
    v = float(s)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {s}")
    return v


def _method_list(s):
    out = [t.strip() for t in s.split(",") if t.strip()]
    bad = [t for t in out if t not in METHODS]
    if not out or bad:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {','.join(METHODS)}")
    return out


def build_parser():
    ap = _Parser(prog="deimcur", description="DEIM-based CUR factorization")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="write a synthetic test matrix")
    g.add_argument("--preset", choices=PRESETS, required=True)
    g.add_argument("--m", type=_positive, required=True)
    g.add_argument("--n", type=_positive, required=True,
                   help="columns (for growth: the basis size k)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--density", type=float, default=0.025)
    g.add_argument("--out", required=True)

    def engine_flags(p, name):
        p.add_argument(name, choices=ENGINES, default="exact")
        p.add_argument("--tol", type=_nonneg_float, default=1e-4,
                       help="deflation tolerance of the incremental engine")

    s = sub.add_parser("svd", help="rank-K singular triplets")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--rank", type=_positive, required=True)
    engine_flags(s, "--engine")
    s.add_argument("--out-prefix", required=True)

    f = sub.add_parser("factor", help="rank-K CUR factorization with certificate")
    f.add_argument("--in", dest="inp", required=True)
    f.add_argument("--rank", type=_positive, required=True)
    f.add_argument("--method", choices=METHODS, default="deim")
    f.add_argument("--variant", choices=VARIANTS, default="orthogonal")
    engine_flags(f, "--svd-engine")
    f.add_argument("--lev-r", type=_positive, default=None)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out-prefix", required=True)

    w = sub.add_parser("sweep", help="certificates for k = 1..kmax, CSV out")
    w.add_argument("--in", dest="inp", required=True)
    w.add_argument("--kmax", type=_positive, required=True)
    w.add_argument("--methods", type=_method_list, default=["deim"])
    w.add_argument("--variant", choices=VARIANTS, default="orthogonal")
    engine_flags(w, "--svd-engine")
    w.add_argument("--lev-r", type=_positive, default=None)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--no-timing", action="store_true",
                   help="write elapsed_ms as 0 so the CSV is reproducible byte for byte")
    w.add_argument("--out", required=True)
    return ap


def _compute_svd(path, A, engine, tol, rank):
    """Singular triplets of A, at least ``rank`` of them."""
    if rank > min(A.shape):
        raise UsageError(f"rank {rank} exceeds min(m, n) = {min(A.shape)}")
    if engine == "exact":
        return economy_svd(A), None
    qr = incremental_qr(iter_matrix_market_columns(path), tol)
    svd = approx_svd_from_qr(qr.Q, qr.R, qr.certificate)
    if svd.k < rank:
        raise RankDeficiencyError(
            f"incremental QR kept rank {svd.k} < {rank} (tol={tol:g})")
    return svd, qr


def _dump(obj):
    print(json.dumps(obj))


def _cert_dict(cert):
    return {"eta_p": cert.eta_p, "eta_q": cert.eta_q, "sigma_next": cert.sigma_next,
            "bound": cert.bound, "observed_error": cert.observed_error,
            "exact_svd": cert.exact_svd}


def _need_lev_r(method, lev_r):
    if method.startswith("ls-") and lev_r is None:
        raise UsageError(f"method {method} requires --lev-r")


def cmd_gen(args):
    if args.preset == "growth":
        if not args.m > args.n:
            raise UsageError("growth preset needs m > n")
        V = synthgen.growth_case(args.m, args.n).V
        # distinct, well separated singular values; left singular vectors are V
        A = V * 2.0 ** -np.arange(args.n)
    else:
        make = synthgen.eq61_spec if args.preset == "eq61" else synthgen.eq62_spec
        A = synthgen.gen_sparse_sum(make(args.m, args.n, args.seed, args.density))
    write_matrix_market(A, args.out)
    return EXIT_OK


def cmd_svd(args):
    A = read_matrix_market(args.inp)
    full, qr = _compute_svd(args.inp, A, args.engine, args.tol, args.rank)
    svd = truncate_svd(full, args.rank)
    write_matrix_market(svd.V, f"{args.out_prefix}_V.mtx")
    write_vector(svd.S, f"{args.out_prefix}_S.txt")
    write_matrix_market(svd.W, f"{args.out_prefix}_W.mtx")
    out = {"rank": svd.k, "engine": args.engine, "residual_estimate": svd.residual_estimate}
    if qr is not None:
        out.update(tol=args.tol, deletions=qr.deletions, qr_rank=qr.rank)
    _dump(out)
    return EXIT_OK


def cmd_factor(args):
    _need_lev_r(args.method, args.lev_r)
    A = read_matrix_market(args.inp)
    full, _ = _compute_svd(args.inp, A, args.svd_engine, args.tol, args.rank)
    if args.lev_r is not None and args.lev_r > full.k:
        raise UsageError(f"--lev-r {args.lev_r} exceeds the {full.k} available singular vectors")
    svd = truncate_svd(full, args.rank)
    p, q = select_indices(A, full, args.method, args.rank, args.seed, args.lev_r)
    cur = build_cur(A, p, q, args.variant)
    cert = error_certificate(A, svd, p, q, cur)
    pre = args.out_prefix
    write_indices(p, f"{pre}_p.txt")
    write_indices(q, f"{pre}_q.txt")
    write_matrix_market(cur.C, f"{pre}_C.mtx")
    write_matrix_market(cur.U, f"{pre}_U.mtx")
    write_matrix_market(cur.R, f"{pre}_R.mtx")
    _dump({"k": args.rank, "method": args.method, "variant": args.variant,
           **_cert_dict(cert)})
    return EXIT_OK


def cmd_sweep(args):
    for method in args.methods:
        _need_lev_r(method, args.lev_r)
    A = read_matrix_market(args.inp)
    full, _ = _compute_svd(args.inp, A, args.svd_engine, args.tol, args.kmax)
    if args.lev_r is not None and args.lev_r > full.k:
        raise UsageError(f"--lev-r {args.lev_r} exceeds the {full.k} available singular vectors")
    records = []
    for method in args.methods:
        for pt in rank_sweep(A, full, method, args.kmax, args.seed, args.lev_r, args.variant):
            if pt.error:
                print(f"k={pt.k} {method}: {pt.error}", file=sys.stderr)
            records.append(SweepRecord.from_point(pt, timing=not args.no_timing))
    write_sweep_csv(records, args.out)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "svd": cmd_svd, "factor": cmd_factor, "sweep": cmd_sweep}


def cli_main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (MatrixMarketError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())
