"""Command-line entry point: ``chirprip <command> [flags]``.

Exit status is 0 on success, 1 when a verified property fails, and 2 on a
usage error (bad flags, infeasible parameter choices).
"""

import argparse
import csv
import io as _io
import math
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import addcomb as ac
from . import checks
from . import chirp
from . import io
from . import numtheory as nt
from . import optimizer as opt
from . import rip
from .errors import ChirpRipError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fraction(text):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    return v


def _grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:stop:factor")
    try:
        start, stop, factor = (float(s) for s in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    return start, stop, factor


def _int(text):
    # accepts 53000000, 5.3e7 and 2**50 style values
    text = text.strip()
    try:
        if "**" in text or "^" in text:
            base, exp = text.replace("^", "**").split("**")
            return int(base) ** int(exp)
        v = float(text) if any(c in text for c in ".eE") else int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_int, default=io.DEFAULT_SEED, help="RNG seed (default 0xB0D1)")
    common.add_argument("--out", help="output path (default: standard output)")

    parser = argparse.ArgumentParser(prog="chirprip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    sp = add("build", "build a chirp ensemble (𝒜 x ℬ or a random sub-family)")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--m", type=_int, help="build 𝒜 from the x^2+Ux recipe with this even m")
    sp.add_argument("--M", type=_int, help="cube side for ℬ")
    sp.add_argument("--r", type=_int, help="cube dimension for ℬ")
    sp.add_argument("--count", type=_int, help="keep a seeded random subset of this many columns")

    sp = add("gram-check", "closed-form vs direct Gram entries")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--count", type=_int, default=10_000)

    for name, help_ in (("rip", "restricted isometry constants"), ("flat-rip", "flat and weak flat RIP constants")):
        sp = add(name, help_)
        sp.add_argument("ensemble", nargs="?", help="ensemble JSON or complex matrix CSV")
        sp.add_argument("--p", type=_int, help="use the full chirp family at p when no file is given")
        sp.add_argument("--K", type=_int, required=True)
        if name == "rip":
            sp.add_argument("--s", type=_int, help="also check delta_{sK} <= 2 s delta_K")
            sp.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
            sp.add_argument("--count", type=_int, default=1000, help="samples in sampled mode")

    sp = add("energy", "sumset, difference set and additive energy")
    sp.add_argument("set", nargs="?", help="set file; omitted runs the random suite")
    sp.add_argument("--count", type=_int, default=500)

    sp = add("bias", "Fourier bias and its energy sandwich")
    sp.add_argument("set", nargs="?", help="set file; omitted runs the random suite")
    sp.add_argument("--count", type=_int, default=200)

    sp = add("tau", "sumset exponent tau(M), cube embedding checks")
    sp.add_argument("--M", type=_int, help="cube side length")
    sp.add_argument("--m", type=_int, help="report t = 2 tau - 1 for the optimizer's M = 2^(2m(4m-1)-1)")
    sp.add_argument("--r", type=_int, help="run the cube suite (embedding, sumset exponent)")
    sp.add_argument("--count", type=_int, default=200)

    sp = add("verify-A", "build 𝒜 and verify the reciprocal-sum hypothesis")
    sp.add_argument("--m", type=_int, default=2)
    sp.add_argument("--p", type=_int, help="default: smallest prime >= 3^(2m(4m-1))")

    sp = add("optimize", "maximize eps1 by exact linear programming")
    sp.add_argument("--m", type=_int, required=True)
    sp.add_argument("--c0", type=_fraction, default=opt.C0_DEFAULT)

    sp = add("sweep", "eps1 supremum over a geometric m grid (CSV)")
    sp.add_argument("--grid", type=_grid, help="start:stop:factor (default: 30 points over [1e6, 1e9])")
    sp.add_argument("--c0", type=_fraction, default=opt.C0_DEFAULT)

    sp = add("lemma9-check", "quadratic exponential-sum bound on random sets")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--count", type=_int, default=500)

    sp = add("sums", "S and T cancellation sums against the Gram matrix")
    sp.add_argument("--p", type=_int, required=True)
    sp.add_argument("--count", type=_int, default=50)
    return parser


# -- commands: each returns (result dict, ok flag) ---------------------------------------


def _prime(p):
    try:
        return nt.PrimeContext(p)
    except ChirpRipError as exc:
        raise UsageError(str(exc)) from exc


def _load_columns(args):
    if args.ensemble:
        if args.ensemble.endswith(".csv"):
            return chirp.read_matrix_csv(args.ensemble), {"source": args.ensemble, "kind": "matrix"}
        return chirp.load_ensemble(args.ensemble), {"source": args.ensemble, "kind": "ensemble"}
    if args.p is None:
        raise UsageError("give an ensemble file or --p")
    return chirp.full_family(_prime(args.p)), {"source": f"full family p={args.p}", "kind": "ensemble"}


def cmd_build(args):
    ctx = _prime(args.p)
    if args.m is not None:
        A = chirp.build_A(chirp.ASetParams(args.m, ctx.p))
    else:
        A = ac.ResidueSet(ctx.p, tuple(range(ctx.p)))
    if (args.M is None) != (args.r is None):
        raise UsageError("--M and --r go together")
    if args.M is not None:
        B = chirp.build_B(ctx.p, args.M, args.r)
    else:
        B = ac.ResidueSet(ctx.p, tuple(range(ctx.p)))
    ens = chirp.assemble_ensemble(ctx, A, B)
    if args.count is not None:
        rng = np.random.default_rng(args.seed)
        cols = sorted(rng.choice(len(ens), size=min(args.count, len(ens)), replace=False).tolist())
        ens = ens.subensemble(cols)
    result = {"p": ctx.p, "A": list(A), "B": list(B), "ensemble": ens.to_json(), "columns": len(ens)}
    if args.out and ctx.p <= chirp.DENSE_LIMIT:
        csv_path = os.path.splitext(args.out)[0] + ".csv"
        chirp.write_matrix_csv(csv_path, ens.matrix())
        result["matrix_csv"] = csv_path
    return result, True


def cmd_gram_check(args):
    _prime(args.p)
    res = checks.gram_identity_suite(args.p, args.count, args.seed)
    return res, res["ok"]


def cmd_rip(args):
    ens, src = _load_columns(args)
    N = rip.n_columns(ens)
    if args.mode == "sampled":
        rep = rip.ric_sampled(ens, args.K, args.count, args.seed)
    else:
        rep = rip.ric_exhaustive(ens, args.K)
    mu = rip.coherence(ens)
    rows = ens.p if isinstance(ens, chirp.ChirpEnsemble) else ens.shape[0]
    res = {"input": src, "columns": N, "report": rep.to_json(), "coherence": mu}
    ok = True
    if N > rows:
        res["welch_bound"] = rip.welch_bound(rows, N)
        ok &= mu >= res["welch_bound"] - 1e-12
    if args.mode == "exhaustive":
        g = rep.delta_K <= (args.K - 1) * mu + 1e-9
        res["gershgorin"] = {"delta_K": rep.delta_K, "bound": (args.K - 1) * mu, "ok": g}
        ok &= g
        if args.s:
            chk = rip.scaling_bound_check(ens, args.K, args.s)
            res["scaling"] = {"s": args.s, "delta_sK": chk.lhs, "bound": chk.rhs, "ok": chk.holds}
            ok &= chk.holds
    return res, bool(ok)


def cmd_flat_rip(args):
    ens, src = _load_columns(args)
    rep = rip.flat_rip_exhaustive(ens, args.K)
    mu = rip.coherence(ens)
    delta = rip.ric_exhaustive(ens, args.K).delta_K
    res = {"input": src, "report": rep.to_json(), "coherence": mu, "delta_K": delta, "log": "natural"}
    applies = mu * args.K <= 1
    lb = (not applies) or rep.theta <= math.sqrt(rep.theta_prime) + 1e-9
    res["lemma_b"] = {"applies": applies, "theta": rep.theta, "sqrt_theta_prime": math.sqrt(rep.theta_prime), "ok": lb}
    ok = lb
    if args.K >= 2:
        for const in (150, 75):
            bound = const * rep.theta * math.log(args.K)
            res[f"lemma_a_{const}"] = {"bound": bound, "ok": delta <= bound + 1e-9}
        ok &= res["lemma_a_150"]["ok"]
    return res, bool(ok)


def cmd_energy(args):
    if args.set:
        A = io.read_set(args.set)
        st = checks.set_statistics(A)
        k = st["size"]
        ok = (
            st["sumset"] >= k and st["difference_set"] >= k
            and st["energy"] <= k**3 and st["energy"] * A.modulus >= k**4
            and st["sumset"] * k <= st["difference_set"] ** 2
        )
        return st, ok
    suite = checks.addcomb_suite(args.count, args.seed)
    scan = checks.coset_scan(12)
    return {"random_suite": suite, "coset_scan": scan}, suite["ok"] and scan["ok"]


def cmd_bias(args):
    if args.set:
        A = io.read_set(args.set)
        st = checks.set_statistics(A)
        lo, mid, hi = st["bias_sandwich"]
        return st, checks._le(lo, mid) and checks._le(mid, hi)
    res = checks.bias_suite(args.count, args.seed)
    return res, res["ok"]


def cmd_tau(args):
    res = {}
    ok = True
    if args.M is not None:
        if args.M < 2:
            raise UsageError("--M must be >= 2")
        K = math.log2(args.M)
        if K >= ac.TAU_BRANCH_LOG2M:
            t = float(ac.solve_t_asymptotic(K))
            res.update(M=args.M, branch="asymptotic", t=t, tau=(1 + t) / 2)
        else:
            tau = ac.solve_tau(args.M)
            res.update(M=args.M, branch="direct", tau=tau, t=2 * tau - 1, residual=ac._tau_residual(tau, args.M))
    if args.m is not None:
        params = opt.MachineParams.for_m(args.m)
        res["optimizer"] = {"m": args.m, "log2M": params.log2M, "t": params.t, "t_decimal": float(params.t)}
    if args.r is not None:
        suite = checks.cube_suite(args.count, args.seed)
        res["cube_suite"] = suite
        ok &= suite["ok"]
    if not res:
        raise UsageError("give --M, --m or --r")
    return res, ok


def cmd_verify_a(args):
    if args.m < 2 or args.m % 2:
        raise UsageError("--m must be a positive even integer")
    if args.p is not None:
        _prime(args.p)
    res = checks.hypothesis_a_suite(args.m, args.p)
    return res, res["ok"]


def cmd_optimize(args):
    if args.m < 2 or args.m % 2:
        raise UsageError("--m must be a positive even integer")
    if not 0 < args.c0 < 1:
        raise UsageError("--c0 must lie in (0, 1)")
    result = opt.maximize_eps1(opt.MachineParams.for_m(args.m, args.c0))
    out = result.to_json()
    ok = True
    if result.optimum is not None:
        out["verified"] = opt.verify_tuple(result.params, result.optimum)
        ok = out["verified"]
    return out, ok


def sweep_csv(rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "eps1_sup_decimal", "eps1_sup_rational"])
    for m, r in rows:
        if r.eps1_sup is None:
            w.writerow([m, "nan", r.status])
        else:
            v = r.eps1_sup
            w.writerow([m, opt._dec(v), f"{v.numerator}/{v.denominator}"])
    return buf.getvalue()


def run_sweep(args):
    if args.grid is None:
        grid = opt.default_grid()
    else:
        start, stop, factor = args.grid
        if start <= 0 or factor <= 1 or start > stop:
            raise UsageError("grid must satisfy 0 < start <= stop and factor > 1")
        grid = opt.geometric_grid(start, stop, factor)
    if not grid:
        raise UsageError("empty grid")
    return opt.sweep_m(grid, args.c0)


def cmd_lemma9(args):
    _prime(args.p)
    res = checks.lemma9_suite(args.p, args.count, args.seed)
    return res, res["ok"]


def cmd_sums(args):
    _prime(args.p)
    res = checks.sums_suite(args.p, args.count, args.seed)
    return res, res["ok"]


COMMANDS = {
    "build": cmd_build,
    "gram-check": cmd_gram_check,
    "rip": cmd_rip,
    "flat-rip": cmd_flat_rip,
    "energy": cmd_energy,
    "bias": cmd_bias,
    "tau": cmd_tau,
    "verify-A": cmd_verify_a,
    "optimize": cmd_optimize,
    "lemma9-check": cmd_lemma9,
    "sums": cmd_sums,
}


def _emit(text, path):
    if path:
        io.write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    started = time.time()
    t0 = time.perf_counter()
    try:
        if args.command == "sweep":
            rows = run_sweep(args)
            _emit(sweep_csv(rows), args.out)
            return EXIT_OK
        result, ok = COMMANDS[args.command](args)
    except (UsageError, ChirpRipError) as exc:
        print(f"chirprip {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = io.envelope(args.command, _config(args), args.seed, result, started, time.perf_counter() - t0)
    report["ok"] = bool(ok)
    _emit(io.dumps(report), args.out)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
