"""Command-line entry point: ``exco2 <command> ...``.

Every command prints a JSON report (or writes it to ``--out``).  Exact values
are fraction strings.  With ``--plot DIR`` the commands that produce a series
also write a PNG figure and a TSV of the plotted data into DIR.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .constructions import NAMES, blow_up, build_Dstar, build_K, build_named, sweep_gstar
from .core import co2, normalizer, read_hg, write_hg
from .densities import co2_decomposition, count_copies, count_induced, normalized_co2
from .errors import Exco2Error
from .search import (
    DEFAULT_MAX_N,
    INDUCED,
    SUBGRAPH,
    ForbiddenFamily,
    argmax_cycle_cover,
    dstar_strictly_first,
    exco2_exact,
    monotonicity_report,
)

PATTERN_ALIASES = {"F4", "F5", "F33"}


class Report:
    def __init__(self, argv, threads):
        self.data = {"command": list(argv), "inputs": {}, "results": {}, "threads": threads}
        self.start = time.perf_counter()

    def digest(self, path):
        self.data["inputs"][str(path)] = hashlib.sha256(Path(path).read_bytes()).hexdigest()

    def __setitem__(self, key, value):
        self.data["results"][key] = value

    def dump(self, out):
        self.data["wall_time"] = round(time.perf_counter() - self.start, 3)
        text = json.dumps(self.data, indent=1, sort_keys=True) + "\n"
        if out:
            Path(out).write_text(text)
        else:
            sys.stdout.write(text)


def _frac(x) -> str:
    return str(Fraction(x))


def _load(path, report):
    report.digest(path)
    return read_hg(path)


def _forbidden(spec: str | None, mode: str, report) -> ForbiddenFamily:
    """Comma-separated .hg files; F4, F5, F33 and K<l> name the built-in patterns."""
    if not spec:
        return ForbiddenFamily()
    pats = []
    for tok in (s.strip() for s in spec.split(",")):
        if not tok:
            continue
        if Path(tok).is_file():
            pats.append(_load(tok, report))
        elif tok in PATTERN_ALIASES:
            pats.append(build_named(tok))
        elif tok[:1] == "K" and tok[1:].isdigit():
            pats.append(build_K(int(tok[1:])))
        else:
            raise FileNotFoundError(f"no such pattern file: {tok}")
    return ForbiddenFamily.of(*pats, mode=mode)


def _plot_dir(args) -> Path | None:
    if not args.plot:
        return None
    d = Path(args.plot)
    d.mkdir(parents=True, exist_ok=True)
    return d


# -- commands ----------------------------------------------------------------


def cmd_construct(args, report):
    if args.name == "list":
        report["constructions"] = dict(NAMES)
        return
    G = build_named(args.name, args.n, args.k)
    if args.t and args.t > 1:
        G = blow_up(G, args.t)
    if args.hg_out:
        write_hg(G, args.hg_out)
        report["file"] = args.hg_out
    report["n"], report["k"], report["edges"] = G.n, G.k, G.num_edges
    report["co2"] = str(co2(G))


def cmd_co2(args, report):
    G = _load(args.input, report)
    report["n"], report["k"], report["edges"] = G.n, G.k, G.num_edges
    report["value"] = str(co2(G))
    if args.normalized:
        report["normalized"] = _frac(normalized_co2(G))
    if args.decompose:
        dec = co2_decomposition(G)
        report["decomposition"] = {"N": list(dec.profile.as_tuple()), "rhs": str(dec.rhs), "holds": dec.holds}


def cmd_density(args, report):
    host, pat = _load(args.host, report), _load(args.pattern, report)
    if args.copies:
        report["copies"] = str(count_copies(pat, host))
    else:
        from math import comb

        c = count_induced(pat, host)
        report["induced"] = str(c)
        report["density"] = _frac(Fraction(c, comb(host.n, pat.n)))


def _max_n(args):
    return args.n if args.unsafe_large else DEFAULT_MAX_N


def cmd_search_exco2(args, report):
    fam = _forbidden(args.forbid, args.mode, report)
    res = exco2_exact(args.n, fam, k=3, max_n=max(_max_n(args), DEFAULT_MAX_N), threads=args.threads)
    report["n"], report["value"] = res.n, str(res.value)
    report["normalized"] = _frac(res.normalized)
    report["classes"], report["visited"] = res.classes, res.visited
    files = []
    if args.emit_maximizers:
        d = Path(args.emit_maximizers)
        d.mkdir(parents=True, exist_ok=True)
        for i, G in enumerate(res.maximizers):
            p = d / f"max_n{res.n}_{i}.hg"
            write_hg(G, p)
            files.append(str(p))
    report["maximizers"] = files or [[list(e) for e in G.edges] for G in res.maximizers]


def cmd_search_monotonicity(args, report):
    fam = _forbidden(args.forbid, args.mode, report)
    ns = range(args.n_min, args.n_max + 1)
    rep = monotonicity_report(ns, fam, k=3, max_n=max(args.n_max if args.unsafe_large else DEFAULT_MAX_N,
                                                      DEFAULT_MAX_N), threads=args.threads)
    rows = [[r.n, str(r.value), _frac(r.normalized), r.classes] for r in rep.rows]
    report["rows"] = [dict(zip(("n", "value", "normalized", "classes"), r)) for r in rows]
    report["non_increasing"] = rep.non_increasing
    d = _plot_dir(args)
    if d:
        from .plotting import plot_series, write_tsv

        write_tsv(d / "monotonicity.tsv", ["n", "exco2", "normalized", "classes"], rows)
        plot_series([r.n for r in rep.rows], [float(v) for v in rep.values], d / "monotonicity.png",
                    label="exco2 / normaliser")
        report["figures"] = [str(d / "monotonicity.png")]


def cmd_search_argmax(args, report):
    scores = argmax_cycle_cover(args.k, args.n)
    rows = [["+".join(map(str, s.cover.cycle_type())), str(s.value), s.is_dstar] for s in scores]
    report["ranking"] = [dict(zip(("cycle_type", "co2", "is_dstar"), r)) for r in rows]
    report["dstar_strictly_first"] = dstar_strictly_first(scores)
    d = _plot_dir(args)
    if d:
        from .plotting import plot_ranking, write_tsv

        write_tsv(d / f"argmax_k{args.k}.tsv", ["cycle_type", "co2", "is_dstar"], rows)
        plot_ranking([r[0] for r in rows], [s.value for s in scores], d / f"argmax_k{args.k}.png",
                     highlight=next((i for i, s in enumerate(scores) if s.is_dstar), None),
                     title=f"k={args.k}, n={args.n}")
        report["figures"] = [str(d / f"argmax_k{args.k}.png")]


def cmd_search_sweep(args, report):
    rows = sweep_gstar(args.k, args.n, args.step)
    denom = normalizer(args.n, 3)
    best = max(rows, key=lambda r: r[1])
    report["rows"] = [{"last3": s, "co2": str(v), "normalized": _frac(Fraction(v, denom))} for s, v in rows]
    report["best"] = {"last3": best[0], "co2": str(best[1])}
    d = _plot_dir(args)
    if d:
        from .plotting import plot_series, write_tsv

        write_tsv(d / f"sweep_k{args.k}.tsv", ["last3", "co2", "normalized"],
                  [[s, v, _frac(Fraction(v, denom))] for s, v in rows])
        plot_series([s for s, _ in rows], [v / denom for _, v in rows], d / f"sweep_k{args.k}.png",
                    title=f"G(D*_{args.k}), n={args.n}")
        report["figures"] = [str(d / f"sweep_k{args.k}.png")]


def cmd_search_convergence(args, report):
    ns = list(range(args.n_min, args.n_max + 1, args.step))
    vals = []
    for n in ns:
        vals.append(normalized_co2(build_named(args.name, n, args.k)))
    report["rows"] = [{"n": n, "normalized": _frac(v)} for n, v in zip(ns, vals)]
    d = _plot_dir(args)
    if d:
        from .plotting import plot_series, write_tsv

        write_tsv(d / f"convergence_{args.name}.tsv", ["n", "normalized", "float"],
                  [[n, _frac(v), f"{float(v):.8f}"] for n, v in zip(ns, vals)])
        limit = float(Fraction(args.limit)) if args.limit else None
        plot_series(ns, [float(v) for v in vals], d / f"convergence_{args.name}.png", label=args.name, limit=limit)
        report["figures"] = [str(d / f"convergence_{args.name}.png")]


def _flag_problem(args, report):
    from .flagsdp import FlagProblem

    fam = _forbidden(args.forbid, args.mode, report)
    prob = FlagProblem.build(args.N, fam, args.target, threads=args.threads)
    report["N"], report["admissibles"] = args.N, len(prob.basis)
    report["types"] = [{"id": t.id, "t": t.t, "flags": len(t)} for t in prob.tafs]
    return prob


def cmd_flag_emit(args, report):
    from .flagsdp import emit_sdp

    prob = _flag_problem(args, report)
    emit_sdp(prob, args.sdp_out, precision=args.precision)
    report["file"] = args.sdp_out


def cmd_flag_verify(args, report):
    from .certificate import Certificate, verify_certificate

    prob = _flag_problem(args, report)
    report.digest(args.cert)
    lam = verify_certificate(prob, Certificate.load(args.cert), seed=args.seed)
    report["verified"] = True
    report["lambda"] = _frac(lam)


def cmd_flag_solve(args, report):
    from .certificate import round_certificate, verify_certificate
    from .flagsdp import solve_flag_problem

    prob = _flag_problem(args, report)
    res = solve_flag_problem(prob, path=args.sdp_out, precision=args.precision)
    report["solver_status"] = res.status
    report["numeric_bound"] = repr(-res.value)
    cert = round_certificate(prob, res, digits=args.digits)
    try:
        lam = verify_certificate(prob, cert, seed=args.seed)
        report["verified"], report["lambda"] = True, _frac(lam)
        report["lambda_float"] = repr(float(lam))
    except Exco2Error as exc:
        report["verified"], report["rejection"] = False, str(exc)
    if args.cert_out:
        cert.save(args.cert_out)
        report["certificate"] = args.cert_out


# -- parser --------------------------------------------------------------------


def _common(p, out=True):
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--plot", default=argparse.SUPPRESS, help="directory for figures and TSV tables")
    if out:
        p.add_argument("--out", dest="report_out", default=argparse.SUPPRESS, help="write the JSON report here")


def _search_opts(p, n=True):
    if n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--forbid", default="", help="comma-separated .hg files (or F4, F5, F33, K4, ...)")
    p.add_argument("--mode", choices=(SUBGRAPH, INDUCED), default=SUBGRAPH)
    p.add_argument("--unsafe-large", action="store_true", help=f"allow generation beyond n={DEFAULT_MAX_N}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exco2", description="codegree squared extremal numbers of 3-graphs")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--plot", default=None, help="directory for figures and TSV tables")
    ap.add_argument("--out", dest="report_out", default=None, help="write the JSON report here")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a named construction")
    p.add_argument("name", help="construction name, or 'list'")
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int, help="blow-up factor")
    p.add_argument("--k", type=int)
    p.add_argument("--out", dest="hg_out", help="write the graph as .hg")
    p.add_argument("--report", dest="report_out", default=argparse.SUPPRESS)
    _common(p, out=False)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("co2", help="codegree squared sum of a graph file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--decompose", action="store_true")
    p.add_argument("--normalized", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_co2)

    p = sub.add_parser("density", help="induced or non-induced pattern counts")
    p.add_argument("--host", required=True)
    p.add_argument("--pattern", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--induced", action="store_true", default=True)
    g.add_argument("--copies", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_density)

    sp = sub.add_parser("search", help="exhaustive search and construction comparisons").add_subparsers(
        dest="search_command", required=True)
    p = sp.add_parser("exco2")
    _search_opts(p)
    p.add_argument("--emit-maximizers", metavar="DIR")
    _common(p)
    p.set_defaults(func=cmd_search_exco2)

    p = sp.add_parser("monotonicity")
    _search_opts(p, n=False)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_search_monotonicity)

    p = sp.add_parser("argmax", help="rank cycle covers by co2 of their construction")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _common(p)
    p.set_defaults(func=cmd_search_argmax)

    p = sp.add_parser("sweep", help="co2 of G(D*_k) over the two-block weighting")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_search_sweep)

    p = sp.add_parser("convergence", help="normalised co2 of a construction over a range of n")
    p.add_argument("--name", required=True, choices=sorted(NAMES))
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--k", type=int)
    p.add_argument("--limit", help="reference value drawn on the figure, e.g. 1/3")
    _common(p)
    p.set_defaults(func=cmd_search_convergence)

    fp = sub.add_parser("flag", help="flag-algebra programs and certificates").add_subparsers(
        dest="flag_command", required=True)
    for name, func in (("emit", cmd_flag_emit), ("verify", cmd_flag_verify), ("solve", cmd_flag_solve)):
        p = fp.add_parser(name)
        p.add_argument("--forbid", default="")
        p.add_argument("--mode", choices=(SUBGRAPH, INDUCED), default=SUBGRAPH)
        p.add_argument("--N", type=int, default=6, choices=(4, 5, 6))
        p.add_argument("--target", default="co2", choices=("co2", "edges"))
        if name == "emit":
            p.add_argument("--out", dest="sdp_out", required=True, help="SDPA sparse output file")
            p.add_argument("--precision", type=int, default=17)
            p.add_argument("--report", dest="report_out", default=argparse.SUPPRESS)
            _common(p, out=False)
        else:
            _common(p)
        if name == "verify":
            p.add_argument("--cert", required=True)
        if name == "solve":
            p.add_argument("--sdp-out", help="keep the emitted SDPA file")
            p.add_argument("--precision", type=int, default=17)
            p.add_argument("--digits", type=int, default=9, help="decimal digits kept when rounding")
            p.add_argument("--cert-out", help="write the rounded certificate")
        p.set_defaults(func=func)
    return ap


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = Report(argv, args.threads)
    try:
        args.func(args, report)
    except (Exco2Error, OSError) as exc:
        print(f"exco2: error: {exc}", file=sys.stderr)
        return 1
    report.dump(args.report_out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
