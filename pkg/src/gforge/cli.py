"""``gforge`` command line.  Exit codes: 0 all checks pass, 1 a check failed, 2 usage error."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .abelian import h1, h2_corroborate
from .constructions import (BUILTINS, build, builtin_text, kernel_witness, load_builtin,
                            nielsen_orbit, sigma_pair)
from .quotients import default_jobs, quotient_sweep
from .solvers import (BrittonSolver, GraphGroup, GraphSolver, PresentationSolver,
                      _bs_shape)
from .smallcanc import DehnSolver, SymmetrizedSet, UnverifiedPresentation, verify_metric_condition
from .words import (ParseError, Presentation, parse_genmap, parse_presentation, parse_word,
                    print_genmap, print_presentation)

JSON_SCHEMA = "gforge-report/1"


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _read_pres(args) -> Presentation:
    if getattr(args, "builtin", None):
        if args.builtin.lower() not in BUILTINS:
            raise UsageError(f"unknown builtin {args.builtin!r}")
        p = load_builtin(args.builtin)
    elif not getattr(args, "pres", None):
        raise UsageError("give a presentation file or --builtin NAME")
    else:
        p = _load_file(args.pres)
    args.input_digest = _digest(print_presentation(p))
    return p


def _load_file(path: str) -> Presentation:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_presentation(text)


def _emit(args, report: dict, text: str) -> None:
    if getattr(args, "json", False):
        report = {"schema": JSON_SCHEMA, "version": __version__, **report}
        if getattr(args, "input_digest", None):
            report["input_digest"] = args.input_digest
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def choose_solver(p: Presentation, backend: str = "auto", budget: int = 3):
    """Pick a word-problem backend: Britton, graph, Dehn or bounded search."""
    if backend in ("auto", "britton") and len(p.gens) == 2 and len(p.rels) == 1:
        found = _bs_shape(p.rels[0])
        if found is not None:
            g = found[0]
            if {g.a, g.t} == set(p.gens):
                return BrittonSolver(g)
    if backend == "britton":
        raise UsageError("presentation is not a one-relator Baumslag-Solitar group")
    if backend in ("auto", "graph"):
        try:
            return GraphSolver(GraphGroup.from_presentation(p))
        except ValueError:
            if backend == "graph":
                raise UsageError("presentation is not a graph group") from None
    if backend in ("auto", "dehn") and p.rels:
        sym = SymmetrizedSet(p)
        if verify_metric_condition(sym, 6).passed:
            return DehnSolver(sym)
        if backend == "dehn":
            raise UsageError("presentation fails C'(1/6); Dehn's algorithm is not valid")
    if backend == "dehn":
        raise UsageError("no relators")
    return PresentationSolver(p, budget=budget)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# ------------------------------------------------------------------ commands

def cmd_build(args) -> int:
    sys_ = build(args.name)
    text = builtin_text(args.name)
    if args.output:
        Path(args.output).write_text(text)
    report = {"command": "build", "name": args.name,
              "generators": list(sys_.presentation.gens),
              "relators": [str(r) for r in sys_.presentation.rels],
              "elements": {k: str(v) for k, v in sys_.elements.items()},
              "maps": {k: {g: str(w) for g, w in m.images.items()} for k, m in sys_.maps.items()},
              "notes": sys_.notes}
    _emit(args, report, text.rstrip() if not args.output else f"wrote {args.output}")
    return 0


def cmd_wp(args) -> int:
    p = _read_pres(args)
    w = parse_word(args.word, p.gens)
    solver = choose_solver(p, args.backend, args.budget)
    ok, cert = solver.is_trivial(w)
    verdict = {True: "trivial", False: "non-trivial", None: "unknown"}[ok]
    if args.cert_out and cert is not None:
        Path(args.cert_out).write_text(cert.to_text())
    report = {"command": "wp", "word": str(w), "backend": solver.tag, "verdict": verdict,
              "certificate_steps": len(cert) if cert is not None else 0}
    _emit(args, report, verdict)
    return 0 if ok is not None else 1


def cmd_smallcanc(args) -> int:
    p = _read_pres(args)
    rep = verify_metric_condition(p, args.lam)
    d = rep.as_dict()
    as_json = args.json or args.report == "json"
    if as_json:
        args.json = True
    text = (f"C'(1/{args.lam}): {'pass' if rep.passed else 'fail'}  "
            f"max piece {rep.max_piece}, min relator {rep.min_relator_length}, "
            f"ratio {rep.ratio:.4f}")
    if rep.witness and not rep.passed:
        text += f"\nwitness piece: {rep.witness['piece']}"
    _emit(args, {"command": "smallcanc", **d}, text)
    return 0 if rep.passed else 1


def cmd_h1(args) -> int:
    p = _read_pres(args)
    inv = h1(p)
    h2 = h2_corroborate(p)
    text = "trivial" if inv.is_trivial else str(inv)
    if h2.corroborated:
        text += "\nH2: balanced presentation with trivial H1, so H2 = 0"
    report = {"command": "h1", "free_rank": inv.free_rank, "torsion": list(inv.torsion),
              "trivial": inv.is_trivial, "h2": h2.as_dict()}
    _emit(args, report, text)
    return 0


def cmd_quotients(args) -> int:
    p = _read_pres(args)
    jobs = args.jobs or default_jobs()
    sweep = quotient_sweep(p, args.max_degree, args.max_cyclic, jobs=jobs)
    lines = [f"{'target':>6} {'homs':>10} {'nontrivial':>10} {'classes':>8} {'status'}"]
    for r in sweep.reports:
        lines.append(f"{r.target:>6} {r.homs:>10} {r.nontrivial:>10} "
                     f"{r.class_collapsed_homs:>8} {r.status}")
    lines.append(sweep.verdict)
    _emit(args, {"command": "quotients", "jobs": jobs, **sweep.as_dict()}, "\n".join(lines))
    return 0 if sweep.complete else 1


def cmd_rips(args) -> int:
    from .rips import EscalationCapReached, rips_construct
    p = _read_pres(args)
    try:
        out = rips_construct(p, args.block_length, args.stride, max_attempts=args.max_attempts)
    except EscalationCapReached as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    src = args.pres or f"{args.builtin}.pres"
    if args.output:
        Path(args.output).write_text(print_presentation(out.presentation))
    if args.map_out:
        Path(args.map_out).write_text(
            print_genmap(out.pi0, args.output or "gamma.pres", src))
    text = (f"{len(out.presentation.gens)} generators, {len(out.presentation.rels)} relators, "
            f"L={out.params['block_length']}, stride={out.params['stride']}, "
            f"piece ratio {out.report.ratio:.4f}")
    _emit(args, {"command": "rips", **out.as_dict()}, text)
    return 0


def cmd_fibre(args) -> int:
    from .fibre import FibreInput, emit_fibre, print_embedding, verify_subdirect
    paths = {}

    def resolve(path):
        key = str(Path(path))
        if key not in paths:
            paths[key] = _load_file(path)
        return paths[key]

    gamma, gamma2, q = resolve(args.gamma), resolve(args.gamma2), resolve(args.q)
    f1 = parse_genmap(Path(args.f1).read_text(), lambda s: resolve(_rel(args.f1, s)))
    f2 = parse_genmap(Path(args.f2).read_text(), lambda s: resolve(_rel(args.f2, s)))
    kernel = tuple(k for k in args.kernel.split(",") if k)
    for k in kernel:
        if k not in gamma.gens:
            raise UsageError(f"kernel generator {k!r} is not a generator of Gamma")
        if f1[k]:
            raise UsageError(f"f1 does not kill kernel generator {k!r}")
    kd = kernel_data_from(gamma, q, kernel)
    inp = FibreInput(kd, gamma2, choose_solver(gamma2), f2, q_solver=PresentationSolver(q),
                     name=Path(args.output).stem if args.output else "P")
    fp = emit_fibre(inp)
    sub = verify_subdirect(fp, inp)
    if args.output:
        Path(args.output).write_text(print_presentation(fp.presentation))
    if args.embed_out:
        Path(args.embed_out).write_text(print_embedding(fp))
    report = {"command": "fibre", "generators": list(fp.presentation.gens),
              "relators": len(fp.presentation.rels), "provenance": fp.provenance,
              "subdirect": sub.as_dict()}
    _emit(args, report, print_presentation(fp.presentation).rstrip()
          + f"\nsubdirect: {'pass' if sub.passed else 'fail'}")
    return 0 if sub.passed else 1


def _rel(base: str, path: str) -> str:
    p = Path(path)
    return str(p if p.is_absolute() or p.exists() else Path(base).parent / p)


def kernel_data_from(gamma: Presentation, q: Presentation, kernel: tuple):
    """Read the conjugation table and relator blocks off the relators of ``gamma``."""
    from .fibre import KernelData
    from .words import Word, erase, free_reduce
    K = set(kernel)
    table = {}
    for r in gamma.rels:
        for rr in (r, r.inverse()):
            letters = rr.letters()
            n = len(letters)
            for o in range(n):
                rot = letters[o:] + letters[:o]
                if n < 3:
                    break
                (x, s), (k, e), (x2, s2) = rot[0], rot[1], rot[2]
                rest = rot[3:]
                if x in K or k not in K or x2 != x or s2 != -s:
                    continue
                if any(g not in K for g, _ in rest):
                    continue
                # x^s k^e x^-s = rest^-1
                img = Word.from_letters(rest).inverse()
                table.setdefault((x, k, s), img if e == 1 else img.inverse())
    blocks = []
    for rq in q.rels:
        found = None
        for r in gamma.rels:
            if free_reduce(erase(r, kernel)) != rq:
                continue
            head = Word(r.runs[:len(rq.runs)])
            if head == rq and all(g in K for g, _ in r.runs[len(rq.runs):]):
                found = Word(r.runs[len(rq.runs):]).inverse()
                break
        blocks.append(found)
    sym = SymmetrizedSet(gamma) if gamma.rels else None
    if sym is not None and verify_metric_condition(sym, 6).passed:
        dehn = DehnSolver(sym)
        from .smallcanc import shortword_nontrivial
        return KernelData(gamma, q, kernel, table, blocks, dehn,
                          lambda w: shortword_nontrivial(dehn, w), "dehn")
    from .fibre import quotient_nontrivial
    return KernelData(gamma, q, kernel, table, blocks, PresentationSolver(gamma),
                      quotient_nontrivial(gamma), "bounded")


def cmd_pipeline(args) -> int:
    from .fibre import (dump_json, emit_fibre, pipeline_input, print_embedding, series_report)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    all_ok = True
    for n in range(args.n_max + 1):
        t0 = time.perf_counter()
        inp = pipeline_input(args.kind, n)
        fp = emit_fibre(inp)
        pres_text = print_presentation(fp.presentation)
        embed_text = print_embedding(fp)
        (out / f"P{n}.pres").write_text(pres_text)
        (out / f"P{n}.embed").write_text(embed_text)
        rep = series_report(args.kind, n, inp, fp)
        rep["digests"] = {"presentation": _digest(pres_text), "embedding": _digest(embed_text)}
        rep["elapsed_s"] = round(time.perf_counter() - t0, 3)
        (out / f"P{n}.json").write_text(dump_json(rep))
        ok = rep["certified"] and rep["subdirect"]["pass"]
        all_ok &= ok
        summary.append({"n": n, "generators": rep["generators"], "relators": rep["relators"],
                        "pass": ok})
    lines = [f"P{s['n']}: {s['generators']} generators, {s['relators']} relators, "
             f"{'pass' if s['pass'] else 'FAIL'}" for s in summary]
    _emit(args, {"command": "pipeline", "kind": args.kind, "series": summary},
          "\n".join(lines) + f"\nwritten to {out}/")
    return 0 if all_ok else 1


def cmd_witness(args) -> int:
    try:
        rep = kernel_witness(args.n, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    d = rep.as_dict()
    text = (f"u_{args.n} = {rep.word}\nq_{args.n}(u) = c: {rep.image_n_is_c}\n"
            f"q_{args.m}(u) = 1: {rep.image_m_trivial}\nc != 1: {rep.c_nontrivial}\n"
            f"{'pass' if rep.passed else 'FAIL'}")
    _emit(args, {"command": "witness", **d}, text)
    return 0 if rep.passed else 1


def cmd_nielsen(args) -> int:
    idx = [int(x) for x in args.pairs.split(",") if x]
    rep = nielsen_orbit([sigma_pair(i) for i in idx], args.depth)
    merged = [(idx[i], idx[j]) for i, j in rep.merged]
    text = (f"depth {args.depth}: ball sizes {dict(zip(idx, rep.sizes))}; "
            + (f"merged {merged}" if merged else "pairwise disjoint"))
    d = rep.as_dict()
    d["merged_pairs"] = [list(m) for m in merged]
    _emit(args, {"command": "nielsen", "pairs": idx, **d}, text)
    return 0


def builtin_round_trip() -> dict:
    """Parse every builtin file and check that printing and re-parsing is stable."""
    out = {}
    for name in sorted(BUILTINS):
        try:
            p = parse_presentation(builtin_text(name))
            again = parse_presentation(print_presentation(p))
            out[name] = again.structurally_equal(p) and bool(p.gens)
        except ParseError:
            out[name] = False
    return out


def cmd_check(args) -> int:
    from .acceptance import CRITERIA, criterion_3
    only = [int(x) for x in args.only.split(",")] if args.only else sorted(CRITERIA)
    builtins = builtin_round_trip()
    if not all(builtins.values()):
        bad = [k for k, v in builtins.items() if not v]
        if args.json:
            _emit(args, {"command": "check", "pass": False, "builtins": builtins}, "")
        else:
            print(f"builtin round trip [FAIL]: {', '.join(bad)}")
        return 1
    results = []
    for n in only:
        if n not in CRITERIA:
            raise UsageError(f"no criterion {n}")
        if n == 3:
            res = criterion_3(args.max_degree, args.jobs or default_jobs())
        else:
            res = CRITERIA[n]()
        results.append(res)
        if not args.json:
            print(res.line(), flush=True)
        if not res.ok and not args.keep_going:
            break
    ok = all(r.ok for r in results) and len(results) == len(only)
    if args.json:
        _emit(args, {"command": "check", "pass": ok, "builtins": builtins,
                     "criteria": [r.as_dict() for r in results]}, "")
    else:
        print(f"{sum(r.ok for r in results)}/{len(only)} criteria pass")
    return 0 if ok else 1


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _pres_args(p):
    p.add_argument("pres", nargs="?", help="presentation file")
    p.add_argument("--builtin", help="one of " + ", ".join(sorted(BUILTINS)))


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gforge", description=__doc__.split(".")[0])
    ap.add_argument("--version", action="version", version=f"gforge {__version__}")
    ap.add_argument("--json", action="store_true", help="machine-readable report")
    ap.add_argument("--jobs", type=int, default=None, help="worker processes (default GFORGE_JOBS)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
        p.set_defaults(func=func)
        return p

    p = add("build", cmd_build, "write a builtin presentation")
    p.add_argument("name", choices=sorted(BUILTINS))
    p.add_argument("-o", "--output")

    p = add("wp", cmd_wp, "decide or certify triviality of a word")
    _pres_args(p)
    p.add_argument("--word", required=True)
    p.add_argument("--backend", default="auto",
                   choices=["auto", "britton", "graph", "dehn", "bounded"])
    p.add_argument("--budget", type=int, default=3)
    p.add_argument("--cert-out")

    p = add("smallcanc", cmd_smallcanc, "check the metric small cancellation condition")
    _pres_args(p)
    p.add_argument("--lambda", dest="lam", type=int, default=6)
    p.add_argument("--report", choices=["text", "json"], default="text")

    p = add("h1", cmd_h1, "abelianization")
    _pres_args(p)

    p = add("quotients", cmd_quotients, "count homomorphisms to S_k and Z/n")
    _pres_args(p)
    p.add_argument("--max-degree", type=int, default=5)
    p.add_argument("--max-cyclic", type=int, default=12)

    p = add("rips", cmd_rips, "Rips construction")
    _pres_args(p)
    p.add_argument("--block-length", type=int, default=10)
    p.add_argument("--stride", type=int)
    p.add_argument("--max-attempts", type=int, default=6)
    p.add_argument("-o", "--output")
    p.add_argument("--map-out")

    p = add("fibre", cmd_fibre, "fibre product presentation")
    for flag in ("--gamma", "--gamma2", "--q", "--f1", "--f2"):
        p.add_argument(flag, required=True)
    p.add_argument("--kernel", required=True, help="comma-separated kernel generators")
    p.add_argument("-o", "--output")
    p.add_argument("--embed-out")

    p = add("pipeline", cmd_pipeline, "emit the series P_0..P_N")
    p.add_argument("kind", choices=["A", "B", "a", "b"])
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("-o", "--output", required=True)

    p = add("witness", cmd_witness, "kernel-separating witness for q_n, q_m")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("nielsen", cmd_nielsen, "bounded Nielsen exploration of (t, a^(2^n))")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--pairs", default="0,1,2")

    p = add("check", cmd_check, "run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--max-degree", type=int, default=5)
    p.add_argument("--keep-going", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        print("gforge: error: --jobs must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, ParseError, UnverifiedPresentation, KeyError) as exc:
        print(f"gforge: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"gforge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
