"""The acceptance suite as plain functions, shared by ``gforge check`` and the tests."""

from __future__ import annotations

import contextlib
import filecmp
import io
import random
import tempfile
import time
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path

from .abelian import h1, h2_corroborate
from .constructions import (C_WORD, S_GROUP, check_Psi, check_psi, kernel_witness,
                            load_builtin, nielsen_orbit, psi, sigma_pair)
from .certificates import replay
from .fibre import emit_fibre, pipeline_input, toy_inputs, verify_subdirect
from .quotients import hom_search, quotient_sweep
from .rips import normality_certificates, pi0_freely_defined, rips_construct
from .smallcanc import verify_metric_condition
from .solvers import bounded_trivializer, britton_nf
from .words import Word, free_reduce, parse_word


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    elapsed: float
    limit: float
    detail: dict = field(default_factory=dict)

    @property
    def within_time(self) -> bool:
        return self.elapsed <= self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return (f"criterion {self.number} [{verdict}] {self.title}: "
                f"{self.elapsed:.2f}s (limit {self.limit:g}s)")

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "pass": self.ok,
                "checks_pass": self.passed, "elapsed_s": round(self.elapsed, 3),
                "limit_s": self.limit, "detail": self.detail}


def _timed(number, title, limit, fn, *args):
    t0 = time.perf_counter()
    passed, detail = fn(*args)
    return CriterionResult(number, title, bool(passed), time.perf_counter() - t0, limit, detail)


# --------------------------------------------------------------------- 1

def _homology():
    got = {n: str(h1(load_builtin(n))) for n in ("s", "b", "q", "lambda")}
    want = {"s": "Z", "b": "0", "q": "0", "lambda": "Z^5"}
    h2 = {n: h2_corroborate(load_builtin(n)).corroborated for n in ("b", "q")}
    return got == want and all(h2.values()), {"h1": got, "h2_corroborated": h2}


def criterion_1():
    return _timed(1, "homology", 1.0, _homology)


# --------------------------------------------------------------------- 2

def _random_word(rng, length):
    return Word([(rng.choice("at"), rng.choice((-3, -2, -1, 1, 2, 3))) for _ in range(length)])


def _britton_suite(samples: int, seed: int):
    detail = {}
    nf_c, _ = britton_nf(S_GROUP, C_WORD)
    detail["c != 1"] = bool(nf_c)
    detail["psi(c) = 1"] = not britton_nf(S_GROUP, psi()(C_WORD))[0]
    small, big = check_psi(), check_Psi()
    detail["psi well-defined"] = all(v is True for v in small.well_defined.values())
    detail["Psi well-defined"] = all(v is True for v in big.well_defined.values())
    detail["psi(t a t^-1 a^-1) = a"] = small.surjective.get("a") is True
    rng = random.Random(seed)
    r = S_GROUP.relator
    bad = 0
    agree = 0
    for i in range(samples):
        w = _random_word(rng, rng.randint(0, 10))
        nf, cert = britton_nf(S_GROUP, w)
        if replay(cert, w, S_GROUP) != nf or britton_nf(S_GROUP, nf)[0] != nf:
            bad += 1
        # insert a conjugate of the relator: same normal form
        c = _random_word(rng, rng.randint(0, 3))
        cut = rng.randint(0, len(w.runs))
        rel = r if rng.random() < 0.5 else r.inverse()
        w2 = Word(w.runs[:cut]).concat(c, rel, c.inverse(), Word(w.runs[cut:]))
        if britton_nf(S_GROUP, w2)[0] != nf:
            bad += 1
        # bounded search must never contradict Britton
        if i % 20 == 0:
            u = free_reduce(c.concat(rel, c.inverse()))
            found = bounded_trivializer(S_GROUP.presentation, u, 1, 500)
            if found is None or replay(found, u, S_GROUP.presentation):
                bad += 1
            found = bounded_trivializer(S_GROUP.presentation, w, 1, 500)
            if found is not None and nf:
                bad += 1
            agree += 2
    detail["random checks"] = 2 * samples + agree
    detail["inconsistencies"] = bad
    return all(v for k, v in detail.items() if isinstance(v, bool)) and bad == 0, detail


def criterion_2(samples: int = 10000, seed: int = 2024):
    return _timed(2, "Britton suite", 10.0, _britton_suite, samples, seed)


# --------------------------------------------------------------------- 3

def predicted_cyclic_homs(inv, p: int) -> int:
    """``|Hom(H1, Z/p)|`` from the abelian invariants."""
    out = p ** inv.free_rank
    for d in inv.torsion:
        out *= gcd(d, p)
    return out


def _quotients(max_degree: int, jobs: int):
    detail = {}
    sweeps = {n: quotient_sweep(load_builtin(n), max_degree, jobs=jobs) for n in ("b", "q")}
    for n, sw in sweeps.items():
        detail[f"{n}: nontrivial homs"] = sum(r.nontrivial for r in sw.reports)
        detail[f"{n}: complete"] = sw.complete
    s_sweep = quotient_sweep(load_builtin("s"), 3, jobs=jobs)
    detail["s: nontrivial found"] = s_sweep.nontrivial_found
    cyc = {}
    for n in ("s", "b", "q", "lambda"):
        p_ = load_builtin(n)
        inv = h1(p_)
        for p in (2, 3, 5):
            got = hom_search(p_, ("Z", p)).homs
            cyc[f"{n} Z/{p}"] = (got, predicted_cyclic_homs(inv, p))
    detail["cyclic counts (found, predicted)"] = cyc
    ok = (all(detail[f"{n}: nontrivial homs"] == 0 and detail[f"{n}: complete"] for n in ("b", "q"))
          and detail["s: nontrivial found"] and all(a == b for a, b in cyc.values()))
    return ok, detail


def criterion_3(max_degree: int = 5, jobs: int = 1):
    return _timed(3, "finite quotients", 600.0, _quotients, max_degree, jobs)


# --------------------------------------------------------------------- 4

def _rips():
    out = rips_construct(load_builtin("q"))  # uncached, so the timing is real
    rep = verify_metric_condition(out.presentation, 6)
    certs = normality_certificates(out)
    detail = {"generators": len(out.presentation.gens), "relators": len(out.presentation.rels),
              "params": {k: out.params[k] for k in ("block_length", "stride")},
              "ratio": rep.ratio, "metric pass": rep.passed,
              "pi0 freely defined": pi0_freely_defined(out),
              "normality certified": sum(1 for ok, _ in certs.values() if ok),
              "normality pairs": len(certs)}
    ok = rep.passed and detail["pi0 freely defined"] and \
        detail["normality certified"] == detail["normality pairs"]
    return ok, detail


def criterion_4():
    return _timed(4, "Rips construction", 60.0, _rips)


# --------------------------------------------------------------------- 5

def _fibre():
    detail = {}
    ok = True
    for kind, n_max in (("B", 3), ("A", 2)):
        for n in range(n_max + 1):
            inp = pipeline_input(kind, n)
            fp = emit_fibre(inp)  # raises if any relator fails certification
            sub = verify_subdirect(fp, inp)
            certified = len(fp.certificates) == len(fp.presentation.rels)
            detail[f"{kind}{n}"] = {"relators": len(fp.presentation.rels),
                                    "certified": certified, "subdirect": sub.passed}
            ok &= certified and sub.passed
    return ok, detail


def criterion_5():
    return _timed(5, "fibre soundness", 300.0, _fibre)


# --------------------------------------------------------------------- 6

def _toys():
    want = {"z2": ("Z^2", 2), "z": ("Z", 1)}
    detail = {}
    ok = True
    for name, inp in toy_inputs().items():
        fp = emit_fibre(inp)
        ab = str(h1(fp.presentation))
        counts = {p: hom_search(fp.presentation, ("Z", p)).homs for p in (2, 3)}
        exp_ab, rank = want[name]
        good = ab == exp_ab and all(counts[p] == p ** rank for p in (2, 3))
        detail[name] = {"h1": ab, "Z/p homs": counts, "pass": good}
        ok &= good
    return ok, detail


def criterion_6():
    return _timed(6, "toy completeness", 1.0, _toys)


# --------------------------------------------------------------------- 7

def _separation():
    results = {f"{n},{m}": kernel_witness(n, m).passed
               for m in range(1, 6) for n in range(m)}
    return all(results.values()), {"pairs": len(results),
                                   "failed": [k for k, v in results.items() if not v]}


def criterion_7():
    return _timed(7, "kernel separation", 5.0, _separation)


# --------------------------------------------------------------------- 8

def _nielsen():
    rep = nielsen_orbit([sigma_pair(n) for n in (0, 1, 2)], 8)
    merge = nielsen_orbit([(parse_word("t"), parse_word("a")),
                           (parse_word("t"), parse_word("t a"))], 1)
    detail = {"ball sizes": rep.sizes, "sigma merges": rep.merged,
              "(t,a)~(t,ta) at depth 1": merge.merged == [(0, 1)]}
    return not rep.merged and merge.merged == [(0, 1)], detail


def criterion_8():
    return _timed(8, "Nielsen corroboration", 120.0, _nielsen)


# --------------------------------------------------------------------- 9

def _determinism():
    from .cli import main
    with tempfile.TemporaryDirectory() as tmp:
        d1, d2 = Path(tmp, "run1"), Path(tmp, "run2")
        with contextlib.redirect_stdout(io.StringIO()):
            codes = [main(["pipeline", "B", "--n-max", "3", "-o", str(d)]) for d in (d1, d2)]
        files = sorted(p.name for p in d1.iterdir() if p.suffix in (".pres", ".embed"))
        match, mismatch, errors = filecmp.cmpfiles(d1, d2, files, shallow=False)
    return codes == [0, 0] and len(files) == 8 and not mismatch and not errors, \
        {"exit codes": codes, "files": files, "mismatch": mismatch}


def criterion_9():
    return _timed(9, "determinism", 600.0, _determinism)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}
