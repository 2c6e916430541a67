"""Presentations of fibre products ``P = {(x, y) : pi0(x) = f2(y)}``.

Input: ``pi0 : Gamma -> Q`` with kernel generated by finitely many letters
``A`` and a known conjugation action, plus ``f2 : Gamma2 -> Q``.  Output: a
finite presentation of ``P`` with generators

* ``n_<k>`` embedded as ``(k, 1)`` for ``k`` in ``A``,
* ``d_<y>`` embedded as ``(lift(y), y)`` for each generator ``y`` of ``Gamma2``,
* ``e_<x>`` embedded as ``(x, aux(x))`` for the optional auxiliary lifts,

and relators in three families (R1 lifted relators of ``Gamma2``, R2 the
action of lifts on the kernel, R3 a caller hook).  Each relator is certified
trivial in both coordinates before it is emitted.

Kernel elements are kept as products of conjugates ``E(c) U E(c)^-1``: writing
them over ``A`` alone costs a factor of a block-word length per conjugating
letter, so only single-letter conjugators are expanded.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .certificates import Certificate
from .rips import RipsOutput, conjugate_kernel_word, rips_construct
from .smallcanc import shortword_nontrivial
from .solvers import GraphSolver, PresentationSolver
from .words import (GenMap, Presentation, Word, cyclic_reduce, erase, free_reduce,
                    parse_word, same_relator, substitute_images)


class CertificationError(RuntimeError):
    def __init__(self, message: str, relator: Word | None = None, detail=None):
        super().__init__(message)
        self.relator = relator
        self.detail = detail


class NeedsVanKampen(ValueError):
    """No relator certificate was found for the kernel-erased word in Q."""


@dataclass
class KernelData:
    """The ``Gamma`` side: presentation, kernel letters and their bookkeeping."""

    presentation: Presentation
    base: Presentation
    kernel: tuple[str, ...]
    conj_table: dict  # (x, k, sign) -> kernel word for x^sign k x^-sign
    relator_kernel: list  # U_i with r_i = U_i in Gamma, or None if unknown
    solver: object
    nontrivial: Callable[[Word], object]
    tag: str = "dehn"

    @classmethod
    def from_rips(cls, out: RipsOutput) -> "KernelData":
        dehn = out.dehn()
        return cls(out.presentation, out.base, out.kernel, out.conj_table,
                   list(out.relator_blocks), dehn,
                   lambda w: shortword_nontrivial(dehn, w), "dehn")

    @property
    def xgens(self) -> tuple[str, ...]:
        return tuple(g for g in self.presentation.gens if g not in self.kernel)


@dataclass
class FibreInput:
    gamma: KernelData
    gamma2: Presentation
    backend2: object
    f2: GenMap
    lifts: dict[str, Word] = field(default_factory=dict)
    aux: dict[str, Word] = field(default_factory=dict)
    q_solver: object = None
    hook: Callable[["FibreInput"], list] | None = None
    name: str = "P"

    def __post_init__(self):
        for y in self.gamma2.gens:
            self.lifts.setdefault(y, self.f2[y])
        if self.q_solver is None:
            self.q_solver = PresentationSolver(self.gamma.base)


@dataclass
class FibrePresentation:
    presentation: Presentation
    embedding: dict[str, tuple[Word, Word]]
    provenance: list[str]
    certificates: list[tuple] = field(default_factory=list)

    def first(self, w: Word) -> Word:
        return free_reduce(substitute_images({g: v[0] for g, v in self.embedding.items()}, w))

    def second(self, w: Word) -> Word:
        return free_reduce(substitute_images({g: v[1] for g, v in self.embedding.items()}, w))


# ------------------------------------------------------------- kernel terms

def kernel_decompose(inp: FibreInput, w: Word) -> list[tuple[Word, Word]]:
    """Terms ``(c, U)`` with ``w = prod c U c^-1`` in ``Gamma`` and each ``U`` a kernel word."""
    K = inp.gamma.kernel
    terms = []
    prefix: list = []
    for g, e in w.runs:
        if g in K:
            terms.append((free_reduce(Word(prefix)), Word.gen(g, e)))
        else:
            prefix.append((g, e))
    skeleton = free_reduce(Word(prefix))
    if skeleton:
        ok, cert = inp.q_solver.is_trivial(skeleton)
        if not ok:
            raise NeedsVanKampen(f"no relator certificate for {skeleton} in Q")
        product = Word()
        for step in cert.steps:
            if step[0] == "free-cancel":
                continue
            if step[0] != "relator-apply":
                raise NeedsVanKampen(f"unsupported certificate step {step[0]}")
            _, idx, sign, c = step
            r = inp.gamma.base.rels[idx]
            U = inp.gamma.relator_kernel[idx]
            if U is None:
                raise NeedsVanKampen(f"no kernel word recorded for relator {idx} of Q")
            if sign < 0:
                r, U = r.inverse(), U.inverse()
            terms.append((c, U))
            product = product.concat(c, r, c.inverse())
        assert free_reduce(product) == skeleton, "relator certificate does not factor the word"
    return terms


def kernel_express(inp: FibreInput, w: Word, max_length: int = 10 ** 6) -> Word:
    """A word over the kernel generators equal to ``w`` in ``Gamma``."""
    out = Word()
    for c, U in kernel_decompose(inp, w):
        out = out.concat(conjugate_kernel_word(inp.gamma, c, U))
        if len(out) > max_length:
            raise OverflowError("kernel word exceeds max_length; use kernel_decompose")
    return free_reduce(out)


# ------------------------------------------------------------- generators

def _n(k): return f"n_{k}"
def _d(y): return f"d_{y}"
def _e(x): return f"e_{x}"


class _Emitter:
    def __init__(self, inp: FibreInput):
        self.inp = inp
        g = inp.gamma
        self.gens: list[str] = [_n(k) for k in g.kernel] + [_d(y) for y in inp.gamma2.gens] \
            + [_e(x) for x in inp.aux]
        self.embedding = {_n(k): (Word.gen(k), Word()) for k in g.kernel}
        for y in inp.gamma2.gens:
            self.embedding[_d(y)] = (inp.lifts[y], Word.gen(y))
        for x, yw in inp.aux.items():
            self.embedding[_e(x)] = (Word.gen(x), yw)
        self.letter = {}
        for x in g.xgens:
            if x in inp.aux:
                self.letter[x] = Word.gen(_e(x))
                continue
            for y in inp.gamma2.gens:
                lift = free_reduce(inp.lifts[y])
                if lift == Word.gen(x):
                    self.letter[x] = Word.gen(_d(y))
                    break
                if lift == Word.gen(x, -1):
                    self.letter[x] = Word.gen(_d(y), -1)
                    break
        self.kmap = {k: Word.gen(_n(k)) for k in g.kernel}

    def E(self, c: Word) -> Word:
        table = dict(self.kmap)
        for x in c.generators() - set(table):
            if x not in self.letter:
                raise NeedsVanKampen(f"no P-generator with first coordinate {x}")
            table[x] = self.letter[x]
        return substitute_images(table, c)

    def term(self, c: Word, U: Word) -> Word:
        c = free_reduce(c)
        if len(c) <= 1:
            return substitute_images(self.kmap, conjugate_kernel_word(self.inp.gamma, c, U))
        Ec = self.E(c)
        return Ec.concat(substitute_images(self.kmap, U), Ec.inverse())

    def terms_word(self, terms) -> Word:
        return free_reduce(Word().concat(*[self.term(c, U) for c, U in terms]))


def emit_fibre(inp: FibreInput, certify: bool = True) -> FibrePresentation:
    """Emit the presentation; raise :class:`CertificationError` on any uncertified relator."""
    em = _Emitter(inp)
    d_of = {y: Word.gen(_d(y)) for y in inp.gamma2.gens}
    candidates: list[tuple[str, Word]] = []
    for i, s in enumerate(inp.gamma2.rels):
        lifted = free_reduce(substitute_images(inp.lifts, s))
        K = em.terms_word(kernel_decompose(inp, lifted))
        candidates.append((f"R1.{i}", substitute_images(d_of, s).concat(K.inverse())))
    movers = [(_d(y), inp.lifts[y]) for y in inp.gamma2.gens] + \
             [(_e(x), Word.gen(x)) for x in inp.aux]
    for gname, lift in movers:
        for k in inp.gamma.kernel:
            for sign in (1, -1):
                g = Word.gen(gname, sign)
                c = lift if sign == 1 else lift.inverse()
                K = em.term(c, Word.gen(k))
                lhs = g.concat(Word.gen(_n(k)), g.inverse())
                candidates.append((f"R2.{gname}.{k}.{'+' if sign == 1 else '-'}",
                                   lhs.concat(K.inverse())))
    if inp.hook is not None:
        for i, r in enumerate(inp.hook(inp)):
            candidates.append((f"R3.{i}", r))
    rels, prov = [], []
    for tag, r in candidates:
        core, _ = cyclic_reduce(free_reduce(r))
        if not core or any(same_relator(core, other) for other in rels):
            continue
        rels.append(core)
        prov.append(tag)
    p = Presentation(tuple(em.gens), tuple(rels), name=inp.name)
    fp = FibrePresentation(p, em.embedding, prov)
    if certify:
        for tag, r in zip(prov, rels):
            fp.certificates.append(certify_relator(inp, fp, r, tag))
    return fp


def certify_relator(inp: FibreInput, fp: FibrePresentation, r: Word, tag: str = ""):
    first, second = fp.first(r), fp.second(r)
    ok1, cert1 = _decide(inp.gamma.solver, first)
    ok2, cert2 = _decide(inp.backend2, second)
    if ok1 is not True or ok2 is not True:
        raise CertificationError(f"relator {tag} not certified (first={ok1}, second={ok2})",
                                 r, {"first": str(first), "second": str(second)})
    return cert1, cert2


def _decide(solver, w: Word):
    if not w:
        return True, Certificate([("free-cancel",)])
    ok, cert = solver.is_trivial(w)
    return ok, cert


# ------------------------------------------------------------- checks

@dataclass
class SubdirectReport:
    projection2: dict
    kernel_full: dict
    compatibility: dict

    @property
    def passed(self) -> bool:
        return all(v is True for d in (self.projection2, self.kernel_full, self.compatibility)
                   for v in d.values())

    def as_dict(self) -> dict:
        return {"pass": self.passed, "second_projection_onto": self.projection2,
                "kernel_in_first_coordinates": self.kernel_full,
                "coordinate_compatibility": self.compatibility}


def verify_subdirect(fp: FibrePresentation, inp: FibreInput) -> SubdirectReport:
    seconds = {free_reduce(v[1]) for v in fp.embedding.values()}
    proj = {y: Word.gen(y) in seconds for y in inp.gamma2.gens}
    full = {}
    firsts = {g: v for g, v in fp.embedding.items() if not v[1]}
    for k in inp.gamma.kernel:
        present = any(free_reduce(v[0]) == Word.gen(k) for v in firsts.values())
        full[k] = bool(present and inp.gamma.nontrivial(Word.gen(k)) is True)
    compat = {}
    for g, (w1, w2) in fp.embedding.items():
        diff = free_reduce(erase(w1, inp.gamma.kernel).concat(inp.f2(w2).inverse()))
        if not diff:
            compat[g] = True
        else:
            ok, _ = inp.q_solver.is_trivial(diff)
            compat[g] = ok is True
    return SubdirectReport(proj, full, compat)


# ------------------------------------------------------------- embedding files

_EMBED_RE = re.compile(r"^\s*(\S+)\s*->\s*\(\s*(.*?)\s*,\s*(.*?)\s*\)\s*$")


def print_embedding(fp: FibrePresentation) -> str:
    lines = [f"{g} -> ( {fp.embedding[g][0]} , {fp.embedding[g][1]} )"
             for g in fp.presentation.gens]
    return "\n".join(lines) + "\n"


def parse_embedding(text: str) -> dict[str, tuple[Word, Word]]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _EMBED_RE.match(line)
        if not m:
            raise ValueError(f"line {lineno}: expected 'ident -> ( word , word )'")
        out[m.group(1)] = (parse_word(m.group(2)), parse_word(m.group(3)))
    return out


# ------------------------------------------------------------- toys

def quotient_nontrivial(pres: Presentation, targets=("Z/2", "Z/3", "S3", "S4")):
    """Non-triviality oracle: ``w != 1`` if adding it as a relator loses a homomorphism."""
    from .quotients import hom_search

    def check(w: Word):
        for target in targets:
            killed = hom_search(Presentation(pres.gens, pres.rels + (w,)), target)
            if killed.homs < hom_search(pres, target).homs:
                return True
        return None
    return check


def toy_inputs() -> dict[str, FibreInput]:
    """Two hand-checkable instances: ``P = Z^2`` and ``P = Z``."""
    from .words import parse_presentation

    out = {}
    gamma = parse_presentation("name: T1\ngens: x a\nrel: x a x^-1 a^-1\n")
    q = parse_presentation("name: Zx\ngens: x\n")
    g2 = parse_presentation("name: Zy\ngens: y\n")
    table = {("x", "a", 1): Word.gen("a"), ("x", "a", -1): Word.gen("a")}
    kd = KernelData(gamma, q, ("a",), table, [], PresentationSolver(gamma),
                    quotient_nontrivial(gamma), "bounded")
    out["z2"] = FibreInput(kd, g2, PresentationSolver(g2), GenMap(g2, q, {"y": Word.gen("x")}),
                           name="toy_z2")
    gamma = parse_presentation("name: T2\ngens: x a\nrel: x a x^-1 a^-1\nrel: x\n")
    q = parse_presentation("name: Triv\ngens: x\nrel: x\n")
    g2 = parse_presentation("name: Triv2\ngens: y\nrel: y\n")
    kd = KernelData(gamma, q, ("a",), table, [Word()], PresentationSolver(gamma),
                    quotient_nontrivial(gamma), "bounded")
    out["z"] = FibreInput(kd, g2, PresentationSolver(g2), GenMap(g2, q, {"y": Word.gen("x")}),
                          name="toy_z")
    return out


# ------------------------------------------------------------- pipelines

@lru_cache(maxsize=4)
def rips_of(builtin: str, block_length: int = 10) -> RipsOutput:
    from .constructions import load_builtin
    return rips_construct(load_builtin(builtin), block_length)


def pipeline_input(kind: str, n: int) -> FibreInput:
    """Pipeline ``A``: ``f2 = Psi^n o pi0`` on ``Rips(Q)``; ``B``: ``f2 = q_n`` from ``Lambda`` to ``B``."""
    from .constructions import graph_group_lambda, load_builtin, psi_power, qn, sigma_preimage
    from .words import rename
    if n < 0:
        raise ValueError("n must be non-negative")
    kind = kind.upper()
    if kind == "B":
        out = rips_of("b")
        kd = KernelData.from_rips(out)
        lam = load_builtin("lambda")
        aux = {"a1": sigma_preimage(n, 1), "a2": sigma_preimage(n, 2)}
        return FibreInput(kd, lam, GraphSolver(graph_group_lambda()), qn(n), aux=aux,
                          q_solver=PresentationSolver(out.base), name=f"P{n}")
    if kind == "A":
        out = rips_of("q")
        kd = KernelData.from_rips(out)
        psin = psi_power(n)
        images = {x: psin[x] for x in out.base.gens}
        images.update({k: Word() for k in out.kernel})
        f2 = GenMap(out.presentation, out.base, images, name=f"pi{n}")
        aux = {"a": rename(sigma_preimage(n, 1), {"alpha1": "a", "tau1": "t"})}
        return FibreInput(kd, out.presentation, out.dehn(), f2, aux=aux,
                          q_solver=PresentationSolver(out.base), name=f"P{n}")
    raise ValueError(f"unknown pipeline {kind!r}; choose A or B")


def emit_series(kind: str, n_max: int) -> list[tuple[FibreInput, FibrePresentation]]:
    return [(inp, emit_fibre(inp)) for inp in (pipeline_input(kind, n) for n in range(n_max + 1))]


def series_report(kind: str, n: int, inp: FibreInput, fp: FibrePresentation) -> dict:
    sub = verify_subdirect(fp, inp)
    return {
        "schema": "gforge-fibre/1", "pipeline": kind.upper(), "n": n,
        "generators": len(fp.presentation.gens), "relators": len(fp.presentation.rels),
        "families": {f: sum(1 for t in fp.provenance if t.startswith(f)) for f in ("R1", "R2", "R3")},
        "certified": len(fp.certificates) == len(fp.presentation.rels),
        "first_backend": inp.gamma.tag, "second_backend": getattr(inp.backend2, "tag", "?"),
        "subdirect": sub.as_dict(),
        "recipe": f"gforge pipeline {kind.upper()} --n-max {n}",
    }


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
