"""The named groups and maps: S, B, Q, Lambda, psi, Psi, q_n and witnesses."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources

from .solvers import (BSGroup, BrittonSolver, GraphGroup, PresentationSolver, britton_nf,
                      bs_nf_runs)
from .words import (GenMap, Presentation, Word, commutator, compose, free_reduce,
                    parse_presentation, parse_word, rename)

BUILTINS = {"s": "s.pres", "b": "b.pres", "q": "q.pres", "lambda": "lambda.pres"}

S_GROUP = BSGroup(2, 3, "a", "t")
#: c = [a, t a t^-1], the non-trivial element of ker psi
C_WORD = parse_word("a t a t^-1 a^-1 t a^-1 t^-1")


def builtin_text(name: str) -> str:
    key = name.lower()
    if key not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    return resources.files("gforge.presentations").joinpath(BUILTINS[key]).read_text()


def load_builtin(name: str) -> Presentation:
    return parse_presentation(builtin_text(name))


@dataclass
class NamedSystem:
    presentation: Presentation
    elements: dict[str, Word] = field(default_factory=dict)
    maps: dict[str, GenMap] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def build(name: str) -> NamedSystem:
    key = name.lower()
    p = load_builtin(key)
    sys = NamedSystem(p)
    if key == "s":
        sys.elements["c"] = C_WORD
        sys.maps["psi"] = psi()
    elif key == "b":
        for i in (1, 2):
            sys.elements[f"c{i}"] = s_copy(C_WORD, i)
    elif key == "q":
        sys.elements.update(c=C_WORD, b=Word.gen("t1"), beta=Word.gen("t1", -1))
        sys.maps["Psi"] = Psi()
        sys.notes.append("b = t1 has infinite order: B is torsion-free and t1 != 1 in S1")
    elif key == "lambda":
        sys.elements["zeta"] = Word.gen("zeta")
    return sys


def s_copy(w: Word, i: int) -> Word:
    """The word ``w`` over ``{a, t}`` moved into the copy ``S_i`` of ``B``."""
    return rename(w, {"a": f"a{i}", "t": f"t{i}"})


def to_s(w: Word, i: int) -> Word:
    """Inverse of :func:`s_copy`; letters outside ``{a_i, t_i}`` are rejected."""
    table = {f"a{i}": "a", f"t{i}": "t"}
    if not w.generators() <= set(table):
        raise ValueError(f"{w} is not a word in S{i}")
    return rename(w, table)


def graph_group_lambda() -> GraphGroup:
    return GraphGroup.from_presentation(load_builtin("lambda"))


# ----------------------------------------------------------------- maps

def psi() -> GenMap:
    s = load_builtin("s")
    return GenMap(s, s, {"a": parse_word("a^2"), "t": parse_word("t")}, name="psi")


def Psi() -> GenMap:
    q = load_builtin("q")
    images = {g: Word.gen(g) for g in q.gens}
    images["a"] = parse_word("a^2")
    return GenMap(q, q, images, name="Psi")


def psi_power(n: int, base: GenMap | None = None) -> GenMap:
    """``Psi^n`` (or ``base^n``); ``n = 0`` gives the identity."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m = base or Psi()
    out = GenMap.identity(m.domain)
    for _ in range(n):
        out = compose(m, out)
    return out


def qn(n: int) -> GenMap:
    """``q_n : Lambda -> B``, ``alpha_i -> a_i^(2^n)``, ``tau_i -> t_i``, ``zeta -> 1``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    lam, b = load_builtin("lambda"), load_builtin("b")
    images = {
        "alpha1": Word.gen("a1", 2 ** n), "tau1": Word.gen("t1"),
        "alpha2": Word.gen("a2", 2 ** n), "tau2": Word.gen("t2"),
        "zeta": Word(),
    }
    return GenMap(lam, b, images, name=f"q{n}")


def sigma_preimage(n: int, i: int = 1) -> Word:
    """A word ``w_n`` over ``{alpha_i, tau_i}`` with ``q_n(w_n) = a_i``.

    ``w_0 = alpha_i`` and ``w_{k+1} = tau_i w_k tau_i^-1 w_k^-1``; each level
    halves the exponent because ``t a^(2m) t^-1 a^(-2m) = a^m`` in S.
    """
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    tau = Word.gen(f"tau{i}")
    w = Word.gen(f"alpha{i}")
    for _ in range(n):
        w = free_reduce(tau.concat(w, tau.inverse(), w.inverse()))
    return w


def kernel_word(n: int) -> Word:
    """``u_n = [w_n, tau1 w_n tau1^-1]`` with ``w_n = sigma_preimage(n, 1)``."""
    w = sigma_preimage(n, 1)
    tau = Word.gen("tau1")
    return commutator(w, free_reduce(tau.concat(w, tau.inverse())))


@dataclass
class WitnessReport:
    n: int
    m: int
    word: Word
    image_n: Word
    image_m: Word
    image_n_is_c: bool
    image_m_trivial: bool
    c_nontrivial: bool
    certificates: dict = field(default_factory=dict)
    note: str = ("non-triviality in S1 transfers to B through the amalgam "
                 "embedding S1 -> B, which is not machine-checked")

    @property
    def passed(self) -> bool:
        return self.image_n_is_c and self.image_m_trivial and self.c_nontrivial

    def as_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "word": str(self.word),
                "q_n(u)": str(self.image_n), "q_m(u)": str(self.image_m),
                "q_n(u) = c": self.image_n_is_c, "q_m(u) = 1": self.image_m_trivial,
                "c != 1": self.c_nontrivial, "pass": self.passed, "note": self.note}


def kernel_witness(n: int, m: int) -> WitnessReport:
    """Certify ``u_n`` lies in ``ker q_m`` but not in ``ker q_n`` (inside ``S1``)."""
    if not 0 <= n < m:
        raise ValueError("need 0 <= n < m")
    u = kernel_word(n)
    img_n = qn(n)(u)
    img_m = qn(m)(u)
    s_n, s_m = to_s(img_n, 1), to_s(img_m, 1)
    nf_diff, cert_diff = britton_nf(S_GROUP, free_reduce(s_n.concat(C_WORD.inverse())))
    nf_m, cert_m = britton_nf(S_GROUP, s_m)
    nf_c, cert_c = britton_nf(S_GROUP, C_WORD)
    return WitnessReport(n, m, u, img_n, img_m, not nf_diff, not nf_m, bool(nf_c),
                         {"q_n(u) c^-1": cert_diff, "q_m(u)": cert_m, "c": cert_c})


# -------------------------------------------------------- epimorphism checks

@dataclass
class EpiReport:
    well_defined: dict
    surjective: dict
    certificates: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        vals = list(self.well_defined.values()) + list(self.surjective.values())
        if any(v is False for v in vals):
            return "fail"
        if any(v is None for v in vals):
            return "unknown"
        return "pass"


def check_epimorphism(m: GenMap, solver, preimages: dict[str, Word] | None = None) -> EpiReport:
    """Certify that every relator maps to 1 and every codomain generator has a preimage.

    ``solver.is_trivial`` returns ``(True | False | None, certificate)``.
    Generators without a supplied preimage are tried with themselves when the
    map is an endomorphism; anything not certified stays ``None``.
    """
    preimages = dict(preimages or {})
    wd, sj, certs = {}, {}, {}
    for i, r in enumerate(m.domain.rels):
        ok, cert = solver.is_trivial(m(r))
        wd[f"rel{i}"] = ok
        certs[f"rel{i}"] = cert
    for g in m.codomain.gens:
        pre = preimages.get(g)
        if pre is None and g in m.domain.gens:
            pre = Word.gen(g)
        if pre is None:
            sj[g] = None
            continue
        ok, cert = solver.is_trivial(free_reduce(m(pre).concat(Word.gen(g, -1))))
        sj[g] = True if ok else None
        certs[f"pre_{g}"] = cert
    return EpiReport(wd, sj, certs)


PSI_PREIMAGES = {"a": parse_word("t a t^-1 a^-1"), "t": parse_word("t")}


def check_psi() -> EpiReport:
    return check_epimorphism(psi(), BrittonSolver(S_GROUP), PSI_PREIMAGES)


def check_Psi() -> EpiReport:
    return check_epimorphism(Psi(), PresentationSolver(load_builtin("q")), PSI_PREIMAGES)


# -------------------------------------------------------------- Nielsen moves

def sigma_pair(n: int) -> tuple[Word, Word]:
    return Word.gen("t"), Word.gen("a", 2 ** n)


def _inv(runs: tuple) -> tuple:
    return tuple((g, -e) for g, e in reversed(runs))


def _key(runs: tuple):
    return (sum(abs(e) for _, e in runs), runs)


def canonical_pair(g1, g2) -> tuple:
    """Normal forms of both entries, each up to inversion, as an unordered pair.

    Swapping and inverting entries are Nielsen moves, so this only merges
    states that are already equivalent.
    """
    a = _canon_entry(g1.runs if isinstance(g1, Word) else g1)
    b = _canon_entry(g2.runs if isinstance(g2, Word) else g2)
    return (a, b) if _key(a) <= _key(b) else (b, a)


def _canon_entry(runs: tuple) -> tuple:
    a = bs_nf_runs(S_GROUP, runs)
    return min(a, bs_nf_runs(S_GROUP, _inv(a)), key=_key)


def nielsen_moves(pair):
    """Transvections ``x -> x y^(+-1)`` and ``x -> y^(+-1) x`` on either entry."""
    g1, g2 = pair
    for x, y in ((g1, g2), (g2, g1)):
        yi = _inv(y)
        yield x + y, y
        yield x + yi, y
        yield y + x, y
        yield yi + x, y


class FrontierBudgetExceeded(RuntimeError):
    pass


def nielsen_ball(pair, depth: int, max_states: int = 2_000_000) -> set:
    """Canonical states within ``depth`` transvections of ``pair``."""
    start = canonical_pair(*pair)
    seen = {start}
    layer = [start]
    for _ in range(depth):
        nxt = []
        for p in layer:
            for x, y in nielsen_moves(p):
                # y is an untouched canonical entry
                a = _canon_entry(x)
                key = (a, y) if _key(a) <= _key(y) else (y, a)
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
        if len(seen) > max_states:
            raise FrontierBudgetExceeded(f"more than {max_states} states")
        layer = nxt
    return seen


@dataclass
class NielsenReport:
    depth: int
    sizes: list[int]
    merged: list[tuple[int, int]]
    elapsed: float

    def as_dict(self) -> dict:
        return {"depth": self.depth, "ball_sizes": self.sizes,
                "merged_pairs": [list(p) for p in self.merged],
                "elapsed_s": round(self.elapsed, 3),
                "note": "states are pairs up to swap and inversion of entries; "
                        "Aut(S) is not quotiented"}


def nielsen_orbit(pairs, depth: int, max_states: int = 2_000_000) -> NielsenReport:
    """Report which input pairs have intersecting balls of radius ``depth``."""
    t0 = time.perf_counter()
    balls = [nielsen_ball(p, depth, max_states) for p in pairs]
    merged = [(i, j) for i in range(len(balls)) for j in range(i + 1, len(balls))
              if not balls[i].isdisjoint(balls[j])]
    return NielsenReport(depth, [len(b) for b in balls], merged, time.perf_counter() - t0)
