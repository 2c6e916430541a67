"""Word-problem solvers with certificates.

* Baumslag-Solitar groups ``<a, t | t a^p t^-1 = a^q>`` via Britton's lemma,
* graph groups (right-angled Artin groups) via shortlex normal forms,
* a bounded breadth-first trivializer for arbitrary finite presentations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .certificates import Certificate, replay
from .words import Presentation, Word, check_alphabet, cyclic_reduce, free_reduce


@dataclass(frozen=True)
class BSGroup:
    """``BS(p, q) = <a, t | t a^p t^-1 = a^q>``."""

    p: int = 2
    q: int = 3
    a: str = "a"
    t: str = "t"

    def __post_init__(self):
        if self.p == 0 or self.q == 0:
            raise ValueError("BS(p, q) needs nonzero p and q")

    @property
    def relator(self) -> Word:
        return Word(((self.t, 1), (self.a, self.p), (self.t, -1), (self.a, -self.q)))

    @property
    def presentation(self) -> Presentation:
        return Presentation((self.a, self.t), (self.relator,), f"BS({self.p},{self.q})")


def _find_pinch(runs, g: BSGroup):
    for i in range(len(runs) - 2):
        (t1, m), (a, e), (t2, n) = runs[i], runs[i + 1], runs[i + 2]
        if t1 != g.t or a != g.a or t2 != g.t or (m > 0) == (n > 0):
            continue
        eps = 1 if m > 0 else -1
        d = g.p if eps == 1 else g.q
        if e % d == 0:
            return i, eps, e // d
    return None


def _find_slide(runs, g: BSGroup):
    for i in range(len(runs) - 1):
        (a, e), (t, m) = runs[i], runs[i + 1]
        if a != g.a or t != g.t:
            continue
        d = g.q if m > 0 else g.p
        r = e % abs(d)
        k = (e - r) // d
        if k:
            return i, k
    return None


def britton_nf(g: BSGroup, w: Word) -> tuple[Word, Certificate]:
    """Britton normal form of ``w`` in ``BS(p, q)``.

    Maximal pinches are applied until the word is t-reduced; then a-powers
    are slid rightwards through t-letters so that the exponent in front of
    ``t`` lies in ``[0, |q|)`` and in front of ``t^-1`` in ``[0, |p|)``.
    The result is the unique normal form, empty iff ``w = 1``.
    """
    check_alphabet(w, (g.a, g.t))
    cert = Certificate(context=g)
    cur = w
    while True:
        red = free_reduce(cur)
        if red != cur:
            cert.add("free-cancel")
            cur = red
        runs = list(cur.runs)
        hit = _find_pinch(runs, g)
        if hit is not None:
            i, eps, k = hit
            cert.add("pinch", i, eps, k)
            cur = replay(Certificate([("pinch", i, eps, k)]), cur, g, reduce=False)
            continue
        hit = _find_slide(runs, g)
        if hit is not None:
            i, k = hit
            cert.add("slide", i, k)
            cur = replay(Certificate([("slide", i, k)]), cur, g, reduce=False)
            continue
        return cur, cert


def bs_nf_runs(g: BSGroup, runs) -> tuple:
    """Normal form as a run tuple, streaming letters through a stack (no certificate).

    Agrees with :func:`britton_nf`; used where millions of products are normalised.
    """
    P, Q, A, T = g.p, g.q, g.a, g.t
    xs, eps = [], []
    e = 0
    for gen, k in runs:
        if gen == A:
            e += k
            continue
        s = 1 if k > 0 else -1
        for _ in range(abs(k)):
            if eps and eps[-1] == -s:
                d = P if eps[-1] == 1 else Q
                if e % d == 0:
                    e = xs.pop() + (Q if eps.pop() == 1 else P) * (e // d)
                    continue
            d = Q if s == 1 else P
            r = e % abs(d)
            xs.append(r)
            eps.append(s)
            e = (P if s == 1 else Q) * ((e - r) // d)
    out = []
    for x, s in zip(xs, eps):
        if x:
            out.append((A, x))
            out.append((T, s))
        elif out and out[-1][0] == T and (out[-1][1] > 0) == (s > 0):
            out[-1] = (T, out[-1][1] + s)
        else:
            out.append((T, s))
    if e:
        out.append((A, e))
    return tuple(out)


def bs_is_trivial(g: BSGroup, w: Word) -> bool:
    return not britton_nf(g, w)[0]


def t_exponent_sum(g: BSGroup, w: Word) -> int:
    return w.exponent_sum(g.t)


# ------------------------------------------------------------- graph groups

@dataclass(frozen=True)
class GraphGroup:
    """Right-angled Artin group on ``gens`` with commuting pairs ``edges``."""

    gens: tuple[str, ...]
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2 or not e <= set(self.gens):
                raise ValueError(f"bad edge {set(e)}")
        object.__setattr__(self, "gens", tuple(self.gens))
        object.__setattr__(self, "edges", edges)

    def commute(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self.edges

    @property
    def presentation(self) -> Presentation:
        rels = []
        order = {g: i for i, g in enumerate(self.gens)}
        for e in sorted(self.edges, key=lambda e: sorted(order[g] for g in e)):
            x, y = sorted(e, key=order.get)
            rels.append(Word(((x, 1), (y, 1), (x, -1), (y, -1))))
        return Presentation(self.gens, tuple(rels))

    @classmethod
    def from_presentation(cls, p: Presentation) -> "GraphGroup":
        """Recognise a presentation whose relators are all commutators of generators."""
        edges = []
        for r in p.rels:
            runs = r.runs
            ok = (len(runs) == 4 and all(abs(e) == 1 for _, e in runs)
                  and runs[0][0] == runs[2][0] and runs[1][0] == runs[3][0]
                  and runs[0][0] != runs[1][0]
                  and runs[0][1] == -runs[2][1] and runs[1][1] == -runs[3][1])
            if not ok:
                raise ValueError(f"relator {r} is not a commutator of generators")
            edges.append((runs[0][0], runs[1][0]))
        return cls(p.gens, frozenset(frozenset(e) for e in edges))


def graph_nf(g: GraphGroup, w: Word) -> tuple[Word, Certificate]:
    """Shortlex normal form in a graph group.

    Letters are ordered by generator position, a generator before its
    inverse.  Equal group elements have equal normal forms.
    """
    check_alphabet(w, g.gens)
    cert = Certificate(context=g)
    cur = w
    red = free_reduce(cur)
    if red != cur:
        cert.add("free-cancel")
        cur = red
    runs = list(cur.runs)

    def move(j: int, i: int):
        # bring run j to position i by adjacent swaps
        for k in range(j - 1, i - 1, -1):
            cert.add("commute-swap", k)
            runs[k], runs[k + 1] = runs[k + 1], runs[k]

    # cancel or merge equal generators separated only by commuting runs
    changed = True
    while changed:
        changed = False
        for j in range(len(runs)):
            x = runs[j][0]
            for i in range(j - 1, -1, -1):
                if runs[i][0] == x:
                    move(j, i + 1)
                    cert.add("free-cancel")
                    runs = list(free_reduce(Word(runs)).runs)
                    changed = True
                    break
                if not g.commute(runs[i][0], x):
                    break
            if changed:
                break

    order = {x: i for i, x in enumerate(g.gens)}
    for k in range(len(runs)):
        best = None
        for m in range(k, len(runs)):
            x, e = runs[m]
            if all(g.commute(runs[i][0], x) for i in range(k, m)):
                key = (order[x], 0 if e > 0 else 1)
                if best is None or key < best[0]:
                    best = (key, m)
        if best[1] != k:
            move(best[1], k)
    out = Word(runs)
    assert out == free_reduce(out)
    return out, cert


def graph_is_trivial(g: GraphGroup, w: Word) -> bool:
    return not graph_nf(g, w)[0]


# ------------------------------------------------------ bounded trivializer

class _Alphabet:
    """Integer letter codes: generator ``i`` is ``i+1``, its inverse ``-(i+1)``."""

    def __init__(self, gens):
        self.gens = tuple(gens)
        self.index = {g: i + 1 for i, g in enumerate(self.gens)}

    def encode(self, w: Word) -> tuple:
        out = []
        for g, e in w.runs:
            c = self.index[g]
            out.extend([c if e > 0 else -c] * abs(e))
        return tuple(out)

    def decode(self, letters) -> Word:
        return Word.from_letters((self.gens[abs(c) - 1], 1 if c > 0 else -1) for c in letters)


def _reduce_letters(seq) -> tuple:
    out = []
    for c in seq:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def _inv(seq) -> tuple:
    return tuple(-c for c in reversed(seq))


def symmetrized_elements(p: Presentation, alpha: _Alphabet):
    """Yield ``(s, rel_index, sign, offset)`` for every cyclic conjugate of every ``r^sign``."""
    seen = set()
    for idx, r in enumerate(p.rels):
        for sign in (1, -1):
            base = alpha.encode(r if sign == 1 else r.inverse())
            for o in range(len(base)):
                s = base[o:] + base[:o]
                if s in seen:
                    continue
                seen.add(s)
                yield s, idx, sign, o


def _conj_for(alpha, prefix, r_letters, offset) -> Word:
    # s = z y with r^sign = y z; conjugator = prefix . y^-1
    y = r_letters[:offset]
    return alpha.decode(_reduce_letters(tuple(prefix) + _inv(y)))


def relator_conjugate_step(p: Presentation, w: Word):
    """If ``w`` is freely a conjugate of some relator (or inverse), return the step."""
    core, conj = cyclic_reduce(w)
    if not core:
        return None
    alpha = _Alphabet(p.gens)
    target = alpha.encode(core)
    n = len(target)
    for idx, r in enumerate(p.rels):
        if len(r) != n:
            continue
        for sign in (1, -1):
            base = alpha.encode(r if sign == 1 else r.inverse())
            doubled = base + base
            for o in range(n):
                if doubled[o:o + n] == target:
                    y = base[:o]
                    c = alpha.decode(_reduce_letters(alpha.encode(conj) + _inv(y)))
                    return ("relator-apply", idx, sign, c)
    return None


def bounded_trivializer(p: Presentation, w: Word, budget: int,
                        max_nodes: int = 20000) -> Certificate | None:
    """Search for ``w`` as a product of at most ``budget`` conjugated relators.

    Breadth-first over relator applications (replace a subword matching part
    of a cyclic conjugate of a relator by the inverse of the remainder).
    Returns a replayable certificate or ``None`` ("unknown"); never claims
    non-triviality.
    """
    check_alphabet(w, p.gens)
    start = free_reduce(w)
    if not start:
        return Certificate([("free-cancel",)], context=p)
    if budget < 1 or not p.rels:
        return None
    alpha = _Alphabet(p.gens)
    elems = list(symmetrized_elements(p, alpha))
    bases = {}
    for idx, r in enumerate(p.rels):
        bases[(idx, 1)] = alpha.encode(r)
        bases[(idx, -1)] = alpha.encode(r.inverse())
    seen = {alpha.encode(start)}
    layer = [(start, [])]
    nodes = 0
    for depth in range(1, budget + 1):
        # last layer only needs the cheap "is a conjugate of one relator" test
        for word, steps in layer:
            step = relator_conjugate_step(p, word)
            if step is not None:
                return Certificate(steps + [step], context=p)
        if depth == budget:
            return None
        nxt = []
        for word, steps in layer:
            letters = alpha.encode(word)
            for s, idx, sign, o in elems:
                base = bases[(idx, sign)]
                for i in range(len(letters)):
                    lmax = 0
                    while (lmax < len(s) and i + lmax < len(letters)
                           and letters[i + lmax] == s[lmax]):
                        lmax += 1
                    for l in range(1, lmax + 1):
                        child = _reduce_letters(letters[:i] + _inv(s[l:]) + letters[i + l:])
                        if child in seen:
                            continue
                        seen.add(child)
                        nodes += 1
                        conj = _conj_for(alpha, letters[:i], base, o)
                        new_steps = steps + [("relator-apply", idx, sign, conj)]
                        if not child:
                            return Certificate(new_steps, context=p)
                        nxt.append((alpha.decode(child), new_steps))
                        if nodes >= max_nodes:
                            return None
        layer = nxt
    return None


# ------------------------------------------- Britton certificates as relators

def _bs_shape(rr: Word):
    runs = list(rr.runs)
    for o in range(len(runs)):
        rot = runs[o:] + runs[:o]
        if (len(rot) == 4 and rot[0][1] == 1 and rot[2][1] == -1
                and rot[0][0] == rot[2][0] and rot[1][0] == rot[3][0]
                and rot[0][0] != rot[1][0]):
            g = BSGroup(rot[1][1], -rot[3][1], a=rot[1][0], t=rot[0][0])
            # letter offset of the rotation inside rr
            return g, sum(abs(e) for _, e in runs[:o])
    return None


def _bs_relators_in(p: Presentation):
    """Relators of ``p`` of the form ``t a^p t^-1 a^-q`` up to rotation/inversion."""
    for idx, r in enumerate(p.rels):
        for sign in (1, -1):
            rr = r if sign == 1 else r.inverse()
            found = _bs_shape(rr)
            if found is not None:
                yield found[0], idx, sign, found[1], rr
                break


def britton_relator_certificate(p: Presentation, w: Word) -> Certificate | None:
    """Turn a trivial Britton reduction inside a BS relator of ``p`` into relator applications."""
    for g, idx, rsign, offset, rr in _bs_relators_in(p):
        if w.generators() <= {g.a, g.t}:
            return _convert_britton(p, w, g, idx, rsign, offset, rr)
    return None


def _convert_britton(p, w, g, idx, rsign, offset, rr):
    nf, bcert = britton_nf(g, w)
    if nf:
        return None
    # std relator t a^p t^-1 a^-q = y^-1 rr y with y the first `offset` letters of rr
    y = Word.from_letters(rr.letters()[:offset])

    def std_conj(c: Word) -> Word:
        return free_reduce(c.concat(y.inverse()))

    a, t = Word.gen(g.a), Word.gen(g.t)
    # rho(eps, sigma) = c r^s c^-1 with (c, s) per case
    table = {(1, 1): (Word(), 1), (1, -1): (a ** (-g.q), -1),
             (-1, 1): (t.inverse(), -1), (-1, -1): (free_reduce((a ** (-g.p)).concat(t.inverse())), 1)}
    out = Certificate(context=p)
    cur = free_reduce(w)
    for step in bcert.steps:
        runs = list(cur.runs)
        if step[0] == "pinch":
            _, i, eps, k = step
            m = runs[i][1]
            u = Word(runs[:i] + [(g.t, m - eps)])
            Q = g.q if eps == 1 else g.p
            sigma = 1 if k > 0 else -1
            c, s = table[(eps, sigma)]
            for j in range(abs(k)):
                conj = free_reduce(u.concat(a ** (Q * sigma * j), c))
                out.add("relator-apply", idx, rsign * s, std_conj(conj))
        elif step[0] == "slide":
            _, i, k = step
            e, m = runs[i][1], runs[i + 1][1]
            eps = 1 if m > 0 else -1
            Q = g.q if eps == 1 else g.p
            u = Word(runs[:i] + [(g.a, e - Q * k)])
            sigma = 1 if k > 0 else -1
            c, s = table[(eps, sigma)]
            for j in reversed(range(abs(k))):
                conj = free_reduce(u.concat(a ** (Q * sigma * j), c))
                out.add("relator-apply", idx, -rsign * s, std_conj(conj))
        cur = replay(Certificate([step]), cur, g, reduce=False)
    if replay(out, w, p):
        raise AssertionError("Britton-to-relator conversion failed to replay")
    return out


class PresentationSolver:
    """One-sided triviality prover for a finite presentation.

    Tries free reduction, a conjugate-of-one-relator test, Britton reduction
    inside a Baumslag-Solitar relator of the presentation, then the bounded
    breadth-first search.  Answers ``(True, cert)`` or ``(None, None)``.
    """

    tag = "bounded"

    def __init__(self, presentation: Presentation, budget: int = 3, max_nodes: int = 20000):
        self.presentation = presentation
        self.budget = budget
        self.max_nodes = max_nodes

    def is_trivial(self, w: Word):
        p = self.presentation
        check_alphabet(w, p.gens)
        if not free_reduce(w):
            return True, Certificate([("free-cancel",)], context=p)
        step = relator_conjugate_step(p, w)
        if step is not None:
            return True, Certificate([step], context=p)
        cert = britton_relator_certificate(p, w)
        if cert is not None:
            return True, cert
        cert = bounded_trivializer(p, w, self.budget, self.max_nodes)
        if cert is not None:
            return True, cert
        return None, None


class BrittonSolver:
    tag = "britton"

    def __init__(self, group: BSGroup):
        self.group = group
        self.presentation = group.presentation

    def is_trivial(self, w: Word):
        nf, cert = britton_nf(self.group, w)
        return (not nf), cert


class GraphSolver:
    tag = "graph"

    def __init__(self, group: GraphGroup):
        self.group = group
        self.presentation = group.presentation

    def is_trivial(self, w: Word):
        nf, cert = graph_nf(self.group, w)
        return (not nf), cert


def certificate_to_text(cert: Certificate) -> str:
    return cert.to_text()
