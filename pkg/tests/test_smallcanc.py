import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gforge.certificates import replay
from gforge.rips import rips_construct
from gforge.smallcanc import (DehnSolver, SymmetrizedSet, UnverifiedPresentation,
                              dehn_is_trivial, shortword_nontrivial, verify_metric_condition)
from gforge.solvers import bounded_trivializer
from gforge.words import Presentation, Word, cyclic_reduce, free_reduce, parse_presentation, parse_word


def letters_of(w: Word) -> tuple:
    return tuple(w.letters())


def inv(seq: tuple) -> tuple:
    return tuple((g, -s) for g, s in reversed(seq))


def oracle_ratio(p: Presentation) -> float:
    """Largest piece/|r| by direct enumeration of the symmetrized set."""
    elems = set()
    best = 0.0
    for r in p.rels:
        for seq in (letters_of(r), inv(letters_of(r))):
            n = len(seq)
            rots = [seq[i:] + seq[:i] for i in range(n)]
            if any(rots[i] == seq for i in range(1, n)):
                best = 1.0  # proper power overlaps itself completely
            elems.update(rots)
    elems = sorted(elems)
    for i, u in enumerate(elems):
        for v in elems[i + 1:]:
            k = 0
            while k < min(len(u), len(v)) and u[k] == v[k]:
                k += 1
            best = max(best, k / min(len(u), len(v)))
    return best


def random_relator(rng, gens, length):
    while True:
        w = free_reduce(Word([(rng.choice(gens), rng.choice((1, -1))) for _ in range(length)]))
        core, _ = cyclic_reduce(w)
        if core:
            return core


@settings(max_examples=200)
@given(st.integers(0, 10 ** 9), st.integers(1, 3), st.integers(2, 6))
def test_piece_ratio_matches_brute_force(seed, nrels, lam):
    rng = random.Random(seed)
    gens = ("a", "b", "c")
    p = Presentation(gens, tuple(random_relator(rng, gens, rng.randint(1, 14)) for _ in range(nrels)))
    rep = verify_metric_condition(p, lam)
    want = oracle_ratio(p)
    assert rep.ratio == pytest.approx(want)
    assert rep.passed == (want * lam < 1)


def test_self_overlap_fails():
    rep = verify_metric_condition(parse_presentation("gens: a b\nrel: a b a b"), 6)
    assert not rep.passed and rep.max_piece == 4


def test_increasing_runs_short_fails_long_passes():
    short = " ".join(f"a b^{i}" for i in range(1, 11))
    long = " ".join(f"a b^{i}" for i in range(1, 31))
    # b^8 a b^9 occurs twice in the short relator: 18 > 65/6
    assert not verify_metric_condition(parse_presentation(f"gens: a b\nrel: {short}"), 6).passed
    rep = verify_metric_condition(parse_presentation(f"gens: a b\nrel: {long}"), 6)
    assert rep.passed and rep.max_piece == 58 and rep.min_relator_length == 495


def test_witness_occurs_in_both_relators():
    p = parse_presentation("gens: a b c\nrel: a b c a^-1 b\nrel: c a b b c")
    rep = verify_metric_condition(p, 2)
    sym = SymmetrizedSet(p)
    piece = rep.witness["piece"]
    for key in ("relator1", "relator2"):
        loc = rep.witness[key]
        oid = 2 * loc["index"] + (0 if loc["sign"] == 1 else 1)
        elem = sym.alphabet.decode(sym.element(oid, loc["offset"]))
        assert letters_of(elem)[:len(parse_word(piece))] == letters_of(parse_word(piece))


# ------------------------------------------------------------------ Dehn

@pytest.fixture(scope="module")
def toy():
    return rips_construct(parse_presentation("gens: x\nrel: x"))


def test_dehn_refuses_unverified():
    sym = SymmetrizedSet(parse_presentation("gens: a b\nrel: a b a b"))
    verify_metric_condition(sym, 6)
    with pytest.raises(UnverifiedPresentation):
        DehnSolver(sym)


def test_dehn_examples(toy):
    d = toy.dehn()
    rels = toy.presentation.rels
    for r in rels:
        ok, cert = dehn_is_trivial(d, r)
        assert ok and cert.relator_applications() == 1
    for g in toy.presentation.gens:
        assert not dehn_is_trivial(d, Word.gen(g))[0]
    x = Word.gen("k1")
    w = rels[0].concat(x, rels[3], x.inverse())
    ok, cert = dehn_is_trivial(d, w)
    assert ok and not replay(cert, w, toy.presentation)


def test_dehn_agrees_with_products_of_conjugates(toy):
    d = toy.dehn()
    p = toy.presentation
    rng = random.Random(3)
    for _ in range(40):
        parts = []
        for _ in range(rng.randint(1, 3)):
            c = Word([(rng.choice(p.gens), rng.choice((1, -1))) for _ in range(rng.randint(0, 4))])
            r = rng.choice(p.rels)
            parts.append(c.concat(r if rng.random() < .5 else r.inverse(), c.inverse()))
        w = free_reduce(Word().concat(*parts))
        ok, cert = d.is_trivial(w)
        assert ok and not replay(cert, w, p)


def test_dehn_agrees_with_bounded_search(toy):
    d = toy.dehn()
    p = toy.presentation
    for r in p.rels[:2]:
        cert = bounded_trivializer(p, r, 1)
        assert cert is not None and d.is_trivial(r)[0]


def test_shortword_never_contradicts_dehn(toy):
    d = toy.dehn()
    rng = random.Random(11)
    gens = toy.presentation.gens
    for _ in range(200):
        w = Word([(rng.choice(gens), rng.choice((-2, -1, 1, 2))) for _ in range(rng.randint(0, 12))])
        if shortword_nontrivial(d, w):
            assert not d.is_trivial(w)[0]
    assert shortword_nontrivial(d, parse_word("x")) is True
    assert shortword_nontrivial(d, toy.presentation.rels[0]) is None
    assert shortword_nontrivial(d, Word()) is None
