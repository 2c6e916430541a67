import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gforge.certificates import Certificate, CorruptCertificate, replay
from gforge.constructions import C_WORD, S_GROUP, graph_group_lambda, load_builtin, psi
from gforge.solvers import (BSGroup, GraphGroup, PresentationSolver, bounded_trivializer,
                            britton_nf, britton_relator_certificate, bs_is_trivial, bs_nf_runs,
                            graph_nf, t_exponent_sum)
from gforge.words import AlphabetError, Word, free_reduce, parse_word

W = parse_word


def affine(w: Word):
    """Image in the affine group: a is x -> x + 1, t is x -> 3x/2.

    This is a homomorphism of BS(2,3) (t a^2 t^-1 = x -> x + 3 = a^3), so a
    word with a non-identity image is non-trivial.
    """
    m, c = Fraction(1), Fraction(0)  # x -> m x + c
    for g, e in reversed(w.runs):  # rightmost letter acts first
        if g == "a":
            c += e
        else:
            f = Fraction(3, 2) ** e
            m, c = f * m, f * c
    return m, c


bs_words = st.lists(st.tuples(st.sampled_from("at"), st.integers(-8, 8).filter(bool)),
                    max_size=12).map(Word)


@pytest.mark.parametrize("text, expected", [
    ("t a^2 t^-1", "a^3"),
    ("a^2 t a^2 t^-1 a^-2 t a^-2 t^-1", "1"),
])
def test_britton_examples(text, expected):
    assert str(britton_nf(S_GROUP, W(text))[0]) == expected


def test_c_is_nontrivial_and_in_ker_psi():
    assert britton_nf(S_GROUP, C_WORD)[0]
    assert not britton_nf(S_GROUP, psi()(C_WORD))[0]


@pytest.mark.parametrize("text, expected", [
    ("t a^2 t^-1 a^-3", True),
    ("t", False),
    ("t a t^-1 a^-1 a^-1 a^1", False),
])
def test_bs_is_trivial_examples(text, expected):
    assert bs_is_trivial(S_GROUP, W(text)) is expected


def test_britton_rejects_foreign_letter():
    with pytest.raises(AlphabetError):
        britton_nf(S_GROUP, W("a b"))


@settings(max_examples=400)
@given(bs_words)
def test_britton_nf_is_sound(w):
    nf, cert = britton_nf(S_GROUP, w)
    assert replay(cert, w, S_GROUP) == nf
    assert affine(nf) == affine(w)
    assert t_exponent_sum(S_GROUP, nf) == t_exponent_sum(S_GROUP, w)
    if not nf:
        assert affine(w) == (1, 0)
    assert britton_nf(S_GROUP, nf)[0] == nf


@settings(max_examples=300)
@given(bs_words, bs_words)
def test_britton_nf_decides_equality(u, v):
    same = bs_is_trivial(S_GROUP, u.concat(v.inverse()))
    assert same == (britton_nf(S_GROUP, u)[0] == britton_nf(S_GROUP, v)[0])


@settings(max_examples=300)
@given(bs_words, bs_words, st.integers(0, 12), st.booleans())
def test_relator_insertion_keeps_normal_form(w, c, cut, inv):
    r = S_GROUP.relator.inverse() if inv else S_GROUP.relator
    cut = min(cut, len(w.runs))
    w2 = Word(w.runs[:cut]).concat(c, r, c.inverse(), Word(w.runs[cut:]))
    assert britton_nf(S_GROUP, w2)[0] == britton_nf(S_GROUP, w)[0]


def test_britton_agrees_with_bounded_search():
    rng = random.Random(7)
    p = S_GROUP.presentation
    verdicts = 0
    for _ in range(300):
        w = Word([(rng.choice("at"), rng.choice((-2, -1, 1, 2))) for _ in range(rng.randint(1, 6))])
        cert = bounded_trivializer(p, w, 2, 3000)
        if cert is not None:
            verdicts += 1
            assert not replay(cert, w, p)
            assert bs_is_trivial(S_GROUP, w)
    assert verdicts > 0


@settings(max_examples=500)
@given(bs_words)
def test_streaming_normal_form_agrees(w):
    assert bs_nf_runs(S_GROUP, w.runs) == britton_nf(S_GROUP, w)[0].runs


@pytest.mark.parametrize("p, q", [(1, 2), (2, -3), (3, 5), (-2, 4)])
def test_streaming_agrees_other_bs(p, q):
    g = BSGroup(p, q)
    rng = random.Random(p * 10 + q)
    for _ in range(300):
        w = Word([(rng.choice("at"), rng.choice((-4, -1, 1, 3))) for _ in range(rng.randint(0, 9))])
        nf, cert = britton_nf(g, w)
        assert replay(cert, w, g) == nf
        assert bs_nf_runs(g, w.runs) == nf.runs


def test_large_exponent_pinch_is_fast():
    n = 300
    w = Word([("t", 1), ("a", 2 ** n), ("t", -1)])
    assert britton_nf(S_GROUP, w)[0] == Word.gen("a", 3 * 2 ** (n - 1))


# ------------------------------------------------------------- certificates

def test_replay_of_empty_certificate_reduces():
    w = W("a a^-1 t")
    assert replay(Certificate(), w, S_GROUP) == W("t")


def test_replay_on_mutated_word_is_corrupt():
    _, cert = britton_nf(S_GROUP, W("t a^2 t^-1"))
    with pytest.raises(CorruptCertificate):
        replay(cert, W("t a^3 t^-1"), S_GROUP)


def test_certificate_text_round_trip():
    w = W("t a^4 t^-1 a^-6")
    cert = britton_relator_certificate(S_GROUP.presentation, w)
    again = Certificate.from_text(cert.to_text())
    assert not replay(again, w, S_GROUP.presentation)


# ------------------------------------------------------------- graph groups

LAMBDA = graph_group_lambda()


@pytest.mark.parametrize("text, expected", [
    ("zeta alpha1 zeta^-1", "alpha1"),
    ("zeta alpha2 zeta^-1", "zeta alpha2 zeta^-1"),
    ("alpha1 zeta tau1 zeta^-1", "alpha1 tau1"),
])
def test_graph_nf_examples(text, expected):
    nf, cert = graph_nf(LAMBDA, W(text))
    assert str(nf) == expected
    assert replay(cert, W(text), LAMBDA) == nf


def swap_cancel_closure(g: GraphGroup, letters: tuple) -> bool:
    """Brute force: can swaps of commuting letters and cancellations reach 1?"""
    seen, todo = {letters}, [letters]
    while todo:
        cur = todo.pop()
        if not cur:
            return True
        for i in range(len(cur) - 1):
            (x, s), (y, r) = cur[i], cur[i + 1]
            if x == y and s == -r:
                nxt = cur[:i] + cur[i + 2:]
            elif x != y and g.commute(x, y):
                nxt = cur[:i] + (cur[i + 1], cur[i]) + cur[i + 2:]
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return False


lam_letters = st.lists(st.tuples(st.sampled_from(("alpha1", "tau1", "alpha2", "zeta")),
                                 st.sampled_from((1, -1))), max_size=8)


@settings(max_examples=300)
@given(lam_letters)
def test_graph_triviality_matches_brute_force(seq):
    w = Word.from_letters(seq)
    assert (not graph_nf(LAMBDA, w)[0]) == swap_cancel_closure(LAMBDA, tuple(seq))


@settings(max_examples=300)
@given(lam_letters, st.integers(0, 7))
def test_graph_nf_constant_on_swap_orbits(seq, i):
    if i + 1 < len(seq) and seq[i][0] != seq[i + 1][0] and LAMBDA.commute(seq[i][0], seq[i + 1][0]):
        swapped = seq[:i] + [seq[i + 1], seq[i]] + seq[i + 2:]
        assert graph_nf(LAMBDA, Word.from_letters(seq))[0] == \
            graph_nf(LAMBDA, Word.from_letters(swapped))[0]


@settings(max_examples=300)
@given(lam_letters)
def test_zeta_retraction(seq):
    w = Word.from_letters(seq)
    nf, _ = graph_nf(LAMBDA, w)
    if not nf:
        assert not free_reduce(Word((g, e) for g, e in w.runs if g != "zeta"))


# ------------------------------------------------------- bounded search

def test_bounded_trivializer_examples():
    s = S_GROUP.presentation
    cert = bounded_trivializer(s, W("t a^2 t^-1 a^-3"), 1)
    assert cert.relator_applications() == 1
    b = load_builtin("b")
    w = W("t2^-1 a1 t1 a1 t1^-1 a1^-1 t1 a1^-1 t1^-1")
    cert = bounded_trivializer(b, w, 1)
    assert cert is not None and not replay(cert, w, b)
    for budget in (1, 2, 3):
        assert bounded_trivializer(s, W("t"), budget) is None


def test_relator_certificates_for_b_copies():
    b = load_builtin("b")
    solver = PresentationSolver(b)
    for i in (1, 2):
        w = W(f"t{i} a{i}^4 t{i}^-1 a{i}^-6")
        ok, cert = solver.is_trivial(w)
        assert ok and not replay(cert, w, b)
