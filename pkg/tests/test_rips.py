import pytest

from gforge.constructions import load_builtin
from gforge.fibre import rips_of
from gforge.rips import (EscalationCapReached, block_word, conjugate_kernel_word, kernel_conjugate,
                         kernel_names, normality_certificates, pi0_freely_defined, rips_construct)
from gforge.words import Word, erase, free_reduce, parse_presentation, parse_word


def piece_profile(p) -> tuple[int, float]:
    """Maximal piece and maximal piece/|u| over symmetrized elements ``u``.

    Each piece is a prefix of some element, and the longest prefix an
    element shares with any other is found next to it in sorted order.
    """
    elems = set()
    for r in p.rels:
        for w in (r, r.inverse()):
            seq = tuple(w.letters())
            elems.update(seq[i:] + seq[:i] for i in range(len(seq)))
    elems = sorted(elems)

    def lcp(u, v):
        k = 0
        while k < min(len(u), len(v)) and u[k] == v[k]:
            k += 1
        return k

    adj = [lcp(u, v) for u, v in zip(elems, elems[1:])]
    best, ratio = 0, 0.0
    for i, u in enumerate(elems):
        k = max(adj[i - 1] if i else 0, adj[i] if i < len(adj) else 0)
        best, ratio = max(best, k), max(ratio, k / len(u))
    return best, ratio


@pytest.fixture(scope="module")
def toy():
    return rips_construct(parse_presentation("gens: x\nrel: x"))


@pytest.fixture(scope="module")
def rips_q():
    return rips_of("q")


def test_toy_shape(toy):
    p = toy.presentation
    assert p.gens == ("x", "k1", "k2") and len(p.rels) == 5
    assert toy.kernel == ("k1", "k2")
    assert pi0_freely_defined(toy)
    assert toy.pi0.images["k1"] == Word() and toy.pi0.images["x"] == parse_word("x")


def test_toy_escalates(toy):
    attempts = toy.params["attempts"]
    assert attempts[0]["block_length"] == 10 and attempts[0]["ratio"] * 6 >= 1
    assert toy.params["block_length"] == 20 and toy.report.passed


def test_toy_pieces_independently(toy):
    piece, ratio = piece_profile(toy.presentation)
    assert piece == toy.report.max_piece
    assert ratio == pytest.approx(toy.report.ratio) and 6 * ratio < 1


def test_rips_s_pieces_independently():
    out = rips_construct(load_builtin("s"))
    assert len(out.presentation.gens) == 4 and len(out.presentation.rels) == 9
    piece, ratio = piece_profile(out.presentation)
    assert piece == out.report.max_piece
    assert ratio == pytest.approx(out.report.ratio) and 6 * ratio < 1


def test_escalation_cap():
    with pytest.raises(EscalationCapReached):
        rips_construct(parse_presentation("gens: x\nrel: x"), block_length=4, max_attempts=1)


def test_normality_certified(toy):
    certs = normality_certificates(toy)
    assert len(certs) == 3 * 2 * 2
    assert all(ok for ok, _ in certs.values())


def test_long_conjugator_certified(toy):
    g = parse_word("k1 x^-1 k2")  # one x-level: the rewrite grows geometrically
    w = parse_word("k2 k1^-1")
    rhs = conjugate_kernel_word(toy, g, w)
    assert rhs.generators() <= set(toy.kernel)
    lhs = g.concat(w, g.inverse())
    assert toy.dehn().is_trivial(free_reduce(lhs.concat(rhs.inverse())))[0]


def test_kernel_conjugate_rejects_non_kernel(toy):
    with pytest.raises(ValueError):
        kernel_conjugate(toy, parse_word("x"), "x")


def test_block_words():
    assert block_word("k1", "k2", 5, 3) == parse_word("k1 k2^6 k1 k2^7 k1 k2^8")


def test_kernel_name_clash():
    assert kernel_names(("a", "k1")) == ("kk1", "kk2")
    out = rips_construct(parse_presentation("gens: k1 y\nrel: k1 y k1^-1 y^-1"))
    assert out.kernel == ("kk1", "kk2") and out.report.passed


def test_blocks_use_disjoint_exponents(toy):
    seen = set()
    for block in list(toy.relator_blocks) + list(toy.conj_table.values()):
        exps = {e for g, e in block.runs if g == "k2"}
        assert not exps & seen
        seen |= exps


def test_rips_q(rips_q):
    p = rips_q.presentation
    assert len(p.gens) == 8 and len(p.rels) == 30
    assert rips_q.report.passed
    assert rips_q.report.ratio * 6 < 1
    assert pi0_freely_defined(rips_q)
    base = {str(r) for r in rips_q.base.rels}
    images = [free_reduce(erase(r, rips_q.kernel)) for r in p.rels]
    assert {str(w) for w in images if w} == base
