import pytest

from gforge.certificates import replay
from gforge.constructions import (C_WORD, S_GROUP, Psi, build, canonical_pair, check_epimorphism,
                                  check_psi, check_Psi, kernel_witness, load_builtin, nielsen_ball,
                                  nielsen_orbit, psi, qn, sigma_pair, sigma_preimage, to_s)
from gforge.solvers import BrittonSolver, britton_nf, bs_is_trivial
from gforge.words import GenMap, Word, free_reduce, parse_word

W = parse_word


def test_builds():
    s = build("S")
    assert s.presentation.rels == (W("t a^2 t^-1 a^-3"),)
    assert s.elements["c"] == C_WORD
    q = build("Q").presentation
    assert q.gens == ("a", "t", "a1", "t1", "a2", "t2") and q.is_balanced
    lam = build("Lambda").presentation
    assert (len(lam.gens), len(lam.rels)) == (5, 2)
    b = build("B").presentation
    assert W("t2 a2^2 t2^-1 a2^-3") in b.rels
    assert build("Q").elements["beta"] == W("t1^-1")


def test_unknown_builtin():
    with pytest.raises(KeyError):
        build("nope")


def test_psi_is_an_epimorphism():
    rep = check_psi()
    assert rep.verdict == "pass"
    assert psi()(W("t a t^-1 a^-1")) == W("t a^2 t^-1 a^-2")
    assert bs_is_trivial(S_GROUP, free_reduce(psi()(W("t a t^-1 a^-1")).concat(W("a^-1"))))


def test_Psi_endomorphism_certified():
    rep = check_Psi()
    assert all(v is True for v in rep.well_defined.values())
    q = load_builtin("q")
    for key, cert in rep.certificates.items():
        if key.startswith("rel"):
            idx = int(key[3:])
            assert not replay(cert, Psi()(q.rels[idx]), q)
    assert Psi()["a"] == W("a^2") and Psi()["t1"] == W("t1")
    assert Psi()(q.rels[0]) == W("t a^4 t^-1 a^-6")


def test_identity_epimorphism():
    s = load_builtin("s")
    assert check_epimorphism(GenMap.identity(s), BrittonSolver(S_GROUP)).verdict == "pass"


def test_qn_images():
    assert qn(0)["alpha1"] == W("a1")
    assert qn(3)["alpha2"] == W("a2^8")
    for n in range(5):
        assert qn(n)["zeta"] == Word()
    b = load_builtin("b")
    for n in range(4):
        for r in qn(n).domain.rels:
            assert not qn(n)(r)  # commutators with zeta die freely
        assert qn(n).codomain == b


@pytest.mark.parametrize("n", range(9))
@pytest.mark.parametrize("i", [1, 2])
def test_sigma_preimage(n, i):
    w = sigma_preimage(n, i)
    assert w.generators() <= {f"alpha{i}", f"tau{i}"}
    img = to_s(qn(n)(w), i)
    assert bs_is_trivial(S_GROUP, free_reduce(img.concat(W("a^-1"))))


def test_sigma_preimage_small_cases():
    assert sigma_preimage(0) == W("alpha1")
    assert sigma_preimage(1) == W("tau1 alpha1 tau1^-1 alpha1^-1")
    assert qn(1)(sigma_preimage(1)) == W("t1 a1^2 t1^-1 a1^-2")


@pytest.mark.parametrize("m", range(1, 7))
def test_kernel_witnesses(m):
    for n in range(m):
        rep = kernel_witness(n, m)
        assert rep.passed
        for key, cert in rep.certificates.items():
            src = {"q_n(u) c^-1": free_reduce(to_s(rep.image_n, 1).concat(C_WORD.inverse())),
                   "q_m(u)": to_s(rep.image_m, 1), "c": C_WORD}[key]
            assert replay(cert, src, S_GROUP) == britton_nf(S_GROUP, src)[0]


def test_kernel_witness_first_case():
    rep = kernel_witness(0, 1)
    assert rep.word == W("alpha1 tau1 alpha1 tau1^-1 alpha1^-1 tau1 alpha1^-1 tau1^-1")
    assert to_s(rep.image_n, 1) == C_WORD


def test_kernel_witness_rejects_bad_order():
    with pytest.raises(ValueError):
        kernel_witness(2, 2)


# ------------------------------------------------------------------ Nielsen

def brute_ball(pair, depth):
    """Ordered pairs of Britton normal forms; swap and inversion are free moves."""
    def nf(w):
        return britton_nf(S_GROUP, w)[0]

    def variants(x, y):
        out = set()
        for u in (x, nf(x.inverse())):
            for v in (y, nf(y.inverse())):
                out |= {(u, v), (v, u)}
        return out

    start = (nf(pair[0]), nf(pair[1]))
    seen = set(variants(*start))
    layer = [start]
    for _ in range(depth):
        nxt = []
        for x, y in layer:
            for a, b in ((x, y), (y, x)):
                for c in (b, b.inverse()):
                    for new in (nf(a.concat(c)), nf(c.concat(a))):
                        state = (new, b)
                        if state not in seen:
                            seen |= variants(*state)
                            nxt.extend(variants(*state))
        layer = nxt
    return seen


def to_canon(states):
    return {canonical_pair(x, y) for x, y in states}


@pytest.mark.parametrize("pair", [sigma_pair(0), sigma_pair(1), (W("t a"), W("a^3"))])
def test_nielsen_ball_matches_brute_force(pair):
    for depth in (1, 2, 3):
        assert nielsen_ball(pair, depth) == to_canon(brute_ball(pair, depth))


def test_nielsen_examples():
    assert nielsen_orbit([(W("t"), W("a")), (W("t"), W("t a"))], 1).merged == [(0, 1)]
    assert nielsen_orbit([(W("t"), W("a")), (W("a"), W("t"))], 1).merged == [(0, 1)]
    rep = nielsen_orbit([sigma_pair(n) for n in range(3)], 4)
    assert rep.merged == [] and len(rep.sizes) == 3


def test_canonical_pair_symmetry():
    x, y = W("t a^5"), W("a^-2 t")
    c = canonical_pair(x, y)
    assert canonical_pair(y, x) == c
    assert canonical_pair(x.inverse(), y) == c
    assert canonical_pair(x, W("t a t^-1 t a^4")) == canonical_pair(x, W("t a^5"))
