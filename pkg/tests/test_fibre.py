import pytest

from gforge.abelian import h1
from gforge.certificates import replay
from gforge.constructions import graph_group_lambda, load_builtin
from gforge.fibre import (CertificationError, FibreInput, NeedsVanKampen, certify_relator,
                          emit_fibre, kernel_decompose, kernel_express,
                          parse_embedding, pipeline_input, print_embedding,
                          rips_of, series_report, toy_inputs, verify_subdirect)
from gforge.quotients import hom_search
from gforge.smallcanc import DehnSolver, SymmetrizedSet, verify_metric_condition
from gforge.solvers import graph_nf
from gforge.words import Word, free_reduce, parse_word, same_relator

W = parse_word


@pytest.fixture(scope="module")
def toys():
    return {name: (inp, emit_fibre(inp)) for name, inp in toy_inputs().items()}


@pytest.fixture(scope="module")
def series_b1():
    inp = pipeline_input("B", 1)
    return inp, emit_fibre(inp)


def test_toy_presentations(toys):
    _, z2 = toys["z2"]
    assert z2.presentation.gens == ("n_a", "d_y")
    assert [str(r) for r in z2.presentation.rels] == ["d_y n_a d_y^-1 n_a^-1"]
    _, z = toys["z"]
    assert any(same_relator(r, W("d_y")) for r in z.presentation.rels)


@pytest.mark.parametrize("name, ab, rank", [("z2", "Z^2", 2), ("z", "Z", 1)])
def test_toy_homology(toys, name, ab, rank):
    _, fp = toys[name]
    assert str(h1(fp.presentation)) == ab
    for p in (2, 3, 5):
        assert hom_search(fp.presentation, ("Z", p)).homs == p ** rank


def test_toy_subdirect(toys):
    for inp, fp in toys.values():
        rep = verify_subdirect(fp, inp)
        assert rep.passed


def test_embedding_round_trip(toys, series_b1):
    for fp in [fp for _, fp in toys.values()] + [series_b1[1]]:
        text = print_embedding(fp)
        back = parse_embedding(text)
        assert back == {g: (free_reduce(a), free_reduce(b)) for g, (a, b) in fp.embedding.items()}
        assert list(back) == list(fp.presentation.gens)


def test_embedding_parse_error():
    with pytest.raises(ValueError):
        parse_embedding("x -> y")


def test_corrupted_lift_fails_compatibility(toys):
    inp, fp = toys["z2"]
    fp.embedding = dict(fp.embedding)
    fp.embedding["d_y"] = (W("x^2"), W("y"))
    rep = verify_subdirect(fp, inp)
    assert rep.compatibility["d_y"] is False and not rep.passed
    fp.embedding["d_y"] = (W("x"), W("y"))


def test_tampered_relator_is_not_certified(toys):
    inp, fp = toys["z2"]
    with pytest.raises(CertificationError):
        certify_relator(inp, fp, W("d_y n_a"), "tamper")


def test_unliftable_letter_needs_van_kampen():
    inp = toy_inputs()["z2"]
    bad = FibreInput(inp.gamma, inp.gamma2, inp.backend2, inp.f2, lifts={"y": W("x a")})
    with pytest.raises(NeedsVanKampen):
        emit_fibre(bad)


def test_pipeline_b_shape(series_b1):
    inp, fp = series_b1
    p = fp.presentation
    assert len(p.gens) == 9 and len(p.rels) == 28
    assert p.gens[:2] == ("n_k1", "n_k2")
    assert {"e_a1", "e_a2"} <= set(p.gens)
    rep = series_report("B", 1, inp, fp)
    assert rep["families"] == {"R1": 2, "R2": 26, "R3": 0} and rep["certified"]
    assert verify_subdirect(fp, inp).passed


def test_pipeline_b_relators_independently(series_b1):
    """Re-decide both coordinates with freshly built solvers."""
    inp, fp = series_b1
    gamma = rips_of("b").presentation
    sym = SymmetrizedSet(gamma)
    assert verify_metric_condition(sym, 6).passed
    dehn = DehnSolver(sym)
    lam = graph_group_lambda()
    for r, (c1, c2) in zip(fp.presentation.rels, fp.certificates):
        first, second = fp.first(r), fp.second(r)
        assert dehn.is_trivial(first)[0]
        assert not graph_nf(lam, second)[0]
        assert not replay(c1, first, gamma)
        assert not replay(c2, second, lam)


def test_pipeline_b_embedding_images(series_b1):
    inp, fp = series_b1
    assert fp.embedding["d_tau1"] == (W("t1"), W("tau1"))
    assert fp.embedding["d_zeta"] == (Word(), W("zeta"))
    assert fp.embedding["e_a1"] == (W("a1"), W("tau1 alpha1 tau1^-1 alpha1^-1"))
    assert fp.embedding["n_k1"] == (W("k1"), Word())


def test_kernel_decompose_factors(series_b1):
    inp, _ = series_b1
    w = W("t1 a1^2 k1 t1^-1 a1^-3 k2^-1")
    terms = kernel_decompose(inp, w)
    assert all(U.generators() <= set(inp.gamma.kernel) for _, U in terms)
    product = Word().concat(*[c.concat(U, c.inverse()) for c, U in terms])
    assert inp.gamma.solver.is_trivial(free_reduce(w.concat(product.inverse())))[0]


def test_kernel_express_short_conjugators(series_b1):
    inp, _ = series_b1
    w = W("k2^-1 t1 k1 t1^-1")
    ex = kernel_express(inp, w)
    assert ex.generators() <= set(inp.gamma.kernel)
    assert inp.gamma.solver.is_trivial(free_reduce(w.concat(ex.inverse())))[0]


def test_pipeline_a_zero():
    inp = pipeline_input("A", 0)
    fp = emit_fibre(inp)
    assert len(fp.presentation.gens) == 11 and len(fp.presentation.rels) == 62
    assert len(fp.certificates) == 62
    assert verify_subdirect(fp, inp).passed
    assert load_builtin("q").gens == rips_of("q").base.gens


def test_unknown_pipeline():
    with pytest.raises(ValueError):
        pipeline_input("C", 0)
