"""Rips construction: a C'(1/6) group mapping onto a given finite presentation.

Given ``<X | R>`` the output is ``<X, k1, k2 | R', V>`` where

* ``R'`` holds ``r_i U_i^-1`` and
* ``V`` holds ``x k x^-1 W^-1`` and ``x^-1 k x W'^-1`` for ``x`` in ``X``, ``k`` in ``{k1, k2}``.

Every ``U``, ``W``, ``W'`` is a block word ``prod_j k1 k2^(s+j)`` whose exponent
ranges are pairwise disjoint. Small cancellation is not argued but checked,
with the block length and stride doubled until the check passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .smallcanc import DehnSolver, PieceReport, SymmetrizedSet, verify_metric_condition
from .words import GenMap, Presentation, Word, erase, free_reduce

TRUSTED = (
    "hyperbolic", "residually finite", "torsion-free", "finitely many outer automorphisms",
    "virtually special",
)


class EscalationCapReached(RuntimeError):
    """No tried parameter set passed the C'(1/6) check."""


@dataclass
class RipsOutput:
    presentation: Presentation
    pi0: GenMap
    kernel: tuple[str, ...]
    params: dict
    relator_blocks: list[Word]
    conj_table: dict  # (x, k, sign) -> block word; sign +1: x k x^-1, -1: x^-1 k x
    report: PieceReport
    trusted: tuple[str, ...] = TRUSTED
    _sym: SymmetrizedSet | None = field(default=None, repr=False)
    _dehn: DehnSolver | None = field(default=None, repr=False)

    @property
    def base(self) -> Presentation:
        return self.pi0.codomain

    def dehn(self) -> DehnSolver:
        if self._dehn is None:
            self._dehn = DehnSolver(self._sym)
        return self._dehn

    def as_dict(self) -> dict:
        return {"generators": list(self.presentation.gens),
                "relators": len(self.presentation.rels),
                "kernel": list(self.kernel), "params": dict(self.params),
                "metric_check": self.report.as_dict(),
                "trusted_consequences": list(self.trusted)}


def block_word(k1: str, k2: str, start: int, length: int) -> Word:
    """``k1 k2^(start+1) k1 k2^(start+2) ... k1 k2^(start+length)``."""
    runs = []
    for j in range(1, length + 1):
        runs += [(k1, 1), (k2, start + j)]
    return Word(runs)


def kernel_names(gens) -> tuple[str, str]:
    taken = set(gens)
    base = "k"
    while f"{base}1" in taken or f"{base}2" in taken:
        base += "k"
    return f"{base}1", f"{base}2"


def _assemble(q: Presentation, L: int, stride: int):
    k1, k2 = kernel_names(q.gens)
    counter = 0

    def fresh() -> Word:
        nonlocal counter
        counter += 1
        return block_word(k1, k2, counter * stride, L)

    rels, blocks, table = [], [], {}
    for r in q.rels:
        u = fresh()
        blocks.append(u)
        rels.append(r.concat(u.inverse()))
    for x in q.gens:
        xw = Word.gen(x)
        for k in (k1, k2):
            kw = Word.gen(k)
            for sign in (1, -1):
                w = fresh()
                table[(x, k, sign)] = w
                c = xw if sign == 1 else xw.inverse()
                rels.append(c.concat(kw, c.inverse(), w.inverse()))
    gamma = Presentation(tuple(q.gens) + (k1, k2), tuple(rels),
                         name=f"Rips({q.name or 'Q'})")
    return gamma, (k1, k2), blocks, table


def rips_construct(q: Presentation, block_length: int = 10, stride: int | None = None,
                   max_attempts: int = 6, growth: int = 2) -> RipsOutput:
    """Build the Rips presentation, escalating parameters until C'(1/6) holds."""
    if not q.gens:
        raise ValueError("need at least one generator")
    L = block_length
    s = stride if stride is not None else block_length
    tried = []
    for attempt in range(max_attempts):
        if s < L:
            s = L  # exponent ranges must stay disjoint
        gamma, kernel, blocks, table = _assemble(q, L, s)
        sym = SymmetrizedSet(gamma)
        rep = verify_metric_condition(sym, 6)
        tried.append({"block_length": L, "stride": s, "ratio": rep.ratio})
        if rep.passed:
            pi0 = GenMap(gamma, q, {**{x: Word.gen(x) for x in q.gens},
                                    **{k: Word() for k in kernel}}, name="pi0")
            params = {"block_length": L, "stride": s, "attempts": tried}
            out = RipsOutput(gamma, pi0, kernel, params, blocks, table, rep, _sym=sym)
            assert pi0_freely_defined(out)
            return out
        L, s = L * growth, s * growth
    raise EscalationCapReached(f"C'(1/6) not reached after {max_attempts} attempts: {tried}")


def pi0_freely_defined(out: RipsOutput) -> bool:
    """Erasing kernel letters sends each relator to a relator of Q or to 1."""
    qrels = set(out.base.rels)
    for r in out.presentation.rels:
        img = free_reduce(erase(r, out.kernel))
        if img and img not in qrels:
            return False
    return True


def kernel_conjugate(out, g: Word, k: str) -> Word:
    """A word over the kernel generators equal to ``g k g^-1`` in the Rips group."""
    if k not in out.kernel:
        raise ValueError(f"{k} is not a kernel generator")
    return conjugate_kernel_word(out, g, Word.gen(k))


def conjugate_kernel_word(out, g: Word, w: Word) -> Word:
    """``g w g^-1`` rewritten over the kernel, innermost letter of ``g`` first.

    ``out`` needs ``kernel`` and ``conj_table`` attributes.  The length grows
    geometrically with ``|g|``.
    """
    for x, e in reversed(g.runs):
        step = 1 if e > 0 else -1
        for _ in range(abs(e)):
            w = _conjugate_by_letter(out, x, step, w)
    return w


def _conjugate_by_letter(out, x: str, sign: int, w: Word) -> Word:
    """``x^sign w x^-sign`` for a kernel word ``w``, rewritten over the kernel."""
    if x in out.kernel:
        c = Word.gen(x, sign)
        return free_reduce(c.concat(w, c.inverse()))
    runs = []
    for k, e in w.runs:
        block = out.conj_table[(x, k, sign)]
        piece = block if e > 0 else block.inverse()
        runs.extend(piece.runs * abs(e))
    return free_reduce(Word(runs))


def normality_certificates(out: RipsOutput) -> dict:
    """Dehn-certify ``g k g^-1 = kernel_conjugate(g, k)`` for every generator ``g`` (both signs)."""
    dehn = out.dehn()
    results = {}
    for g in out.presentation.gens:
        for sign in (1, -1):
            gw = Word.gen(g, sign)
            for k in out.kernel:
                rhs = kernel_conjugate(out, gw, k)
                lhs = gw.concat(Word.gen(k), gw.inverse())
                ok, cert = dehn.is_trivial(free_reduce(lhs.concat(rhs.inverse())))
                results[(g, sign, k)] = (ok, cert)
    return results
