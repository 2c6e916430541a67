"""Metric small cancellation C'(1/lambda) and Dehn's algorithm.

Letters are encoded one byte each (generator ``i`` is ``2i+1``, its inverse
``2i+2``) so that subword tests run on ``bytes``.  Piece lengths are read off
a suffix array of the doubled relators, which avoids materialising the
symmetrized set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import Certificate
from .words import Presentation, Word, check_alphabet, free_reduce


class UnverifiedPresentation(ValueError):
    pass


class ByteAlphabet:
    def __init__(self, gens):
        if len(gens) > 127:
            raise ValueError("at most 127 generators")
        self.gens = tuple(gens)
        self.code = {g: 2 * i + 1 for i, g in enumerate(self.gens)}
        table = bytearray(range(256))
        for i in range(len(self.gens)):
            table[2 * i + 1], table[2 * i + 2] = 2 * i + 2, 2 * i + 1
        self._inv_table = bytes(table)

    def encode(self, w: Word) -> bytes:
        out = bytearray()
        for g, e in w.runs:
            c = self.code[g]
            out += bytes([c if e > 0 else c + 1]) * abs(e)
        return bytes(out)

    def decode(self, b: bytes) -> Word:
        return Word.from_letters(
            (self.gens[(c - 1) // 2], 1 if c % 2 else -1) for c in b)

    def inverse(self, b: bytes) -> bytes:
        return b[::-1].translate(self._inv_table)

    def reduce(self, b) -> bytes:
        out = bytearray()
        for c in b:
            if out and out[-1] == (c + 1 if c % 2 else c - 1):
                out.pop()
            else:
                out.append(c)
        return bytes(out)


@dataclass
class PieceReport:
    lam: int
    passed: bool
    max_piece: int
    min_relator_length: int
    ratio: float
    witness: dict | None = None
    n_elements: int = 0

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam, "pass": self.passed, "max_piece": self.max_piece,
            "min_relator_length": self.min_relator_length, "ratio": self.ratio,
            "symmetrized_elements": self.n_elements, "witness": self.witness,
        }


def suffix_array(s: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling."""
    n = len(s)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    _, rank = np.unique(s, return_inverse=True)
    rank = rank.astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        second[:n - k] = rank[k:] if k < n else second[:0]
        sa = np.lexsort((second, rank))
        r1, r2 = rank[sa], second[sa]
        diff = np.empty(n, dtype=np.int64)
        diff[0] = 0
        diff[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.cumsum(diff)
        rank = new
        if rank.max() == n - 1 or k >= n:
            return sa
        k *= 2


def lcp_array(s, sa) -> list:
    """Kasai: ``lcp[i]`` = common prefix of suffixes ``sa[i-1]`` and ``sa[i]``."""
    n = len(s)
    s = list(s)
    sa = sa.tolist()
    rank = [0] * n
    for i, p in enumerate(sa):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = sa[r - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


class SymmetrizedSet:
    """Cyclic conjugates of the relators and their inverses (deduplicated)."""

    def __init__(self, p: Presentation):
        if not p.rels:
            raise ValueError("need at least one relator")
        self.source = p
        self.alphabet = ByteAlphabet(p.gens)
        # orientation id -> (relator index, sign, bytes)
        self.orientations = []
        for idx, r in enumerate(p.rels):
            b = self.alphabet.encode(r)
            self.orientations.append((idx, 1, b))
            self.orientations.append((idx, -1, self.alphabet.inverse(b)))
        self.lengths = [len(b) for _, _, b in self.orientations]
        self.min_length = min(self.lengths)
        self.max_length = max(self.lengths)
        self.report: PieceReport | None = None
        self._index = None

    def element(self, oid: int, offset: int) -> bytes:
        b = self.orientations[oid][2]
        return b[offset:] + b[:offset]

    def __len__(self):
        return len({self.element(o, i) for o, L in enumerate(self.lengths) for i in range(L)})


def verify_metric_condition(p: Presentation | SymmetrizedSet, lam: int = 6) -> PieceReport:
    """Check C'(1/lam): every piece is shorter than ``|r|/lam`` for each ``r`` containing it."""
    if lam < 2:
        raise ValueError("lambda must be at least 2")
    sym = p if isinstance(p, SymmetrizedSet) else SymmetrizedSet(p)
    parts, starts = [], []
    sep = 256
    pos = 0
    for oid, (_, _, b) in enumerate(sym.orientations):
        arr = np.frombuffer(b + b, dtype=np.uint8).astype(np.int64)
        parts.append(arr)
        parts.append(np.array([sep], dtype=np.int64))
        starts.append(pos)
        pos += len(arr) + 1
        sep += 1
    text = np.concatenate(parts)
    sa = suffix_array(text)
    lcp = lcp_array(text.tolist(), sa)
    # map text position -> (oid, offset) for rotation starts
    owner = {}
    for oid, st in enumerate(starts):
        for o in range(sym.lengths[oid]):
            owner[st + o] = (oid, o)
    entries = []  # (oid, offset, lcp with previous rotation entry)
    run_min = None
    for r, sp in enumerate(sa.tolist()):
        if r > 0:
            run_min = lcp[r] if run_min is None else min(run_min, lcp[r])
        if sp in owner:
            entries.append((owner[sp], run_min if entries else 0))
            run_min = None
    # group equal words
    groups = []  # list of [members, lcp_to_prev_group]
    for (oid, o), h in entries:
        L = sym.lengths[oid]
        if groups:
            last_oid, _ = groups[-1][0][-1]
            if sym.lengths[last_oid] == L and h >= L:
                groups[-1][0].append((oid, o))
                continue
        groups.append([[(oid, o)], h])
    best = None  # (ratio, piece, member, other)
    max_piece = 0
    for gi, (members, h_prev) in enumerate(groups):
        L = sym.lengths[members[0][0]]
        sources = [(sym.orientations[oid][0], sym.orientations[oid][1]) for oid, _ in members]
        cand = []
        if len(set(sources)) < len(sources):
            # proper power: a relator overlaps itself at a nonzero offset
            dup = next(m for m, s in zip(members, sources) if sources.count(s) > 1)
            other = next(m for m, s in zip(members, sources)
                         if s == sym.orientations[dup[0]][:2] and m != dup)
            cand.append((L, dup, other))
        if gi > 0:
            prev = groups[gi - 1][0][-1]
            cand.append((min(h_prev, L, sym.lengths[prev[0]]), members[0], prev))
        if gi + 1 < len(groups):
            nxt_members, h_next = groups[gi + 1]
            nxt = nxt_members[0]
            cand.append((min(h_next, L, sym.lengths[nxt[0]]), members[0], nxt))
        for piece, mine, other in cand:
            max_piece = max(max_piece, piece)
            ratio = piece / L
            if best is None or ratio > best[0]:
                best = (ratio, piece, mine, other)
    witness = None
    if best is not None and best[1] > 0:
        _, piece, (oid1, o1), (oid2, o2) = best
        w1 = sym.element(oid1, o1)
        witness = {
            "piece": str(sym.alphabet.decode(w1[:piece])),
            "relator1": {"index": sym.orientations[oid1][0], "sign": sym.orientations[oid1][1], "offset": o1},
            "relator2": {"index": sym.orientations[oid2][0], "sign": sym.orientations[oid2][1], "offset": o2},
        }
        assert w1[:piece] == sym.element(oid2, o2)[:piece]
    ratio = best[0] if best else 0.0
    passed = best is None or best[0] * lam < 1
    rep = PieceReport(lam, passed, max_piece, sym.min_length, ratio, witness,
                      n_elements=len(groups))
    if lam == 6:
        sym.report = rep
    return rep


def _lcp(a: bytes, i: int, b: bytes, j: int, limit: int) -> int:
    lo, hi = 0, min(limit, len(a) - i, len(b) - j)
    if a[i:i + hi] == b[j:j + hi]:
        return hi
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a[i:i + mid] == b[j:j + mid]:
            lo = mid
        else:
            hi = mid - 1
    return lo


class DehnSolver:
    """Dehn's algorithm for a presentation verified C'(1/6)."""

    tag = "dehn"

    def __init__(self, sym: SymmetrizedSet | Presentation):
        if isinstance(sym, Presentation):
            sym = SymmetrizedSet(sym)
            verify_metric_condition(sym, 6)
        if sym.report is None or sym.report.lam != 6 or not sym.report.passed:
            raise UnverifiedPresentation("presentation has not passed the C'(1/6) check")
        self.sym = sym
        self.presentation = sym.source
        self.key_length = max(1, math.ceil(sym.min_length / 6))
        K = self.key_length
        index: dict[bytes, list] = {}
        self._doubled = []
        for oid, (_, _, b) in enumerate(sym.orientations):
            d = b + b
            self._doubled.append(d)
            for o in range(len(b)):
                index.setdefault(d[o:o + K], []).append((oid, o))
        self._index = index

    def _find(self, w: bytes, start: int):
        K = self.key_length
        index = self._index
        for pos in range(start, len(w) - K + 1):
            cands = index.get(w[pos:pos + K])
            if not cands:
                continue
            for oid, o in cands:
                L = self.sym.lengths[oid]
                l = _lcp(w, pos, self._doubled[oid], o, L)
                if 2 * l > L:
                    return pos, oid, o, l
        return None

    def reduce(self, w: Word) -> tuple[Word, Certificate]:
        """Apply Dehn replacements until none applies; return the final word."""
        check_alphabet(w, self.presentation.gens)
        ab = self.sym.alphabet
        cert = Certificate(context=self.presentation)
        cur = ab.reduce(ab.encode(w))
        if ab.encode(w) != cur:
            cert.add("free-cancel")
        start = 0
        while True:
            hit = self._find(cur, start)
            if hit is None:
                return ab.decode(cur), cert
            pos, oid, o, l = hit
            idx, sign, base = self.sym.orientations[oid]
            L = len(base)
            rest = self._doubled[oid][o + l:o + L]
            new = ab.reduce(cur[:pos] + ab.inverse(rest) + cur[pos + l:])
            assert len(new) < len(cur), "Dehn step must shorten the word"
            conj = ab.decode(ab.reduce(cur[:pos] + ab.inverse(base[:o])))
            cert.add("relator-apply", idx, sign, conj)
            cur = new
            start = max(0, pos - self.sym.max_length)

    def is_trivial(self, w: Word):
        out, cert = self.reduce(w)
        return (not out), cert


def dehn_is_trivial(solver: DehnSolver, w: Word) -> tuple[bool, Certificate]:
    return solver.is_trivial(w)


def shortword_nontrivial(solver: DehnSolver, w: Word) -> bool | None:
    """``True`` ("non-trivial") for short cyclically reduced words, else ``None``."""
    from .words import cyclic_reduce

    red = free_reduce(w, solver.presentation.gens)
    core, _ = cyclic_reduce(red)
    if red and core == red and 2 * len(red) <= solver.sym.min_length:
        return True
    return None
