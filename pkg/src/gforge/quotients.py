"""Homomorphism counting into symmetric and cyclic groups by backtracking.

Group elements are indices into a multiplication table; each search level
assigns one generator and evaluates, vectorised over all candidate images,
every relator whose generators are then all assigned.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .words import Presentation, Word


class BudgetExceeded(RuntimeError):
    pass


class FiniteGroup:
    """A finite group given by its multiplication table."""

    def __init__(self, name: str, elements: list, mult: np.ndarray, identity: int,
                 classes: list[list[int]]):
        self.name = name
        self.elements = elements
        self.mult = mult
        self.identity = identity
        self.inverse = np.argmax(mult == identity, axis=1)
        self.classes = classes
        self.order = len(elements)

    def power(self, x, e: int):
        """``x^e`` for an index or an index array, by repeated squaring."""
        x = np.asarray(x)
        if e < 0:
            x, e = self.inverse[x], -e
        result = np.full(x.shape, self.identity, dtype=self.mult.dtype)
        base = x
        while e:
            if e & 1:
                result = self.mult[result, base]
            e >>= 1
            if e:
                base = self.mult[base, base]
        return result


@lru_cache(maxsize=16)
def symmetric_group(k: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    arr = np.array(perms, dtype=np.int64).reshape(len(perms), k)
    radix = k ** np.arange(k)[::-1]
    keys = (arr * radix).sum(axis=1)
    lookup = np.zeros(keys.max() + 1, dtype=np.int32)
    lookup[keys] = np.arange(len(perms), dtype=np.int32)
    dtype = np.int16 if len(perms) < 2 ** 15 else np.int32
    mult = np.empty((len(perms), len(perms)), dtype=dtype)
    for i in range(len(perms)):
        # mult[i, j] = perm_i then perm_j, i.e. x -> perm_j[perm_i[x]]
        prod = arr[:, arr[i]]
        mult[i] = lookup[(prod * radix).sum(axis=1)]
    ident = index[tuple(range(k))]
    by_type: dict[tuple, list[int]] = {}
    for p, i in index.items():
        by_type.setdefault(_cycle_type(p), []).append(i)
    classes = [sorted(v) for _, v in sorted(by_type.items())]
    return FiniteGroup(f"S{k}", perms, mult, ident, classes)


@lru_cache(maxsize=32)
def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    mult = ((idx[:, None] + idx[None, :]) % n).astype(np.int16)
    return FiniteGroup(f"Z/{n}", list(range(n)), mult, 0, [[i] for i in range(n)])


def _cycle_type(p) -> tuple:
    seen = [False] * len(p)
    lens = []
    for i in range(len(p)):
        if not seen[i]:
            j, c = i, 0
            while not seen[j]:
                seen[j] = True
                j = p[j]
                c += 1
            lens.append(c)
    return tuple(sorted(lens, reverse=True))


def _split_target(target) -> tuple[str, int]:
    if isinstance(target, tuple):
        kind, n = target
    else:
        s = target.replace(" ", "")
        kind, n = (s[0], int(s[2:])) if s.startswith("Z/") else (s[0], int(s[1:]))
    return kind.upper(), int(n)


def parse_target(target) -> FiniteGroup:
    """``"S5"``, ``"Z/12"``, ``("S", 5)`` or a :class:`FiniteGroup`."""
    if isinstance(target, FiniteGroup):
        return target
    kind, n = _split_target(target)
    if kind == "S":
        return symmetric_group(int(n))
    if kind == "Z":
        return cyclic_group(int(n))
    raise ValueError(f"unknown target {target!r}")


def _target_key(G: FiniteGroup):
    return ("S", len(G.elements[0])) if G.name.startswith("S") else ("Z", G.order)


@dataclass
class QuotientReport:
    presentation: str | None
    target: str
    target_order: int
    homs: int = 0
    nontrivial: int = 0
    class_collapsed_homs: int = 0
    witness: dict | None = None
    nodes: int = 0
    elapsed: float = 0.0
    status: str = "complete"
    order: tuple = ()

    def as_dict(self) -> dict:
        return {"presentation": self.presentation, "target": self.target,
                "target_order": self.target_order, "homs": self.homs,
                "nontrivial_image": self.nontrivial,
                "class_collapsed_homs": self.class_collapsed_homs,
                "witness": self.witness, "nodes": self.nodes,
                "elapsed_s": round(self.elapsed, 4), "status": self.status,
                "generator_order": list(self.order)}


def search_order(p: Presentation) -> tuple[str, ...]:
    """Greedy generator order: complete as many relators as early as possible."""
    remaining = list(p.gens)
    supports = [set(r.generators()) for r in p.rels]
    chosen: list[str] = []
    while remaining:
        def score(g):
            have = set(chosen) | {g}
            done = sum(1 for s in supports if s <= have and not s <= set(chosen))
            touch = sum(1 for s in supports if g in s)
            return (done, touch)
        best = max(remaining, key=lambda g: (score(g), -remaining.index(g)))
        chosen.append(best)
        remaining.remove(best)
    return tuple(chosen)


class _Search:
    def __init__(self, p: Presentation, G: FiniteGroup, order, max_nodes):
        self.p = p
        self.G = G
        self.order = tuple(order)
        pos = {g: i for i, g in enumerate(self.order)}
        self.checks: list[list[Word]] = [[] for _ in self.order]
        for r in p.rels:
            self.checks[max(pos[g] for g in r.generators())].append(r)
        self.max_nodes = max_nodes
        self.nodes = 0
        self.witness = None

    def _evaluate(self, r: Word, assigned: dict, level_gen: str, cands: np.ndarray):
        G = self.G
        acc = np.full(cands.shape, G.identity, dtype=G.mult.dtype)
        for g, e in r.runs:
            x = cands if g == level_gen else np.asarray(assigned[g])
            acc = G.mult[acc, G.power(x, e)]
        return acc == G.identity

    def count(self, level: int, assigned: dict, cands: np.ndarray | None = None) -> int:
        """Number of homomorphisms extending ``assigned`` (levels ``level..``)."""
        if level == len(self.order):
            if self.witness is None and any(v != self.G.identity for v in assigned.values()):
                self.witness = dict(assigned)
            return 1
        gen = self.order[level]
        if cands is None:
            cands = np.arange(self.G.order)
        mask = np.ones(len(cands), dtype=bool)
        for r in self.checks[level]:
            mask &= self._evaluate(r, assigned, gen, cands)
        good = cands[mask]
        self.nodes += len(cands)
        if self.nodes > self.max_nodes:
            raise BudgetExceeded(f"node budget {self.max_nodes} exceeded")
        if level == len(self.order) - 1:
            if self.witness is None and len(good):
                nontriv = [x for x in good.tolist() if x != self.G.identity] \
                    if all(v == self.G.identity for v in assigned.values()) else good.tolist()
                if nontriv:
                    self.witness = dict(assigned, **{gen: nontriv[0]})
            return len(good)
        total = 0
        for x in good.tolist():
            assigned[gen] = x
            total += self.count(level + 1, assigned)
        assigned.pop(gen, None)
        return total


def _count_from_rep(args):
    text, target, order, rep, max_nodes = args
    from .words import parse_presentation
    p = parse_presentation(text)
    G = parse_target(target)
    s = _Search(p, G, order, max_nodes)
    c = s.count(0, {}, np.array([rep]))
    return c, s.nodes, s.witness


def hom_search(p: Presentation, target, order=None, jobs: int = 1,
               max_nodes: int = 10 ** 9, max_degree: int = 7) -> QuotientReport:
    """Exact count of homomorphisms ``p -> target`` (total and with non-trivial image)."""
    if not isinstance(target, FiniteGroup):
        kind, n = _split_target(target)
        if kind == "S" and n > max_degree:
            raise ValueError(f"degree above configured maximum {max_degree}")
    G = parse_target(target)
    order = tuple(order) if order else search_order(p)
    if sorted(order) != sorted(p.gens):
        raise ValueError("order must be a permutation of the generators")
    t0 = time.perf_counter()
    rep = QuotientReport(p.name, G.name, G.order, order=order)
    if not order:
        rep.homs = rep.class_collapsed_homs = 1
        rep.elapsed = time.perf_counter() - t0
        return rep
    reps = [(c[0], len(c)) for c in G.classes]
    from .words import print_presentation
    work = [(print_presentation(p), _target_key(G), order, r, max_nodes) for r, _ in reps]
    try:
        if jobs and jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(_count_from_rep, work))
        else:
            results = [_count_from_rep(w) for w in work]
    except BudgetExceeded as exc:
        rep.status = f"budget-exceeded: {exc}"
        rep.elapsed = time.perf_counter() - t0
        return rep
    for (r, size), (c, nodes, wit) in zip(reps, results):
        rep.homs += size * c
        rep.class_collapsed_homs += c
        rep.nodes += nodes
        if rep.witness is None and wit is not None:
            rep.witness = {g: _element_repr(G, x) for g, x in wit.items()}
    rep.nontrivial = rep.homs - 1
    rep.elapsed = time.perf_counter() - t0
    if rep.witness is not None:
        assert verify_hom(p, G, rep.witness)
    return rep


def _element_repr(G: FiniteGroup, x: int):
    e = G.elements[x]
    return list(e) if isinstance(e, tuple) else e


def verify_hom(p: Presentation, target, images: dict) -> bool:
    """Independent check that ``images`` kills every relator (plain permutation arithmetic)."""
    G = parse_target(target)
    if G.name.startswith("S"):
        k = len(G.elements[0])
        ident = tuple(range(k))

        def mul(x, y):  # x then y
            return tuple(y[x[i]] for i in range(k))

        def inv(x):
            out = [0] * k
            for i, v in enumerate(x):
                out[v] = i
            return tuple(out)
        img = {g: tuple(v) for g, v in images.items()}
    else:
        n = G.order
        ident = 0

        def mul(x, y):
            return (x + y) % n

        def inv(x):
            return (-x) % n
        img = dict(images)
    for r in p.rels:
        acc = ident
        for g, e in r.runs:
            x = img[g] if e > 0 else inv(img[g])
            order, y = 1, x
            while y != ident:
                y = mul(y, x)
                order += 1
            for _ in range(abs(e) % order):
                acc = mul(acc, x)
        if acc != ident:
            return False
    return True


@dataclass
class SweepReport:
    presentation: str | None
    reports: list[QuotientReport] = field(default_factory=list)

    @property
    def nontrivial_found(self) -> bool:
        return any(r.nontrivial > 0 for r in self.reports)

    @property
    def complete(self) -> bool:
        return all(r.status == "complete" for r in self.reports)

    @property
    def verdict(self) -> str:
        if self.nontrivial_found:
            return "non-trivial quotient found"
        if not self.complete:
            return "incomplete"
        return "no non-trivial quotient found at this scale"

    def as_dict(self) -> dict:
        return {"presentation": self.presentation, "verdict": self.verdict,
                "note": "bounded-order corroboration only; larger finite quotients are not excluded",
                "reports": [r.as_dict() for r in self.reports]}


def quotient_sweep(p: Presentation, max_degree: int = 5, max_cyclic: int = 12,
                   jobs: int = 1, max_nodes: int = 10 ** 9) -> SweepReport:
    """``hom_search`` against ``S_2..S_max_degree`` and ``Z/2..Z/max_cyclic``."""
    out = SweepReport(p.name)
    for k in range(2, max_degree + 1):
        out.reports.append(hom_search(p, ("S", k), jobs=jobs, max_nodes=max_nodes,
                                      max_degree=max(7, max_degree)))
    for n in range(2, max_cyclic + 1):
        out.reports.append(hom_search(p, ("Z", n), jobs=jobs, max_nodes=max_nodes))
    return out


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("GFORGE_JOBS", "1")))
    except ValueError:
        return 1
