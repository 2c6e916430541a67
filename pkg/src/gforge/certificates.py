"""Rewriting certificates and their replay.

A certificate is a list of steps; replaying them from the input word must
reproduce the claimed output word.  Step kinds:

``free-cancel``
    freely reduce the whole word.
``pinch i eps k``
    Baumslag-Solitar pinch on runs ``i..i+2``: ``t a^(pk) t^-1 -> a^(qk)``
    for ``eps = 1``, ``t^-1 a^(qk) t -> a^(pk)`` for ``eps = -1``.
``slide i k``
    ``a^e t^eps -> a^(e - qk) t a^(pk)`` (``eps = 1``) or
    ``a^(e - pk) t^-1 a^(qk)`` (``eps = -1``) on runs ``i, i+1``.
``commute-swap i``
    swap runs ``i`` and ``i+1`` of a graph-group word (generators must commute).
``relator-apply idx sign conj``
    left-multiply by ``(conj r^sign conj^-1)^-1`` and freely reduce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .words import Presentation, Word, free_reduce, parse_word


class CorruptCertificate(ValueError):
    pass


@dataclass
class Certificate:
    steps: list[tuple] = field(default_factory=list)
    context: Any = None

    def __len__(self):
        return len(self.steps)

    def add(self, *step):
        self.steps.append(tuple(step))

    def relator_applications(self) -> int:
        return sum(1 for s in self.steps if s[0] == "relator-apply")

    def to_text(self) -> str:
        lines = []
        for step in self.steps:
            kind, *args = step
            lines.append(" ".join(["step", kind] + [str(a) for a in args]))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, context=None) -> "Certificate":
        cert = cls(context=context)
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] != "step":
                raise ValueError(f"bad certificate line {line!r}")
            kind = parts[1]
            if kind == "free-cancel":
                cert.add(kind)
            elif kind in ("pinch",):
                cert.add(kind, int(parts[2]), int(parts[3]), int(parts[4]))
            elif kind in ("slide",):
                cert.add(kind, int(parts[2]), int(parts[3]))
            elif kind == "commute-swap":
                cert.add(kind, int(parts[2]))
            elif kind == "relator-apply":
                cert.add(kind, int(parts[2]), int(parts[3]),
                         parse_word(" ".join(parts[4:])))
            else:
                raise ValueError(f"unknown step kind {kind!r}")
        return cert


def _sign(x: int) -> int:
    return 1 if x > 0 else -1


def _pinch(runs: list, i: int, eps: int, k: int, g) -> list:
    try:
        (t1, m), (a, e), (t2, n) = runs[i], runs[i + 1], runs[i + 2]
    except (IndexError, ValueError):
        raise CorruptCertificate(f"pinch at {i}: not enough runs") from None
    inner = g.p * k if eps == 1 else g.q * k
    outer = g.q * k if eps == 1 else g.p * k
    if not (t1 == t2 == g.t and a == g.a and _sign(m) == eps and _sign(n) == -eps and e == inner):
        raise CorruptCertificate(f"pinch at {i} does not match the word")
    return runs[:i] + [(g.t, m - eps), (g.a, outer), (g.t, n + eps)] + runs[i + 3:]


def _slide(runs: list, i: int, k: int, g) -> list:
    try:
        (a, e), (t, m) = runs[i], runs[i + 1]
    except (IndexError, ValueError):
        raise CorruptCertificate(f"slide at {i}: not enough runs") from None
    if a != g.a or t != g.t:
        raise CorruptCertificate(f"slide at {i} does not match the word")
    eps = _sign(m)
    left, right = (g.q * k, g.p * k) if eps == 1 else (g.p * k, g.q * k)
    return runs[:i] + [(g.a, e - left), (g.t, eps), (g.a, right), (g.t, m - eps)] + runs[i + 2:]


def _swap(runs: list, i: int, g) -> list:
    if not 0 <= i < len(runs) - 1:
        raise CorruptCertificate(f"swap at {i} out of range")
    x, y = runs[i][0], runs[i + 1][0]
    if not g.commute(x, y):
        raise CorruptCertificate(f"swap at {i}: {x} and {y} do not commute")
    return runs[:i] + [runs[i + 1], runs[i]] + runs[i + 2:]


def _relator_apply(w: Word, idx: int, sign: int, conj: Word, pres: Presentation) -> Word:
    if not 0 <= idx < len(pres.rels) or sign not in (1, -1):
        raise CorruptCertificate(f"relator-apply: bad relator {idx}")
    r = pres.rels[idx] if sign == 1 else pres.rels[idx].inverse()
    return free_reduce(conj.concat(r.inverse(), conj.inverse(), w))


def replay(cert: Certificate, w: Word, context=None, reduce: bool = True) -> Word:
    """Deterministically replay ``cert`` from ``w``; raise on an inapplicable step.

    The result is freely reduced (an empty certificate yields ``free_reduce(w)``)
    unless ``reduce`` is false, which solvers use to apply single steps.
    """
    g = context if context is not None else cert.context
    for step in cert.steps:
        kind = step[0]
        if kind == "free-cancel":
            w = free_reduce(w)
        elif kind == "pinch":
            w = Word(_pinch(list(w.runs), step[1], step[2], step[3], g))
        elif kind == "slide":
            w = Word(_slide(list(w.runs), step[1], step[2], g))
        elif kind == "commute-swap":
            w = Word(_swap(list(w.runs), step[1], g))
        elif kind == "relator-apply":
            pres = g if isinstance(g, Presentation) else g.presentation
            w = _relator_apply(w, step[1], step[2], step[3], pres)
        else:
            raise CorruptCertificate(f"unknown step {kind!r}")
    return free_reduce(w) if reduce else w
