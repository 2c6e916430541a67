"""Words, presentations and homomorphisms given on generators.

Words are stored run-length style as ``(generator, exponent)`` runs so that
powers such as ``a^(2^n)`` cost one run rather than ``2^n`` letters.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Syntax error in a presentation, word or map file."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class AlphabetError(ValueError):
    pass


class Word:
    """An element of a free group as a tuple of ``(gen, exp)`` runs.

    The runs are kept exactly as given (zero exponents dropped); use
    :func:`free_reduce` or multiplication to get reduced words.
    """

    __slots__ = ("runs", "_hash")

    def __init__(self, runs: Iterable[tuple[str, int]] = ()):
        self.runs = tuple((g, int(e)) for g, e in runs if e)
        self._hash = None

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "Word":
        return cls(((name, exp),))

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[str, int]]) -> "Word":
        runs: list[list] = []
        for g, s in letters:
            if runs and runs[-1][0] == g and (runs[-1][1] > 0) == (s > 0):
                runs[-1][1] += s
            else:
                runs.append([g, s])
        return cls((g, e) for g, e in runs)

    def letters(self) -> list[tuple[str, int]]:
        out = []
        for g, e in self.runs:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.runs)

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.runs == other.runs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.runs)
        return self._hash

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __str__(self) -> str:
        if not self.runs:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.runs)

    def concat(self, *others: "Word") -> "Word":
        runs = list(self.runs)
        for o in others:
            runs.extend(o.runs)
        return Word(runs)

    def __mul__(self, other: "Word") -> "Word":
        return free_reduce(self.concat(other))

    def inverse(self) -> "Word":
        return Word((g, -e) for g, e in reversed(self.runs))

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return free_reduce(self).inverse() ** (-k)
        if k == 0 or not self.runs:
            return Word()
        core, conj = cyclic_reduce(free_reduce(self))
        if len(core.runs) == 1:
            g, e = core.runs[0]
            body = Word(((g, e * k),))
        else:
            body = Word(core.runs * k)
        return free_reduce(conj.concat(body, conj.inverse()))

    def generators(self) -> set[str]:
        return {g for g, _ in self.runs}

    def exponent_sum(self, gen: str) -> int:
        return sum(e for g, e in self.runs if g == gen)

    def is_reduced(self) -> bool:
        return all(a[0] != b[0] for a, b in zip(self.runs, self.runs[1:]))


def check_alphabet(w: Word, alphabet: Iterable[str]) -> None:
    known = set(alphabet)
    for g, _ in w.runs:
        if g not in known:
            raise AlphabetError(f"unknown generator {g!r}")


def free_reduce(w: Word, alphabet: Iterable[str] | None = None) -> Word:
    """Return the freely reduced form of ``w``."""
    if alphabet is not None:
        check_alphabet(w, alphabet)
    stack: list[list] = []
    for g, e in w.runs:
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([g, e])
    return Word((g, e) for g, e in stack)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split a reduced word as ``conj * core * conj^-1`` with ``core`` cyclically reduced."""
    runs = list(free_reduce(w).runs)
    conj: list[tuple[str, int]] = []
    while len(runs) >= 2 and runs[0][0] == runs[-1][0]:
        g, e = runs[0]
        f = runs[-1][1]
        if e + f == 0:
            conj.append((g, e))
            runs = runs[1:-1]
        else:
            conj.append((g, -f))
            runs = [(g, e + f)] + runs[1:-1]
            break
    return Word(runs), free_reduce(Word(conj))


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u v u^-1 v^-1``."""
    return free_reduce(u.concat(v, u.inverse(), v.inverse()))


def rotations(w: Word) -> list[Word]:
    """All cyclic permutations of a cyclically reduced word, letter by letter."""
    letters = w.letters()
    return [Word.from_letters(letters[i:] + letters[:i]) for i in range(len(letters))]


def same_relator(u: Word, v: Word) -> bool:
    """True if ``v`` is a cyclic permutation of ``u`` or of ``u^-1``."""
    cu = cyclic_reduce(u)[0]
    cv = cyclic_reduce(v)[0]
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    a = _letter_key(cv)
    for cand in (cu, cu.inverse()):
        b = _letter_key(cand)
        if _is_rotation(a, b):
            return True
    return False


def _letter_key(w: Word) -> tuple:
    return tuple(w.letters())


def _is_rotation(a: tuple, b: tuple) -> bool:
    if len(a) != len(b):
        return False
    n = len(a)
    doubled = b + b
    return any(doubled[i:i + n] == a for i in range(n))


@dataclass(frozen=True)
class Presentation:
    """A finite presentation ``<gens | rels>``.

    Relators are stored freely and cyclically reduced; empty relators are
    dropped with a warning.
    """

    gens: tuple[str, ...]
    rels: tuple[Word, ...] = ()
    name: str | None = None

    def __post_init__(self):
        gens = tuple(self.gens)
        if len(set(gens)) != len(gens):
            raise ValueError("duplicate generator")
        for g in gens:
            if not IDENT.match(g):
                raise ValueError(f"invalid generator name {g!r}")
        rels = []
        for r in self.rels:
            check_alphabet(r, gens)
            core = cyclic_reduce(r)[0]
            if not core:
                warnings.warn(f"dropping relator {r} which reduces to the empty word")
                continue
            rels.append(core)
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "rels", tuple(rels))

    @property
    def is_balanced(self) -> bool:
        return len(self.gens) == len(self.rels)

    def word(self, text: str) -> Word:
        return parse_word(text, self.gens)

    def structurally_equal(self, other: "Presentation") -> bool:
        return self.gens == other.gens and self.rels == other.rels


class GenMap:
    """A homomorphism described by the images of the domain generators."""

    def __init__(self, domain: Presentation, codomain: Presentation,
                 images: Mapping[str, Word], name: str | None = None):
        missing = [g for g in domain.gens if g not in images]
        if missing:
            raise AlphabetError(f"map has no image for {missing}")
        self.domain = domain
        self.codomain = codomain
        self.images = {g: free_reduce(images[g], codomain.gens) for g in domain.gens}
        self.name = name

    def __call__(self, w: Word) -> Word:
        return substitute(self, w)

    def __getitem__(self, g: str) -> Word:
        return self.images[g]

    def __eq__(self, other) -> bool:
        return (isinstance(other, GenMap) and self.images == other.images
                and self.domain.gens == other.domain.gens)

    def __repr__(self) -> str:
        body = ", ".join(f"{g} -> {w}" for g, w in self.images.items())
        return f"GenMap({body})"

    @classmethod
    def identity(cls, p: Presentation) -> "GenMap":
        return cls(p, p, {g: Word.gen(g) for g in p.gens})


def substitute_images(images: Mapping[str, Word], w: Word) -> Word:
    """Replace every letter of ``w`` by its image and freely reduce."""
    runs: list[tuple[str, int]] = []
    for g, e in w.runs:
        try:
            img = images[g]
        except KeyError:
            raise AlphabetError(f"generator {g!r} missing from map") from None
        runs.extend((img ** e).runs)
    return free_reduce(Word(runs))


def substitute(m: GenMap, w: Word) -> Word:
    return substitute_images(m.images, w)


def compose(outer: GenMap, inner: GenMap) -> GenMap:
    """The map ``outer . inner`` (apply ``inner`` first)."""
    if tuple(inner.codomain.gens) != tuple(outer.domain.gens):
        raise AlphabetError("alphabet mismatch in compose")
    images = {g: substitute(outer, w) for g, w in inner.images.items()}
    return GenMap(inner.domain, outer.codomain, images)


def erase(w: Word, gens: Iterable[str]) -> Word:
    """Delete all letters in ``gens`` and freely reduce."""
    drop = set(gens)
    return free_reduce(Word((g, e) for g, e in w.runs if g not in drop))


def rename(w: Word, table: Mapping[str, str]) -> Word:
    return Word((table.get(g, g), e) for g, e in w.runs)


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^([+-]?\d+))?\Z")


def parse_word(text: str, alphabet: Sequence[str] | None = None,
               line: int = 0, col0: int = 1) -> Word:
    """Parse ``"t a^2 t^-1 a^-3"``; ``"1"`` is the empty word."""
    runs = []
    pos = 0
    for tok in text.split():
        pos = text.index(tok, pos)
        col = col0 + pos
        pos += len(tok)
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad token {tok!r}", line, col)
        g, k = m.group(1), m.group(2)
        exp = 1 if k is None else int(k)
        if exp == 0:
            raise ParseError("zero exponent", line, col)
        if alphabet is not None and g not in alphabet:
            raise ParseError(f"unknown generator {g!r}", line, col)
        runs.append((g, exp))
    return Word(runs)


def parse_presentation(text: str) -> Presentation:
    gens: list[str] | None = None
    rels: list[tuple[str, int, int]] = []
    name = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError("expected 'gens:', 'rel:' or 'name:'", lineno, 1)
        col = len(key) + 2 + (len(line) - len(line.lstrip()))
        if key == "gens":
            if gens is not None:
                raise ParseError("second 'gens:' line", lineno, 1)
            gens = []
            for m in re.finditer(r"\S+", rest):
                tok = m.group()
                if not IDENT.match(tok):
                    raise ParseError(f"bad generator name {tok!r}", lineno, col + m.start())
                if tok in gens:
                    raise ParseError(f"duplicate generator {tok!r}", lineno, col + m.start())
                gens.append(tok)
        elif key == "rel":
            rels.append((rest, lineno, col))
        elif key == "name":
            name = rest.strip() or None
        else:
            raise ParseError(f"unknown directive {key!r}", lineno, 1)
    if gens is None:
        gens = []
        # 'rel:' without 'gens:' still gets token-level checks
    words = [parse_word(t, gens if gens else None, ln, c) for t, ln, c in rels]
    if not gens and words:
        raise ParseError("relators given without a 'gens:' line", rels[0][1], 1)
    return Presentation(tuple(gens), tuple(words), name)


def print_presentation(p: Presentation) -> str:
    lines = []
    if p.name:
        lines.append(f"name: {p.name}")
    lines.append("gens: " + " ".join(p.gens))
    lines.extend(f"rel: {r}" for r in p.rels)
    return "\n".join(lines) + "\n"


def parse_genmap(text: str, resolve: Callable[[str], Presentation]) -> GenMap:
    """Parse a map file; ``resolve`` turns the ``from:``/``to:`` paths into presentations."""
    src = dst = None
    images = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "->" in line:
            if src is None or dst is None:
                raise ParseError("image line before 'from:'/'to:'", lineno, 1)
            lhs, rhs = line.split("->", 1)
            g = lhs.strip()
            if g not in src.gens:
                raise ParseError(f"unknown domain generator {g!r}", lineno, 1)
            images[g] = parse_word(rhs, dst.gens, lineno, line.index("->") + 3)
            continue
        key, sep, rest = line.partition(":")
        if key.strip() == "from":
            src = resolve(rest.strip())
        elif key.strip() == "to":
            dst = resolve(rest.strip())
        else:
            raise ParseError(f"unknown directive {key.strip()!r}", lineno, 1)
    if src is None or dst is None:
        raise ParseError("map file needs 'from:' and 'to:' lines")
    return GenMap(src, dst, images)


def print_genmap(m: GenMap, src_path: str, dst_path: str) -> str:
    lines = [f"from: {src_path}", f"to: {dst_path}"]
    lines.extend(f"{g} -> {w}" for g, w in m.images.items())
    return "\n".join(lines) + "\n"
