"""Free group words over a named alphabet.

A letter is a nonzero int: ``k`` stands for generator ``k-1`` and ``-k`` for
its inverse.  Words are always stored freely reduced.
"""
from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence


class AlphabetMismatch(ValueError):
    pass


class ParseError(ValueError):
    pass


class UnmappedGenerator(KeyError):
    pass


class Alphabet:
    __slots__ = ("names", "index")

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate generator names")
        for n in self.names:
            if not _NAME.fullmatch(n):
                raise ValueError(f"bad generator name {n!r}")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Alphabet({list(self.names)!r})"

    def gen(self, name: str) -> "Word":
        return Word(self, (self.index[name] + 1,), reduced=True)

    def gens(self) -> list["Word"]:
        return [Word(self, (i + 1,), reduced=True) for i in range(len(self.names))]

    def letter_name(self, letter: int) -> str:
        n = self.names[abs(letter) - 1]
        return n if letter > 0 else n + "^-1"


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_@.]*")
_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_@.]*)(?:\^(-?\d+))?\s*")


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("letter 0")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(letters))


def cyclic_reduce(letters: Sequence[int]) -> tuple[int, ...]:
    w = free_reduce(letters)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def cyclic_canonical(letters: Sequence[int]) -> tuple[int, ...]:
    """Least rotation of w or w^-1, comparing letters by (|x|, x<0)."""
    w = cyclic_reduce(letters)
    if not w:
        return w
    key = lambda x: (abs(x), x < 0)
    best = None
    best_key = None
    for cand in (w, invert(w)):
        n = len(cand)
        for i in range(n):
            rot = cand[i:] + cand[:i]
            k = [key(x) for x in rot]
            if best_key is None or k < best_key:
                best, best_key = rot, k
    return best


def is_rotation(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    s = tuple(b) + tuple(b)
    n = len(a)
    a = tuple(a)
    return any(s[i:i + n] == a for i in range(n))


class Word:
    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = (), reduced: bool = False):
        self.alphabet = alphabet
        letters = tuple(letters)
        k = len(alphabet)
        for x in letters:
            if x == 0 or abs(x) > k:
                raise ValueError(f"letter {x} outside alphabet of size {k}")
        self.letters = letters if reduced else free_reduce(letters)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Word":
        return cls(alphabet, (), reduced=True)

    def _check(self, other: "Word"):
        if not isinstance(other, Word):
            return NotImplemented
        if other.alphabet != self.alphabet:
            raise AlphabetMismatch(f"{self.alphabet!r} vs {other.alphabet!r}")
        return None

    def __mul__(self, other: "Word") -> "Word":
        r = self._check(other)
        if r is NotImplemented:
            return r
        a, b = self.letters, other.letters
        i = 0
        m = min(len(a), len(b))
        while i < m and a[len(a) - 1 - i] == -b[i]:
            i += 1
        return Word(self.alphabet, a[:len(a) - i] + b[i:], reduced=True)

    def inverse(self) -> "Word":
        return Word(self.alphabet, invert(self.letters), reduced=True)

    def __invert__(self):
        return self.inverse()

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        out = Word.identity(self.alphabet)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self, by: "Word") -> "Word":
        """by * self * by^-1"""
        return by * self * by.inverse()

    def commutator(self, other: "Word") -> "Word":
        """[a, b] = a b a^-1 b^-1"""
        return self * other * self.inverse() * other.inverse()

    def substitute(self, images: Mapping[str, "Word"] | Sequence["Word"], target: Alphabet | None = None) -> "Word":
        if isinstance(images, Mapping):
            used = {abs(x) - 1 for x in self.letters}
            imgs = []
            for i, n in enumerate(self.alphabet.names):
                if n in images:
                    imgs.append(images[n])
                elif i in used:
                    raise UnmappedGenerator(n)
                else:
                    imgs.append(None)
        else:
            imgs = list(images)
            if len(imgs) < len(self.alphabet):
                raise UnmappedGenerator(self.alphabet.names[len(imgs)])
        if target is None:
            known = [w for w in imgs if w is not None]
            if not known:
                raise ValueError("need a target alphabet")
            target = known[0].alphabet
        out: list[int] = []
        inv_cache: dict[int, tuple[int, ...]] = {}
        for x in self.letters:
            img = imgs[abs(x) - 1]
            if img.alphabet != target:
                raise AlphabetMismatch("image in wrong alphabet")
            if x > 0:
                seq = img.letters
            else:
                seq = inv_cache.get(x)
                if seq is None:
                    seq = inv_cache[x] = invert(img.letters)
            for y in seq:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return Word(target, out, reduced=True)

    def cyclically_reduced(self) -> "Word":
        return Word(self.alphabet, cyclic_reduce(self.letters), reduced=True)

    def cyclically_reduce(self) -> tuple["Word", "Word"]:
        """(core, conjugator) with self = conjugator * core * conjugator^-1."""
        w = self.letters
        i, j = 0, len(w)
        while j - i >= 2 and w[i] == -w[j - 1]:
            i += 1
            j -= 1
        return Word(self.alphabet, w[i:j], reduced=True), Word(self.alphabet, w[:i], reduced=True)

    def exponent_sums(self) -> list[int]:
        v = [0] * len(self.alphabet)
        for x in self.letters:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return v

    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return True

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.alphabet == other.alphabet and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def __str__(self):
        if not self.letters:
            return "1"
        parts = []
        w = self.letters
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            n = self.alphabet.names[abs(w[i]) - 1]
            e = (j - i) * (1 if w[i] > 0 else -1)
            parts.append(n if e == 1 else f"{n}^{e}")
            i = j
        return " ".join(parts)


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse ``a b^-1 c^3`` style text; ``1`` or blank is the identity."""
    s = text.strip()
    if s in ("", "1"):
        return Word.identity(alphabet)
    s = s.replace("*", " ")
    pos = 0
    letters: list[int] = []
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse {s[pos:]!r} in {text!r}")
        name, exp = m.group(1), m.group(2)
        if name not in alphabet.index:
            raise ParseError(f"unknown generator {name!r}")
        g = alphabet.index[name] + 1
        e = 1 if exp is None else int(exp)
        letters.extend([g if e > 0 else -g] * abs(e))
        pos = m.end()
    return Word(alphabet, letters)


def word_from_names(alphabet: Alphabet, items: Iterable[tuple[str, int]]) -> Word:
    letters: list[int] = []
    for name, e in items:
        g = alphabet.index[name] + 1
        letters.extend([g if e > 0 else -g] * abs(e))
    return Word(alphabet, letters)
