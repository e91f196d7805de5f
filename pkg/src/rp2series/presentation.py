"""Finite presentations, homomorphisms and Tietze simplification."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .abelian import AbelianInvariants, abelian_invariants_of_matrix, smith_normal_form
from .words import (Alphabet, AlphabetMismatch, ParseError, Word, cyclic_canonical, cyclic_reduce,
                    free_reduce, invert, parse_word)


class OracleUnavailable(RuntimeError):
    pass


class Presentation:
    """Generators plus cyclically reduced, nonempty relators."""

    __slots__ = ("alphabet", "relators", "name")

    def __init__(self, alphabet: Alphabet | Sequence[str], relators: Iterable[Word | Sequence[int]] = (), name: str = ""):
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        self.alphabet = alphabet
        self.name = name
        rels = []
        for r in relators:
            if isinstance(r, Word):
                if r.alphabet != alphabet:
                    raise AlphabetMismatch("relator over a different alphabet")
                letters = r.letters
            else:
                letters = tuple(r)
            c = cyclic_reduce(letters)
            if c:
                rels.append(Word(alphabet, c, reduced=True))
        self.relators: tuple[Word, ...] = tuple(rels)

    @property
    def generators(self) -> tuple[str, ...]:
        return self.alphabet.names

    def gen(self, name: str) -> Word:
        return self.alphabet.gen(name)

    def gens(self) -> list[Word]:
        return self.alphabet.gens()

    def word(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def __repr__(self):
        return f"<Presentation {self.name or ''} {len(self.alphabet)} gens {len(self.relators)} rels>"

    def relation_matrix(self) -> list[list[int]]:
        return [r.exponent_sums() for r in self.relators]

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.alphabet.names)]
        lines += ["rel: " + str(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def with_relators(self, extra: Iterable[Word]) -> "Presentation":
        return Presentation(self.alphabet, list(self.relators) + list(extra), self.name)


def parse_presentation(text: str) -> Presentation:
    gens: list[str] | None = None
    rel_lines: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'gens:' or 'rel:'")
        key = key.strip()
        if key == "gens":
            if gens is not None:
                raise ParseError(f"line {lineno}: duplicate gens line")
            gens = rest.split()
        elif key == "rel":
            rel_lines.append(rest)
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
    if gens is None:
        raise ParseError("missing gens line")
    try:
        alphabet = Alphabet(gens)
    except ValueError as e:
        raise ParseError(str(e)) from None
    return Presentation(alphabet, [parse_word(r, alphabet) for r in rel_lines])


def parse_word_list(text: str, alphabet: Alphabet) -> list[Word]:
    """One word per line, ``#`` comments, optional ``word:`` prefix."""
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("word:"):
            line = line[5:]
        out.append(parse_word(line, alphabet))
    return out


# ---------------------------------------------------------------- abelianization

def abelian_invariants(p: Presentation) -> AbelianInvariants:
    return abelian_invariants_of_matrix(p.relation_matrix(), len(p.alphabet))


@dataclass
class AbelianizationMap:
    """Generator j goes to images[j] in Z/moduli[0] + Z/moduli[1] + ... (0 = Z)."""

    invariants: AbelianInvariants
    moduli: tuple[int, ...]
    images: list[tuple[int, ...]]

    def evaluate(self, w: Word) -> tuple[int, ...]:
        v = [0] * len(self.moduli)
        for x in w.letters:
            img = self.images[abs(x) - 1]
            s = 1 if x > 0 else -1
            for k, a in enumerate(img):
                v[k] += s * a
        return tuple(a % m if m else a for a, m in zip(v, self.moduli))


def abelianization_map(p: Presentation) -> AbelianizationMap:
    m = p.relation_matrix()
    k = len(p.alphabet)
    if not m:
        m = [[0] * k]
    snf = smith_normal_form(m, witnesses=True, left=False)
    V = snf.V
    coords = []
    moduli = []
    for i in range(k):
        d = abs(snf.diagonal[i]) if i < len(snf.diagonal) else 0
        if d == 1:
            continue
        coords.append(i)
        moduli.append(d)
    images = []
    for j in range(k):
        images.append(tuple((V[j][i] % d) if d else V[j][i] for i, d in zip(coords, moduli)))
    free = sum(1 for d in moduli if d == 0)
    tors = tuple(sorted(d for d in moduli if d))
    # put torsion first in divisor order, free coordinates last
    order = sorted(range(len(moduli)), key=lambda i: (moduli[i] == 0, moduli[i]))
    moduli = [moduli[i] for i in order]
    images = [tuple(img[i] for i in order) for img in images]
    return AbelianizationMap(AbelianInvariants(free, tors), tuple(moduli), images)


# ---------------------------------------------------------------- homomorphisms

@dataclass
class GroupHom:
    """Generator images of a presentation in a target.

    The target is a Presentation (images are Words) or any object with
    ``identity``, ``mul`` and ``inv`` (images are its elements).
    """

    source: Presentation
    target: object
    images: list

    def __post_init__(self):
        if isinstance(self.images, Mapping):
            self.images = [self.images[n] for n in self.source.alphabet.names]
        if len(self.images) != len(self.source.alphabet):
            raise ValueError("one image per source generator required")

    def apply(self, w: Word):
        if w.alphabet != self.source.alphabet:
            raise AlphabetMismatch("word not over the source alphabet")
        if isinstance(self.target, Presentation):
            return w.substitute(self.images, self.target.alphabet)
        return evaluate_in(self.target, self.images, w)


def evaluate_in(group, images: Sequence, w: Word):
    inv_images = {}
    out = group.identity
    for x in w.letters:
        if x > 0:
            out = group.mul(out, images[x - 1])
        else:
            g = inv_images.get(x)
            if g is None:
                g = inv_images[x] = group.inv(images[-x - 1])
            out = group.mul(out, g)
    return out


def check_homomorphism(h: GroupHom, decider: Callable[[Word], bool] | None = None) -> list[int]:
    """Indices of relators whose image is nontrivial (empty list: h is a homomorphism)."""
    bad = []
    if isinstance(h.target, Presentation):
        if decider is None:
            raise OracleUnavailable("no exact word-problem decider for the target")
        for i, r in enumerate(h.source.relators):
            if not decider(h.apply(r)):
                bad.append(i)
        return bad
    for i, r in enumerate(h.source.relators):
        if h.apply(r) != h.target.identity:
            bad.append(i)
    return bad


# ---------------------------------------------------------------- Tietze

@dataclass
class TietzeResult:
    presentation: Presentation
    # old generator name -> word in the new generators
    dictionary: dict[str, Word]
    # new generator name -> word in the old generators
    inverse_dictionary: dict[str, Word] = field(default_factory=dict)


def _occurrences(rel: tuple[int, ...], g: int) -> int:
    return sum(1 for x in rel if x == g or x == -g)


def _solve_for(rel: tuple[int, ...], g: int) -> tuple[int, ...]:
    """rel contains g exactly once; return the word equal to g."""
    i = next(k for k, x in enumerate(rel) if abs(x) == g)
    rot = rel[i:] + rel[:i]
    rest = rot[1:]
    # g * rest = 1  ->  g = rest^-1 ;  g^-1 * rest = 1 -> g = rest
    return invert(rest) if rot[0] > 0 else tuple(rest)


def _substitute_letters(rel: Sequence[int], g: int, expr: tuple[int, ...], expr_inv: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for x in rel:
        if x == g:
            seq = expr
        elif x == -g:
            seq = expr_inv
        else:
            seq = (x,)
        for y in seq:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return cyclic_reduce(out)


def tietze_simplify(p: Presentation, max_elim_length: int = 30, max_total_length: int = 2_000_000,
                    shorten: bool | None = None, max_growth: float | None = 1.5) -> TietzeResult:
    """Eliminate generators and shorten relators.

    Kept generators are a subset of the old ones.  Deterministic.  An
    elimination that would push the total relator length past ``max_growth``
    times the starting total is skipped, which keeps relators short.
    """
    ngen = len(p.alphabet)
    rels: dict[int, tuple[int, ...]] = {}
    occ: dict[int, set[int]] = {g: set() for g in range(1, ngen + 1)}
    seen: set[tuple[int, ...]] = set()
    next_id = 0

    def add_rel(r):
        nonlocal next_id
        r = cyclic_reduce(r)
        if not r:
            return
        c = cyclic_canonical(r)
        if c in seen:
            return
        seen.add(c)
        rid = next_id
        next_id += 1
        rels[rid] = r
        for x in r:
            occ[abs(x)].add(rid)

    def drop_rel(rid):
        r = rels.pop(rid)
        seen.discard(cyclic_canonical(r))
        for x in r:
            occ[abs(x)].discard(rid)

    for r in p.relators:
        add_rel(r.letters)
    if max_growth is not None:
        start = sum(len(r) for r in rels.values())
        max_total_length = min(max_total_length, int(max_growth * max(start, 1)))

    eliminated: list[tuple[int, tuple[int, ...]]] = []
    alive = set(range(1, ngen + 1))

    def eliminate(g, rid):
        expr = _solve_for(rels[rid], g)
        expr_inv = invert(expr)
        drop_rel(rid)
        for other in sorted(occ[g]):
            r = rels[other]
            drop_rel(other)
            add_rel(_substitute_letters(r, g, expr, expr_inv))
        eliminated.append((g, expr))
        alive.discard(g)

    def elimination_pass(limit):
        changed = False
        while True:
            best = None
            for rid in sorted(rels, key=lambda i: (len(rels[i]), i)):
                r = rels[rid]
                if len(r) > limit:
                    break
                if best is not None and len(r) > best[0][0]:
                    break
                counts: dict[int, int] = {}
                for x in r:
                    counts[abs(x)] = counts.get(abs(x), 0) + 1
                for g in sorted(counts):
                    if counts[g] == 1:
                        growth = (len(r) - 2) * (len(occ[g]) - 1)
                        key = (len(r), growth, g)
                        if best is None or key < best[0]:
                            best = (key, g, rid)
                if best is not None and len(r) <= 2:
                    break
            if best is None:
                return changed
            total = sum(len(r) for r in rels.values())
            if best[0][1] + total > max_total_length:
                return changed
            eliminate(best[1], best[2])
            changed = True

    def shorten_pass():
        # substring search runs on strings: letter x -> chr(2|x| + (x < 0))
        def enc(w):
            return "".join([chr(2 * x) if x > 0 else chr(-2 * x + 1) for x in w])

        changed = False
        ids = sorted(rels, key=lambda i: (len(rels[i]), i))
        for sid in ids:
            if sid not in rels:
                continue
            s = rels[sid]
            n = len(s)
            pieces = []
            for cand in (s, invert(s)):
                for i in range(n):
                    rot = cand[i:] + cand[:i]
                    for k in range(n // 2 + 1, n + 1):
                        pieces.append((enc(rot[:k]), k, invert(rot[k:])))
            for rid in sorted(rels):
                if rid == sid or rid not in rels:
                    continue
                r = rels[rid]
                if len(r) < len(s):
                    continue
                rr = enc(r + r[:n])
                for u, k, repl in pieces:
                    if k > len(r):
                        continue
                    pos = rr.find(u)
                    if 0 <= pos < len(r):
                        rot = r[pos:] + r[:pos]
                        new = repl + rot[k:]
                        if len(cyclic_reduce(new)) < len(r):
                            drop_rel(rid)
                            add_rel(new)
                            changed = True
                            break
        return changed

    if shorten is None:
        shorten = len(p.relators) <= 400
    for _ in range(50):
        changed = elimination_pass(max_elim_length)
        if shorten:
            changed = shorten_pass() or changed
        if not changed:
            break

    keep = sorted(alive)
    new_alpha = Alphabet([p.alphabet.names[g - 1] for g in keep])
    renum = {g: i + 1 for i, g in enumerate(keep)}

    def to_new(letters):
        return Word(new_alpha, [renum[abs(x)] * (1 if x > 0 else -1) for x in letters])

    # resolve eliminated generators into surviving ones, latest elimination first
    resolved: dict[int, tuple[int, ...]] = {}
    for g, expr in reversed(eliminated):
        out: list[int] = []
        for x in expr:
            seq = resolved.get(abs(x))
            if seq is None:
                seq = (x,) if abs(x) in alive else None
            elif x < 0:
                seq = invert(seq)
            if seq is None:
                raise AssertionError("unresolved generator in Tietze dictionary")
            out.extend(seq)
        resolved[g] = free_reduce(out)
    dictionary = {}
    for g in range(1, ngen + 1):
        name = p.alphabet.names[g - 1]
        dictionary[name] = to_new(resolved[g] if g in resolved else (g,))
    new_rels = [to_new(rels[rid]) for rid in sorted(rels, key=lambda i: (len(rels[i]), i))]
    inverse = {p.alphabet.names[g - 1]: Word(p.alphabet, (g,)) for g in keep}
    return TietzeResult(Presentation(new_alpha, new_rels, p.name), dictionary, inverse)


def _find(hay: tuple[int, ...], needle: tuple[int, ...], limit: int) -> int | None:
    k = len(needle)
    first = needle[0]
    for i in range(limit):
        if hay[i] == first and hay[i:i + k] == needle:
            return i
    return None


def presentation_digest(p: Presentation, words: Iterable[Word] = ()) -> str:
    h = hashlib.sha256(p.to_text().encode())
    for w in words:
        h.update(b"|" + str(w).encode())
    return h.hexdigest()
