"""Coset tables: Todd-Coxeter enumeration, tables from finite images, transversals."""
from __future__ import annotations

import json
import os
import tempfile
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .presentation import GroupHom, Presentation, check_homomorphism, presentation_digest
from .words import Alphabet, Word, free_reduce, invert

SCHEMA_VERSION = 1


class EnumerationExceeded(RuntimeError):
    def __init__(self, msg: str, live_cosets: int = 0, defined: int = 0):
        super().__init__(msg)
        self.live_cosets = live_cosets
        self.defined = defined


class NotInSubgroup(ValueError):
    pass


class InvalidTransversal(ValueError):
    pass


class CacheError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumerationLimits:
    max_cosets: int = 2_000_000
    # cap on the total number of coset definitions made during a run
    max_deductions: int | None = None


def _col(letter: int) -> int:
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


class CosetTable:
    """Right action of the generators on cosets 0..n-1; coset 0 is the subgroup.

    ``cols[2*i]`` holds the action of generator i and ``cols[2*i+1]`` its inverse.
    """

    def __init__(self, alphabet: Alphabet, cols: list[list[int]], subgroup: tuple[Word, ...] = (), origin: str = ""):
        self.alphabet = alphabet
        self.cols = cols
        self.subgroup = subgroup
        self.origin = origin

    @property
    def n_cosets(self) -> int:
        return len(self.cols[0]) if self.cols else 1

    def __len__(self):
        return self.n_cosets

    def act_letter(self, c: int, letter: int) -> int:
        return self.cols[_col(letter)][c]

    def act(self, c: int, w: Word | Sequence[int]) -> int:
        letters = w.letters if isinstance(w, Word) else w
        cols = self.cols
        for x in letters:
            c = cols[2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1][c]
        return c

    def perm(self, g: int) -> tuple[int, ...]:
        return tuple(self.cols[2 * g])

    def is_complete(self) -> bool:
        return all(v >= 0 for col in self.cols for v in col)

    def check_consistency(self, relators: Sequence[Word] = ()) -> bool:
        n = self.n_cosets
        for g in range(len(self.alphabet)):
            f, b = self.cols[2 * g], self.cols[2 * g + 1]
            if any(b[f[c]] != c for c in range(n)):
                return False
        for r in relators:
            for c in range(n):
                if self.act(c, r) != c:
                    return False
        return True

    def standardize(self) -> "CosetTable":
        n = self.n_cosets
        new = {0: 0}
        order = [0]
        i = 0
        while i < len(order):
            c = order[i]
            i += 1
            for col in self.cols:
                d = col[c]
                if d not in new:
                    new[d] = len(order)
                    order.append(d)
        if len(order) != n:
            raise ValueError("coset table is not transitive")
        cols = [[new[col[old]] for old in order] for col in self.cols]
        return CosetTable(self.alphabet, cols, self.subgroup, self.origin)

    def key(self) -> tuple:
        return tuple(tuple(c) for c in self.cols)

    def to_json(self, presentation_hash: str = "", subgroup_hash: str = "") -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "presentation_hash": presentation_hash,
            "subgroup_hash": subgroup_hash,
            "generators": list(self.alphabet.names),
            "n_cosets": self.n_cosets,
            "action": [self.cols[2 * g] for g in range(len(self.alphabet))],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CosetTable":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise CacheError(f"unsupported schema version {data.get('schema_version')}")
        alphabet = Alphabet(data["generators"])
        n = data["n_cosets"]
        cols = []
        for fwd in data["action"]:
            if len(fwd) != n or sorted(fwd) != list(range(n)):
                raise CacheError("action array is not a permutation")
            inv = [0] * n
            for c, d in enumerate(fwd):
                inv[d] = c
            cols += [list(fwd), inv]
        return cls(alphabet, cols)


# ---------------------------------------------------------------- Todd-Coxeter

class _Enumerator:
    def __init__(self, ncols: int, limits: EnumerationLimits):
        self.ncols = ncols
        self.table: list[list[int]] = [[-1] * ncols]
        self.p = [0]
        self.limits = limits
        self.defined = 1
        self.max_def = limits.max_deductions if limits.max_deductions is not None else 10 * limits.max_cosets + 1000

    def rep(self, c):
        p = self.p
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def define(self, c, x):
        if len(self.table) >= self.limits.max_cosets:
            raise _Full()
        if self.defined >= self.max_def:
            raise EnumerationExceeded("definition limit reached", self.live(), self.defined)
        n = len(self.table)
        self.table.append([-1] * self.ncols)
        self.p.append(n)
        self.table[c][x] = n
        self.table[n][x ^ 1] = c
        self.defined += 1

    def live(self):
        return sum(1 for i, q in enumerate(self.p) if q == i)

    def merge(self, k, l, q):
        a, b = self.rep(k), self.rep(l)
        if a != b:
            if a > b:
                a, b = b, a
            self.p[b] = a
            q.append(b)

    def coincidence(self, a, b):
        q: list[int] = []
        self.merge(a, b, q)
        t = self.table
        i = 0
        while i < len(q):
            g = q[i]
            i += 1
            row = t[g]
            for x in range(self.ncols):
                d = row[x]
                if d >= 0:
                    t[d][x ^ 1] = -1
                    mu, nu = self.rep(g), self.rep(d)
                    if t[mu][x] >= 0:
                        self.merge(nu, t[mu][x], q)
                    elif t[nu][x ^ 1] >= 0:
                        self.merge(mu, t[nu][x ^ 1], q)
                    else:
                        t[mu][x] = nu
                        t[nu][x ^ 1] = mu

    def scan(self, a, w, fill):
        t = self.table
        f = a
        i = 0
        b = a
        j = len(w) - 1
        while True:
            while i <= j and t[f][w[i]] >= 0:
                f = t[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][w[j] ^ 1] >= 0:
                b = t[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                t[f][w[i]] = b
                t[b][w[i] ^ 1] = f
                return
            if not fill:
                return
            self.define(f, w[i])

    def lookahead(self, rels):
        for c in range(len(self.table)):
            if self.p[c] != c:
                continue
            for r in rels:
                if self.p[c] != c:
                    break
                self.scan(c, r, False)

    def compact(self, pos):
        alive = [c for c in range(len(self.table)) if self.p[c] == c]
        new = {c: i for i, c in enumerate(alive)}
        t = []
        for c in alive:
            t.append([new[d] if d >= 0 else -1 for d in self.table[c]])
        self.table = t
        self.p = list(range(len(alive)))
        newpos = 0
        while newpos < len(alive) and alive[newpos] < pos:
            newpos += 1
        return newpos


class _Full(Exception):
    pass


def _letters_to_cols(w: Word) -> list[int]:
    return [_col(x) for x in w.letters]


def todd_coxeter(p: Presentation, subgroup: Sequence[Word] = (), limits: EnumerationLimits | None = None,
                 cache_dir: str | None = None) -> CosetTable:
    """HLT enumeration with lookahead; returns a standardized table."""
    limits = limits or EnumerationLimits()
    subgroup = tuple(subgroup)
    if cache_dir:
        cached = load_cached(cache_dir, p, subgroup)
        if cached is not None:
            return cached
    ncols = 2 * len(p.alphabet)
    if ncols == 0:
        t = CosetTable(p.alphabet, [], subgroup, "todd-coxeter")
        return t
    rels = [_letters_to_cols(r) for r in p.relators]
    # each generator must get a definition even without relators; x x^-1 is a no-op relator
    rels.sort(key=len)
    subs = [_letters_to_cols(w) for w in subgroup if w.letters]
    e = _Enumerator(ncols, limits)

    def run_sub():
        for w in subs:
            e.scan(0, w, True)

    while True:
        try:
            run_sub()
            break
        except _Full:
            e.lookahead(rels)
            before = len(e.table)
            e.compact(0)
            if len(e.table) >= before:
                raise EnumerationExceeded("coset limit reached", e.live(), e.defined)
    pos = 0
    while True:
        try:
            while pos < len(e.table):
                if e.p[pos] == pos:
                    for r in rels:
                        e.scan(pos, r, True)
                        if e.p[pos] != pos:
                            break
                    if e.p[pos] == pos:
                        row = e.table[pos]
                        for x in range(ncols):
                            if row[x] < 0:
                                e.define(pos, x)
                pos += 1
            break
        except _Full:
            e.lookahead(rels)
            before = len(e.table)
            pos = e.compact(pos)
            if len(e.table) >= before:
                raise EnumerationExceeded("coset limit reached", len(e.table), e.defined)
    alive = [c for c in range(len(e.table)) if e.p[c] == c]
    new = {c: i for i, c in enumerate(alive)}
    cols = [[new[e.table[c][x]] for c in alive] for x in range(ncols)]
    table = CosetTable(p.alphabet, cols, subgroup, "todd-coxeter").standardize()
    if cache_dir:
        store_cached(cache_dir, p, subgroup, table)
    return table


def order_of(p: Presentation, limits: EnumerationLimits | None = None) -> int:
    return todd_coxeter(p, (), limits).n_cosets


# ---------------------------------------------------------------- finite images

class NotAHomomorphism(ValueError):
    pass


def kernel_coset_table(p: Presentation, h: GroupHom) -> CosetTable:
    """Cosets of ker(h) for h onto a finite group.

    The target supplies ``identity``, ``mul`` and ``inv``; elements must be
    hashable.  Cosets are image elements in breadth-first discovery order, so
    the result is already standardized.
    """
    bad = check_homomorphism(h)
    if bad:
        raise NotAHomomorphism(f"relator {p.relators[bad[0]]} has nontrivial image")
    group, images = h.target, h.images
    k = len(p.alphabet)
    moves = []
    for g in range(k):
        moves.append(images[g])
        moves.append(group.inv(images[g]))
    elems = [group.identity]
    index = {group.identity: 0}
    cols = [[] for _ in range(2 * k)]
    i = 0
    while i < len(elems):
        x = elems[i]
        for c, m in enumerate(moves):
            y = group.mul(x, m)
            j = index.get(y)
            if j is None:
                j = index[y] = len(elems)
                elems.append(y)
            cols[c].append(j)
        i += 1
    t = CosetTable(p.alphabet, cols, (), "kernel")
    t.elements = elems
    return t


# ---------------------------------------------------------------- transversals

def schreier_transversal(t: CosetTable) -> list[Word]:
    """Breadth-first, prefix-closed: one word per coset."""
    words: list[tuple[int, ...] | None] = [None] * t.n_cosets
    words[0] = ()
    queue = deque([0])
    k = len(t.alphabet)
    while queue:
        c = queue.popleft()
        for g in range(k):
            for letter in (g + 1, -(g + 1)):
                d = t.act_letter(c, letter)
                if words[d] is None:
                    words[d] = words[c] + (letter,)
                    queue.append(d)
    return [Word(t.alphabet, w, reduced=True) for w in words]


@dataclass
class TransversalCheck:
    accepted: bool
    reason: str = ""
    # words reordered so that entry c lies in coset c
    by_coset: list[Word] | None = None

    def __bool__(self):
        return self.accepted


def validate_transversal(t: CosetTable, words: Sequence[Word]) -> TransversalCheck:
    if len(words) != t.n_cosets:
        return TransversalCheck(False, f"{len(words)} words for {t.n_cosets} cosets")
    by_coset: list[Word | None] = [None] * t.n_cosets
    for w in words:
        c = t.act(0, w)
        if by_coset[c] is not None:
            return TransversalCheck(False, f"{w} and {by_coset[c]} lie in the same coset")
        by_coset[c] = w
    sset = {w.letters for w in words}
    for w in words:
        for i in range(len(w.letters)):
            if w.letters[:i] not in sset:
                return TransversalCheck(False, f"prefix {Word(w.alphabet, w.letters[:i])} of {w} missing")
    return TransversalCheck(True, "", by_coset)


def ordered_transversal(t: CosetTable, words: Sequence[Word]) -> list[Word]:
    chk = validate_transversal(t, words)
    if not chk:
        raise InvalidTransversal(chk.reason)
    return chk.by_coset


def schreier_name(gen: str, coset: int) -> str:
    return f"{gen}@{coset}"


@dataclass
class SchreierData:
    """Index of nontrivial Schreier generators for a table and transversal."""

    table: CosetTable
    transversal: list[Word]
    # (coset, generator index) -> Schreier generator number (1-based) or 0 if trivial
    index: dict[tuple[int, int], int]
    alphabet: Alphabet
    # Schreier generator number -> ambient word t_c g t_{cg}^-1
    ambient: list[Word]


def schreier_data(t: CosetTable, transversal: Sequence[Word]) -> SchreierData:
    k = len(t.alphabet)
    index = {}
    names = []
    ambient = []
    for c in range(t.n_cosets):
        for g in range(k):
            d = t.act_letter(c, g + 1)
            w = free_reduce(transversal[c].letters + (g + 1,) + invert(transversal[d].letters))
            if w:
                names.append(schreier_name(t.alphabet.names[g], c))
                ambient.append(Word(t.alphabet, w, reduced=True))
                index[(c, g)] = len(names)
            else:
                index[(c, g)] = 0
    return SchreierData(t, list(transversal), index, Alphabet(names), ambient)


def rewrite_letters(sd: SchreierData, start: int, letters: Sequence[int]) -> tuple[list[int], int]:
    t = sd.table
    idx = sd.index
    c = start
    out: list[int] = []
    for x in letters:
        if x > 0:
            s = idx[(c, x - 1)]
            c = t.cols[2 * (x - 1)][c]
            if s:
                if out and out[-1] == -s:
                    out.pop()
                else:
                    out.append(s)
        else:
            c = t.cols[2 * (-x - 1) + 1][c]
            s = idx[(c, -x - 1)]
            if s:
                if out and out[-1] == s:
                    out.pop()
                else:
                    out.append(-s)
    return out, c


def rewrite_to_subgroup(sd: SchreierData, w: Word) -> Word:
    out, c = rewrite_letters(sd, 0, w.letters)
    if c != 0:
        raise NotInSubgroup(f"{w} ends in coset {c}")
    return Word(sd.alphabet, out, reduced=True)


# ---------------------------------------------------------------- cache

def _cache_path(cache_dir: str, p: Presentation, subgroup: Sequence[Word]) -> tuple[str, str, str]:
    ph = presentation_digest(p)
    sh = presentation_digest(Presentation(p.alphabet, []), subgroup)
    return os.path.join(cache_dir, f"cosets-{ph[:16]}-{sh[:16]}.json"), ph, sh


def load_cached(cache_dir: str, p: Presentation, subgroup: Sequence[Word]) -> CosetTable | None:
    path, ph, sh = _cache_path(cache_dir, p, subgroup)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as f:
            data = json.load(f)
        if data.get("presentation_hash") != ph or data.get("subgroup_hash") != sh:
            return None
        t = CosetTable.from_json(data)
    except (OSError, ValueError, KeyError, CacheError):
        return None
    if t.alphabet != p.alphabet or not t.check_consistency(p.relators):
        return None
    if any(t.act(0, w) != 0 for w in subgroup):
        return None
    t.subgroup = tuple(subgroup)
    t.origin = "cache"
    return t


def store_cached(cache_dir: str, p: Presentation, subgroup: Sequence[Word], t: CosetTable) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path, ph, sh = _cache_path(cache_dir, p, subgroup)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    with os.fdopen(fd, "w") as f:
        json.dump(t.to_json(ph, sh), f)
    os.replace(tmp, path)
    return path


# ---------------------------------------------------------------- towers

class Level:
    """One step of a subnormal tower: a table of the previous level's group.

    ``rename`` maps each Schreier generator name of that table to a word in
    the generators of the next level (its simplified presentation).
    """

    def __init__(self, table: CosetTable, transversal: Sequence[Word], next_alphabet: Alphabet,
                 rename: dict[str, Word]):
        self.table = table
        self.sd = schreier_data(table, transversal)
        self.next_alphabet = next_alphabet
        k = len(table.alphabet)
        self.step: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
        ident = ()
        for c in range(table.n_cosets):
            for g in range(k):
                d = table.act_letter(c, g + 1)
                s = self.sd.index[(c, g)]
                w = rename[self.sd.alphabet.names[s - 1]].letters if s else ident
                self.step[(c, g + 1)] = (d, w)
                self.step[(d, -(g + 1))] = (c, invert(w))


def tower_table(alphabet: Alphabet, levels: Sequence[Level]) -> CosetTable:
    """Table of the bottom subgroup of a tower, acting by the top generators."""
    k = len(alphabet)

    def act(state: tuple[int, ...], letter: int) -> tuple[int, ...]:
        new = []
        word = (letter,)
        for lvl, c in zip(levels, state):
            out: list[int] = []
            for x in word:
                c, w = lvl.step[(c, x)]
                out.extend(w)
            new.append(c)
            word = free_reduce(out)
        return tuple(new)

    start = tuple(0 for _ in levels)
    states = [start]
    index = {start: 0}
    cols = [[] for _ in range(2 * k)]
    i = 0
    while i < len(states):
        s = states[i]
        for g in range(k):
            for j, letter in enumerate((g + 1, -(g + 1))):
                s2 = act(s, letter)
                n = index.get(s2)
                if n is None:
                    n = index[s2] = len(states)
                    states.append(s2)
                cols[2 * g + j].append(n)
        i += 1
    t = CosetTable(alphabet, cols, (), "tower")
    t.states = states
    return t
