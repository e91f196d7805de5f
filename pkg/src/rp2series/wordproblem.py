"""Knuth-Bendix completion for group presentations (shortlex order), and
identity checking that falls back on finite quotients."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .presentation import Presentation
from .words import Word, cyclic_canonical


class KBStatus(Enum):
    COMPLETED = "Completed"
    CAPPED = "Capped"


@dataclass(frozen=True)
class KBLimits:
    max_rules: int = 5000
    max_lhs: int = 64
    # critical pairs examined before giving up
    max_overlaps: int = 2_000_000


def _encode(letters, k: int) -> str:
    # generator i -> chr(2i), inverse -> chr(2i+1); shortlex letter order g1 < g1^-1 < g2 ...
    return "".join(chr(2 * (x - 1)) if x > 0 else chr(2 * (-x - 1) + 1) for x in letters)


def _decode(s: str) -> tuple[int, ...]:
    return tuple((ord(c) // 2 + 1) * (1 if ord(c) % 2 == 0 else -1) for c in s)


def _shortlex_less(a: str, b: str) -> bool:
    return (len(a), a) < (len(b), b)


class RewritingSystem:
    def __init__(self, presentation: Presentation, limits: KBLimits | None = None):
        self.presentation = presentation
        self.limits = limits or KBLimits()
        self.rules: dict[str, str] = {}
        self.status: KBStatus | None = None
        self._lengths: list[int] = []

    def _refresh_lengths(self):
        self._lengths = sorted({len(l) for l in self.rules})

    def reduce(self, s: str) -> str:
        rules = self.rules
        lengths = self._lengths
        out: list[str] = []
        todo = list(reversed(s))
        while todo:
            out.append(todo.pop())
            n = len(out)
            for L in lengths:
                if L > n:
                    break
                rhs = rules.get("".join(out[n - L:]))
                if rhs is not None:
                    del out[n - L:]
                    todo.extend(reversed(rhs))
                    break
        return "".join(out)

    def normal_form(self, w: Word) -> Word:
        s = self.reduce(_encode(w.letters, len(w.alphabet)))
        return Word(w.alphabet, _decode(s))

    def is_identity(self, w: Word) -> bool:
        """Exact only when the system is completed."""
        return not self.reduce(_encode(w.letters, len(w.alphabet)))

    def complete(self) -> KBStatus:
        if self.status is not None:
            return self.status
        k = len(self.presentation.alphabet)
        lim = self.limits
        # rule list with tombstones; pairs (i, j) are examined once, j <= i
        lhs_list: list[str | None] = []
        pending: list[tuple[str, str]] = []
        for i in range(k):
            g, G = chr(2 * i), chr(2 * i + 1)
            pending.append((g + G, ""))
            pending.append((G + g, ""))
        for r in self.presentation.relators:
            s = _encode(r.letters, k)
            h = (len(s) + 1) // 2
            u, v = s[:h], s[h:]
            vinv = _encode(Word(r.alphabet, _decode(v), reduced=True).inverse().letters, k)
            pending.append((u, vinv))
        capped = False
        overlaps = 0

        def drain() -> bool:
            nonlocal capped
            while pending:
                a, b = pending.pop()
                a, b = self.reduce(a), self.reduce(b)
                if a == b:
                    continue
                if _shortlex_less(a, b):
                    a, b = b, a
                if len(a) > lim.max_lhs:
                    capped = True
                    continue
                # retire rules whose lhs the new rule reduces
                for idx, l in enumerate(lhs_list):
                    if l is not None and a in l:
                        pending.append((l, self.rules.pop(l)))
                        lhs_list[idx] = None
                self.rules[a] = b
                lhs_list.append(a)
                self._refresh_lengths()
                for l, r in list(self.rules.items()):
                    nr = self.reduce(r)
                    if nr != r:
                        self.rules[l] = nr
                if len(self.rules) > lim.max_rules:
                    return False
            return True

        if not drain():
            self.status = KBStatus.CAPPED
            return self.status
        i = 0
        while i < len(lhs_list):
            l1 = lhs_list[i]
            if l1 is not None:
                for j in range(i + 1):
                    l2 = lhs_list[j]
                    if l2 is None or lhs_list[i] is None:
                        continue
                    for a, b in ((l1, l2), (l2, l1)) if i != j else ((l1, l1),):
                        for m in range(1, min(len(a), len(b))):
                            if a[-m:] == b[:m]:
                                overlaps += 1
                                if overlaps > lim.max_overlaps:
                                    self.status = KBStatus.CAPPED
                                    return self.status
                                ra, rb = self.rules.get(a), self.rules.get(b)
                                if ra is None or rb is None:
                                    continue
                                w1 = self.reduce(ra + b[m:])
                                w2 = self.reduce(a[:-m] + rb)
                                if w1 != w2:
                                    pending.append((w1, w2))
                    if pending and not drain():
                        self.status = KBStatus.CAPPED
                        return self.status
            i += 1
        self.status = KBStatus.CAPPED if capped else KBStatus.COMPLETED
        return self.status

    def count_normal_forms(self, max_length: int) -> list[int]:
        """Number of irreducible words of each length 0..max_length."""
        k = len(self.presentation.alphabet)
        letters = [chr(c) for c in range(2 * k)]
        counts = [1]
        layer = [""]
        for _ in range(max_length):
            nxt = []
            for w in layer:
                for c in letters:
                    s = w + c
                    if not any(s.endswith(l) for l in self.rules if len(l) <= len(s)):
                        nxt.append(s)
            counts.append(len(nxt))
            layer = nxt
        return counts


def knuth_bendix(p: Presentation, limits: KBLimits | None = None) -> RewritingSystem:
    rs = RewritingSystem(p, limits)
    rs.complete()
    return rs


# ---------------------------------------------------------------- identity checks

class UnknownGroup(KeyError):
    pass


@dataclass(frozen=True)
class ProvedTrivial:
    witness: str


@dataclass(frozen=True)
class Refuted:
    quotient: str
    image: str


@dataclass(frozen=True)
class Consistent:
    quotients: tuple[str, ...]


TrivialityVerdict = Union[ProvedTrivial, Refuted, Consistent]

_KB_CACHE: dict[tuple[str, KBLimits], RewritingSystem] = {}
_KB_LOCK = threading.Lock()


def completed_system(group, limits: KBLimits | None = None) -> RewritingSystem | None:
    """Cached completion for a registered group, or None if it capped or is not attempted."""
    if not group.kb:
        return None
    limits = limits or KBLimits()
    key = (group.id, limits)
    with _KB_LOCK:
        rs = _KB_CACHE.get(key)
        if rs is None:
            rs = _KB_CACHE[key] = knuth_bendix(group.presentation, limits)
    return rs if rs.status is KBStatus.COMPLETED else None


def check_identity(group, lhs: Word, rhs: Word, kb_limits: KBLimits | None = None) -> TrivialityVerdict:
    """Decide or certify lhs = rhs in a registered group.

    ``group`` is a registry id or an object with ``id``, ``presentation``,
    ``kb`` and ``quotients``.
    """
    if isinstance(group, str):
        from .rp2 import get_group
        group = get_group(group)
    w = lhs * rhs.inverse()
    if w.is_identity():
        return ProvedTrivial("free reduction")
    canon = cyclic_canonical(w.letters)
    for i, r in enumerate(group.presentation.relators):
        if cyclic_canonical(r.letters) == canon:
            return ProvedTrivial(f"cyclic conjugate of relator {i + 1}")
    rs = completed_system(group, kb_limits)
    if rs is not None:
        nf = rs.normal_form(w)
        if nf.is_identity():
            return ProvedTrivial(f"completed system ({len(rs.rules)} rules) reduces to 1")
    checked = []
    for q in group.quotients:
        img = q.image(w)
        if img != q.identity:
            return Refuted(q.name, q.describe(img))
        checked.append(q.name)
    return Consistent(tuple(checked))
