"""Finite permutation groups, fingerprints and identification against known models."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import gcd
from typing import Callable, Sequence

from .abelian import AbelianInvariants
from .words import Word

Perm = tuple[int, ...]


class TooLarge(RuntimeError):
    pass


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Right action: apply p then q."""
    return tuple(q[i] for i in p)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_order(p: Perm) -> int:
    seen = [False] * len(p)
    n = 1
    for i in range(len(p)):
        if not seen[i]:
            k = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                k += 1
            n = n * k // gcd(n, k)
    return n


class FiniteGroup:
    """Permutation group generated by ``gens`` acting on 0..degree-1."""

    def __init__(self, gens: Sequence[Perm], degree: int | None = None, names: Sequence[str] | None = None,
                 max_order: int = 100_000):
        gens = [tuple(g) for g in gens]
        if degree is None:
            degree = len(gens[0]) if gens else 1
        self.degree = degree
        self.gens = gens
        self.names = list(names) if names else [f"g{i + 1}" for i in range(len(gens))]
        self.identity: Perm = tuple(range(degree))
        self.max_order = max_order
        self._elements: list[Perm] | None = None

    mul = staticmethod(perm_mul)
    inv = staticmethod(perm_inv)

    def elements(self) -> list[Perm]:
        if self._elements is None:
            elems = [self.identity]
            seen = {self.identity}
            i = 0
            while i < len(elems):
                x = elems[i]
                for g in self.gens:
                    y = perm_mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        elems.append(y)
                        if len(elems) > self.max_order:
                            raise TooLarge(f"group order exceeds {self.max_order}")
                i += 1
            self._elements = elems
        return self._elements

    def order(self) -> int:
        return len(self.elements())

    def evaluate(self, w: Word) -> Perm:
        out = list(range(self.degree))
        for x in w.letters:
            g = self.gens[x - 1] if x > 0 else perm_inv(self.gens[-x - 1])
            out = [g[i] for i in out]
        return tuple(out)

    def contains_identity_image(self, w: Word) -> bool:
        return self.evaluate(w) == self.identity


def closure(gens: Sequence[Perm], identity: Perm, limit: int = 100_000) -> set[Perm]:
    elems = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = perm_mul(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
        if len(elems) > limit:
            raise TooLarge("closure too large")
    return elems


def normal_closure(group: FiniteGroup, gens: Sequence[Perm]) -> set[Perm]:
    sub = closure(list(gens), group.identity)
    while True:
        new = []
        for h in list(sub):
            for g in group.gens:
                c = perm_mul(perm_mul(perm_inv(g), h), g)
                if c not in sub:
                    new.append(c)
        if not new:
            return sub
        sub = closure(list(sub_generators(sub, group.identity)) + new, group.identity)


def sub_generators(sub: set[Perm], identity: Perm) -> list[Perm]:
    """A small generating set of a subgroup given as a set."""
    gens: list[Perm] = []
    span = {identity}
    for x in sorted(sub):
        if x not in span:
            gens.append(x)
            span = closure(gens, identity)
            if len(span) == len(sub):
                break
    return gens


def commutator(a: Perm, b: Perm) -> Perm:
    return perm_mul(perm_mul(perm_mul(a, b), perm_inv(a)), perm_inv(b))


def derived_subgroup(group: FiniteGroup, sub: set[Perm] | None = None) -> set[Perm]:
    if sub is None:
        gens = group.gens
        comms = [commutator(a, b) for a in gens for b in gens]
        return normal_closure(group, comms)
    gens = sub_generators(sub, group.identity)
    comms = [commutator(a, b) for a in gens for b in gens]
    if not comms:
        return {group.identity}
    # the derived subgroup of sub is normal in sub
    h = FiniteGroup(gens, group.degree)
    return normal_closure(h, comms)


def commutator_subgroup(group: FiniteGroup, a: set[Perm], b: set[Perm]) -> set[Perm]:
    """[A, B] for subgroups A, B normal in the group."""
    ga = sub_generators(a, group.identity)
    gb = sub_generators(b, group.identity)
    comms = [commutator(x, y) for x in ga for y in gb]
    return normal_closure(group, comms) if comms else {group.identity}


def abelian_invariants_from_orders(order_counts: dict[int, int], size: int) -> AbelianInvariants:
    """Invariant factors of a finite abelian group from its element-order counts."""
    primes = []
    m = size
    p = 2
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        primes.append(m)
    # number of elements killed by p^k is p^(sum_i min(k, e_i))
    cyclic_parts: list[list[int]] = []
    for p in primes:
        killed = []
        k = 0
        while True:
            k += 1
            cnt = sum(c for o, c in order_counts.items() if (p ** k) % o == 0)
            killed.append(cnt)
            if k > 1 and killed[-1] == killed[-2]:
                break
        # r_k = number of cyclic factors of order >= p^k
        logs = [0]
        for c in killed:
            e = 0
            while c > 1:
                c //= p
                e += 1
            logs.append(e)
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
        exps = []
        for k in range(len(ge)):
            nxt = ge[k + 1] if k + 1 < len(ge) else 0
            exps += [k + 1] * (ge[k] - nxt)
        cyclic_parts.append([p ** e for e in exps])
    width = max((len(c) for c in cyclic_parts), default=0)
    factors = []
    for i in range(width):
        d = 1
        for part in cyclic_parts:
            part = sorted(part, reverse=True)
            if i < len(part):
                d *= part[i]
        factors.append(d)
    return AbelianInvariants(0, tuple(sorted(f for f in factors if f > 1)))


def quotient_invariants(group: FiniteGroup, elems: list[Perm], normal: set[Perm]) -> AbelianInvariants:
    """Invariants of G/N when G/N is abelian."""
    rep = {}
    cosets = []
    for x in elems:
        if x in rep:
            continue
        k = len(cosets)
        cosets.append(x)
        for n in normal:
            rep[perm_mul(n, x)] = k
    counts: Counter = Counter()
    for x in cosets:
        o = 1
        y = x
        while rep[y] != rep[group.identity]:
            y = perm_mul(y, x)
            o += 1
        counts[o] += 1
    return abelian_invariants_from_orders(counts, len(cosets))


@dataclass(frozen=True)
class Fingerprint:
    order: int
    element_orders: tuple[tuple[int, int], ...]
    class_sizes: tuple[int, ...]
    center_order: int
    abelianization: tuple[int, ...]
    derived_length: int

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "element_orders": dict(self.element_orders),
            "class_sizes": list(self.class_sizes),
            "center_order": self.center_order,
            "abelianization": list(self.abelianization),
            "derived_length": self.derived_length,
        }


def conjugacy_classes(group: FiniteGroup) -> list[set[Perm]]:
    elems = group.elements()
    seen: set[Perm] = set()
    classes = []
    ginv = [perm_inv(g) for g in group.gens]
    for x in elems:
        if x in seen:
            continue
        cls = {x}
        frontier = [x]
        while frontier:
            nxt = []
            for y in frontier:
                for g, gi in zip(group.gens, ginv):
                    z = perm_mul(perm_mul(gi, y), g)
                    if z not in cls:
                        cls.add(z)
                        nxt.append(z)
            frontier = nxt
        seen |= cls
        classes.append(cls)
    return classes


def derived_length(group: FiniteGroup) -> int:
    """Length of the derived series; -1 if it does not reach the trivial group."""
    cur = set(group.elements())
    n = 0
    while len(cur) > 1:
        nxt = derived_subgroup(group, cur)
        if len(nxt) == len(cur):
            return -1
        cur = nxt
        n += 1
    return n


def fingerprint(group: FiniteGroup) -> Fingerprint:
    elems = group.elements()
    orders = Counter(perm_order(x) for x in elems)
    classes = conjugacy_classes(group)
    sizes = tuple(sorted(len(c) for c in classes))
    center = sum(1 for c in classes if len(c) == 1)
    d = derived_subgroup(group)
    ab = quotient_invariants(group, elems, d)
    return Fingerprint(len(elems), tuple(sorted(orders.items())), sizes, center, ab.torsion, derived_length(group))


# ---------------------------------------------------------------- identification

@dataclass
class Identification:
    name: str
    images: list[Perm]
    # a model generator -> group element map that is a surjective homomorphism
    # between groups of equal order, hence an isomorphism
    model_generators: list[str]


def find_isomorphism(model_gens: Sequence[str], model_relators: Sequence[Word], model_order: int,
                     group: FiniteGroup) -> list[Perm] | None:
    """Images of the model generators satisfying every relator and generating the group."""
    elems = group.elements()
    if len(elems) != model_order:
        return None
    k = len(model_gens)
    orders = {x: perm_order(x) for x in elems}
    ident = group.identity
    # relators become checkable once all their letters are assigned
    needed = [max(abs(x) for x in r.letters) - 1 for r in model_relators]
    by_level: list[list[Word]] = [[] for _ in range(k)]
    for r, lvl in zip(model_relators, needed):
        by_level[lvl].append(r)
    # candidate elements for a generator x: if x^m is a relator, order divides m
    power_bound: dict[int, int] = {}
    for r in model_relators:
        s = set(r.letters)
        if len(s) == 1:
            x = next(iter(s))
            power_bound[abs(x) - 1] = gcd(power_bound.get(abs(x) - 1, 0), len(r.letters))
    cands = []
    for i in range(k):
        m = power_bound.get(i)
        cands.append([x for x in elems if m is None or m % orders[x] == 0])
    imgs: list[Perm] = [ident] * k
    target = len(elems)

    def ev(w: Word) -> Perm:
        out = ident
        for x in w.letters:
            g = imgs[x - 1] if x > 0 else perm_inv(imgs[-x - 1])
            out = perm_mul(out, g)
        return out

    def rec(i: int) -> bool:
        if i == k:
            return len(closure(imgs, ident, target)) == target
        for x in cands[i]:
            imgs[i] = x
            if all(ev(r) == ident for r in by_level[i]):
                if rec(i + 1):
                    return True
        return False

    if rec(0):
        return list(imgs)
    return None


def identify(group: FiniteGroup, models: dict, max_order: int = 48) -> Identification | None:
    """Match against registered models of equal order (orders up to ``max_order``)."""
    n = group.order()
    if n > max_order:
        return None
    for name, model in models.items():
        if model.order != n:
            continue
        imgs = find_isomorphism(model.presentation.alphabet.names, model.presentation.relators, model.order, group)
        if imgs is not None:
            return Identification(name, imgs, list(model.presentation.alphabet.names))
    return None
