"""Braid groups of the projective plane: presentations, named elements,
subgroup chains, model groups and action tables."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .abelian import AbelianInvariants, abelian_invariants_of_matrix
from .cosets import (CosetTable, EnumerationExceeded, EnumerationLimits, Level, kernel_coset_table,
                     ordered_transversal, rewrite_letters, schreier_transversal, todd_coxeter, tower_table,
                     validate_transversal)
from .groupid import FiniteGroup, identify, perm_inv, perm_mul
from .presentation import (AbelianizationMap, GroupHom, Presentation, TietzeResult, abelian_invariants,
                           abelianization_map, check_homomorphism, parse_word_list, tietze_simplify)
from .schreier import MatchReport, SubgroupPresentation, lower_central_step as _lcs_presentation
from .schreier import match_presentations, subgroup_presentation
from .wordproblem import UnknownGroup
from .words import Alphabet, Word, cyclic_reduce, free_reduce, invert, parse_word


class InvalidStrandCount(ValueError):
    pass


class UnknownModel(KeyError):
    pass


class InfiniteAbelianization(RuntimeError):
    def __init__(self, stage: "SeriesStage"):
        super().__init__(f"stage {stage.depth} has infinite abelianization {stage.invariants}")
        self.stage = stage


# ---------------------------------------------------------------- B_n

def braid_alphabet(n: int) -> Alphabet:
    if n < 1:
        raise InvalidStrandCount(n)
    return Alphabet([f"s{i}" for i in range(1, n)] + [f"r{j}" for j in range(1, n + 1)])


def braid_presentation(n: int) -> Presentation:
    """Generators s1..s{n-1} (sigma) and r1..rn (rho)."""
    A = braid_alphabet(n)
    s = lambda i: A.gen(f"s{i}")
    r = lambda j: A.gen(f"r{j}")
    rels = []
    for i in range(1, n):
        for j in range(i + 2, n):
            rels.append(s(i).commutator(s(j)))
    for i in range(1, n - 1):
        rels.append(s(i) * s(i + 1) * s(i) * ~s(i + 1) * ~s(i) * ~s(i + 1))
    for i in range(1, n):
        for j in range(1, n + 1):
            if j not in (i, i + 1):
                rels.append(s(i).commutator(r(j)))
    for i in range(1, n):
        rels.append(~s(i) * r(i) * ~s(i) * ~r(i + 1))
    for i in range(1, n):
        rels.append(~r(i + 1) * ~r(i) * r(i + 1) * r(i) * s(i) ** -2)
    full = Word.identity(A)
    for i in range(1, n):
        full = full * s(i)
    for i in range(n - 1, 0, -1):
        full = full * s(i)
    rels.append(full * r(1) ** -2)
    return Presentation(A, rels, name=f"B{n}(RP2)")


def braid_relator_count(n: int) -> int:
    if n == 1:
        return 1
    return (n - 2) * (n - 3) // 2 + (n - 2) + (n - 1) * (n - 2) + 2 * (n - 1) + 1


class BraidElements:
    """Named elements of B_n as words."""

    def __init__(self, n: int):
        self.n = n
        self.alphabet = braid_alphabet(n)

    def word(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def sigma(self, i: int) -> Word:
        if not 1 <= i < self.n:
            raise ValueError(f"sigma_{i} not defined for n={self.n}")
        return self.alphabet.gen(f"s{i}")

    def rho(self, j: int) -> Word:
        if not 1 <= j <= self.n:
            raise ValueError(f"rho_{j} not defined for n={self.n}")
        return self.alphabet.gen(f"r{j}")

    def B(self, i: int, j: int) -> Word:
        if not 1 <= i < j <= self.n:
            raise ValueError((i, j))
        c = Word.identity(self.alphabet)
        for k in range(j - 1, i, -1):
            c = c * self.sigma(k)
        return self.sigma(i).__pow__(2).conjugate(c)

    def _down(self, top: int) -> Word:
        w = Word.identity(self.alphabet)
        for k in range(top, 0, -1):
            w = w * self.sigma(k)
        return w

    @property
    def a(self) -> Word:
        return self.rho(self.n) * self._down(self.n - 1)

    @property
    def b(self) -> Word:
        return self.rho(self.n - 1) * self._down(self.n - 2)

    @property
    def a_alt(self) -> Word:
        """sigma_{n-1}^-1 ... sigma_1^-1 rho_1"""
        return self._up_inv(self.n - 1) * self.rho(1)

    @property
    def b_alt(self) -> Word:
        return self._up_inv(self.n - 2) * self.rho(1)

    def _up_inv(self, top: int) -> Word:
        w = Word.identity(self.alphabet)
        for k in range(top, 0, -1):
            w = w * ~self.sigma(k)
        return w

    @property
    def garside(self) -> Word:
        w = Word.identity(self.alphabet)
        for k in range(1, self.n):
            w = w * self._down(k)
        return w

    @property
    def full_twist(self) -> Word:
        return self.garside ** 2

    # n = 3 dictionary for Gamma_2(B_3)
    def _need3(self):
        if self.n != 3:
            raise ValueError("defined for n = 3 only")

    @property
    def x(self) -> Word:
        self._need3()
        return self.rho(2) * self.rho(1)

    @property
    def y(self) -> Word:
        self._need3()
        return self.rho(2) * self.B(1, 2) * ~self.rho(3)

    @property
    def z1(self) -> Word:
        self._need3()
        return self.rho(3) ** 2

    @property
    def z2(self) -> Word:
        self._need3()
        return self.B(2, 3)

    @property
    def z3(self) -> Word:
        self._need3()
        return self.B(2, 3).conjugate(self.rho(3))

    @property
    def u(self) -> Word:
        self._need3()
        return (self.rho(3) * self.sigma(2) * self.sigma(1)) ** 4

    def named(self) -> dict[str, Word]:
        out = {}
        for i in range(1, self.n):
            out[f"sigma{i}"] = self.sigma(i)
        for j in range(1, self.n + 1):
            out[f"rho{j}"] = self.rho(j)
        for j in range(2, self.n + 1):
            for i in range(1, j):
                out[f"B{i},{j}"] = self.B(i, j)
        out["a"] = self.a
        if self.n >= 2:
            out["b"] = self.b
        out["Delta"] = self.garside
        out["Delta^2"] = self.full_twist
        if self.n == 3:
            for k in ("x", "y", "z1", "z2", "z3", "u"):
                out[k] = getattr(self, k)
        return out


# ---------------------------------------------------------------- Gamma_2(B_n)

class _Z2Squared:
    identity = (0, 0)

    @staticmethod
    def mul(p, q):
        return ((p[0] + q[0]) % 2, (p[1] + q[1]) % 2)

    @staticmethod
    def inv(p):
        return p


def gamma2_table(n: int) -> CosetTable:
    """Cosets of the commutator subgroup: kernel of sigma -> (1,0), rho -> (0,1)."""
    p = braid_presentation(n)
    images = [(1, 0) if name.startswith("s") else (0, 1) for name in p.alphabet.names]
    return kernel_coset_table(p, GroupHom(p, _Z2Squared(), images))


def relabel_cosets(t: CosetTable, order: Sequence[int]) -> CosetTable:
    """Coset ``order[k]`` becomes coset k."""
    new = {old: k for k, old in enumerate(order)}
    if sorted(new) != list(range(t.n_cosets)) or order[0] != 0:
        raise ValueError("order must be a permutation fixing coset 0")
    cols = [[new[col[old]] for old in order] for col in t.cols]
    return CosetTable(t.alphabet, cols, t.subgroup, t.origin)


def gamma2_transversal_words(n: int) -> list[Word]:
    E = BraidElements(n)
    s1, r1 = E.sigma(1), E.rho(1)
    return [Word.identity(E.alphabet), s1, s1 * r1, s1 * r1 * s1]


@lru_cache(maxsize=None)
def gamma2_rs(n: int) -> SubgroupPresentation:
    """Reidemeister-Schreier presentation over the transversal 1, s1, s1 r1, s1 r1 s1."""
    if n < 2:
        raise InvalidStrandCount(n)
    t = gamma2_table(n)
    words = gamma2_transversal_words(n)
    t = relabel_cosets(t, [t.act(0, w) for w in words])
    trans = ordered_transversal(t, words)
    return subgroup_presentation(braid_presentation(n), t, trans)


GREEK_SIGMA = ("alpha", "beta", "gamma", "tau")   # by coset of the transversal
GREEK_RHO = ("eta", "kappa", "theta", "lambda")


def gamma2_named_generators(n: int) -> dict[str, Word]:
    """Greek generator name -> word in B_n."""
    if n < 3:
        raise InvalidStrandCount(n)
    E = BraidElements(n)
    s, r = E.sigma, E.rho
    s1, r1 = s(1), r(1)
    out: dict[str, Word] = {}
    for i in range(2, n):
        out[f"alpha{i}"] = s(i) * ~s1
    for i in range(1, n):
        out[f"beta{i}"] = s1 * s(i)
    for i in range(2, n):
        out[f"gamma{i}"] = s1 * r1 * s(i) * ~s1 * ~r1 * ~s1
    for i in range(1, n):
        out[f"tau{i}"] = s1 * r1 * s1 * s(i) * ~r1 * ~s1
    for j in range(1, n + 1):
        out[f"eta{j}"] = r(j) * ~s1 * ~r1 * ~s1
    for j in range(2, n + 1):
        out[f"kappa{j}"] = s1 * r(j) * ~r1 * ~s1
    for j in range(1, n + 1):
        out[f"theta{j}"] = s1 * r1 * r(j) * ~s1
    for j in range(1, n + 1):
        out[f"lambda{j}"] = s1 * r1 * s1 * r(j)
    return out


def gamma2_presentation_named(n: int) -> Presentation:
    """The explicit generator and relator families for the commutator subgroup."""
    if n < 3:
        raise InvalidStrandCount(n)
    names = list(gamma2_named_generators(n))
    A = Alphabet(names)

    def g(fam: str, k: int) -> Word:
        if (fam, k) in (("alpha", 1), ("gamma", 1), ("kappa", 1)):
            return Word.identity(A)
        return A.gen(f"{fam}{k}")

    al = lambda i: g("alpha", i)
    be = lambda i: g("beta", i)
    ga = lambda i: g("gamma", i)
    ta = lambda i: g("tau", i)
    et = lambda j: g("eta", j)
    ka = lambda j: g("kappa", j)
    th = lambda j: g("theta", j)
    la = lambda j: g("lambda", j)
    rels: list[Word] = []
    for i in range(1, n):
        for j in range(i + 2, n):
            rels += [al(i) * be(j) * ~be(i) * ~al(j), be(i) * al(j) * ~al(i) * ~be(j),
                     ga(i) * ta(j) * ~ta(i) * ~ga(j), ta(i) * ga(j) * ~ga(i) * ~ta(j)]
    for i in range(1, n - 1):
        rels += [al(i) * be(i + 1) * al(i) * ~al(i + 1) * ~be(i) * ~al(i + 1),
                 be(i) * al(i + 1) * be(i) * ~be(i + 1) * ~al(i) * ~be(i + 1),
                 ga(i) * ta(i + 1) * ga(i) * ~ga(i + 1) * ~ta(i) * ~ga(i + 1),
                 ta(i) * ga(i + 1) * ta(i) * ~ta(i + 1) * ~ga(i) * ~ta(i + 1)]
    for i in range(1, n):
        for j in range(1, n + 1):
            if j in (i, i + 1):
                continue
            rels += [al(i) * ka(j) * ~ta(i) * ~et(j), be(i) * et(j) * ~ga(i) * ~ka(j),
                     ga(i) * la(j) * ~be(i) * ~th(j), ta(i) * th(j) * ~al(i) * ~la(j)]
    for i in range(1, n):
        rels += [~be(i) * ka(i) * ~ta(i) * ~et(i + 1), ~al(i) * et(i) * ~ga(i) * ~ka(i + 1),
                 ~ta(i) * la(i) * ~be(i) * ~th(i + 1), ~ga(i) * th(i) * ~al(i) * ~la(i + 1)]
    for i in range(1, n):
        rels += [~la(i + 1) * ~et(i) * et(i + 1) * la(i) * ~be(i) * ~al(i),
                 ~th(i + 1) * ~ka(i) * ka(i + 1) * th(i) * ~al(i) * ~be(i),
                 ~ka(i + 1) * ~th(i) * th(i + 1) * ka(i) * ~ta(i) * ~ga(i),
                 ~et(i + 1) * ~la(i) * la(i + 1) * et(i) * ~ga(i) * ~ta(i)]
    # surface relator: alternate the two letter types along an up-down index walk
    walk1 = list(range(2, n)) + list(range(n - 1, 0, -1))
    walk2 = list(range(1, n)) + list(range(n - 1, 1, -1))

    def alternate(walk, first, second):
        w = Word.identity(A)
        for k, i in enumerate(walk):
            w = w * (first(i) if k % 2 == 0 else second(i))
        return w

    rels += [alternate(walk1, be, al) * ~la(1) * ~et(1),
             alternate(walk2, be, al) * ~th(1),
             alternate(walk1, ta, ga) * ~th(1),
             alternate(walk2, ta, ga) * ~et(1) * ~la(1)]
    return Presentation(A, rels, name=f"Gamma2(B{n})")


def gamma2_schreier_naming(n: int) -> dict[str, str]:
    """Schreier generator name -> Greek name, matched by equality of B_n words."""
    sp = gamma2_rs(n)
    greek = {w.letters: name for name, w in gamma2_named_generators(n).items()}
    naming = {}
    for name, w in sp.dictionary.items():
        if w.letters not in greek:
            raise ValueError(f"Schreier generator {name} = {w} has no named counterpart")
        naming[name] = greek[w.letters]
    return naming


# ---------------------------------------------------------------- n = 4 letters

_FAMILY_OF_GEN = {"s1": "X", "s2": "Y", "s3": "Z", "r1": "A", "r2": "B", "r3": "C", "r4": "D"}


def b4_letter_of(schreier_name: str) -> str:
    """``s2@1`` -> ``Y2``: family from the ambient generator, subscript from the coset."""
    gen, coset = schreier_name.split("@")
    return f"{_FAMILY_OF_GEN[gen]}{int(coset) + 1}"


B4_LETTERS = ("A1", "A3", "A4", "B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4", "D1", "D2", "D3", "D4",
              "X2", "X4", "Y1", "Y2", "Y3", "Y4", "Z1", "Z2", "Z3", "Z4")

B4_RELATORS_TEXT = """
Z2 X2^-1 Z1^-1
X2 Z1 Z2^-1
Z4 X4^-1 Z3^-1
X4 Z3 Z4^-1
Y2 Y1^-1 X2^-1 Y1^-1
X2 Y1 X2 Y2^-2
Y4 Y3^-1 X4^-1 Y3^-1
X4 Y3 X4 Y4^-2
Y1 Z2 Y1 Z1^-1 Y2^-1 Z1^-1
Y2 Z1 Y2 Z2^-1 Y1^-1 Z2^-1
Y3 Z4 Y3 Z3^-1 Y4^-1 Z3^-1
Y4 Z3 Y4 Z4^-1 Y3^-1 Z4^-1
C2 X4^-1 C1^-1
X2 C1 C2^-1
C4 X2^-1 C3^-1
X4 C3 C4^-1
D2 X4^-1 D1^-1
X2 D1 D2^-1
D4 X2^-1 D3^-1
X4 D3 D4^-1
Y1 Y4^-1 A1^-1
Y2 A1 Y3^-1
Y3 A4 Y2^-1 A3^-1
Y4 A3 Y1^-1 A4^-1
Y1 D2 Y4^-1 D1^-1
Y2 D1 Y3^-1 D2^-1
Y3 D4 Y2^-1 D3^-1
Y4 D3 Y1^-1 D4^-1
Z1 Z4^-1 A1^-1
Z2 A1 Z3^-1
Z3 A4 Z2^-1 A3^-1
Z4 A3 Z1^-1 A4^-1
Z1 B2 Z4^-1 B1^-1
Z2 B1 Z3^-1 B2^-1
Z3 B4 Z2^-1 B3^-1
Z4 B3 Z1^-1 B4^-1
B1 X4 X2
B2 A1^-1
X4^-1 A4 X2^-1 B3^-1
A3 B4^-1
Y2^-1 B2 Y4^-1 C1^-1
Y1^-1 B1 Y3^-1 C2^-1
Y4^-1 B4 Y2^-1 C3^-1
Y3^-1 B3 Y1^-1 C4^-1
Z1^-1 C1 Z3^-1 D2^-1
Z2^-1 C2 Z4^-1 D1^-1
Z3^-1 C3 Z1^-1 D4^-1
Z4^-1 C4 Z2^-1 D3^-1
B4^-1 A1^-1 B1 A4 X2^-1
B2 A3 X2^-1 B3^-1
B2^-1 A3^-1 B3 X4^-1
B1^-1 A4^-1 B4 A1 X4^-1
C4^-1 B1^-1 C1 B4 Y2^-1 Y1^-1
C3^-1 B2^-1 C2 B3 Y1^-1 Y2^-1
C2^-1 B3^-1 C3 B2 Y4^-1 Y3^-1
C1^-1 B4^-1 C4 B1 Y3^-1 Y4^-1
D4^-1 C1^-1 D1 C4 Z2^-1 Z1^-1
D3^-1 C2^-1 D2 C3 Z1^-1 Z2^-1
D2^-1 C3^-1 D3 C2 Z4^-1 Z3^-1
D1^-1 C4^-1 D4 C1 Z3^-1 Z4^-1
Y2 Z1 Z2 Y1 X2 A4^-1 A1^-1
X2 Y1 Z2 Z1 Y2 X2 A3^-1
Y4 Z3 Z4 Y3 X4 A3^-1
X4 Y3 Z4 Z3 Y4 A1^-1 A4^-1
"""


def b4_letter_presentation() -> Presentation:
    """The 25-letter, 64-relator presentation of the commutator subgroup of B_4."""
    A = Alphabet(B4_LETTERS)
    return Presentation(A, parse_word_list(B4_RELATORS_TEXT, A), name="Gamma2(B4)-letters")


def b4_letter_words() -> dict[str, Word]:
    """Letter -> word in B_4, from the Schreier generators of the fixed transversal."""
    sp = gamma2_rs(4)
    return {b4_letter_of(name): w for name, w in sp.dictionary.items()}


def b4_greek_to_letter() -> dict[str, str]:
    naming = gamma2_schreier_naming(4)
    return {greek: b4_letter_of(name) for name, greek in naming.items()}


# ---------------------------------------------------------------- model groups

def _pres(gens: str, rels: Sequence[str], name: str) -> Presentation:
    A = Alphabet(gens.split())
    return Presentation(A, [parse_word(r, A) for r in rels], name=name)


def _elementary_abelian(k: int, p: int = 2) -> Presentation:
    names = [f"e{i}" for i in range(1, k + 1)]
    rels = [f"{a}^{p}" for a in names]
    rels += [f"{a} {b} {a}^-1 {b}^-1" for i, a in enumerate(names) for b in names[i + 1:]]
    return _pres(" ".join(names), rels, f"Z{p}^{k}")


def _m3() -> Presentation:
    rels = ["x^2 y^-2", "y x y^-1 x", "u^3"]
    actions = [
        ("x", "z1", "z1^-1"), ("x", "z2", "z1^-1 z3^-1 z1"), ("x", "z3", "z1^-1 z2^-1 z1"),
        ("y", "z1", "z2 z3 z1"), ("y", "z2", "z2^-1"), ("y", "z3", "z2 z3^-1 z2^-1"),
        ("u", "z1", "x^2 z3 z1"), ("u", "z2", "x^2 z1^-1"), ("u", "z3", "x^2 z2^-1 z1^-1 z3^-1"),
        ("u", "x", "x y"), ("u", "y", "x"),
    ]
    for g, z, img in actions:
        rels.append(f"{g} {z} {g}^-1 ({img})^-1")
    return _pres_expr("z1 z2 z3 x y u", rels, "M3")


def _pres_expr(gens: str, rels: Sequence[str], name: str) -> Presentation:
    """Like _pres but allows one level of ``( ... )^-1``."""
    A = Alphabet(gens.split())
    out = []
    for r in rels:
        out.append(_parse_expr(r, A))
    return Presentation(A, out, name=name)


def _parse_expr(text: str, A: Alphabet) -> Word:
    w = Word.identity(A)
    rest = text
    while rest.strip():
        rest = rest.strip()
        if rest.startswith("("):
            close = rest.index(")")
            inner = parse_word(rest[1:close], A)
            rest = rest[close + 1:]
            if rest.startswith("^-1"):
                inner = ~inner
                rest = rest[3:]
            w = w * inner
        else:
            cut = rest.find("(")
            chunk = rest if cut < 0 else rest[:cut]
            w = w * parse_word(chunk, A)
            rest = "" if cut < 0 else rest[cut:]
    return w


M3_ACTIONS = (
    ("x", "z1", "z1^-1"), ("x", "z2", "z1^-1 z3^-1 z1"), ("x", "z3", "z1^-1 z2^-1 z1"),
    ("y", "z1", "z2 z3 z1"), ("y", "z2", "z2^-1"), ("y", "z3", "z2 z3^-1 z2^-1"),
    ("u", "z1", "x^2 z3 z1"), ("u", "z2", "x^2 z1^-1"), ("u", "z3", "x^2 z2^-1 z1^-1 z3^-1"),
    ("u", "x", "x y"), ("u", "y", "x"),
)

LAMBDA_GENS = "Y1 Y3 Z1 Z3 A C D"


def _lambda_relators() -> list[str]:
    rels = ["Y1^3", "Y3^3", "(Y1 Z1)^3", "(Y3 Z3)^3", "Z1^2", "Z3^2", "A^2", "C^2", "D^2",
            "A (C D)^-1", "A (Y1 Y3)^-1", "A (Z1 Z3)^-1", "C (Y3 Y1)^-1", "Y1 D Y3 D", "(Y3 Y1)^2"]
    comm = ["A", "C", "D", "Z1", "Z3"]
    rels += [f"{a} {b} {a}^-1 {b}^-1" for i, a in enumerate(comm) for b in comm[i + 1:]]
    return rels


def _expand_powers(text: str) -> str:
    # "(u v)^3" -> "u v u v u v"
    import re
    def rep(m):
        return " ".join([m.group(1)] * int(m.group(2)))
    return re.sub(r"\(([^()]*)\)\^(\d+)", rep, text)


def _lambda(extra: bool) -> Presentation:
    rels = [_expand_powers(r) for r in _lambda_relators()]
    if extra:
        comm = ["Z1", "Z3", "Y1 Z1 Y1^-1", "Y1 Z3 Y1^-1"]
        others = comm + ["A", "C", "D"]
        pairs = set()
        for a in comm:
            for b in others:
                if a != b and (b, a) not in pairs:
                    pairs.add((a, b))
        rels += [f"({a}) ({b}) ({a})^-1 ({b})^-1" for a, b in sorted(pairs)]
    return _pres_expr(LAMBDA_GENS, rels, "G" if extra else "Lambda")


_MODEL_BUILDERS = {
    "Q8": lambda: _pres("x y", ["x^2 y^-2", "y x y^-1 x"], "Q8"),
    "Q16": lambda: _pres("x y", ["x^8", "x^4 y^-2", "y x y^-1 x"], "Q16"),
    "D12": lambda: _pres("r s", ["r^6", "s^2", "s r s r"], "D12"),
    "Dic12": lambda: _pres("a x", ["a^6", "x^2 a^-3", "x a x^-1 a"], "Dic12"),
    "A4": lambda: _pres("a b", ["a^2", "b^3", "a b a b a b"], "A4"),
    "L": lambda: _pres("t w1 w2 w3 w4",
                       ["w1^2", "w2^2", "w3^2", "w4^2", "t^3"]
                       + [f"w{i} w{j} w{i}^-1 w{j}^-1" for i in range(1, 5) for j in range(i + 1, 5)]
                       + ["t w1 t^-1 w2^-1", "t w2 t^-1 w2^-1 w1^-1", "t w3 t^-1 w4^-1", "t w4 t^-1 w4^-1 w3^-1"],
                       "L"),
    "M3": _m3,
    "Lambda": lambda: _lambda(False),
    "G": lambda: _lambda(True),
    "Z2": lambda: _elementary_abelian(1),
    "Z3": lambda: _elementary_abelian(1, 3),
    "Z4": lambda: _pres("e1", ["e1^4"], "Z4"),
    "Z2^2": lambda: _elementary_abelian(2),
    "Z2^3": lambda: _elementary_abelian(3),
    "Z2^4": lambda: _elementary_abelian(4),
}

# models with known finite order, used by identification
MODEL_ORDERS = {"Q8": 8, "Q16": 16, "D12": 12, "Dic12": 12, "A4": 12, "L": 48,
                "Z2": 2, "Z3": 3, "Z4": 4, "Z2^2": 4, "Z2^3": 8, "Z2^4": 16}


def model_group(name: str) -> Presentation:
    try:
        return _MODEL_BUILDERS[name]()
    except KeyError:
        raise UnknownModel(name) from None


@dataclass(frozen=True)
class Model:
    name: str
    order: int
    presentation: Presentation


@lru_cache(maxsize=None)
def identification_models() -> dict[str, Model]:
    return {k: Model(k, v, model_group(k)) for k, v in MODEL_ORDERS.items()}


def regular_representation(p: Presentation, limits: EnumerationLimits | None = None) -> FiniteGroup:
    """Action on the cosets of the trivial subgroup."""
    t = todd_coxeter(p, (), limits)
    return table_group(t)


def table_group(t: CosetTable) -> FiniteGroup:
    return FiniteGroup([t.perm(g) for g in range(len(t.alphabet))], t.n_cosets, t.alphabet.names)


def identify_group(group: FiniteGroup):
    return identify(group, identification_models())


# ---------------------------------------------------------------- action tables

F5_NAMES = ("B14", "B24", "R4", "C14", "C24")
F3_NAMES = ("B23", "R3", "C23")
E_NAMES = ("e1", "e2", "e3", "e4", "e5")


@dataclass
class ActionTable:
    """Images of a free basis under conjugation by ``acting``."""

    name: str
    acting: str
    basis: Alphabet
    images: dict[str, Word]

    def __post_init__(self):
        for k, w in self.images.items():
            if k not in self.basis.index:
                raise ValueError(f"{k} is not a basis element")
            if w.alphabet != self.basis:
                raise ValueError(f"image of {k} is over the wrong alphabet")

    def matrix(self) -> list[list[int]]:
        """Row k: exponent sums of the image of basis element k."""
        return [self.images[n].exponent_sums() for n in self.basis.names]


def apply_action(t: ActionTable, w: Word) -> Word:
    return w.substitute(t.images, t.basis)


def compose_actions(outer: ActionTable, inner: ActionTable, name: str = "") -> ActionTable:
    """outer after inner."""
    imgs = {k: apply_action(outer, inner.images[k]) for k in inner.basis.names}
    return ActionTable(name or f"{outer.name}*{inner.name}", f"{outer.acting}*{inner.acting}", inner.basis, imgs)


def _table(name: str, acting: str, names: Sequence[str], images: Mapping[str, str]) -> ActionTable:
    A = Alphabet(names)
    imgs = {k: parse_word(images.get(k, k), A) for k in names}
    return ActionTable(name, acting, A, imgs)


def action_z4() -> ActionTable:
    return _table("actz4", "a^4", F5_NAMES + F3_NAMES, {
        "B14": "R4 B14^-1 R4^-1",
        "B24": "R4 B14 B24^-1 B14^-1 R4^-1",
        "R4": "R4^-1",
        "C14": "C14^-1",
        "C24": "C14 C24^-1 C14^-1",
        "B23": "B23^-1",
        "R3": "R3^-1",
        "C23": "R3^-1 C23^-1 R3",
    })


def action_f3f5_b23() -> ActionTable:
    return _table("actf3f5a", "B23", F5_NAMES, {
        "B24": "R4 B14 B24 B14^-1 R4^-1",
        "C24": "R4 C14 C24 C14^-1 R4^-1",
    })


def action_f3f5_c23() -> ActionTable:
    return _table("actf3f5b", "C23", F5_NAMES, {
        "B14": "B24^-1 R4^-1 C24^-1 C14^-1 B24 C14 C24 R4 B14 R4^-1 C24^-1 C14^-1 B24^-1 C14 C24 R4 B24",
        "B24": "B24^-1 R4^-1 C24^-1 C14^-1 B24 C14 C24 R4 B24",
        "R4": "B24^-1 B14^-1 R4^-1 C24^-1 R4 B14 B24 C14^-1 B24^-1 C14 C24 R4 B24",
        "C24": "B24^-1 B14^-1 R4^-1 C24 R4 B14 B24",
    })


def action_f3f5_r3() -> ActionTable:
    return _table("actf3f5c", "R3", F5_NAMES, {
        "B14": "C14 C24 B24^-1 B14 B24 C24^-1 C14^-1",
        "B24": "C14 C24 B24^-1 B14^-1 B24 B14 B24 C24^-1 C14^-1",
        "R4": "C14 C24 R4 C24^-1 C14^-1",
    })


def action_phi3() -> ActionTable:
    return _table("actphi3", "R3", E_NAMES, {
        "e1": "e4 e5 e2^-1 e1 e2 e5^-1 e4^-1",
        "e2": "e4 e5 e2^-1 e1^-1 e2 e1 e2 e5^-1 e4^-1",
        "e3": "e4 e5 e3 e5^-1 e4^-1",
    })


def e_basis() -> tuple[dict[str, Word], dict[str, Word]]:
    """(e_k as F5 words, F5 generators as e words)."""
    F = Alphabet(F5_NAMES)
    E = Alphabet(E_NAMES)
    f = lambda s: parse_word(s, F)
    e = lambda s: parse_word(s, E)
    to_f5 = {"e1": f("B14"), "e2": f("B24"), "e3": f("C14 C24 R4"), "e4": f("C14"), "e5": f("C24")}
    to_e = {"B14": e("e1"), "B24": e("e2"), "R4": e("e5^-1 e4^-1 e3"), "C14": e("e4"), "C24": e("e5")}
    return to_f5, to_e


def action_ambient_words() -> dict[str, Word]:
    """The F5 and F3 basis elements and the acting elements as words in B_4."""
    E = BraidElements(4)
    r3, r4 = E.rho(3), E.rho(4)
    return {
        "B14": E.B(1, 4), "B24": E.B(2, 4), "R4": r4 ** 2,
        "C14": E.B(1, 4).conjugate(r4), "C24": E.B(2, 4).conjugate(r4),
        "B23": E.B(2, 3), "R3": r3 ** 2, "C23": E.B(2, 3).conjugate(r3),
        "a^4": E.a ** 4,
    }


@dataclass
class ActionReport:
    name: str
    ok: bool
    details: dict


def phi_rho3_sq_check() -> ActionReport:
    """Transport the rho_3^2 table through the e-basis and compare with the direct table."""
    to_f5, to_e = e_basis()
    c = action_f3f5_r3()
    phi = action_phi3()
    mismatches = {}
    images = {}
    for k in E_NAMES:
        transported = apply_action(c, to_f5[k]).substitute(to_e, phi.basis)
        images[k] = str(transported)
        if transported != phi.images[k]:
            mismatches[k] = {"transported": str(transported), "expected": str(phi.images[k])}
    # the basis change itself must be invertible
    F = Alphabet(F5_NAMES)
    round_trip = all(Word(F, (i + 1,)).substitute(to_e, phi.basis).substitute(to_f5, F) == Word(F, (i + 1,))
                     for i in range(5))
    return ActionReport("actphi3", not mismatches and round_trip,
                        {"images": images, "mismatches": mismatches, "basis_round_trip": round_trip})


def action_abelian_check() -> ActionReport:
    """F3 tables act trivially on Z^5; the Z4 table acts as -I on Z^8."""
    det = {}
    ok = True
    for t in (action_f3f5_b23(), action_f3f5_c23(), action_f3f5_r3()):
        m = t.matrix()
        ident = [[int(i == j) for j in range(5)] for i in range(5)]
        det[t.name] = m == ident
        ok &= m == ident
    m = action_z4().matrix()
    neg = [[-int(i == j) for j in range(8)] for i in range(8)]
    det["actz4"] = m == neg
    ok &= m == neg
    # endomorphisms of a free group are determined by basis images; check they are
    # automorphisms on homology at least (determinant +-1)
    return ActionReport("action-abelian", ok, det)


# ---------------------------------------------------------------- derived series

class AbelianTarget:
    """Z/m1 + Z/m2 + ... as a group object; every modulus must be finite."""

    def __init__(self, moduli: Sequence[int]):
        if any(m == 0 for m in moduli):
            raise ValueError("infinite abelian target")
        self.moduli = tuple(moduli)
        self.identity = tuple(0 for _ in moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))


@dataclass
class SeriesStage:
    depth: int
    presentation: Presentation
    invariants: AbelianInvariants
    index: int | None = None
    # cosets of this stage in the previous stage, with the transversal used
    table: CosetTable | None = None
    transversal: list[Word] = field(default_factory=list)
    subgroup: SubgroupPresentation | None = None
    tietze: TietzeResult | None = None
    _abmap: AbelianizationMap | None = None

    @property
    def abelianization(self) -> AbelianizationMap:
        if self._abmap is None:
            self._abmap = abelianization_map(self.presentation)
        return self._abmap

    def level(self) -> Level:
        return Level(self.table, self.transversal, self.presentation.alphabet, self.tietze.dictionary)

    def row(self) -> dict:
        return {"depth": self.depth, "index": self.index, "generators": len(self.presentation.alphabet),
                "relators": len(self.presentation.relators), "invariants": self.invariants.as_pair()}


def derived_series(p: Presentation, depth: int, limits: EnumerationLimits | None = None,
                   strict: bool = False) -> list[SeriesStage]:
    """Stages 0..depth of the derived series, each the kernel of the previous abelianization.

    Stops early at an infinite abelianization (or raises with ``strict``) and at a
    perfect stage, whose successors coincide with it.
    """
    stages = [SeriesStage(0, p, abelian_invariants(p))]
    while len(stages) <= depth:
        cur = stages[-1]
        if cur.invariants.free_rank:
            if strict:
                raise InfiniteAbelianization(cur)
            break
        if cur.invariants.is_trivial:
            break
        amap = cur.abelianization
        target = AbelianTarget(amap.moduli)
        t = kernel_coset_table(cur.presentation, GroupHom(cur.presentation, target, amap.images))
        trans = schreier_transversal(t)
        sp = subgroup_presentation(cur.presentation, t, trans)
        tz = tietze_simplify(sp.presentation)
        newp = Presentation(tz.presentation.alphabet, tz.presentation.relators,
                            name=f"{p.name}^({cur.depth + 1})")
        stage = SeriesStage(cur.depth + 1, newp, abelian_invariants(newp), t.n_cosets, t, trans, sp, tz)
        stages.append(stage)
    return stages


def tower_group(stages: Sequence[SeriesStage], depth: int) -> FiniteGroup:
    """Permutation action of stage 0 on the cosets of stage ``depth``."""
    top = stages[0].presentation.alphabet
    if depth == 0:
        return FiniteGroup([(0,)] * len(top), 1, top.names)
    t = tower_table(top, [s.level() for s in stages[1:depth + 1]])
    return table_group(t)


# ---------------------------------------------------------------- quotients

class PermQuotient:
    """Images of the generators in a permutation group."""

    def __init__(self, name: str, group: FiniteGroup, images: Sequence | None = None):
        self.name = name
        self.group = group
        self.images = list(images) if images is not None else list(group.gens)
        self.identity = group.identity
        self.order_hint = None

    def image(self, w: Word):
        from .presentation import evaluate_in
        return evaluate_in(self.group, self.images, w)

    def describe(self, img) -> str:
        return "identity" if img == self.identity else f"permutation moving {sum(1 for i, j in enumerate(img) if i != j)} points"


class TowerQuotient:
    """G / G^(d+1) through derived stages 1..d and the abelianization of stage d.

    The image of a word is its canonical form: the coset reached at each level
    followed by the abelian coordinates of the residual subgroup element.
    Letters are processed through memoized transitions on coset states, so
    Tietze dictionary words are never expanded more than once per state.
    """

    def __init__(self, name: str, stages: Sequence[SeriesStage], depth: int):
        self.name = name
        self.depth = depth
        self.levels = []
        for st in stages[1:depth + 1]:
            sd = st.subgroup.schreier
            sub = [None] + [st.tietze.dictionary[n].letters for n in sd.alphabet.names]
            self.levels.append((sd, sub))
        self.amap = stages[depth].abelianization
        self._moduli = self.amap.moduli
        self._zero = tuple(0 for _ in self._moduli)
        self.identity = (tuple(0 for _ in self.levels), self._zero)
        self._memo: dict = {}

    def _add(self, u, v, sign=1):
        return tuple((a + sign * b) % m if m else a + sign * b for a, b, m in zip(u, v, self._moduli))

    def _walk(self, k: int, state: tuple, letters) -> tuple[tuple, tuple]:
        if k == len(self.levels):
            v = [0] * len(self._moduli)
            for x in letters:
                img = self.amap.images[abs(x) - 1]
                sg = 1 if x > 0 else -1
                for i, a in enumerate(img):
                    v[i] += sg * a
            return state, tuple(a % m if m else a for a, m in zip(v, self._moduli))
        vec = self._zero
        for x in letters:
            state, d = self._step(k, state, x)
            vec = self._add(vec, d)
        return state, vec

    def _step(self, k: int, state: tuple, x: int) -> tuple[tuple, tuple]:
        key = (k, state, x)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        sd, sub = self.levels[k]
        t = sd.table
        c, rest = state[0], state[1:]
        g = abs(x) - 1
        if x > 0:
            s = sd.index[(c, g)]
            c2 = t.cols[2 * g][c]
            word = sub[s] if s else ()
        else:
            c2 = t.cols[2 * g + 1][c]
            s = sd.index[(c2, g)]
            word = invert(sub[s]) if s else ()
        rest2, vec = self._walk(k + 1, rest, word) if word else (rest, self._zero)
        out = ((c2,) + rest2, vec)
        self._memo[key] = out
        return out

    def image(self, w: Word):
        return self._walk(0, tuple(0 for _ in self.levels), w.letters)

    def describe(self, img) -> str:
        return f"cosets {list(img[0])}, abelian part {list(img[1])}"


class PulledBackQuotient:
    """A quotient of an ambient group restricted along generator words."""

    def __init__(self, name: str, base, words: Mapping[str, Word], alphabet: Alphabet):
        self.name = name
        self.base = base
        self.words = [words[n] for n in alphabet.names]
        self.identity = base.identity

    def image(self, w: Word):
        return self.base.image(w.substitute(self.words))

    def describe(self, img) -> str:
        return self.base.describe(img)


def symmetric_quotient(n: int) -> PermQuotient:
    """The permutation map: s_i -> (i, i+1), r_j -> identity."""
    A = braid_alphabet(n)
    ident = tuple(range(n))
    imgs = []
    for name in A.names:
        if name.startswith("s"):
            i = int(name[1:]) - 1
            p = list(ident)
            p[i], p[i + 1] = p[i + 1], p[i]
            imgs.append(tuple(p))
        else:
            imgs.append(ident)
    gens = [g for g in imgs if g != ident] or [ident]
    return PermQuotient(f"S{n}", FiniteGroup(gens, n), imgs)


def braid_series(n: int, depth: int = 3) -> tuple[SeriesStage, ...]:
    return _braid_series(n, depth)


@lru_cache(maxsize=None)
def _braid_series(n: int, depth: int) -> tuple[SeriesStage, ...]:
    return tuple(derived_series(braid_presentation(n), depth))


def k_table() -> CosetTable:
    """Cosets of K = Gamma_2 cap P_4: kernel of B_4 -> S_4 x Z2^2."""
    p = braid_presentation(4)
    S = symmetric_quotient(4)

    class Target:
        identity = (S.identity, (0, 0))

        @staticmethod
        def mul(a, b):
            return (perm_mul(a[0], b[0]), _Z2Squared.mul(a[1], b[1]))

        @staticmethod
        def inv(a):
            return (perm_inv(a[0]), a[1])

    images = [(S.images[i], (1, 0) if name.startswith("s") else (0, 1)) for i, name in enumerate(p.alphabet.names)]
    return kernel_coset_table(p, GroupHom(p, Target(), images))


# ---------------------------------------------------------------- registry

@dataclass
class RegisteredGroup:
    id: str
    presentation: Presentation
    builder: object = None
    # attempt Knuth-Bendix before falling back to quotients
    kb: bool = False
    _quotients: list | None = None

    @property
    def quotients(self) -> list:
        if self._quotients is None:
            self._quotients = list(self.builder()) if self.builder else []
        return self._quotients


def _braid_quotients(n: int):
    out = []
    if n >= 2:
        out.append(symmetric_quotient(n))
    stages = braid_series(n, 3 if n <= 4 else 1)
    for d in range(len(stages)):
        out.append(TowerQuotient(f"B{n}/({d + 1})", stages, d))
    if n == 4:
        out.append(PermQuotient("B4/K", table_group(k_table())))
    return out


def _gamma2_quotients(n: int):
    words = gamma2_named_generators(n)
    A = Alphabet(words)
    return [PulledBackQuotient(f"{q.name}|Gamma2", q, words, A) for q in _braid_quotients(n)]


def _m3_quotients():
    stages = tuple(derived_series(model_group("M3"), 2))
    return [TowerQuotient(f"M3/({d + 1})", stages, d) for d in range(len(stages))]


def _finite_quotient(name: str):
    def build():
        g = regular_representation(model_group(name))
        return [PermQuotient(f"{name}-regular", g)]
    return build


def _lambda_quotients():
    # L via the map Y1 -> t, Y3 -> w1w2w3w4 t^2, Z1 -> w1, Z3 -> w3, A -> w1w3, C -> w1w2w3w4, D -> w2w4
    Lp = model_group("L")
    g = regular_representation(Lp)
    w = lambda s: g.evaluate(parse_word(s, Lp.alphabet))
    imgs = [w("t"), w("w1 w2 w3 w4 t^2"), w("w1"), w("w3"), w("w1 w3"), w("w1 w2 w3 w4"), w("w2 w4")]
    return [PermQuotient("L", g, imgs), PermQuotient("Lambda-regular", regular_representation(model_group("Lambda")))]


_REGISTRY: dict[str, RegisteredGroup] = {}


def registry_ids() -> list[str]:
    ids = [f"bn:{n}" for n in range(1, 7)] + [f"gamma2:{n}" for n in (3, 4, 5)]
    return ids + ["gamma2:4-letters", "Lambda-letters", "L", "Lambda", "G", "M3", "Q8", "Q16", "D12", "Dic12", "A4"]


def get_group(gid: str) -> RegisteredGroup:
    if gid in _REGISTRY:
        return _REGISTRY[gid]
    if gid.startswith("bn:") and gid[3:].isdigit() and 1 <= int(gid[3:]) <= 6:
        n = int(gid[3:])
        g = RegisteredGroup(gid, braid_presentation(n), lambda: _braid_quotients(n), kb=n <= 2)
    elif gid.startswith("gamma2:") and gid[7:].isdigit() and int(gid[7:]) in (3, 4, 5):
        n = int(gid[7:])
        g = RegisteredGroup(gid, gamma2_presentation_named(n), lambda: _gamma2_quotients(n))
    elif gid == "gamma2:4-letters":
        words = b4_letter_words()
        lp = b4_letter_presentation()
        g = RegisteredGroup(gid, lp, lambda: [PulledBackQuotient(f"{q.name}|letters", q, words, lp.alphabet)
                                              for q in _braid_quotients(4)])
    elif gid == "Lambda-letters":
        lp = lambda_letters_presentation()
        g = RegisteredGroup(gid, lp, lambda: [PermQuotient("Lambda-letters-regular", regular_representation(lp))],
                            kb=True)
    elif gid == "M3":
        g = RegisteredGroup(gid, model_group("M3"), _m3_quotients)
    elif gid == "Lambda":
        g = RegisteredGroup(gid, model_group("Lambda"), _lambda_quotients, kb=True)
    elif gid in ("L", "G", "Q8", "Q16", "D12", "Dic12", "A4"):
        g = RegisteredGroup(gid, model_group(gid), _finite_quotient(gid), kb=True)
    else:
        raise UnknownGroup(gid)
    _REGISTRY[gid] = g
    return g


# ---------------------------------------------------------------- F129 and the rho_3^4 action

TAU_WORD = ("e1 e2 e1 e3 e1 e2 e1 e4 e1 e2 e1 e3 e1 e2 e1 e5 "
            "e1 e2 e1 e3 e1 e2 e1 e4 e1 e2 e1 e3 e1 e2 e1")

# the displayed product, term by term, as words in e and tau_i
F129_TERMS = ("e2^-1 tau3^-1", "tau3 e1 tau2^-1", "tau2 e2 tau1^-1", "tau1 e1", "e2 tau3^-1",
              "tau4 e2^-1 tau7^-1", "tau5 e1 tau4^-1", "tau4 e2 tau7^-1", "tau7 e1 tau6^-1",
              "tau6 e2 tau5^-1", "tau5 e3 tau2^-1")
F129_INPUT = "tau5 e3 tau2^-1"


def tau_prefixes() -> list[Word]:
    E = Alphabet(E_NAMES)
    tau = parse_word(TAU_WORD, E)
    return [Word(E, tau.letters[:i], reduced=True) for i in range(len(tau) + 1)]


def _tau_expr(text: str) -> Word:
    """Parse a word in e1..e5 and tau0..tau31."""
    E = Alphabet(E_NAMES)
    pre = tau_prefixes()
    names = E_NAMES + tuple(f"tau{i}" for i in range(len(pre)))
    A = Alphabet(names)
    return parse_word(text, A).substitute(list(E.gens()) + pre, E)


def f129_table() -> CosetTable:
    E = Alphabet(E_NAMES)
    free = Presentation(E, [], name="F5")
    target = AbelianTarget([2] * 5)
    imgs = [tuple(int(i == k) for i in range(5)) for k in range(5)]
    return kernel_coset_table(free, GroupHom(free, target, imgs))


def remark_f129_check() -> ActionReport:
    """rho_3^4 acts nontrivially on the abelianized kernel of F5 -> Z2^5."""
    from .cosets import schreier_data, rewrite_to_subgroup, NotInSubgroup
    t = f129_table()
    pre = tau_prefixes()
    chk = validate_transversal(t, pre)
    det: dict = {"cosets": t.n_cosets, "transversal_valid": chk.accepted, "transversal_reason": chk.reason}
    if not chk:
        return ActionReport("f129", False, det)
    sd = schreier_data(t, chk.by_coset)
    rank = len(sd.alphabet)
    det["basis_rank"] = rank
    phi = action_phi3()
    phi2 = compose_actions(phi, phi, "phi_rho3^4")

    # phi_{rho3^4} preserves the kernel: every basis element stays in coset 0
    kernel_ok = True
    for amb in sd.ambient:
        if t.act(0, apply_action(phi2, amb)) != 0:
            kernel_ok = False
            break
    det["preserves_kernel"] = kernel_ok

    x = _tau_expr(F129_INPUT)
    image = apply_action(phi2, x)
    v_image = rewrite_to_subgroup(sd, image).exponent_sums()
    v_input = rewrite_to_subgroup(sd, x).exponent_sums()
    expected = [0] * rank
    singles = True
    terms = []
    for term in F129_TERMS:
        try:
            r = rewrite_to_subgroup(sd, _tau_expr(term))
        except NotInSubgroup:
            singles = False
            terms.append({"term": term, "basis": None})
            continue
        # each displayed factor should be a single basis element or its inverse
        if len(r) != 1:
            singles = False
        terms.append({"term": term, "basis": str(r)})
        for i, c in enumerate(r.exponent_sums()):
            expected[i] += c
    det.update({
        "terms": terms,
        "terms_are_basis_elements": singles,
        "input_basis_element": str(rewrite_to_subgroup(sd, x)),
        "image_support": {sd.alphabet.names[i]: c for i, c in enumerate(v_image) if c},
        "matches_display": v_image == expected,
        "differs_from_input": v_image != v_input,
    })
    ok = (t.n_cosets == 32 and rank == 129 and kernel_ok and singles
          and v_image == expected and v_image != v_input)
    return ActionReport("f129", ok, det)


# ---------------------------------------------------------------- phi onto L and the third derived stage

PHI_IMAGES = {
    "X2": "1", "X4": "1", "A3": "1", "B1": "1", "B4": "1",
    "A1": "w1 w3", "A4": "w1 w3", "B2": "w1 w3", "B3": "w1 w3",
    "C1": "w1 w2 w3 w4", "C2": "w1 w2 w3 w4", "C3": "w1 w2 w3 w4", "C4": "w1 w2 w3 w4",
    "D1": "w2 w4", "D2": "w2 w4", "D3": "w2 w4", "D4": "w2 w4",
    "Z1": "w1", "Z2": "w1", "Z3": "w3", "Z4": "w3",
    "Y1": "t", "Y2": "t^2", "Y3": "w1 w2 w3 w4 t^2", "Y4": "w1 w3 t",
}


@lru_cache(maxsize=None)
def l_regular() -> FiniteGroup:
    return regular_representation(model_group("L"))


def phi_images() -> list:
    """phi(letter) as permutations of L's regular representation, in B4_LETTERS order."""
    L = model_group("L")
    g = l_regular()
    return [g.evaluate(parse_word(PHI_IMAGES[n], L.alphabet)) for n in B4_LETTERS]


def b4_rs_letter_presentation() -> Presentation:
    """The Reidemeister-Schreier presentation of Gamma_2(B_4), generators renamed to letters."""
    sp = gamma2_rs(4)
    rename = {name: b4_letter_of(name) for name in sp.presentation.alphabet.names}
    A = Alphabet(B4_LETTERS)
    sub = [A.gen(rename[n]) for n in sp.presentation.alphabet.names]
    rels = [r.substitute(sub, A) for r in sp.presentation.relators]
    return Presentation(A, rels, name="Gamma2(B4)-rs")


def phi_relator_check(p: Presentation) -> list[int]:
    """Indices of relators of ``p`` (over B4_LETTERS) not killed by phi."""
    return check_homomorphism(GroupHom(p, l_regular(), phi_images()))


@dataclass
class ThirdStage:
    index_in_gamma2: int
    index_in_b4: int
    schreier_rank: int
    invariants: AbelianInvariants


def b4_third_stage_via_phi() -> ThirdStage:
    """(B_4)^(3) as the kernel of phi, with abelian invariants from a sparse relation matrix."""
    p = b4_rs_letter_presentation()
    t = kernel_coset_table(p, GroupHom(p, l_regular(), phi_images()))
    sp = subgroup_presentation(p, t, schreier_transversal(t))
    rows = []
    for r in sp.presentation.relators:
        row: dict[int, int] = {}
        for x in r.letters:
            k = abs(x) - 1
            row[k] = row.get(k, 0) + (1 if x > 0 else -1)
        rows.append(row)
    inv = abelian_invariants_of_matrix(rows, len(sp.presentation.alphabet))
    return ThirdStage(t.n_cosets, 4 * t.n_cosets, len(sp.presentation.alphabet), inv)


def b4_gamma2_tower_images() -> FiniteGroup:
    """Image of Gamma_2(B_4) in B_4/(B_4)^(3), generated by the letters."""
    st = braid_series(4)
    G = tower_group(st, 3)
    words = b4_letter_words()
    return FiniteGroup([G.evaluate(words[n]) for n in B4_LETTERS], G.degree, list(B4_LETTERS))


def phi_kernel_equality() -> tuple[int, int, int]:
    """Orders of phi(Gamma_2), its tower image, and the diagonal image.

    All three equal means ker(phi) = (B_4)^(3) inside Gamma_2(B_4).
    """
    T = b4_gamma2_tower_images()
    P = phi_images()
    d1 = len(P[0])
    pairs = [tuple(a) + tuple(d1 + x for x in b) for a, b in zip(P, T.gens)]
    D = FiniteGroup(pairs, d1 + T.degree)
    return FiniteGroup(P, d1).order(), T.order(), D.order()


# ---------------------------------------------------------------- displayed identities

@dataclass(frozen=True)
class Identity:
    key: str
    group: str
    lhs: Word
    rhs: Word
    text: str


def _ident(key: str, group: str, lhs: Word, rhs: Word, text: str = "") -> Identity:
    return Identity(key, group, lhs, rhs, text or f"{lhs} = {rhs}")


def _prod(words: Sequence[Word], A: Alphabet) -> Word:
    out = Word.identity(A)
    for w in words:
        out = out * w
    return out


def consistency_identities(n: int) -> list[Identity]:
    """Word identities in B_n stated without proof by rewriting; checked against quotients."""
    E = BraidElements(n)
    A = E.alphabet
    gid = f"bn:{n}"
    s, r, a, b = E.sigma, E.rho, E.a, E.b
    one = Word.identity(A)
    out = [
        _ident("defab.a_alt", gid, a, E.a_alt, "a has both displayed forms"),
        _ident("defab.a_power", gid, a ** n, _prod([r(j) for j in range(n, 0, -1)], A), "a^n = rho_n...rho_1"),
        _ident("defab.a_order", gid, a ** (4 * n), one, "a^(4n) = 1"),
    ]
    if n >= 3:
        out += [
            _ident("defab.b_alt", gid, b, E.b_alt, "b has both displayed forms"),
            _ident("defab.b_power", gid, b ** (n - 1), _prod([r(j) for j in range(n - 1, 0, -1)], A),
                   "b^(n-1) = rho_(n-1)...rho_1"),
            _ident("defab.b_order", gid, b ** (4 * (n - 1)), one, "b^(4(n-1)) = 1"),
        ]
    for i in range(1, n - 1):
        out.append(_ident(f"cyclicperm.sigma{i}", gid, s(i).conjugate(~a), s(i + 1)))
    if n >= 2:
        out.append(_ident("cyclicperm.sigma_wrap", gid, s(n - 1).conjugate(~a ** 2), ~s(1)))
    for j in range(1, n):
        out.append(_ident(f"cyclicperm.rho{j}", gid, r(j).conjugate(~a), r(j + 1)))
    out.append(_ident("cyclicperm.rho_wrap", gid, r(n).conjugate(~a), ~r(1)))
    an = a ** n
    for i in range(1, n):
        out.append(_ident(f"cyclicperm2.sigma{i}", gid, s(i).conjugate(an), ~s(i)))
    for j in range(1, n + 1):
        out.append(_ident(f"cyclicperm2.rho{j}", gid, r(j).conjugate(an), ~r(j)))
    D = E.garside
    out.append(_ident("conjgarside.a", gid, a.conjugate(D), ~a))
    for i in range(1, n + 1):
        out.append(_ident(f"conjgarside.rho{i}", gid, r(i).conjugate(D), ~r(n + 1 - i)))
    if n == 3:
        out += _b3_identities(E)
    if n == 4:
        out += _b4_identities(E)
    return out


def _b3_identities(E: BraidElements) -> list[Identity]:
    s, r, B, a, b = E.sigma, E.rho, E.B, E.a, E.b
    gid = "bn:3"
    D = E.garside
    x, y, z1, z2, z3, u = E.x, E.y, E.z1, E.z2, E.z3, E.u
    out = [
        _ident("a3b2.b2", gid, b ** 2, r(2) * r(1)),
        _ident("a3b2.a3", gid, a ** 3, r(3) * r(2) * r(1)),
        _ident("bgara", gid, b * D * ~a, r(2) * B(1, 2) * ~r(3)),
        _ident("rho2rho1.y", gid, (r(2) * r(1)) ** 2, (r(2) * B(1, 2) * ~r(3)) ** 2),
        _ident("rho2rho1.b4", gid, (r(2) * r(1)) ** 2, b ** 4),
        _ident("rho2rho1.twist", gid, (r(2) * r(1)) ** 2, D ** 2),
        _ident("rho2rho1.pure", gid, (r(2) * r(1)) ** 2, B(1, 2) * B(1, 3) * B(2, 3)),
        _ident("exprb12.b13", gid, B(1, 2), (r(2) * r(1)) ** 2 * ~B(2, 3) * ~B(1, 3)),
        _ident("exprb12.rho3", gid, B(1, 2), (r(2) * r(1)) ** 2 * r(3) ** 2),
        _ident("rho3sq", gid, r(3) ** -2, B(1, 3) * B(2, 3)),
        _ident("a4.order3", gid, a ** 12, Word.identity(E.alphabet), "a^4 has order dividing 3"),
        _ident("quat.x2y2", gid, x ** 2, y ** 2),
        _ident("quat.yxy", gid, y * x * ~y, ~x),
        _ident("u.cube", gid, u ** 3, Word.identity(E.alphabet)),
        _ident("u.power_of_a", gid, u, a ** 4, "u = a^4"),
    ]
    # the F3 basis under a^3 = rho3 rho2 rho1
    B23, R3 = B(2, 3), r(3) ** 2
    C23 = B23.conjugate(r(3))
    a3 = r(3) * r(2) * r(1)
    out += [
        _ident("conja3.b23", gid, B23.conjugate(a3), ~B23),
        _ident("conja3.rho3sq", gid, R3.conjugate(a3), ~R3),
        _ident("conja3.c23", gid, C23.conjugate(a3), ~R3 * ~C23 * R3),
    ]
    names = {"x": x, "y": y, "z1": z1, "z2": z2, "z3": z3, "u": u}
    M = model_group("M3")
    for g, z, img in M3_ACTIONS:
        rhs = _parse_expr(img, M.alphabet).substitute(names, E.alphabet)
        out.append(_ident(f"gamma2rp34.{g}.{z}", gid, names[z].conjugate(names[g]), rhs,
                          f"{g} {z} {g}^-1 = {img}"))
    return out


def _b4_identities(E: BraidElements) -> list[Identity]:
    r, s, a, b = E.rho, E.sigma, E.a, E.b
    gid = "bn:4"
    L = b4_letter_words()
    A = Alphabet(B4_LETTERS)
    letters = lambda text: parse_word(text, A).substitute(L, E.alphabet)
    out = [
        _ident("b4.power", gid, b ** 4, r(3) * r(2) * r(1) * r(3) * s(2) * s(1)),
        _ident("b4.letters", gid, b ** 4, letters("C1 B4 A1 C4 Y1 X2")),
        _ident("a4.letters", gid, r(4) * r(3) * r(2) * r(1), letters("D1 C4 B1 A4")),
    ]
    # action tables: conjugation by the acting element on each listed basis element
    amb = action_ambient_words()
    for t in (action_z4(), action_f3f5_b23(), action_f3f5_c23(), action_f3f5_r3()):
        g = amb[t.acting]
        for k in t.basis.names:
            rhs = t.images[k].substitute(amb, E.alphabet)
            out.append(_ident(f"{t.name}.{k}", gid, amb[k].conjugate(g), rhs,
                              f"{t.acting} {k} {t.acting}^-1 = {t.images[k]}"))
    return out


# ---------------------------------------------------------------- generators of K

def gensk_pairs() -> list[tuple[str, Word, str]]:
    """(label, element of B_4, expression in the Gamma_2 letters)."""
    E = BraidElements(4)
    B, r = E.B, E.rho
    conj = lambda w: w.conjugate(r(1))
    return [
        ("B12", B(1, 2), "X2"), ("B13", B(1, 3), "Y1 X2 Y1^-1"), ("B14", B(1, 4), "Z1 Y2 X2 Y2^-1 Z1^-1"),
        ("B23", B(2, 3), "Y1 Y2"), ("B24", B(2, 4), "Z1 Y2 Y1 Z1^-1"), ("B34", B(3, 4), "Z1 Z2"),
        ("r1B12", conj(B(1, 2)), "A1 X4 A1^-1"), ("r1B13", conj(B(1, 3)), "A1 Y4 X4 Y4^-1 A1^-1"),
        ("r1B14", conj(B(1, 4)), "A1 Z4 Y3 X4 Y3^-1 Z4^-1 A1^-1"),
        ("r1sq", r(1) ** 2, "A1 A4"), ("r2sq", r(2) ** 2, "B1 B4"), ("r3sq", r(3) ** 2, "C1 C4"),
        ("r4sq", r(4) ** 2, "D1 D4"),
        ("r1r2", r(1) * r(2), "A1 B4"), ("r1r3", r(1) * r(3), "A1 C4"), ("r1r4", r(1) * r(4), "A1 D4"),
    ]


def gensk_membership_check() -> ActionReport:
    from .wordproblem import Refuted, check_identity
    t = k_table()
    A = Alphabet(B4_LETTERS)
    L = b4_letter_words()
    E = BraidElements(4)
    members, rhs_members, verdicts = {}, {}, {}
    subgroup = []
    for label, w, expr in gensk_pairs():
        rhs = parse_word(expr, A).substitute(L, E.alphabet)
        members[label] = t.act(0, w) == 0
        rhs_members[label] = t.act(0, rhs) == 0
        verdicts[label] = type(check_identity("bn:4", w, rhs)).__name__
        subgroup.append(w)
    rho1_outside = t.act(0, E.rho(1)) != 0
    # the listed elements generate K: enumeration over them has the index of the K-table
    index = todd_coxeter(braid_presentation(4), subgroup).n_cosets
    ok = (all(members.values()) and all(rhs_members.values()) and rho1_outside and index == t.n_cosets
          and "Refuted" not in verdicts.values())
    return ActionReport("gensk", ok, {
        "k_index": t.n_cosets, "generated_index": index, "members": members,
        "letter_members": rhs_members, "verdicts": verdicts, "rho1_outside": rho1_outside,
    })


# ---------------------------------------------------------------- Lambda on the 25 letters

def lambda_letters_presentation() -> Presentation:
    """Gamma_2(B_4) with every pair of non-Y letters made to commute."""
    p = b4_rs_letter_presentation()
    A = p.alphabet
    non_y = [n for n in B4_LETTERS if not n.startswith("Y")]
    extra = [A.gen(x).commutator(A.gen(y)) for i, x in enumerate(non_y) for y in non_y[i + 1:]]
    q = p.with_relators(extra)
    return Presentation(q.alphabet, q.relators, name="Lambda-letters")


# chains of equal elements derived inside Lambda
LAMBDA_CHAINS = {
    "x2zcd": "X2 = Z2 Z1^-1 = C2 C1^-1 = D2 D1^-1 = C3^-1 C4 = D3^-1 D4",
    "x4zcd": "X4 = Z4 Z3^-1 = C2 C1^-1 = D2 D1^-1 = C3^-1 C4 = D3^-1 D4",
    "x2x4": "X2 = X4",
    "z2z3z1z4": "Z2 Z3 = Z1 Z4",
    "a1y1y4b": "A1 = B2 = Y1 Y4^-1 = Y2^-1 Y3 = Z1 Z4^-1 = Z2^-1 Z3",
    "z1z2z3z4": "Z1 Z2 = Z3 Z4",
    "zi2.a": "Z1^2 = Z3^2",
    "zi2.b": "Z2^2 = Z4^2",
    "a3b4": "B4 = A3 = Z3 A4 Z2^-1 = Z1 Z4^-1 A4",
    "b1x2": "B1 = X2^-1 X4^-1 = Z1 Z2^-1 Z3 Z4^-1 = Z1^2 Z4^-2",
    "x2x4b.x": "X2 = X4 = 1",
    "x2x4b.z12": "Z1 = Z2",
    "x2x4b.z34": "Z3 = Z4",
    "x2x4b.sq": "Z1^2 = Z2^2 = Z3^2 = Z4^2",
    "c1c2.c12": "C1 = C2",
    "c1c2.d12": "D1 = D2",
    "c1c2.c34": "C3 = C4",
    "c1c2.d34": "D3 = D4",
    "c1c2.b1": "B1 = 1",
}


def lambda_identities() -> list[Identity]:
    A = Alphabet(B4_LETTERS)
    out = []
    for key, chain in LAMBDA_CHAINS.items():
        parts = [parse_word(p, A) for p in chain.split("=")]
        for k, w in enumerate(parts[1:], start=1):
            out.append(_ident(f"{key}.{k}", "Lambda-letters", parts[0], w, f"{parts[0]} = {w}"))
    return out
