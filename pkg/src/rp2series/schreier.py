"""Reidemeister-Schreier presentations of finite-index subgroups."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cosets import CosetTable, SchreierData, rewrite_letters, rewrite_to_subgroup, schreier_data
from .presentation import Presentation
from .words import Alphabet, Word, cyclic_canonical, cyclic_reduce, invert


@dataclass
class SubgroupPresentation:
    presentation: Presentation
    # Schreier generator name -> ambient word t_c g t_{cg}^-1
    dictionary: dict[str, Word]
    schreier: SchreierData
    raw_relator_count: int
    # (coset, ambient relator index) for each raw relator, in order
    raw_relators: list[Word] = field(default_factory=list)

    def rewrite(self, w: Word) -> Word:
        return rewrite_to_subgroup(self.schreier, w)


def subgroup_presentation(p: Presentation, t: CosetTable, transversal: Sequence[Word]) -> SubgroupPresentation:
    sd = schreier_data(t, transversal)
    raw = []
    for c in range(t.n_cosets):
        for r in p.relators:
            out, end = rewrite_letters(sd, c, r.letters)
            if end != c:
                raise ValueError(f"relator {r} does not fix coset {c}")
            raw.append(Word(sd.alphabet, out, reduced=True))
    pres = Presentation(sd.alphabet, raw, name=f"{p.name}-sub{t.n_cosets}")
    dictionary = {n: w for n, w in zip(sd.alphabet.names, sd.ambient)}
    return SubgroupPresentation(pres, dictionary, sd, len(raw), raw)


def lower_central_step(sp: SubgroupPresentation, ambient: Presentation) -> Presentation:
    """Quotient of the subgroup presentation by [ambient, subgroup].

    Extra relators are rewrite(g x g^-1) x^-1 for ambient generators g and
    Schreier generators x.
    """
    extra = []
    for g in ambient.gens():
        for i, name in enumerate(sp.presentation.alphabet.names):
            x = sp.dictionary[name]
            conj = g * x * g.inverse()
            extra.append(sp.rewrite(conj) * sp.presentation.alphabet.gen(name).inverse())
    return sp.presentation.with_relators(extra)


# ---------------------------------------------------------------- matching

@dataclass
class MatchReport:
    only_a: list[Word]
    only_b: list[Word]
    multiset_equal: bool
    a_count: int
    b_count: int

    @property
    def matched(self) -> bool:
        return not self.only_a and not self.only_b

    def summary(self) -> str:
        return (f"{self.a_count} vs {self.b_count} relators, "
                f"{len(self.only_a)} unmatched left, {len(self.only_b)} unmatched right, "
                f"multiset {'equal' if self.multiset_equal else 'differs'}")


def match_presentations(a: Presentation | Sequence[Word], b: Presentation, naming: Mapping[str, str] | None = None) -> MatchReport:
    """Compare relators up to free/cyclic reduction, rotation and inversion.

    ``naming`` renames a's generators into b's.
    """
    rels_a = a.relators if isinstance(a, Presentation) else tuple(a)
    alpha_a = rels_a[0].alphabet if rels_a else b.alphabet
    if naming is None:
        naming = {n: n for n in alpha_a.names}
    tr = {}
    for i, n in enumerate(alpha_a.names):
        tr[i + 1] = b.alphabet.index[naming[n]] + 1
    def canon_a(w):
        return cyclic_canonical([tr[abs(x)] * (1 if x > 0 else -1) for x in w.letters])
    ca = Counter(canon_a(w) for w in rels_a if cyclic_reduce(w.letters))
    cb = Counter(cyclic_canonical(w.letters) for w in b.relators)
    only_a = [Word(b.alphabet, k, reduced=True) for k in ca if k not in cb]
    only_b = [Word(b.alphabet, k, reduced=True) for k in cb if k not in ca]
    return MatchReport(only_a, only_b, ca == cb, sum(ca.values()), sum(cb.values()))
