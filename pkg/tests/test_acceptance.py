"""The eleven primary acceptance criteria, at exact tolerances.

Each test records its outcome; the session summary prints one line per criterion.
"""
import random
from itertools import combinations

import pytest

from conftest import record
from rp2series import rp2
from rp2series.abelian import matmul, smith_normal_form
from rp2series.cosets import (kernel_coset_table, schreier_transversal, todd_coxeter, tower_table,
                              validate_transversal)
from rp2series.groupid import FiniteGroup, closure, derived_subgroup, perm_inv, perm_mul, quotient_invariants
from rp2series.presentation import GroupHom, Presentation, abelian_invariants
from rp2series.schreier import lower_central_step, match_presentations, subgroup_presentation
from rp2series.wordproblem import Consistent, ProvedTrivial, Refuted, check_identity
from rp2series.words import Word


def pair(inv):
    free, tors = inv.as_pair()
    return (free, list(tors))


def verify_isomorphism(ident, model_name, group):
    """Check an identification independently: relators hold and the images generate."""
    m = rp2.model_group(model_name)
    imgs = dict(zip(ident.model_generators, ident.images))
    ok = True
    for r in m.relators:
        x = group.identity
        for letter in r.letters:
            g = imgs[m.alphabet.names[abs(letter) - 1]]
            x = perm_mul(x, g if letter > 0 else perm_inv(g))
        ok &= x == group.identity
    return ok and len(closure(ident.images, group.identity)) == group.order() == rp2.MODEL_ORDERS[model_name]


# ---------------------------------------------------------------- 1

def test_criterion_1_b2_is_q16():
    t = todd_coxeter(rp2.braid_presentation(2))
    g = rp2.table_group(t)
    ident = rp2.identify_group(g)
    ok = t.n_cosets == 16 and ident is not None and ident.name == "Q16" and verify_isomorphism(ident, "Q16", g)
    record(1, ok, f"cosets={t.n_cosets}, identified={ident and ident.name}")
    assert ok


# ---------------------------------------------------------------- 2

def test_criterion_2_abelianizations():
    got = {n: pair(abelian_invariants(rp2.braid_presentation(n))) for n in range(1, 6)}
    want = {1: (0, [2]), **{n: (0, [2, 2]) for n in range(2, 6)}}
    # finite cases double-checked from the regular representation
    oracle = {}
    for n in (1, 2):
        g = rp2.regular_representation(rp2.braid_presentation(n))
        elems = g.elements()
        oracle[n] = pair(quotient_invariants(g, elems, derived_subgroup(g)))
    ok = got == want and all(oracle[n] == want[n] for n in oracle)
    record(2, ok, f"{got}")
    assert got == want
    assert oracle == {1: want[1], 2: want[2]}


# ---------------------------------------------------------------- 3

@pytest.mark.parametrize("n", [3, 4, 5])
def test_criterion_3_rs_matches_families(n):
    sp = rp2.gamma2_rs(n)
    named = rp2.gamma2_presentation_named(n)
    rep = match_presentations(sp.presentation, named, rp2.gamma2_schreier_naming(n))
    gens = len(sp.presentation.alphabet)
    ok = gens == 8 * n - 7 and len(named.alphabet) == gens and rep.matched and rep.multiset_equal
    record(3, ok, f"n={n}: {gens} generators, {rep.summary()}")
    assert gens == 8 * n - 7
    assert rep.matched and rep.multiset_equal


def test_criterion_3_transversal_is_the_prescribed_one():
    for n in (3, 4, 5):
        sd = rp2.gamma2_rs(n).schreier
        t, words = sd.table, sd.transversal
        E = rp2.BraidElements(n)
        s1, r1 = E.sigma(1), E.rho(1)
        expected = [Word.identity(E.alphabet), s1, s1 * r1, s1 * r1 * s1]
        chk = validate_transversal(t, words)
        ok = words == expected and chk.accepted and chk.by_coset == expected
        ok = ok and [t.act(0, w) for w in words] == [0, 1, 2, 3]
        record(3, ok, f"n={n}: transversal {[str(w) for w in words]}")
        assert ok


def test_criterion_3_listed_relators_for_n4():
    """The 64 displayed relators against the computed ones, relator by relator."""
    listed = rp2.b4_letter_presentation()
    rs = rp2.b4_rs_letter_presentation()
    rep = match_presentations(listed, rs)
    ok = rep.matched and rep.multiset_equal
    record(3, ok, "n=4 list: " + rep.summary() + "; listed only: " + ", ".join(map(str, rep.only_a)))
    assert len(listed.relators) == len(rs.relators) == 64
    assert rep.matched and rep.multiset_equal, rep.summary()


# ---------------------------------------------------------------- 4

@pytest.mark.parametrize("n", [3, 4, 5])
def test_criterion_4_lower_central_series_stabilizes(n):
    sp = rp2.gamma2_rs(n)
    q = lower_central_step(sp, rp2.braid_presentation(n))
    inv = abelian_invariants(q)
    record(4, inv.is_trivial, f"n={n}: {inv}")
    assert inv.is_trivial


# ---------------------------------------------------------------- 5

def test_criterion_5_gamma2_b5_perfect():
    inv = abelian_invariants(rp2.gamma2_rs(5).presentation)
    record(5, inv.is_trivial, f"{inv}")
    assert inv.is_trivial


# ---------------------------------------------------------------- 6

def test_criterion_6_b3_chain(b3_series):
    chain = [pair(s.invariants) for s in b3_series]
    idx = [s.index for s in b3_series[1:]]
    ok = chain == [(0, [2, 2]), (0, [3]), (0, [2, 2, 2, 2]), (9, [2])] and idx == [4, 3, 16]
    record(6, ok, f"{chain} {idx}")
    assert ok


def test_criterion_6_b3_quotients(b3_series):
    g2 = rp2.tower_group(b3_series, 2)
    ident = rp2.identify_group(g2)
    d12 = ident is not None and ident.name == "D12" and verify_isomorphism(ident, "D12", g2)
    o3 = rp2.tower_group(b3_series, 3).order()
    record(6, d12 and o3 == 192, f"D12={d12}, |B3/(3)|={o3}")
    assert d12
    assert o3 == 192


# ---------------------------------------------------------------- 7

def test_criterion_7_b4_chain(b4_series):
    chain = [pair(s.invariants) for s in b4_series]
    want = [(0, [2, 2]), (0, [3]), (0, [2, 2, 2, 2]), (0, [2] * 8 + [4])]
    ok = chain == want and [s.index for s in b4_series[1:]] == [4, 3, 16]
    record(7, ok, f"{chain}")
    assert ok


def test_criterion_7_b4_mod_second_derived_is_d12(b4_series):
    g = rp2.tower_group(b4_series, 2)
    ident = rp2.identify_group(g)
    ok = ident is not None and ident.name == "D12" and verify_isomorphism(ident, "D12", g)
    record(7, ok, "B4/(2) not D12")
    assert ok


def test_criterion_7_phi_and_l():
    bad_rs = rp2.phi_relator_check(rp2.b4_rs_letter_presentation())
    # phi lands in L: the defining relators of L hold in its regular representation
    L = rp2.l_regular()
    assert L.order() == 48
    g = rp2.b4_gamma2_tower_images()
    ident = rp2.identify_group(g)
    is_l = ident is not None and ident.name == "L" and verify_isomorphism(ident, "L", g)
    kernel = rp2.phi_kernel_equality()
    ok = not bad_rs and is_l and kernel == (48, 48, 48)
    record(7, ok, f"phi bad relators {bad_rs}, L={is_l}, kernel {kernel}")
    assert not bad_rs
    assert is_l
    assert kernel == (48, 48, 48)


def test_criterion_7_two_constructions_agree(b4_series):
    s = rp2.b4_third_stage_via_phi()
    derived = pair(b4_series[3].invariants)
    via_phi = pair(s.invariants)
    want = (0, [2] * 8 + [4])
    index = b4_series[1].index * b4_series[2].index * b4_series[3].index
    ok = derived == via_phi == want and index == s.index_in_b4 == 192
    record(7, ok, f"derived {derived}, via phi {via_phi}")
    assert ok


# ---------------------------------------------------------------- 8

def test_criterion_8_m3_pipeline(b3_series):
    m = rp2.derived_series(rp2.model_group("M3"), 2)
    got = [pair(s.invariants) for s in m]
    ok = (got == [(0, [3]), (0, [2, 2, 2, 2]), (9, [2])] == [pair(s.invariants) for s in b3_series[1:]]
          and [s.index for s in m[1:]] == [3, 16])
    record(8, ok, f"M3 {got}")
    assert ok


def test_criterion_8_identities_never_refuted():
    prefixes = ("gamma2rp34", "a3b2", "cyclicperm2", "conjgarside", "rho2rho1", "exprb12")
    ids = [i for i in rp2.consistency_identities(3) if i.key.split(".")[0] in prefixes]
    assert sum(i.key.startswith("gamma2rp34.") for i in ids) == 11
    bad = []
    for i in ids:
        v = check_identity(i.group, i.lhs, i.rhs)
        if isinstance(v, Refuted):
            bad.append(i.key)
        elif isinstance(v, Consistent) and not {"S3", "B3/(2)", "B3/(3)"} <= set(v.quotients):
            bad.append(i.key + " (quotients missing)")
    record(8, not bad, f"refuted: {bad}")
    assert not bad


# ---------------------------------------------------------------- 9

def test_criterion_9_action_tables():
    r = rp2.phi_rho3_sq_check()
    five = len(r.details["images"]) == 5 and not r.details["mismatches"]
    ab = rp2.action_abelian_check()
    # every table assigns an image to every basis element, so it defines an endomorphism
    total = all(set(t.images) == set(t.basis.names) for t in
                (rp2.action_z4(), rp2.action_f3f5_b23(), rp2.action_f3f5_c23(), rp2.action_f3f5_r3(),
                 rp2.action_phi3()))
    ok = r.ok and five and ab.ok and total
    record(9, ok, f"transport {r.details['mismatches']}, abelian {ab.details}")
    assert ok


# ---------------------------------------------------------------- 10

def test_criterion_10_f129():
    r = rp2.remark_f129_check()
    d = r.details
    ok = (r.ok and d["cosets"] == 32 and d["transversal_valid"] and d["basis_rank"] == 129
          and len(d["terms"]) == 11 and d["matches_display"] and d["differs_from_input"])
    record(10, ok, f"{ {k: v for k, v in d.items() if not isinstance(v, (list, dict))} }")
    assert ok


def test_criterion_10_tau_prefixes_prefix_closed():
    words = rp2.tau_prefixes()
    assert len(words) == 32
    as_set = {w.letters for w in words}
    assert all(w.letters[:-1] in as_set for w in words if w.letters)


# ---------------------------------------------------------------- 11

def _random_perm(rng, d):
    p = list(range(d))
    rng.shuffle(p)
    return tuple(p)


def test_criterion_11_nielsen_schreier():
    """Kernels of random maps from free groups onto permutation groups."""
    rng = random.Random(11)
    done = 0
    bad = []
    while done < 100:
        k = rng.randint(1, 3)
        d = rng.randint(2, 4)
        p = Presentation([f"x{i}" for i in range(k)])
        g = FiniteGroup([_random_perm(rng, d) for _ in range(k)], d)
        t = kernel_coset_table(p, GroupHom(p, g, list(g.gens)))
        n = t.n_cosets
        sp = subgroup_presentation(p, t, schreier_transversal(t))
        rank = len(sp.presentation.alphabet)
        if rank != n * (k - 1) + 1 or n != g.order():
            bad.append((k, d, n, rank))
        # each Schreier generator lies in the kernel
        for w in sp.dictionary.values():
            if g.evaluate(w) != g.identity:
                bad.append(("not in kernel", str(w)))
        if pair(abelian_invariants(sp.presentation)) != (rank, []):
            bad.append(("not free", rank))
        done += 1
    record(11, not bad, f"Nielsen-Schreier {bad[:3]}")
    assert not bad


def _det(m):
    if not m:
        return 1
    return sum((-1) ** j * m[0][j] * _det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))


def _determinantal_divisors(m):
    """d_k = gcd of all k x k minors; invariant factors are d_k / d_(k-1)."""
    from math import gcd
    rows, cols = len(m), len(m[0])
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, _det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g)
    return [b // a for a, b in zip([1] + out, out)]


def _random_unimodular(rng, n):
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            u = [[-x for x in r] for r in u]
            continue
        c = rng.randint(-3, 3)
        u[i] = [a + c * b for a, b in zip(u[i], u[j])]
        if rng.random() < 0.3:
            u[i], u[j] = u[j], u[i]
    return u


def test_criterion_11_snf():
    rng = random.Random(1111)
    bad = []
    for case in range(100):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        m = [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)]
        res = smith_normal_form(m)
        D = matmul(matmul(res.U, m), res.V)
        diag_ok = all(D[i][j] == (res.diagonal[i] if i == j and i < len(res.diagonal) else 0)
                      for i in range(r) for j in range(c))
        unimod = abs(_det(res.U)) == 1 and abs(_det(res.V)) == 1
        nz = [d for d in res.diagonal if d]
        chain = all(b % a == 0 for a, b in zip(nz, nz[1:]))
        oracle = [abs(x) for x in _determinantal_divisors(m)]
        P, Q = _random_unimodular(rng, r), _random_unimodular(rng, c)
        moved = smith_normal_form(matmul(matmul(P, m), Q), witnesses=False)
        same = [abs(d) for d in moved.diagonal if d] == [abs(d) for d in nz]
        if not (diag_ok and unimod and chain and [abs(d) for d in nz] == oracle and same):
            bad.append(case)
    record(11, not bad, f"SNF cases {bad}")
    assert not bad


def _constructed_tables(b3_series, b4_series):
    """(table, relators that must act trivially) for every table the pipeline builds."""
    out = []
    for n in (1, 2):
        p = rp2.braid_presentation(n)
        out.append((todd_coxeter(p), p.relators))
    for name, m in rp2.identification_models().items():
        out.append((todd_coxeter(m.presentation), m.presentation.relators))
    for n in (3, 4, 5):
        out.append((rp2.gamma2_table(n), rp2.braid_presentation(n).relators))
    for series in (b3_series, b4_series, rp2.derived_series(rp2.model_group("M3"), 2)):
        for prev, st in zip(series, series[1:]):
            out.append((st.table, prev.presentation.relators))
        top = series[0].presentation
        for d in range(1, len(series)):
            out.append((tower_table(top.alphabet, [s.level() for s in series[1:d + 1]]), top.relators))
    out.append((rp2.k_table(), rp2.braid_presentation(4).relators))
    out.append((rp2.f129_table(), ()))
    return out


def test_criterion_11_coset_tables(b3_series, b4_series):
    bad = []
    tables = _constructed_tables(b3_series, b4_series)
    for i, (t, rels) in enumerate(tables):
        if not (t.is_complete() and t.check_consistency(rels)):
            bad.append(i)
    record(11, not bad, f"coset tables {bad}")
    assert len(tables) > 20
    assert not bad


def _fuzz_word(rng, p, trivial: bool) -> Word:
    A = p.alphabet
    k = len(A)
    rand = lambda n: Word(A, [rng.choice([1, -1]) * rng.randint(1, k) for _ in range(n)])
    if not trivial:
        return rand(rng.randint(0, 10))
    w = Word.identity(A)
    for _ in range(rng.randint(1, 3)):
        r = rng.choice(p.relators)
        r = r if rng.random() < 0.5 else r.inverse()
        w = w * r.conjugate(rand(rng.randint(0, 3)))
    return w


def test_criterion_11_wp_soundness():
    rng = random.Random(1000)
    pool = ["bn:2", "Q8", "L", "Lambda-letters", "bn:3"]
    oracles = {gid: rp2.regular_representation(rp2.get_group(gid).presentation)
               for gid in pool if gid != "bn:3"}
    bad = []
    sampled = 0
    for i in range(1000):
        gid = pool[i % len(pool)]
        grp = rp2.get_group(gid)
        trivial = rng.random() < 0.5
        w = _fuzz_word(rng, grp.presentation, trivial)
        v = check_identity(gid, w, Word.identity(w.alphabet))
        sampled += 1
        if gid in oracles:
            truth = oracles[gid].evaluate(w) == oracles[gid].identity
            if isinstance(v, ProvedTrivial) and not truth or isinstance(v, Refuted) and truth:
                bad.append((gid, str(w), v))
        else:
            if isinstance(v, ProvedTrivial):
                if any(q.image(w) != q.identity for q in grp.quotients):
                    bad.append((gid, str(w), v))
        if trivial and isinstance(v, Refuted):
            bad.append((gid, str(w), v))
    record(11, not bad and sampled == 1000, f"wp contradictions {bad[:3]}")
    assert sampled == 1000
    assert not bad
