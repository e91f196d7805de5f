"""Claim registry, runner and command line front end."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

from . import __version__
from . import rp2
from .cosets import EnumerationExceeded, EnumerationLimits, todd_coxeter
from .presentation import abelian_invariants, parse_presentation, parse_word_list
from .schreier import lower_central_step, match_presentations
from .wordproblem import (Consistent, KBLimits, KBStatus, ProvedTrivial, Refuted, UnknownGroup, check_identity,
                          knuth_bendix)
from .words import Alphabet, ParseError, Word, parse_word

EXACT = "EXACT"
CONSISTENCY = "CONSISTENCY"


@dataclass(frozen=True)
class Config:
    max_cosets: int = 2_000_000
    kb_max_rules: int = 5000
    cache_dir: str | None = None

    @property
    def enum_limits(self) -> EnumerationLimits:
        return EnumerationLimits(max_cosets=self.max_cosets)

    @property
    def kb_limits(self) -> KBLimits:
        return KBLimits(max_rules=self.kb_max_rules)


class Undecided(Exception):
    """A semidecision procedure hit its limits."""


@dataclass
class Claim:
    id: str
    cls: str
    anchor: str
    summary: str
    check: Callable[[Config], object]


CLAIMS: dict[str, Claim] = {}


class UnknownClaimId(KeyError):
    pass


def claim(cid: str, cls: str, anchor: str, summary: str):
    def deco(fn):
        if cid in CLAIMS:
            raise ValueError(f"duplicate claim id {cid}")
        CLAIMS[cid] = Claim(cid, cls, anchor, summary, fn)
        return fn
    return deco


def _pair(inv) -> list:
    free, tors = inv.as_pair()
    return [free, list(tors)]


def _exact(ok: bool, **details) -> tuple[bool, dict]:
    return bool(ok), details


# ---------------------------------------------------------------- presentation and abelianization

def _register_presentation_claims():
    for n in range(1, 6):
        def check(cfg, n=n):
            p = rp2.braid_presentation(n)
            gens = 2 * n - 1 if n >= 2 else 1
            rels = rp2.braid_relator_count(n)
            return _exact(len(p.alphabet) == gens and len(p.relators) == rels,
                          generators=len(p.alphabet), relators=len(p.relators), expected=[gens, rels])
        claim(f"present.n{n}.counts", EXACT, "present",
              f"B_{n} presentation has the predicted generator and relator counts")(check)

    for n in range(1, 6):
        def check(cfg, n=n):
            inv = abelian_invariants(rp2.braid_presentation(n))
            want = [0, [2]] if n == 1 else [0, [2, 2]]
            return _exact(_pair(inv) == want, invariants=_pair(inv))
        claim(f"bnabz.n{n}", EXACT, "bnabz", f"abelianization of B_{n}")(check)


_register_presentation_claims()


@claim("lcsbn.b1.z2", EXACT, "lcsbn", "B_1 is cyclic of order 2")
def _b1(cfg):
    t = todd_coxeter(rp2.braid_presentation(1), limits=cfg.enum_limits, cache_dir=cfg.cache_dir)
    return _exact(t.n_cosets == 2, order=t.n_cosets)


@claim("lcsbn.b2.q16", EXACT, "lcsbn", "B_2 has order 16 and is generalised quaternion")
def _b2(cfg):
    t = todd_coxeter(rp2.braid_presentation(2), limits=cfg.enum_limits, cache_dir=cfg.cache_dir)
    ident = rp2.identify_group(rp2.table_group(t)) if t.n_cosets <= 48 else None
    name = ident.name if ident else None
    return _exact(t.n_cosets == 16 and name == "Q16", cosets=t.n_cosets, identified=name)


@claim("lcsbn.b2.orders", EXACT, "defab",
       "in B_2, a has order 8 and the full twist is the only involution")
def _b2_orders(cfg):
    from .groupid import perm_order
    p = rp2.braid_presentation(2)
    g = rp2.regular_representation(p, cfg.enum_limits)
    E = rp2.BraidElements(2)
    a_order = perm_order(g.evaluate(E.a))
    twist = g.evaluate(E.full_twist)
    involutions = [x for x in g.elements() if perm_order(x) == 2]
    return _exact(a_order == 8 and involutions == [twist], a_order=a_order, involutions=len(involutions),
                  twist_is_involution=twist in involutions)


# ---------------------------------------------------------------- commutator subgroup presentations

def _register_fullpres_claims():
    for n in (3, 4, 5):
        def check(cfg, n=n):
            sp = rp2.gamma2_rs(n)
            named = rp2.gamma2_presentation_named(n)
            rep = match_presentations(sp.presentation, named, rp2.gamma2_schreier_naming(n))
            gens = len(sp.presentation.alphabet)
            rels = len(sp.presentation.relators)
            ok = (gens == 8 * n - 7 and rels == 4 * rp2.braid_relator_count(n)
                  and len(named.alphabet) == gens and rep.matched and rep.multiset_equal)
            return _exact(ok, generators=gens, relators=rels, families=rep.summary(),
                          unmatched=[str(w) for w in rep.only_a + rep.only_b])
        claim(f"fullpres.n{n}.rs_matches_families", EXACT, "fullpres",
              f"Reidemeister-Schreier over 1, s1, s1r1, s1r1s1 reproduces the relator families for n={n}")(check)


_register_fullpres_claims()


@claim("fullpres.n4.relator_list", EXACT, "firstrel-lastrel",
       "the 64 displayed letter relators equal the Reidemeister-Schreier relators")
def _list(cfg):
    rs = rp2.b4_rs_letter_presentation()
    listed = rp2.b4_letter_presentation()
    rep = match_presentations(listed, rs)
    return _exact(rep.matched and rep.multiset_equal, summary=rep.summary(),
                  listed_only=[str(w) for w in rep.only_a], computed_only=[str(w) for w in rep.only_b])


@claim("fullpres.n4.listed_surface_word", EXACT, "surf2",
       "the displayed second surface relator is nontrivial in B_4; dropping its final X2 gives a relator")
def _surf2(cfg):
    A = Alphabet(rp2.B4_LETTERS)
    L = rp2.b4_letter_words()
    E = rp2.BraidElements(4)
    one = Word.identity(E.alphabet)
    listed = parse_word("X2 Y1 Z2 Z1 Y2 X2 A3^-1", A).substitute(L, E.alphabet)
    fixed = parse_word("X2 Y1 Z2 Z1 Y2 A3^-1", A).substitute(L, E.alphabet)
    v1 = check_identity("bn:4", listed, one, cfg.kb_limits)
    v2 = check_identity("bn:4", fixed, one, cfg.kb_limits)
    return _exact(isinstance(v1, Refuted) and isinstance(v2, ProvedTrivial),
                  listed=_verdict(v1), corrected=_verdict(v2))


def _register_lcs_claims():
    for n in (3, 4, 5):
        def check(cfg, n=n):
            sp = rp2.gamma2_rs(n)
            q = lower_central_step(sp, rp2.braid_presentation(n))
            inv = abelian_invariants(q)
            return _exact(inv.is_trivial, invariants=_pair(inv), extra_relators=len(q.relators) - sp.raw_relator_count)
        claim(f"lcs.n{n}.gamma2_eq_gamma3", EXACT, "lcsbn",
              f"the lower central series of B_{n} is constant from the commutator subgroup on")(check)


_register_lcs_claims()


@claim("dsbn.n5.perfect", EXACT, "dsbn", "the commutator subgroup of B_5 is perfect")
def _perfect(cfg):
    inv = abelian_invariants(rp2.gamma2_rs(5).presentation)
    return _exact(inv.is_trivial, invariants=_pair(inv))


# ---------------------------------------------------------------- derived series

def _chain(n: int) -> tuple[list, list]:
    st = rp2.braid_series(n, 3 if n <= 4 else 1)
    return [_pair(s.invariants) for s in st], [s.index for s in st[1:]]


@claim("dsbn.b2.chain", EXACT, "dsbn", "B_2: commutator subgroup cyclic of order 4, second derived trivial")
def _b2chain(cfg):
    inv, idx = _chain(2)
    return _exact(inv == [[0, [2, 2]], [0, [4]], [0, []]] and idx == [4, 4], invariants=inv, indices=idx)


@claim("dsbn.b3.chain", EXACT, "dsbn", "derived quotients of B_3: Z3, Z2^4, Z^9 + Z2")
def _b3chain(cfg):
    inv, idx = _chain(3)
    return _exact(inv == [[0, [2, 2]], [0, [3]], [0, [2, 2, 2, 2]], [9, [2]]] and idx == [4, 3, 16],
                  invariants=inv, indices=idx)


def _tower_ident(n: int, depth: int):
    g = rp2.tower_group(rp2.braid_series(n), depth)
    o = g.order()
    ident = rp2.identify_group(g) if o <= 48 else None
    return o, ident


@claim("dsbn.b3.depth2.is_d12", EXACT, "dsbn", "B_3 modulo its second derived subgroup is dihedral of order 12")
def _b3d12(cfg):
    o, ident = _tower_ident(3, 2)
    return _exact(o == 12 and ident is not None and ident.name == "D12", order=o,
                  identified=ident.name if ident else None)


@claim("dsbn.b3.depth3.order192", EXACT, "dsbn", "B_3 modulo its third derived subgroup has order 192")
def _b3o(cfg):
    o, _ = _tower_ident(3, 3)
    return _exact(o == 192, order=o)


@claim("dsb4.chain", EXACT, "dsb4", "derived quotients of B_4: Z3, Z2^4, Z2^8 + Z4")
def _b4chain(cfg):
    inv, idx = _chain(4)
    want = [[0, [2, 2]], [0, [3]], [0, [2, 2, 2, 2]], [0, [2] * 8 + [4]]]
    return _exact(inv == want and idx == [4, 3, 16], invariants=inv, indices=idx)


@claim("dsb4.depth2.is_d12", EXACT, "dsb4", "B_4 modulo its second derived subgroup is dihedral of order 12")
def _b4d12(cfg):
    o, ident = _tower_ident(4, 2)
    return _exact(o == 12 and ident is not None and ident.name == "D12", order=o,
                  identified=ident.name if ident else None)


@claim("dsb4.depth3.order192", EXACT, "dsb4", "B_4 modulo its third derived subgroup has order 192")
def _b4o(cfg):
    o, _ = _tower_ident(4, 3)
    return _exact(o == 192, order=o)


@claim("dsb4.phi.relators", EXACT, "defphi",
       "phi kills every relator, both the computed ones and the displayed list")
def _phi(cfg):
    bad_rs = rp2.phi_relator_check(rp2.b4_rs_letter_presentation())
    bad_list = rp2.phi_relator_check(rp2.b4_letter_presentation())
    return _exact(not bad_rs and not bad_list, bad_computed=bad_rs, bad_listed=bad_list)


@claim("dsb4.gamma2_mod_d3.is_l", EXACT, "b4d1d3",
       "the image of the commutator subgroup in B_4/(B_4)^(3) is isomorphic to L")
def _isl(cfg):
    g = rp2.b4_gamma2_tower_images()
    ident = rp2.identify_group(g)
    return _exact(g.order() == 48 and ident is not None and ident.name == "L", order=g.order(),
                  identified=ident.name if ident else None)


@claim("dsb4.d3.kernel_of_phi", EXACT, "b4d1d3", "the kernel of phi is the third derived subgroup")
def _kerphi(cfg):
    a, b, d = rp2.phi_kernel_equality()
    return _exact(a == b == d == 48, phi_image=a, tower_image=b, diagonal=d)


@claim("dsb4.d3.two_constructions", EXACT, "dsb4",
       "(B_4)^(3) has index 192 and invariants Z2^8 + Z4 along both constructions")
def _two(cfg):
    st = rp2.braid_series(4)
    s = rp2.b4_third_stage_via_phi()
    inv1, inv2 = _pair(st[3].invariants), _pair(s.invariants)
    idx1 = st[1].index * st[2].index * st[3].index
    want = [0, [2] * 8 + [4]]
    return _exact(inv1 == inv2 == want and idx1 == s.index_in_b4 == 192,
                  derived=_pair(st[3].invariants), via_phi=_pair(s.invariants), index_derived=idx1,
                  index_via_phi=s.index_in_b4, schreier_rank_via_phi=s.schreier_rank)


@claim("dsb4.rho_product_in_d3", EXACT, "dsb4", "rho4 rho3 rho2 rho1 lies in (B_4)^(3) and equals D1 C4 B1 A4")
def _rhoprod(cfg):
    E = rp2.BraidElements(4)
    w = E.rho(4) * E.rho(3) * E.rho(2) * E.rho(1)
    from .cosets import tower_table
    st = rp2.braid_series(4)
    t = tower_table(E.alphabet, [s.level() for s in st[1:4]])
    inside = t.act(0, w) == 0
    A = Alphabet(rp2.B4_LETTERS)
    rhs = parse_word("D1 C4 B1 A4", A).substitute(rp2.b4_letter_words(), E.alphabet)
    v = check_identity("bn:4", w, rhs, cfg.kb_limits)
    return _exact(inside and isinstance(v, ProvedTrivial), in_third_derived=inside, letters=_verdict(v))


def _order(p, cfg) -> int:
    try:
        return todd_coxeter(p, limits=cfg.enum_limits, cache_dir=cfg.cache_dir).n_cosets
    except EnumerationExceeded as e:
        raise Undecided(f"enumeration capped at {cfg.max_cosets} cosets") from e


@claim("dsb4.lambda.finite", EXACT, "presd1d3", "Lambda is finite of order 48 and isomorphic to L")
def _lam(cfg):
    p = rp2.model_group("Lambda")
    o = _order(p, cfg)
    ident = rp2.identify_group(rp2.regular_representation(p, cfg.enum_limits)) if o <= 48 else None
    return _exact(o == 48 and ident is not None and ident.name == "L", order=o,
                  identified=ident.name if ident else None)


@claim("dsb4.g.is_l", EXACT, "defl", "G has order 48 and is isomorphic to L, which has order 48")
def _g(cfg):
    og = _order(rp2.model_group("G"), cfg)
    ol = _order(rp2.model_group("L"), cfg)
    ident = rp2.identify_group(rp2.regular_representation(rp2.model_group("G"), cfg.enum_limits))
    return _exact(og == ol == 48 and ident is not None and ident.name == "L", order_g=og, order_l=ol,
                  identified=ident.name if ident else None)


@claim("dsb4.lambda.identities", EXACT, "x2zcd-c1c2",
       "the equalities derived in Lambda hold there (completed rewriting system)")
def _lamids(cfg):
    out = {}
    ok = True
    for i in rp2.lambda_identities():
        v = check_identity(i.group, i.lhs, i.rhs, cfg.kb_limits)
        out[i.key] = _verdict(v)
        ok &= isinstance(v, ProvedTrivial)
    return _exact(ok, verdicts=out)


@claim("dsb4.gensk", EXACT, "gensk", "the listed elements lie in K, match their letter forms and generate K")
def _gensk(cfg):
    r = rp2.gensk_membership_check()
    return _exact(r.ok, **r.details)


# ---------------------------------------------------------------- actions

@claim("actions.actphi3", EXACT, "actphi3", "the rho3^2 table transported to the e-basis is the displayed one")
def _actphi(cfg):
    r = rp2.phi_rho3_sq_check()
    return _exact(r.ok, **r.details)


@claim("actions.abelianized", EXACT, "actz4",
       "the F3 tables induce the identity on Z^5 and the a^4 table induces -1 on Z^8")
def _actab(cfg):
    r = rp2.action_abelian_check()
    return _exact(r.ok, **r.details)


@claim("remark.f129", EXACT, "remark",
       "rho3^4 acts nontrivially on the abelianized rank-129 kernel, with the displayed image")
def _f129(cfg):
    r = rp2.remark_f129_check()
    return _exact(r.ok, **r.details)


@claim("gamma2rp34.m3_pipeline", EXACT, "gamma2rp34",
       "the model group M3 has the same derived chain as the commutator subgroup of B_3")
def _m3(cfg):
    m = rp2.derived_series(rp2.model_group("M3"), 2)
    b = rp2.braid_series(3)[1:]
    mi = [_pair(s.invariants) for s in m]
    bi = [_pair(s.invariants) for s in b]
    return _exact(mi == bi and [s.index for s in m[1:]] == [s.index for s in b[1:]] == [3, 16],
                  m3=mi, gamma2_b3=bi, m3_indices=[s.index for s in m[1:]])


# ---------------------------------------------------------------- consistency claims

def _verdict(v) -> dict:
    if isinstance(v, ProvedTrivial):
        return {"verdict": "ProvedTrivial", "witness": v.witness}
    if isinstance(v, Refuted):
        return {"verdict": "Refuted", "quotient": v.quotient, "image": v.image}
    return {"verdict": "Consistent", "quotients": list(v.quotients)}


def _identities(select: Callable[[], Iterable[rp2.Identity]]):
    def check(cfg):
        return [(i, check_identity(i.group, i.lhs, i.rhs, cfg.kb_limits)) for i in select()]
    return check


def _register_identity_claims():
    def pick(n, prefixes):
        return lambda: [i for i in rp2.consistency_identities(n) if i.key.split(".")[0] in prefixes]

    generic = ("defab", "cyclicperm", "cyclicperm2", "conjgarside")
    for n in (2, 3, 4, 5):
        claim(f"defab.n{n}", CONSISTENCY, "defab",
              f"a, b, Delta and the cyclic permutation identities in B_{n}")(_identities(pick(n, generic)))
    claim("gamma2rp34.actions", CONSISTENCY, "gamma2rp34",
          "the eleven action formulas and the Q8 and u relations in B_3")(
        _identities(pick(3, ("gamma2rp34", "quat", "u"))))
    claim("dsbn.b3.identities", CONSISTENCY, "a3b2",
          "powers of a and b, the Q8 element, and the a^3 action in B_3")(
        _identities(pick(3, ("a3b2", "bgara", "rho2rho1", "exprb12", "rho3sq", "a4", "conja3"))))
    claim("dsb4.identities", CONSISTENCY, "dsb4", "b^4 and rho4 rho3 rho2 rho1 in letters")(
        _identities(pick(4, ("b4", "a4"))))
    claim("dsb4.action_tables", CONSISTENCY, "actf3f5a",
          "conjugation in B_4 realizes the four action tables")(
        _identities(pick(4, ("actz4", "actf3f5a", "actf3f5b", "actf3f5c"))))


_register_identity_claims()


@claim("wp.examples", EXACT, "wp",
       "braid relator proved, sigma1 refuted in S3, x z1 x^-1 = z1^-1 consistent")
def _wp(cfg):
    E = rp2.BraidElements(3)
    one = Word.identity(E.alphabet)
    v1 = check_identity("bn:3", E.word("s1 s2 s1"), E.word("s2 s1 s2"), cfg.kb_limits)
    v2 = check_identity("bn:3", E.sigma(1), one, cfg.kb_limits)
    v3 = check_identity("bn:3", E.x * E.z1 * ~E.x, ~E.z1, cfg.kb_limits)
    ok = (isinstance(v1, ProvedTrivial) and isinstance(v2, Refuted) and v2.quotient == "S3"
          and isinstance(v3, Consistent) and "B3/(3)" in v3.quotients)
    return _exact(ok, relator=_verdict(v1), sigma1=_verdict(v2), xz1=_verdict(v3))


@claim("kb.models", EXACT, "models", "completion finishes for the finite models with the right number of normal forms")
def _kb(cfg):
    out = {}
    ok = True
    for name in ("Q8", "Q16", "D12", "Dic12", "A4", "L"):
        rs = knuth_bendix(rp2.model_group(name), cfg.kb_limits)
        done = rs.status is KBStatus.COMPLETED
        count = sum(rs.count_normal_forms(rp2.MODEL_ORDERS[name])) if done else None
        out[name] = {"status": rs.status.value, "rules": len(rs.rules), "normal_forms": count}
        ok &= done and count == rp2.MODEL_ORDERS[name]
    return _exact(ok, systems=out)


@claim("groupid.models", EXACT, "models", "each finite model is identified as itself")
def _models(cfg):
    out = {}
    ok = True
    for name, m in rp2.identification_models().items():
        g = rp2.regular_representation(m.presentation, cfg.enum_limits)
        ident = rp2.identify_group(g)
        out[name] = ident.name if ident else None
        ok &= out[name] == name and g.order() == m.order
    return _exact(ok, identified=out)


# ---------------------------------------------------------------- runner

def run_claim(cid: str, cfg: Config) -> dict:
    c = CLAIMS[cid]
    t0 = time.perf_counter()
    try:
        result = c.check(cfg)
        if c.cls == EXACT:
            ok, details = result
            status = "PASS" if ok else "FAIL"
        else:
            verdicts = [_verdict(v) | {"key": i.key, "identity": i.text} for i, v in result]
            kinds = {v["verdict"] for v in verdicts}
            status = "FAIL" if "Refuted" in kinds else "CONSISTENT"
            details = {"identities": len(verdicts),
                       "proved": sum(v["verdict"] == "ProvedTrivial" for v in verdicts),
                       "consistent": sum(v["verdict"] == "Consistent" for v in verdicts),
                       "refuted": [v for v in verdicts if v["verdict"] == "Refuted"],
                       "verdicts": verdicts}
    except Undecided as e:
        status, details = "UNDECIDED", {"reason": str(e)}
    elapsed = int((time.perf_counter() - t0) * 1000)
    return {"id": cid, "class": c.cls, "status": status, "paper_anchor": c.anchor,
            "summary": c.summary, "details": _jsonable(details), "elapsed_ms": elapsed}


def _jsonable(x):
    return json.loads(json.dumps(x, default=str))


def run_claims(ids: Iterable[str], cfg: Config, jobs: int = 1, deterministic: bool = False) -> dict:
    ids = sorted(set(ids))
    for cid in ids:
        if cid not in CLAIMS:
            raise UnknownClaimId(cid)
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_claim, ids, [cfg] * len(ids)))
    else:
        results = [run_claim(cid, cfg) for cid in ids]
    if deterministic:
        for r in results:
            r["elapsed_ms"] = 0
    summary = {k: 0 for k in ("pass", "fail", "consistent", "undecided", "skipped")}
    for r in results:
        summary[r["status"].lower()] += 1
    return {"version": __version__, "config": asdict(cfg), "claims": results, "summary": summary}


def exit_code(report: dict) -> int:
    for r in report["claims"]:
        if r["status"] == "FAIL" or (r["status"] == "UNDECIDED" and r["class"] == EXACT):
            return 1
    return 0


def format_text(report: dict) -> str:
    lines = []
    for r in report["claims"]:
        lines.append(f"{r['status']:<11} {r['id']:<40} {r['summary']} ({r['elapsed_ms']} ms)")
    s = report["summary"]
    lines.append(" ".join(f"{k}={v}" for k, v in s.items()))
    undecided = [r["id"] for r in report["claims"] if r["status"] == "UNDECIDED"]
    if undecided:
        lines.append("UNDECIDED: " + ", ".join(undecided))
    return "\n".join(lines)


# ---------------------------------------------------------------- commands

def series_rows(gid: str, depth: int, cfg: Config) -> list[dict]:
    g = rp2.get_group(gid)
    if gid.startswith("bn:") and depth <= 3:
        stages = rp2.braid_series(int(gid[3:]), depth)
    else:
        stages = tuple(rp2.derived_series(g.presentation, depth, cfg.enum_limits))
    rows = []
    for s in stages:
        row = s.row()
        row["invariants"] = _pair(s.invariants)
        order = name = None
        if s.depth > 0 or len(stages) > 1:
            try:
                fg = rp2.tower_group(stages, s.depth)
                order = fg.order()
                ident = rp2.identify_group(fg) if order <= 48 else None
                name = ident.name if ident else None
            except Exception:
                pass
        row["quotient_order"] = order
        row["quotient"] = name
        rows.append(row)
    return rows


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rp2series", description="Derived and lower central series computations "
                                 "for braid groups of the projective plane.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run claims")
    sel = v.add_mutually_exclusive_group()
    sel.add_argument("--all", action="store_true")
    sel.add_argument("--claim", nargs="+", metavar="ID")
    v.add_argument("--list", action="store_true", help="list claim ids and exit")
    v.add_argument("--format", choices=("json", "text"), default="text")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--deterministic", action="store_true", help="report elapsed_ms as 0")

    s = sub.add_parser("series", help="derived series of a registered group")
    s.add_argument("--group", required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--format", choices=("json", "text"), default="text")

    e = sub.add_parser("enumerate", help="Todd-Coxeter enumeration")
    e.add_argument("--presentation", required=True)
    e.add_argument("--subgroup")

    a = sub.add_parser("abelianize", help="abelian invariants of a presentation")
    a.add_argument("--presentation", required=True)

    for p in (v, s, e, a):
        p.add_argument("--cache-dir")
        p.add_argument("--max-cosets", type=int, default=Config.max_cosets)
        p.add_argument("--kb-max-rules", type=int, default=Config.kb_max_rules)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    cfg = Config(args.max_cosets, args.kb_max_rules, args.cache_dir)
    try:
        if args.command == "verify":
            if args.list:
                for cid in sorted(CLAIMS):
                    c = CLAIMS[cid]
                    print(f"{cid:<40} {c.cls:<12} {c.summary}")
                return 0
            if not args.all and not args.claim:
                ap.error("verify needs --all or --claim")
            ids = list(CLAIMS) if args.all else args.claim
            report = run_claims(ids, cfg, args.jobs, args.deterministic)
            print(json.dumps(report, indent=2) if args.format == "json" else format_text(report))
            return exit_code(report)
        if args.command == "series":
            rows = series_rows(args.group, args.depth, cfg)
            if args.format == "json":
                print(json.dumps(rows, indent=2))
            else:
                print(f"{'depth':>5} {'index':>6} {'gens':>5} {'rels':>6}  invariants / quotient")
                for r in rows:
                    inv = r["invariants"]
                    q = f"order {r['quotient_order']}" if r["quotient_order"] else ""
                    if r["quotient"]:
                        q += f" = {r['quotient']}"
                    print(f"{r['depth']:>5} {r['index'] or '-':>6} {r['generators']:>5} {r['relators']:>6}  "
                          f"Z^{inv[0]} + {inv[1]}  {q}")
            return 0
        if args.command == "enumerate":
            p = parse_presentation(_read(args.presentation))
            subgroup = parse_word_list(_read(args.subgroup), p.alphabet) if args.subgroup else []
            t = todd_coxeter(p, subgroup, cfg.enum_limits, cfg.cache_dir)
            print(t.n_cosets)
            return 0
        if args.command == "abelianize":
            inv = abelian_invariants(parse_presentation(_read(args.presentation)))
            free, tors = inv.as_pair()
            print(json.dumps({"free_rank": free, "torsion": list(tors)}))
            return 0
    except SystemExit as e:
        return 2 if e.code else 0
    except (UnknownClaimId, UnknownGroup) as e:
        print(f"unknown id: {e.args[0]}", file=sys.stderr)
        return 2
    except (ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EnumerationExceeded as e:
        print(f"enumeration exceeded: {e}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
