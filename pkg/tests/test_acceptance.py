"""Acceptance criteria 1-8, all exact.

Each criterion builds a JSON-able report and a pass flag.  Under pytest the
PASS/FAIL lines are printed in the terminal summary; run directly

    python3 tests/test_acceptance.py            # PASS/FAIL lines
    python3 tests/test_acceptance.py --json     # the canonical report

The --json form is what the determinism criterion compares across processes.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

from lieforge import catalog
from lieforge.ffield import ff_make
from lieforge.linalg import Subspace, mat_pow_rows
from lieforge.prolong import (
    cartan_prolong,
    check_qg_eq_gq,
    embed_phi,
    phi_image_by_degree,
    q_identity_embedding,
    q_vect_fields,
)
from lieforge.restrict import check_candidate, find_24_structure, find_p_structure
from lieforge.superalg import check_axioms, derived, derived_series, grade_mod2, is_simple, subalgebra
from lieforge.superize import block_split, classify_origin, method2, partial_queerify, queerify_restricted

DATA = Path(__file__).resolve().parent.parent / "data"
GF2 = ff_make(2)
GF3 = ff_make(3)
GF9 = ff_make(3, 2)

CRITERIA = {
    1: "axiom suite over the catalog",
    2: "restrictedness regressions",
    3: "char-3 regressions",
    4: "superization theorems",
    5: "classification round-trips",
    6: "prolongation theorems",
    7: "method-2 vectorial checks",
    8: "determinism",
}


def vector(g, coeffs):
    """{basis name: field element} -> coordinate vector (elements already in g.ctx)."""
    v = g.zero()
    for name, c in coeffs.items():
        v[g.index(name)] = c
    return v


def graded_dims(g):
    return Counter(zip(g.grading, g.parity))


def dims_json(counter):
    return [[d, p, counter[(d, p)]] for d, p in sorted(counter)]


# -- 1 ------------------------------------------------------------------------------------------------

def axiom_instances():
    c = catalog
    out = []
    for n in range(2, 7):
        out.append((f"o_I({n})", lambda n=n: c.o_I(n, GF2)))
    for k in range(1, 4):
        out.append((f"o_Pi({2 * k})", lambda k=k: c.o_Pi(2 * k, GF2)))
    for F in (GF2, GF3):
        for fam in ("gl", "sl", "psl"):
            for n in range(2, 6):
                out.append((f"{fam}({n}) p={F.p}", lambda n=n, fam=fam, F=F: getattr(c, fam)(n, F)))
    for fam in ("q", "sq", "psq"):
        for n in range(2, 5):
            out.append((f"{fam}({n})", lambda n=n, fam=fam: getattr(c, fam)(n, GF2)))
    for F in (GF2, GF3):
        for m in (1, 2, 3):
            out.append((f"vect({m}) p={F.p}", lambda m=m, F=F: c.vect(m, [1] * m, 0, F)))
            out.append((f"svect({m}) p={F.p}", lambda m=m, F=F: c.svect(m, [1] * m, 0, F)))
        out.append((f"vect(1|1) p={F.p}", lambda F=F: c.vect(1, [1], 1, F)))
        out.append((f"vect(2|1) p={F.p}", lambda F=F: c.vect(2, [1, 1], 1, F)))
    for m in (1, 2, 3):
        out.append((f"h_I({m})", lambda m=m: c.h_B(m, [1] * m, GF2, "I")))
    out.append(("h_Pi(2)", lambda: c.h_B(2, [1, 1], GF2, "Pi")))
    out.append(("h_I(3) pqx", lambda: c.h_B(3, [1] * 3, GF2, "I_pqx")))
    out.append(("k(1)", lambda: c.k_contact(1, [1, 1, 1], 0, GF2)))
    out.append(("k(1|1)", lambda: c.k_contact(0, [1], 1, GF2)))
    out.append(("k(1|2)", lambda: c.k_contact(0, [1], 2, GF2)))
    out.append(("k(1|1) p=3", lambda: c.k_contact(0, [1], 1, GF3)))
    out.append(("oo1_IPi(1|2)", lambda: c.oo1_IPi_1_2()))
    return out


def criterion_1():
    rows = {}
    for name, build in axiom_instances():
        g = build()
        report = check_axioms(g)
        rows[name] = {"sdim": list(g.sdim), "ok": bool(report.ok)}
    return all(r["ok"] for r in rows.values()), {"instances": rows}


# -- 2 ------------------------------------------------------------------------------------------------

def wk4_published_witness(g):
    """Root vectors square to 0; the Cartan part as in the published table."""
    F = g.ctx
    a = F.generator()
    low = {i: g.zero() for i in range(g.n)}
    low[g.index("h1")] = vector(g, {"h1": a, "h4": F.add(1, a)})
    low[g.index("h2")] = vector(g, {"h2": a})
    low[g.index("h3")] = vector(g, {"h3": 1})
    low[g.index("h4")] = vector(g, {"h4": 1})
    return low


def criterion_2():
    rep = {}
    # (a) wk(4;a)
    g = catalog.load_algebra_file(DATA / "wk4_a.alg")
    found = find_p_structure(g)
    published = wk4_published_witness(g)
    mismatched = [g.names[i] for i in range(g.n)
                  if found is None or g.ad(found.low[i]) != g.ad(published[i])]
    rep["a_wk4_mismatches"] = mismatched
    ok_a = found is not None and not mismatched
    # (b) wk^(1)(3;a)/c
    h = catalog.load_algebra_file(DATA / "wk3_derived_mod_center.alg")
    ok_b = find_p_structure(h) is None
    rep["b_wk3_derived_mod_center_has_2_structure"] = not ok_b
    # (c) the even-part 2-structure of oo^(1)_{I Pi}(1|2) does not extend
    oo = catalog.oo1_IPi_1_2()
    xm2, xm = oo.index("Xm^2"), oo.index("Xm")
    bad = [b for b in check_candidate(oo, {xm2: oo.vec("H")}, 2) if b[1] == "Xm"]
    ok_c = False
    if bad:
        _, _, lhs, rhs = bad[0]
        direct = oo.bracket(oo.basis(xm2), oo.bracket(oo.basis(xm2), oo.basis(xm)))
        ok_c = lhs == oo.vec("Xm") and rhs == direct and not any(rhs)
        rep["c_inequality"] = {"[H,Xm]": lhs, "[Xm^2,[Xm^2,Xm]]": rhs}
    # (d) o^(1)(5)
    o5 = catalog.o1_odd_model(2, GF2)
    w = find_24_structure(o5, grade_mod2(o5))
    no_two = find_p_structure(o5) is None
    ok_d = w is not None and w.outcome == "(2,4)" and not w.has_full_two and no_two
    if ok_d:
        model = o5.model
        ok_d = all(model.matrix(img) == mat_pow_rows(GF2, model.mats[i], 2) for i, img in w.low.items())
        ok_d = ok_d and all(model.matrix(img) == mat_pow_rows(GF2, model.mats[i], 4) for i, img in w.high.items())
    rep["d_o1_5"] = {"outcome": None if w is None else w.outcome, "has_2_structure": not no_two,
                     "matrix_powers": ok_d}
    rep["parts"] = {"a": ok_a, "b": ok_b, "c": ok_c, "d": ok_d}
    return ok_a and ok_b and ok_c and ok_d, rep


# -- 3 ------------------------------------------------------------------------------------------------

def cube_table(g):
    w = find_p_structure(g)
    if w is None:
        return None
    return {g.names[i]: w.low[i] for i in range(g.n)}


def compare_cubes(g, table, published):
    """Names whose solver image differs from the published one (centerless, so exact)."""
    if table is None:
        return ["no 3-structure found"]
    return [nm for nm in g.names if table[nm] != published.get(nm, g.zero())]


def criterion_3():
    F = GF9
    eps = F.primitive()
    rep = {}
    parts = {}
    for fname, e in (("br2_eps.alg", eps), ("br2_eps_inv.alg", F.inv(eps))):
        g = catalog.load_algebra_file(DATA / fname)
        e2 = F.mul(e, e)
        published = {"H1": vector(g, {"H1": 1}),
                     "H2": vector(g, {"H1": F.add(F.from_int(2), e2), "H2": e2})}
        bad = compare_cubes(g, cube_table(g), published)
        rep[fname] = bad
        parts[fname] = not bad and F.parse(g.meta["eps"]) == e
    # L(eps, 0, 0): delta = rho = 0 in the general formula
    g = catalog.load_algebra_file(DATA / "L_eps_0_0.alg")
    e2 = F.mul(eps, eps)
    published = {"h1": vector(g, {"h1": 1}), "h2": vector(g, {"h2": e2})}
    bad = compare_cubes(g, cube_table(g), published)
    rep["L_eps_0_0.alg"] = bad
    parts["L_eps_0_0.alg"] = not bad
    # L(-1,-1,0) needs the contact realization of L(a,b,c), which is not
    # reconstructible from the available material; recorded as failing
    rep["L(-1,-1,0)"] = "not constructed"
    parts["L(-1,-1,0)"] = False
    rep["parts"] = parts
    return all(parts.values()), rep


# -- 4 ------------------------------------------------------------------------------------------------

def simplicity(g):
    v = is_simple(g, exhaustive=(g.n <= 24 and g.ctx.order == 2))
    return {"sdim": list(g.sdim), "simple": v.simple, "exhaustive": v.exhaustive}


def criterion_4():
    rep = {"partial_queerify": {}, "method2": {}}
    o_pi6 = catalog.o_Pi(6, GF2)
    inputs = {
        "o_I(5)^(1)": catalog.zd(5, GF2),
        "o_Pi(6)^(2)": subalgebra(o_pi6, derived(o_pi6, 2)),
        "psl(3)": catalog.psl(3, GF2),
        "psl(4)": catalog.psl(4, GF2),
    }
    for name, g in inputs.items():
        rep["partial_queerify"][name] = simplicity(partial_queerify(g, check_simple=False))
    psl4 = catalog.psl(4, GF2)
    rep["method2"]["psl(4) blocks"] = simplicity(method2(psl4, block_split(psl4, [0, 0, 1, 1]), check_simple=False))
    v = catalog.vect(1, [2], 0, GF2)
    v1 = subalgebra(v, derived(v, 1))
    rep["method2"]["vect^(1)(1;(2)) st"] = simplicity(method2(v1, grade_mod2(v1), check_simple=False))
    ok = all(r["simple"] and (r["exhaustive"] or sum(r["sdim"]) > 24)
             for sect in ("partial_queerify", "method2") for r in rep[sect].values())
    # derived-series tables
    zd_ok = {}
    for n in (3, 4, 5):
        g = catalog.o_I(n, GF2)
        d1 = derived(g, 1)
        zero_diag = all(g.model.matrix(b)[i][i] == 0 for b in d1.basis for i in range(n))
        zd_ok[n] = d1.dim == n * (n - 1) // 2 and zero_diag and derived(g, None) == d1
    rep["o_I(n)^(1)=ZD(n)"] = zd_ok
    q_opi = queerify_restricted(o_pi6)
    series = derived_series(q_opi)
    dims = []
    for i in range(1, 5):
        evens = sum(1 for b in series[i].basis if q_opi.parity_of(b) == 0)
        dims.append([evens, series[i].dim - evens])
    # k = 3: gl(3) = 9, sl(3) = 8, two ZD(3) blocks of 3
    expected = [[15, 15], [15, 14], [14, 14], [14, 14]]
    rep["q(o_Pi(6)) derived dims i=1..4"] = dims
    stab = series[3] == series[4] and series[2] != series[3]
    ok = ok and all(zd_ok.values()) and dims == expected and stab
    return ok, rep


# -- 5 ------------------------------------------------------------------------------------------------

def criterion_5():
    rep = {}
    psl3 = catalog.psl(3, GF2)
    cert = classify_origin(queerify_restricted(psl3))
    rep["q(psl(3))"] = {"verdict": cert.verdict, "h_dims": [cert.h_even.dim, cert.h_odd.dim]}
    ok_q = cert.verdict == "partial-queerification" and [cert.h_even.dim, cert.h_odd.dim] == [psl3.n, psl3.n]
    psl4 = catalog.psl(4, GF2)
    split = block_split(psl4, [0, 0, 1, 1])
    cert = classify_origin(method2(psl4, split))
    tags = Counter(split)
    rep["method2(psl(4), blocks)"] = {"verdict": cert.verdict, "h_dims": [cert.h_even.dim, cert.h_odd.dim],
                                      "input_tag_dims": [tags[0], tags[1]]}
    ok_m = cert.verdict == "method-2" and [cert.h_even.dim, cert.h_odd.dim] == [tags[0], tags[1]]
    return ok_q and ok_m, rep


# -- 6 ------------------------------------------------------------------------------------------------

def criterion_6():
    rep = {}
    ok = True
    for n in (2, 3):
        e = q_identity_embedding(n, GF2)
        res = cartan_prolong(e)
        vf = e.ambient
        qv = q_vect_fields(n, GF2, vf)
        equal = all(Subspace(GF2, vf.dim, [vf.dense(f) for f in fs]) == res.subspace(d) for d, fs in qv.items())
        equal = equal and all(not fs for d, fs in res.components.items() if d not in qv)
        total = n * 2 ** n
        rep[f"a n={n}"] = {"sdim": list(res.sdim()), "equals_q_vect": equal}
        ok = ok and equal and res.sdim() == (total, total)
    res = cartan_prolong(q_identity_embedding(2, GF3))
    vanish = all(d < 1 or not fs for d, fs in res.components.items())
    rep["b positive part"] = {str(d): list(x) for d, x in res.dims().items()}
    ok = ok and vanish
    phi = embed_phi(2, GF3)
    res = cartan_prolong(phi.embedding)
    image = phi_image_by_degree(phi)
    same = set(image) == {d for d, fs in res.components.items() if fs}
    same = same and all(res.subspace(d) == image[d] for d in image)
    rep["c"] = {"equals_phi_q3": same, "g2": list(res.dims().get(2, (0, 0)))}
    ok = ok and same and res.dims().get(2, (0, 0)) == (0, 0)
    for label, g0 in (("gl(2)", catalog.gl(2, GF2)), ("o_I(3) cap sl(3)", catalog.o_I_sl(3, GF2))):
        verdict = check_qg_eq_gq(g0)
        rep[f"d {label}"] = verdict.equal
        ok = ok and verdict.equal
    return ok, rep


# -- 7 ------------------------------------------------------------------------------------------------

def criterion_7():
    rep = {}
    v = catalog.vect(1, [2], 0, GF2)
    v1 = subalgebra(v, derived(v, 1))
    s = method2(v1, grade_mod2(v1))
    k = catalog.k_contact(0, [1], 1, GF2)
    k1 = subalgebra(k, derived(k, 1))
    ok_a = graded_dims(s) == graded_dims(k1)
    rep["a"] = {"S": dims_json(graded_dims(s)), "k^(1)(1;(1)|1)": dims_json(graded_dims(k1))}
    g = catalog.vect(2, [1, 1], 0, GF2)
    s = method2(g, grade_mod2(g))
    minus2 = sum(1 for d in s.grading if d == -2)
    minus1 = sum(1 for d in g.grading if d == -1)
    ok_b = minus2 == minus1
    rep["b vect(2;N_s)"] = {"dim S_-2": minus2, "dim g_-1": minus1}
    g = catalog.load_algebra_file(DATA / "vect2_22_w13.alg")
    s = method2(g, grade_mod2(g))
    low = {d: sum(1 for x in s.grading if x == d) for d in (-4, -5)}
    ok_c = low == {-4: 0, -5: 0}
    rep["c depth 3"] = {"dim S_-4": low[-4], "dim S_-5": low[-5], "S": dims_json(graded_dims(s))}
    rep["parts"] = {"a": ok_a, "b": ok_b, "c": ok_c}
    return ok_a and ok_b and ok_c, rep


# -- driver -------------------------------------------------------------------------------------------

CHECKS = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
          5: criterion_5, 6: criterion_6, 7: criterion_7}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=1)


_CACHE: dict[int, tuple[bool, dict, float]] = {}


def run_criterion(n: int) -> tuple[bool, dict]:
    if n not in _CACHE:
        start = time.perf_counter()
        ok, rep = CHECKS[n]()
        _CACHE[n] = (bool(ok), rep, time.perf_counter() - start)
    ok, rep, _ = _CACHE[n]
    return ok, rep


def full_report() -> dict:
    out = {}
    for n in CHECKS:
        ok, rep = run_criterion(n)
        out[str(n)] = {"pass": ok, "report": rep}
    return out


def criterion_8() -> tuple[bool, dict]:
    here = canonical(full_report())
    env = dict(os.environ, PYTHONHASHSEED="12345", LIEFORGE_SEED=os.environ.get("LIEFORGE_SEED", "0"))
    proc = subprocess.run([sys.executable, str(Path(__file__).resolve()), "--json"],
                          capture_output=True, text=True, env=env, timeout=600)
    there = proc.stdout
    same = proc.returncode == 0 and there.rstrip("\n") == here
    return same, {"bytes": len(here), "identical": same, "subprocess_status": proc.returncode}


def status_line(n: int, ok: bool, rep: dict) -> str:
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {CRITERIA[n]}"
    failing = [k for k, v in rep.get("parts", {}).items() if not v]
    return line + (f"  (failing: {', '.join(failing)})" if failing else "")


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n, acceptance_log):
    ok, rep = criterion_8() if n == 8 else run_criterion(n)
    line = status_line(n, ok, rep)
    acceptance_log.append(line)
    print(line)
    print(canonical(rep))
    assert ok, canonical(rep)


def main(argv: list[str]) -> int:
    os.environ.setdefault("LIEFORGE_SEED", "0")
    if "--json" in argv:
        print(canonical(full_report()))
        return 0
    status = 0
    for n in sorted(CRITERIA):
        ok, rep = criterion_8() if n == 8 else run_criterion(n)
        print(status_line(n, ok, rep))
        status |= not ok
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
