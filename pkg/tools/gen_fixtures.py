"""Regenerate the algebra files under data/.

Expected-witness blocks are transcribed from published restrictedness
formulas; they are NOT produced by the solver, so loading a file and
solving gives an independent comparison.

    python3 tools/gen_fixtures.py [outdir]
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cartan import CartanAlgebra  # noqa: E402

from lieforge import catalog  # noqa: E402
from lieforge.ffield import ff_make  # noqa: E402
from lieforge.superalg import algebra_from_constants, center, derived, quotient, subalgebra  # noqa: E402


def _zero_images(g, names):
    return {nm: {} for nm in names}


def wk3(ctx):
    a = ctx.coeffs(ctx.generator())
    A = [[0, 1, 0], [1, 0, a], [0, a, 0]]
    g = CartanAlgebra(ctx, A, extra_rows=[[1, 0, 0]], extra_names=["d"]).to_algebra(meta={
        "name": "wk(3;a)",
        "cartan_matrix": "[[0,1,0],[1,0,a],[0,a,0]], B = (1,0,0), a = generator of GF(4)",
        "source": "Weisfeiler-Kac algebra; symmetric Cartan matrix reconstructed to match the published center a*h1+h3 "
                  "and 2-structure; see notes/decisions.md",
    })
    F = ctx
    aa = F.generator()
    one_a = F.add(1, aa)
    a2 = F.mul(aa, aa)
    # t = 0 member of the published family; t spans the center freedom
    low = _zero_images(g, [nm for nm in g.names if nm[0] in "ef"])
    low.update({
        "h1": {"h1": 1},
        "h2": {"h2": F.serialize(aa), "d": F.serialize(one_a)},
        "h3": {"h1": F.serialize(a2)},
        "d": {"d": 1},
    })
    expected = {"variant": "p", "low": low, "high": {}, "exponents": [2, 4]}
    return g, expected


def wk3_derived_mod_center(ctx):
    g, _ = wk3(ctx)
    d1 = derived(g, 1)
    h = subalgebra(g, d1)
    z = center(h)
    q, _ = quotient(h, z)
    q.meta = {
        "name": "wk^(1)(3;a)/c",
        "source": "first derived algebra of wk(3;a) modulo its center; expected to admit no 2-structure",
    }
    return q, None


def wk4(ctx):
    a = ctx.coeffs(ctx.generator())
    A = [[0, a, 1, 0], [a, 0, 0, 0], [1, 0, 0, 1], [0, 0, 1, 0]]
    g = CartanAlgebra(ctx, A).to_algebra(meta={
        "name": "wk(4;a)",
        "cartan_matrix": "[[0,a,1,0],[a,0,0,0],[1,0,0,1],[0,0,1,0]], a = generator of GF(4)",
        "source": "Weisfeiler-Kac algebra; symmetric Cartan matrix reconstructed, see notes/decisions.md",
    })
    F = ctx
    aa = F.generator()
    low = _zero_images(g, [nm for nm in g.names if nm[0] in "ef"])
    low.update({
        "h1": {"h1": F.serialize(aa), "h4": F.serialize(F.add(1, aa))},
        "h2": {"h2": F.serialize(aa)},
        "h3": {"h3": 1},
        "h4": {"h4": 1},
    })
    return g, {"variant": "p", "low": low, "high": {}, "exponents": [2, 4]}


BR_NAMES = {((1, 0), 0): "X1", ((0, 1), 0): "X2", ((1, 1), 0): "X3", ((1, 2), 0): "X4"}


def br2(ctx, eps):
    one_m_eps = ctx.coeffs(ctx.sub(1, eps))
    A = [[2, -1], [-2, one_m_eps]]
    cart = CartanAlgebra(ctx, A)
    cart.h_names = ["H1", "H2"]
    g = cart.to_algebra(pos_names=BR_NAMES, meta={
        "name": "br(2;eps)",
        "cartan_matrix": "[[2,-1],[-2,1-eps]]",
        "eps": ctx.serialize(eps),
        "source": "Brown algebra from its Cartan matrix",
    })
    F = ctx
    e2 = F.mul(eps, eps)
    low = _zero_images(g, [nm for nm in g.names if nm[0] in "XY"])
    low.update({
        "H1": {"H1": 1},
        "H2": {"H1": F.serialize(F.add(2, e2)), "H2": F.serialize(e2)},
    })
    return g, {"variant": "p", "low": low, "high": {}, "exponents": [3, 6]}


def l_eps_0_0(ctx, eps):
    """br(2;eps) rewritten in a Cartan basis h1 = H1, h2 = -(H1 + H2)."""
    br, _ = br2(ctx, eps)
    F = ctx
    rename = {"X1": "x1", "X2": "x2", "X3": "x3", "X4": "x4", "Y1": "y1", "Y2": "y2", "Y3": "y3", "Y4": "y4"}
    n = br.n
    iH1, iH2 = br.index("H1"), br.index("H2")
    # change of basis: new vectors as old coordinates
    new_vecs = []
    names = []
    for i, nm in enumerate(br.names):
        v = br.zero()
        if nm == "H1":
            v[iH1] = 1
            names.append("h1")
        elif nm == "H2":
            v[iH1] = F.neg(1)
            v[iH2] = F.neg(1)
            names.append("h2")
        else:
            v[i] = 1
            names.append(rename[nm])
        new_vecs.append(v)
    from lieforge.linalg import CoordinateSystem

    cs = CoordinateSystem(F, n, new_vecs)
    brackets = []
    for a in range(n):
        for b in range(a, n):
            w = br.bracket(new_vecs[a], new_vecs[b])
            if any(w):
                c = cs.coords(w)
                brackets.append((a, b, {k: x for k, x in enumerate(c) if x}))
    g = algebra_from_constants(F, names, [0] * n, brackets, None, br.grading, {
        "name": "L(eps,0,0)",
        "eps": F.serialize(eps),
        "source": "br(2;eps) in the Cartan basis h1 = H1, h2 = -(H1+H2); the basis change is chosen, "
                  "see notes/decisions.md",
    })
    e2 = F.mul(eps, eps)
    low = _zero_images(g, [nm for nm in names if nm[0] in "xy"])
    low.update({"h1": {"h1": 1}, "h2": {"h2": F.serialize(e2)}})
    return g, {"variant": "p", "low": low, "high": {}, "exponents": [3, 6]}


def bad_jacobi():
    """sl(2) + K z over GF(3) with [e, f] = h + z and [h, z] = e, which breaks Jacobi."""
    F = ff_make(3)
    names = ["e", "h", "f", "z"]
    brackets = [(1, 0, {0: 2}), (1, 2, {2: 1}), (0, 2, {1: 1, 3: 1}), (1, 3, {0: 1})]
    g = algebra_from_constants(F, names, [0] * 4, brackets, None, None, {
        "name": "bad_jacobi",
        "source": "deliberately inconsistent constants; loading must fail",
    })
    return g


def depth3_vect(ctx):
    from lieforge.catalog import vect

    g = vect(2, [2, 2], 0, ctx, weights=[1, 3])
    g.meta.update({"name": "vect(2;(2,2)) with weights (1,3)",
                   "source": "depth-3 Z-graded simple Lie algebra used for method-2 depth checks"})
    return g, None


def main(outdir: str = "data") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    gf4 = ff_make(2, 2)
    gf9 = ff_make(3, 2)
    eps = gf9.primitive()
    items = {
        "wk3_a.alg": wk3(gf4),
        "wk3_derived_mod_center.alg": wk3_derived_mod_center(gf4),
        "wk4_a.alg": wk4(gf4),
        "br2_eps.alg": br2(gf9, eps),
        "br2_eps_inv.alg": br2(gf9, gf9.inv(eps)),
        "L_eps_0_0.alg": l_eps_0_0(gf9, eps),
        "vect2_22_w13.alg": depth3_vect(ff_make(2)),
    }
    for fname, (g, expected) in items.items():
        catalog.save_algebra_file(g, out / fname, expected)
        print(fname, g.n)
    (out / "bad_jacobi.alg").write_text(catalog.dumps_algebra(bad_jacobi()), encoding="utf-8")
    print("bad_jacobi.alg", 4)


if __name__ == "__main__":
    main(*sys.argv[1:])
