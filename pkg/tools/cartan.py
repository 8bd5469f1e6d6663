"""Lie algebras g(A) from a Cartan matrix, for generating data fixtures.

Positive root vectors are built height by height as brackets [e_j, x];
an element x of g_alpha is identified with its signature ([x, f_i])_i,
which is injective on g(A) because the maximal ideal meeting n+ consists of
exactly the elements with vanishing signature.  Negative root vectors are
images under the Chevalley involution w(e_i) = -f_i, w(h) = -h.
"""

from __future__ import annotations

from lieforge.ffield import FieldCtx
from lieforge.linalg import Echelon, solve_rows
from lieforge.superalg import SuperAlgebra, algebra_from_constants


class CartanAlgebra:
    def __init__(self, ctx: FieldCtx, A, extra_rows=(), extra_names=(), max_height: int = 64):
        self.ctx = ctx
        self.r = len(A)
        self.rows = [[ctx.parse(x) for x in row] for row in A] + [[ctx.parse(x) for x in row] for row in extra_rows]
        self.h_names = [f"h{i + 1}" for i in range(self.r)] + list(extra_names)
        self.nh = len(self.rows)
        self.spaces: dict[tuple, list] = {}  # alpha -> list of (j, parent index, signature)
        self.sig_rows: dict[tuple, list] = {}
        self._build(max_height)
        self.bracket_cache: dict = {}

    # -- roots ----------------------------------------------------------------------------

    def simple(self, j: int) -> tuple:
        return tuple(1 if k == j else 0 for k in range(self.r))

    def weight(self, alpha, k: int) -> int:
        ctx = self.ctx
        acc = 0
        for j, a in enumerate(alpha):
            if a:
                acc = ctx.add(acc, ctx.mul(ctx.from_int(a), self.rows[k][j]))
        return acc

    def _sig_layout(self, alpha) -> list[tuple]:
        """Blocks of the signature vector: for each i, the space g_(alpha - alpha_i)."""
        out = []
        for i in range(self.r):
            beta = tuple(a - (1 if k == i else 0) for k, a in enumerate(alpha))
            if any(b < 0 for b in beta):
                out.append(None)
            elif not any(beta):
                out.append(("h",))
            elif beta in self.spaces:
                out.append(beta)
            else:
                out.append(None)
        return out

    def _block_dim(self, block) -> int:
        if block is None:
            return 0
        if block == ("h",):
            return self.nh
        return len(self.spaces[block])

    def _encode_sig(self, alpha, parts: list[dict]) -> list[int]:
        """parts[i] is a sparse element (key -> coeff) in g_(alpha - alpha_i)."""
        vec = []
        for i, block in enumerate(self._sig_layout(alpha)):
            d = self._block_dim(block)
            coords = [0] * d
            for key, c in parts[i].items():
                if block is None:
                    raise AssertionError("signature component outside any root space")
                coords[key[-1]] = c
            vec.extend(coords)
        return vec

    # -- construction ---------------------------------------------------------------------

    def _build(self, max_height: int) -> None:
        for j in range(self.r):
            self.spaces[self.simple(j)] = [(j, None, None)]
        level = [self.simple(j) for j in range(self.r)]
        for _ in range(max_height):
            candidates: dict[tuple, list] = {}
            for beta in level:
                for j in range(self.r):
                    alpha = tuple(b + (1 if k == j else 0) for k, b in enumerate(beta))
                    for idx in range(len(self.spaces[beta])):
                        candidates.setdefault(alpha, []).append((j, beta, idx))
            nxt = []
            for alpha in sorted(candidates):
                entries = []
                rows = []
                width = None
                ech = None
                for j, beta, idx in candidates[alpha]:
                    parts = []
                    for i in range(self.r):
                        parts.append(self._sig_component(j, ("+", beta, idx), i))
                    vec = self._encode_sig(alpha, parts)
                    if width is None:
                        width = len(vec)
                        ech = Echelon(self.ctx, width)
                    if any(vec) and ech.add(vec) is not None:
                        entries.append((j, idx, vec))
                        rows.append(vec)
                if entries:
                    self.spaces[alpha] = entries
                    self.sig_rows[alpha] = rows
                    nxt.append(alpha)
            if not nxt:
                return
            level = nxt
        raise RuntimeError("root system did not terminate; raise max_height")

    def _sig_component(self, j: int, key, i: int) -> dict:
        """[[e_j, x], f_i] = [e_j, [x, f_i]] + delta_ij [h_j, x] for positive basis x = key."""
        ctx = self.ctx
        inner = self.bracket_with_f(key, i)
        out = self.ad_e_elem(j, inner)
        if i == j:
            w = self.weight(key[1], j)
            if w:
                out = _add(ctx, out, {key: w})
        return out

    def bracket_with_f(self, key, i: int) -> dict:
        """[x, f_i] for a positive basis element x (Chevalley f_i)."""
        _, alpha, idx = key
        if sum(alpha) == 1:
            j = alpha.index(1)
            return {("h", j): 1} if i == j else {}
        j, parent, sig = self.spaces[alpha][idx]
        block = self._sig_layout(alpha)[i]
        if block is None:
            return {}
        start = sum(self._block_dim(b) for b in self._sig_layout(alpha)[:i])
        coords = sig[start:start + self._block_dim(block)]
        if block == ("h",):
            return {("h", k): c for k, c in enumerate(coords) if c}
        return {("+", block, k): c for k, c in enumerate(coords) if c}

    def ad_e_elem(self, j: int, elem: dict) -> dict:
        out: dict = {}
        for key, c in elem.items():
            out = _add(self.ctx, out, self.ad_e(j, key), c)
        return out

    def ad_e(self, j: int, key) -> dict:
        ctx = self.ctx
        kind = key[0]
        if kind == "h":
            w = self.rows[key[1]][j]
            return {("+", self.simple(j), 0): ctx.neg(w)} if w else {}
        if kind == "-":
            # [e_j, w(x)] = w([x, f_j])
            return self.omega(self.bracket_with_f(("+", key[1], key[2]), j))
        alpha = key[1]
        target = tuple(a + (1 if k == j else 0) for k, a in enumerate(alpha))
        parts = [self._sig_component(j, key, i) for i in range(self.r)]
        if target not in self.spaces:
            if any(parts):
                raise AssertionError("nonzero bracket outside the root system")
            return {}
        vec = self._encode_sig(target, parts)
        if not any(vec):
            return {}
        coords = solve_rows(ctx, _transpose(self.sig_rows[target], len(vec)), len(self.sig_rows[target]), vec)
        if coords is None:
            raise AssertionError("signature outside the spanned root space")
        return {("+", target, k): c for k, c in enumerate(coords) if c}

    def omega(self, elem: dict) -> dict:
        ctx = self.ctx
        out = {}
        for key, c in elem.items():
            if key[0] == "h":
                out[key] = ctx.neg(c)
            elif key[0] == "+":
                out[("-", key[1], key[2])] = c
            else:
                out[("+", key[1], key[2])] = c
        return out

    # -- brackets on the whole algebra ------------------------------------------------------

    def keys(self) -> list:
        pos = [("+", a, i) for a in sorted(self.spaces, key=lambda a: (sum(a), a)) for i in range(len(self.spaces[a]))]
        neg = [("-", a, i) for (_, a, i) in pos]
        hs = [("h", k) for k in range(self.nh)]
        return pos + hs + neg

    def bracket(self, u, v) -> dict:
        ck = (u, v)
        if ck in self.bracket_cache:
            return self.bracket_cache[ck]
        ctx = self.ctx
        if u[0] == "h":
            w = 0 if v[0] == "h" else self.weight(v[1], u[1])
            if v[0] == "-":
                w = ctx.neg(w)
            out = {v: w} if w else {}
        elif u[0] == "-":
            out = self.omega(self.bracket_elem(("+", u[1], u[2]), self.omega({v: 1})))
        elif sum(u[1]) == 1:
            out = self.ad_e(u[1].index(1), v)
        else:
            j, parent, _ = self.spaces[u[1]][u[2]]
            beta = tuple(a - (1 if k == j else 0) for k, a in enumerate(u[1]))
            up = ("+", beta, parent)
            # [[e_j, u'], v] = [e_j, [u', v]] - [u', [e_j, v]]
            first = self.ad_e_elem(j, self.bracket(up, v))
            second = self.bracket_elem(up, self.ad_e(j, v))
            out = _add(ctx, first, second, ctx.neg(1))
        self.bracket_cache[ck] = out
        return out

    def bracket_elem(self, u, elem: dict) -> dict:
        out: dict = {}
        for key, c in elem.items():
            out = _add(self.ctx, out, self.bracket(u, key), c)
        return out

    def to_algebra(self, pos_names=None, meta=None) -> SuperAlgebra:
        """Basis e_alpha (positive), h_k, f_alpha = -w(e_alpha) (negative)."""
        ctx = self.ctx
        keys = self.keys()
        sign = {k: (ctx.neg(1) if k[0] == "-" else 1) for k in keys}
        names = []
        for k in keys:
            if k[0] == "h":
                names.append(self.h_names[k[1]])
            else:
                names.append(_root_name(k, self.spaces, pos_names))
        index = {k: i for i, k in enumerate(keys)}
        brackets = []
        for a, u in enumerate(keys):
            for b, v in enumerate(keys):
                if b < a:
                    continue
                out = {}
                for key, c in self.bracket(u, v).items():
                    # new basis b'_k = s_k b_k
                    coeff = ctx.mul(ctx.mul(sign[u], sign[v]), ctx.mul(c, sign[key]))
                    if coeff:
                        out[index[key]] = coeff
                if out:
                    brackets.append((a, b, out))
        grading = [sum(k[1]) if k[0] == "+" else (-sum(k[1]) if k[0] == "-" else 0) for k in keys]
        return algebra_from_constants(ctx, names, [0] * len(keys), brackets, None, grading, meta or {})


def _root_name(key, spaces, pos_names) -> str:
    kind, alpha, idx = key
    if pos_names is not None and (alpha, idx) in pos_names:
        base = pos_names[(alpha, idx)]
        return base if kind == "+" else base[0].translate(str.maketrans("exX", "fyY")) + base[1:]
    letter = "e" if kind == "+" else "f"
    tag = "".join(str(a) for a in alpha)
    if sum(alpha) == 1:
        tag = str(alpha.index(1) + 1)
    suffix = f"_{idx + 1}" if len(spaces[alpha]) > 1 else ""
    return f"{letter}{tag}{suffix}" if sum(alpha) == 1 else f"{letter}({tag}){suffix}"


def _add(ctx: FieldCtx, acc: dict, other: dict, c: int = 1) -> dict:
    out = dict(acc)
    for k, v in other.items():
        x = ctx.add(out.get(k, 0), ctx.mul(c, v))
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def _transpose(rows, width):
    return [[r[c] for r in rows] for c in range(width)]
