"""Command-line interface: ``lieforge <command> ...``.

Inputs are algebra files (JSON, see ``catalog.dumps_algebra``) or catalog
references such as ``o_I:n=5,p=2`` or ``q:psl3``.  Every command prints a
sorted summary; ``--json`` prints the same content as canonical JSON and
``--cert PATH`` writes a certificate that ``recheck`` can re-derive.

Exit codes: 0 success, 2 property absent, 1 user error, 70 internal alarm.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path
from typing import Callable

import click

from . import __version__
from . import catalog, prolong, restrict, superize
from .errors import (
    AxiomFailure,
    BadSplit,
    DecompositionFails,
    InconsistentEmbedding,
    InvalidWitness,
    LieforgeError,
    ParseError,
)
from .superalg import (
    SuperAlgebra,
    center,
    check_axioms,
    derived_series,
    grade_mod2,
    is_simple,
)

EXIT_OK = 0
EXIT_USER = 1
EXIT_ABSENT = 2
EXIT_ALARM = 70

ALARMS = (DecompositionFails, InvalidWitness, InconsistentEmbedding)


# -- inputs ------------------------------------------------------------------------------------

def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_input(source: str, check: bool = True) -> tuple[SuperAlgebra, str]:
    """An algebra file path or a catalog reference, plus its content digest."""
    path = Path(source)
    if source == "-":
        text = sys.stdin.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"stdin: not JSON ({exc.msg})") from exc
        return catalog.algebra_from_json(doc, check), digest_text(text)
    if path.exists():
        g = catalog.load_algebra_file(path, check)
        return g, g.digest
    g = catalog.build(source)
    return g, digest_text(catalog.dumps_algebra(g))


def parse_split(g: SuperAlgebra, spec: str | None) -> list[int]:
    """'deg-mod-2', 'blocks:0,0,1,1', a 0/1 list, or the names of the 1-tagged basis vectors."""
    if spec is None or spec == "deg-mod-2":
        return grade_mod2(g)
    if spec.startswith("blocks:"):
        blocks = [int(x) for x in spec[len("blocks:"):].split(",") if x.strip()]
        return superize.block_split(g, blocks)
    items = [x.strip() for x in spec.strip("[]()").split(",") if x.strip()]
    if items and all(x in ("0", "1") for x in items) and len(items) == g.n:
        return [int(x) for x in items]
    unknown = [x for x in items if x not in g.names]
    if unknown:
        raise BadSplit(f"split names outside the basis: {unknown}")
    marked = set(items)
    return [1 if nm in marked else 0 for nm in g.names]


def parse_vector(spec: str | None) -> list[int] | None:
    if spec is None:
        return None
    return [int(x) for x in spec.strip("()[]").split(",") if x.strip()]


# -- rendering -----------------------------------------------------------------------------------

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def _text_lines(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj, key=str):
            val = obj[key]
            if isinstance(val, (dict, list)) and val and not _flat_list(val):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(val)}")
    elif isinstance(obj, list):
        for val in obj:
            if isinstance(val, (dict, list)) and val and not _flat_list(val):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(val, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(val)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat_list(val) -> bool:
    return isinstance(val, list) and all(not isinstance(v, (dict, list)) for v in val)


def _scalar(val) -> str:
    if isinstance(val, bool):
        return "yes" if val else "no"
    if isinstance(val, list):
        return "[" + ", ".join(_scalar(v) for v in val) + "]"
    if isinstance(val, dict):
        return "{}"
    return str(val)


def render_report(report: dict, as_json: bool) -> str:
    if as_json:
        return canonical_json(report)
    return "\n".join(_text_lines(report)) + "\n"


def make_certificate(kind: str, report: dict, digest: str) -> dict:
    return {
        "kind": kind,
        "command": report["command"],
        "options": report.get("options", {}),
        "payload": report["result"],
        "input_digest": digest,
        "tool_version": __version__,
    }


def _error_category(exc: BaseException) -> tuple[str, int]:
    if isinstance(exc, ALARMS):
        return "internal-alarm", EXIT_ALARM
    if isinstance(exc, (ParseError, json.JSONDecodeError, FileNotFoundError)):
        return "parse", EXIT_USER
    if isinstance(exc, AxiomFailure):
        return "axiom", EXIT_USER
    if isinstance(exc, LieforgeError):
        return "precondition", EXIT_USER
    return "internal-alarm", EXIT_ALARM


def run_and_exit(fn: Callable[[], tuple[dict, int]], as_json: bool, cert_path: str | None,
                 kind: str | None, digest_holder: dict) -> None:
    """Run a command body, print its report, write the certificate, exit."""
    try:
        report, status = fn()
    except Exception as exc:  # every failure becomes a structured error report
        category, status = _error_category(exc)
        report = {"error": {"category": category, "type": type(exc).__name__, "message": str(exc)}}
        violations = getattr(exc, "args", ())[1:2]
        if violations and isinstance(violations[0], list):
            report["error"]["violations"] = [_plain(v) for v in violations[0][:8]]
        click.echo(render_report(report, as_json), nl=False, err=not as_json)
        sys.exit(status)
    click.echo(render_report(report, as_json), nl=False)
    if cert_path and kind and status == EXIT_OK:
        cert = make_certificate(kind, report, digest_holder.get("digest", ""))
        Path(cert_path).write_text(canonical_json(cert), encoding="utf-8")
    sys.exit(status)


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _vec_map(g: SuperAlgebra, v) -> dict:
    return {g.names[i]: g.ctx.serialize(c) for i, c in enumerate(v) if c}


def _sdim(g: SuperAlgebra) -> list[int]:
    return [g.dim_even, g.dim_odd]


def _write_algebra(g: SuperAlgebra, out: str | None) -> str | None:
    if out is None:
        return None
    text = catalog.dumps_algebra(g)
    if out == "-":
        click.echo(text, nl=False, err=True)
    else:
        Path(out).write_text(text, encoding="utf-8")
    return digest_text(text)


# -- computations (shared by commands and recheck) -------------------------------------------

def compute_verify(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    rep = check_axioms(g)
    result = {
        "dims": _sdim(g),
        "ok": rep.ok,
        "violations": len(rep.violations),
    }
    if rep.violations:
        first = rep.violations[0]
        result["first_violation"] = {"kind": first[0], "basis": list(first[1:-1]),
                                     "residual": _plain(first[-1]) if isinstance(first[-1], list) else first[-1]}
        return result, EXIT_USER
    return result, EXIT_OK


def compute_derived(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    series = derived_series(g)
    dims = [s.dim for s in series]
    stable = next((i for i in range(1, len(dims)) if dims[i] == dims[i - 1]), len(dims) - 1)
    result = {"series_dims": dims, "stabilizes_at": stable}
    k = opts.get("i")
    if k is not None:
        result["i"] = k
        result["dim_at_i"] = dims[min(k, len(dims) - 1)]
    return result, EXIT_OK


def compute_center(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    z = center(g)
    basis = [_vec_map(g, v) for v in z.basis]
    return {"dim": z.dim, "basis": basis}, EXIT_OK


def compute_simple(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    v = is_simple(g)
    result = {"simple": v.simple, "method": v.method, "probabilistic": v.probabilistic,
              "exhaustive": v.exhaustive, "trace": _plain(v.trace)}
    if v.ideal is not None:
        result["ideal_dim"] = v.ideal.dim
    return result, EXIT_OK if v.simple else EXIT_ABSENT


def compute_p_structure(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    variant = opts.get("variant") or ("p" if not g.dim_odd else "p2p")
    split = None
    if variant in ("24", "244"):
        split = parse_split(g, opts.get("split"))
    if variant == "p":
        w = restrict.find_p_structure(g)
    elif variant == "p2p":
        w = restrict.find_p2p_structure(g)
    elif variant == "22":
        w = restrict.derive_22_structure(g).witness
    elif variant == "24":
        w = restrict.find_24_structure(g, split)
    else:
        w = restrict.find_244_structure(g, split)
    result: dict = {"variant": variant, "found": w is not None}
    if w is None:
        return result, EXIT_ABSENT
    result["witness"] = w.to_json(g)
    result["table"] = {g.names[i]: g.format(v) for i, v in sorted(w.low.items())}
    if w.high:
        result["table_high"] = {g.names[i]: g.format(v) for i, v in sorted(w.high.items())}
    expected = catalog.expected_witness(g)
    if expected is not None:
        # compare at the level of ad, which is what the tables are unique up to
        bad = restrict.verify_witness(g, expected)
        same = not bad and all(
            g.ad(expected.image(i)) == g.ad(w.image(i)) for i in sorted(set(expected.low) | set(expected.high))
            if i in w.low or i in w.high)
        result["expected_witness_matches"] = same
    status = EXIT_OK
    if variant == "24" and w.outcome == "(2,-)":
        status = EXIT_ABSENT
    return result, status


def compute_closure(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    if opts.get("graded") is not None:
        cl = restrict.minimal_graded_closure(g, parse_split(g, opts["graded"]))
        mode = "graded"
    elif opts.get("one_step"):
        cl = restrict.one_step_closure(g)
        mode = "one-step"
    else:
        cl = restrict.restricted_closure(g)
        mode = "restricted"
    extra = cl.algebra.names[g.n:]
    result = {"mode": mode, "base_dim": g.n, "closure_dim": cl.dim, "added": list(extra),
              "power_images": {g.names[i]: cl.algebra.format(v) for i, v in sorted(cl.power_images.items())}}
    return result, EXIT_OK


def _construction_result(h: SuperAlgebra) -> dict:
    result = {"dims": _sdim(h), "names": list(h.names)}
    if "simple" in h.meta:
        result["simple"] = h.meta["simple"]
        result["simple_method"] = h.meta["simple_method"]
    return result


def compute_queerify(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    h = superize.queerify_restricted(g, check_simple=opts.get("check_simple", False))
    opts["_built"] = h
    return _construction_result(h), EXIT_OK


def compute_partial(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    h = superize.partial_queerify(g, check_simple=opts.get("check_simple", True))
    opts["_built"] = h
    return _construction_result(h), EXIT_OK


def compute_method2(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    split = parse_split(g, opts.get("split"))
    h = superize.method2(g, split, check_simple=opts.get("check_simple", True))
    opts["_built"] = h
    result = _construction_result(h)
    result["split"] = split
    if h.grading is not None:
        dims: dict[int, int] = {}
        for d in h.grading:
            dims[d] = dims.get(d, 0) + 1
        result["graded_dims"] = {str(d): dims[d] for d in sorted(dims)}
    return result, EXIT_OK


def compute_classify(g: SuperAlgebra, opts: dict) -> tuple[dict, int]:
    cert = superize.classify_origin(g, check_simple=opts.get("check_simple", True))
    return cert.to_json(), EXIT_OK


def _prolong_embedding(ref: str, N: list[int] | None):
    fam, params = catalog.parse_ref(ref)
    if fam == "q" and "of" not in params:
        ctx = catalog.ff_make(int(params.get("p", 2)), int(params.get("k", 1)))
        n = int(params.get("n", 1))
        with_j = params.get("J", "0") in ("1", "yes", "true")
        vf = prolong.zxi_ambient(n, ctx, N=N)
        return prolong.embed_phi(n, ctx, with_J=with_j, vf=vf).embedding
    g0 = catalog.build(ref)
    return prolong.matrix_embedding(g0, N)


def compute_prolong(family: str, opts: dict) -> tuple[dict, int]:
    e = _prolong_embedding(family, parse_vector(opts.get("N")))
    res = prolong.cartan_prolong(e)
    dims = {str(d): list(v) for d, v in res.dims().items()}
    return {"family": family, "graded_dims": dims, "total": list(res.sdim()),
            "stabilized_at": res.stabilized_at}, EXIT_OK


def compute_qg(g0_ref: str, opts: dict) -> tuple[dict, int]:
    module = opts.get("module", "std")
    if module not in ("std", "id", "defining"):
        raise LieforgeError(f"only the defining module is supported, got {module!r}")
    g0, _ = load_input(g0_ref)
    v = prolong.check_qg_eq_gq(g0)
    result = {
        "equal": v.equal,
        "qg_dims": {str(d): list(x) for d, x in sorted(v.qg_dims.items())},
        "gq_dims": {str(d): list(x) for d, x in sorted(v.gq_dims.items())},
        "first_mismatch": v.first_mismatch,
    }
    return result, EXIT_OK if v.equal else EXIT_ABSENT


ALGEBRA_COMMANDS = {
    "verify": (compute_verify, None),
    "derived": (compute_derived, None),
    "center": (compute_center, None),
    "simple": (compute_simple, "simplicity"),
    "p-structure": (compute_p_structure, "witness"),
    "closure": (compute_closure, None),
    "queerify": (compute_queerify, None),
    "partial-queerify": (compute_partial, None),
    "method2": (compute_method2, None),
    "classify-origin": (compute_classify, "origin"),
}


def _algebra_command(name: str, source: str, opts: dict, as_json: bool, cert: str | None,
                     out: str | None = None) -> None:
    compute, kind = ALGEBRA_COMMANDS[name]
    holder: dict = {}

    def body():
        g, digest = load_input(source, check=name != "verify")
        holder["digest"] = digest
        result, status = compute(g, opts)
        built = opts.pop("_built", None)
        if built is not None and out is not None:
            result["output_digest"] = _write_algebra(built, out)
        shown = {k: v for k, v in opts.items() if not k.startswith("_")}
        return {"command": name, "input": _display_source(source), "options": shown,
                "result": result}, status

    run_and_exit(body, as_json, cert, kind or "result", holder)


def _display_source(source: str) -> str:
    path = Path(source)
    return path.name if path.exists() else source


# -- commands ---------------------------------------------------------------------------------------

json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
cert_option = click.option("--cert", "cert", type=click.Path(dir_okay=False), default=None,
                           help="Write a certificate to this path.")


@click.group()
@click.version_option(__version__, prog_name="lieforge")
def main() -> None:
    """Exact computations with modular Lie (super)algebras."""


@main.command()
@click.argument("source")
@json_option
@cert_option
def verify(source, as_json, cert):
    """Check the (super) Jacobi identity and squaring axioms on all basis triples."""
    _algebra_command("verify", source, {}, as_json, cert)


@main.command()
@click.argument("source")
@click.option("--i", "i", type=int, default=None, help="Report the i-th derived algebra.")
@json_option
@cert_option
def derived(source, i, as_json, cert):
    """Dimensions of the derived series."""
    _algebra_command("derived", source, {"i": i}, as_json, cert)


@main.command(name="center")
@click.argument("source")
@json_option
@cert_option
def center_cmd(source, as_json, cert):
    """Basis of the center."""
    _algebra_command("center", source, {}, as_json, cert)


@main.command()
@click.argument("source")
@json_option
@cert_option
def simple(source, as_json, cert):
    """Decide simplicity (exit 2 when not simple)."""
    _algebra_command("simple", source, {}, as_json, cert)


@main.command(name="p-structure")
@click.argument("source")
@click.option("--variant", type=click.Choice(["p", "p2p", "22", "24", "244"]), default=None)
@click.option("--split", default=None, help="deg-mod-2, blocks:..., a 0/1 list or basis names.")
@json_option
@cert_option
def p_structure(source, variant, split, as_json, cert):
    """Solve for a restrictedness witness (exit 2 when none exists)."""
    _algebra_command("p-structure", source, {"variant": variant, "split": split}, as_json, cert)


@main.command()
@click.argument("source")
@click.option("--one-step", is_flag=True, help="Only adjoin squares of ad once.")
@click.option("--graded", default=None, help="Split for the minimal graded closure.")
@json_option
@cert_option
def closure(source, one_step, graded, as_json, cert):
    """Restricted closure of ad(g) inside gl(g)."""
    _algebra_command("closure", source, {"one_step": one_step, "graded": graded}, as_json, cert)


@main.command()
@click.argument("source")
@click.option("-o", "out", default=None, help="Write the result as an algebra file.")
@click.option("--check-simple", is_flag=True)
@json_option
@cert_option
def queerify(source, out, check_simple, as_json, cert):
    """q(g) = g + Pi(g) for a restricted g."""
    _algebra_command("queerify", source, {"check_simple": check_simple}, as_json, cert, out)


@main.command(name="partial-queerify")
@click.argument("source")
@click.option("-o", "out", default=None)
@click.option("--no-check-simple", is_flag=True)
@json_option
@cert_option
def partial_queerify(source, out, no_check_simple, as_json, cert):
    """Partial queerification via the 1-step closure."""
    _algebra_command("partial-queerify", source, {"check_simple": not no_check_simple}, as_json, cert, out)


@main.command(name="method2")
@click.argument("source")
@click.option("--split", required=True)
@click.option("-o", "out", default=None)
@click.option("--no-check-simple", is_flag=True)
@json_option
@cert_option
def method2_cmd(source, split, out, no_check_simple, as_json, cert):
    """Superize a Z/2-graded simple Lie algebra."""
    _algebra_command("method2", source, {"split": split, "check_simple": not no_check_simple},
                     as_json, cert, out)


@main.command(name="classify-origin")
@click.argument("source")
@json_option
@cert_option
def classify_origin(source, as_json, cert):
    """Decide whether a simple superalgebra is a partial queerification or from method 2."""
    _algebra_command("classify-origin", source, {"check_simple": True}, as_json, cert)


@main.command(name="prolong")
@click.option("--family", required=True, help="q:n=2,p=2[,J=1] or a matrix family such as gl:n=2.")
@click.option("--N", "N", default=None, help="Shearing vector of the ambient, e.g. 2,2.")
@json_option
@cert_option
def prolong_cmd(family, N, as_json, cert):
    """Cartan prolong of a non-positive part inside vect."""
    holder = {"digest": digest_text(family + "|" + str(N))}

    def body():
        opts = {"N": N}
        result, status = compute_prolong(family, opts)
        return {"command": "prolong", "input": family, "options": {"N": N, "family": family},
                "result": result}, status

    run_and_exit(body, as_json, cert, "prolong", holder)


@main.command(name="qg-eq-gq")
@click.option("--g0", "g0", required=True)
@click.option("--module", "module", default="std", help="Only the defining module (std) is supported.")
@json_option
@cert_option
def qg_eq_gq(g0, module, as_json, cert):
    """Compare q(prolong) with prolong(q) for p=2."""
    holder = {"digest": digest_text(g0 + "|" + module)}

    def body():
        result, status = compute_qg(g0, {"module": module})
        return {"command": "qg-eq-gq", "input": g0, "options": {"g0": g0, "module": module},
                "result": result}, status

    run_and_exit(body, as_json, cert, "prolong-equality", holder)


@main.group(name="catalog")
def catalog_group():
    """Catalog families."""


@catalog_group.command(name="list")
@json_option
def catalog_list(as_json):
    rows = dict(sorted(catalog.FAMILIES.items()))
    click.echo(render_report({"families": rows}, as_json), nl=False)


@catalog_group.command(name="emit")
@click.argument("name")
@click.option("-o", "out", default="-", help="Output path (default stdout).")
def catalog_emit(name, out):
    """Write a catalog algebra as an algebra file."""

    def body():
        g = catalog.build(name)
        text = catalog.dumps_algebra(g)
        if out == "-":
            click.echo(text, nl=False)
        else:
            Path(out).write_text(text, encoding="utf-8")
        raise SystemExit(EXIT_OK)

    try:
        body()
    except LieforgeError as exc:
        category, status = _error_category(exc)
        click.echo(f"error ({category}): {exc}", err=True)
        sys.exit(status)


# -- recheck ----------------------------------------------------------------------------------------

def _normalized(obj):
    return json.loads(canonical_json(obj))


def recheck_certificate(cert: dict, source: str) -> tuple[bool, list[str]]:
    """Re-derive a certificate's claim from its input; returns (ok, reasons)."""
    reasons: list[str] = []
    command = cert.get("command")
    opts = dict(cert.get("options", {}))
    if command in ("prolong", "qg-eq-gq"):
        if command == "prolong":
            digest = digest_text(opts.get("family", source) + "|" + str(opts.get("N")))
            result, _ = compute_prolong(opts.get("family", source), opts)
        else:
            digest = digest_text(opts.get("g0", source) + "|" + opts.get("module", "std"))
            result, _ = compute_qg(opts.get("g0", source), opts)
        if digest != cert.get("input_digest"):
            reasons.append("input digest differs")
        if _normalized(result) != cert.get("payload"):
            reasons.append("re-derived payload differs")
        return not reasons, reasons
    if command not in ALGEBRA_COMMANDS:
        return False, [f"unknown command {command!r}"]
    g, digest = load_input(source, check=command != "verify")
    if digest != cert.get("input_digest"):
        reasons.append("input digest differs")
    payload = cert.get("payload", {})
    if cert.get("kind") == "witness" and payload.get("witness"):
        # check the certified table directly, independent of the solver
        w = catalog.witness_from_json(g, payload["witness"])
        if w.split is None and payload["witness"].get("split") is not None:
            w.split = tuple(payload["witness"]["split"])
        bad = restrict.verify_witness(g, w)
        if bad:
            reasons.append(f"certified table fails on {bad[0][0]}, {bad[0][1]}")
    compute, _ = ALGEBRA_COMMANDS[command]
    result, _ = compute(g, opts)
    opts.pop("_built", None)
    if _normalized(result) != payload:
        reasons.append("re-derived payload differs")
    return not reasons, reasons


@main.command()
@click.argument("cert_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("source")
@json_option
def recheck(cert_path, source, as_json):
    """Re-verify a certificate against its input."""

    def body():
        try:
            cert = json.loads(Path(cert_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{cert_path}: not JSON ({exc.msg})") from exc
        ok, reasons = recheck_certificate(cert, source)
        report = {"command": "recheck", "input": _display_source(source),
                  "result": {"kind": cert.get("kind"), "ok": ok, "reasons": reasons}}
        return report, EXIT_OK if ok else EXIT_ABSENT

    run_and_exit(body, as_json, None, None, {})


if __name__ == "__main__":
    main()
