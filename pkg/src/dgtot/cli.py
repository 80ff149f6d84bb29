"""Command-line interface: ``dgtot COMMAND FILE [options]``.

Exit codes: 0 when a report (including any verdict) was produced, 1 for
input errors, 2 when a computation could not be certified on the window.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import QQ, Field
from .complex import (
    GradedComplex,
    homology_truncated,
    validate_complex,
    validate_morphism,
)
from .crossing import conjugation_holds, detot, eliminate_crossing, partition
from .dg import SemifreeDG, dg_homology, is_minimal, validate_dg
from .obstruction import ObstructionError, minimal_free_resolution, tot_image_obstruction
from .parsing import ParseError, parse, serialize
from .totaling import tensor_compat_check, tor_decomposition_check, tot
from .univariate import CertificationError, embed, homology_decompose

EXIT_OK, EXIT_INPUT, EXIT_UNCERTIFIED = 0, 1, 2


class InputError(Exception):
    pass


class Uncertified(Exception):
    def __init__(self, report: dict):
        super().__init__(report.get("reason") or "not certified")
        self.report = report


def parse_window(text: str | None):
    if text is None:
        return None
    try:
        lo, hi = (int(t) for t in text.split(".."))
    except ValueError:
        raise InputError(f"window must look like LO..HI, got {text!r}") from None
    if lo > hi:
        raise InputError(f"empty window {text!r}")
    return (lo, hi)


def parse_field(text: str | None) -> Field | None:
    if text is None:
        return None
    if text == "Q":
        return QQ
    if text.startswith("F") and text[1:].isdigit():
        try:
            return Field(int(text[1:]))
        except ValueError as e:
            raise InputError(str(e)) from None
    raise InputError(f"field must be Q or F<prime>, got {text!r}")


def load(path: str, args):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return parse(text, args.sign_convention, parse_field(args.field))


def _module(doc, path) -> SemifreeDG:
    try:
        M = doc.first(SemifreeDG)
    except ParseError:
        raise InputError(f"{path} contains no dgmodule") from None
    check = validate_dg(M)
    if not check.ok:
        raise InputError(f"{path}: {check.violation.message}")
    return M


def _complex(doc, path) -> GradedComplex:
    try:
        X = doc.first(GradedComplex)
    except ParseError:
        raise InputError(f"{path} contains no complex") from None
    bad = validate_complex(X)
    if bad is not None:
        raise InputError(f"{path}: {bad.message}")
    return X


def _write(path: str, obj, ring) -> None:
    with open(path, "w") as fh:
        fh.write(serialize(obj, ring))


def _header(args, doc) -> dict:
    return {"command": args.command, "file": args.file, "ring": str(doc.ring),
            "convention": args.sign_convention}


# ---------------------------------------------------------------------------
# commands; each returns (report, plot panels)


def cmd_validate(args):
    doc = load(args.file, args)
    objects = []
    for obj in doc.objects:
        if isinstance(obj, SemifreeDG):
            v = validate_dg(obj)
            entry = {"kind": "dgmodule", "name": obj.name, "rank": obj.rank, **v.as_dict()}
            if v.ok:
                entry["minimal"] = is_minimal(obj)
        elif isinstance(obj, GradedComplex):
            bad = validate_complex(obj)
            entry = {"kind": "complex", "name": obj.name, "positions": obj.support,
                     "ok": bad is None, "violation": bad.as_dict() if bad else None}
        else:
            bad = validate_morphism(obj)
            entry = {"kind": "morphism", "name": obj.name, "ok": bad is None,
                     "violation": bad.as_dict() if bad else None}
        objects.append(entry)
    report = _header(args, doc)
    report["ok"] = all(o["ok"] for o in objects)
    report["objects"] = objects
    return report, []


def cmd_homology(args):
    from .plotting import plot_hilbert

    doc = load(args.file, args)
    window = parse_window(args.window)
    report = _header(args, doc)
    if any(isinstance(o, SemifreeDG) for o in doc.objects):
        M = _module(doc, args.file)
        H = dg_homology(M, window)
        report["homology"] = H.as_dict()
        if not H.certified:
            raise Uncertified(report | {"reason": H.reason})
        dims = H.dims
    else:
        X = _complex(doc, args.file)
        window = window or X.auto_window()
        table = homology_truncated(X, window)
        report["window"] = list(window)
        degrees = range(window[0], window[1] + 1)
        report["homology"] = {str(i): {str(j): table[(i, j)] for j in degrees}
                              for i in X.support}
        dims = {j: sum(table[(i, j - i)] for i in X.support if (i, j - i) in table)
                for j in range(window[0], window[1] + 1)}
    return report, [(plot_hilbert, (dims,))]


def cmd_crossing(args):
    doc = load(args.file, args)
    M = _module(doc, args.file)
    report = _header(args, doc)
    report["partition"] = partition(M).as_dict()
    if args.eliminate:
        res = eliminate_crossing(M, args.max_passes)
        report["elimination"] = res.as_dict()
        report["elimination"]["conjugation_holds"] = conjugation_holds(M, res.module, res.change)
        if args.output and res.success:
            _write(args.output, res.module, doc.ring)
            report["output"] = args.output
    elif args.output:
        raise InputError("-o requires --eliminate for crossing")
    return report, []


def cmd_detot(args):
    doc = load(args.file, args)
    M = _module(doc, args.file)
    try:
        X = detot(M)
    except ValueError as e:
        raise InputError(str(e)) from None
    report = _header(args, doc)
    report["positions"] = {str(i): {"twists": list(X.module(i).twists),
                                    "labels": list(X.module(i).labels)} for i in X.support}
    report["differentials"] = {str(i): [[str(p) for p in row] for row in X.diff(i).entries]
                               for i in sorted(X.diffs)}
    report["round_trip"] = tot(X, M.convention) == M
    if args.output:
        _write(args.output, X, doc.ring)
        report["output"] = args.output
    return report, []


def cmd_tot(args):
    doc = load(args.file, args)
    X = _complex(doc, args.file)
    M = tot(X, args.sign_convention)
    v = validate_dg(M)
    report = _header(args, doc)
    report["rank"] = M.rank
    report["basis"] = {lab: n for lab, n in zip(M.labels, M.degrees)}
    report["differential"] = {lab: M.format_element([M.D[i][j] for i in range(M.rank)])
                              for j, lab in enumerate(M.labels)}
    report["semifree"] = v.ok
    if args.output:
        _write(args.output, M, doc.ring)
        report["output"] = args.output
    return report, []


def cmd_resolve(args):
    from .plotting import plot_betti, plot_hilbert

    doc = load(args.file, args)
    M = _module(doc, args.file)
    window = parse_window(args.window)
    report = _header(args, doc)
    if M.ring.nvars == 1:
        try:
            dec = homology_decompose(M, window)
        except CertificationError as e:
            raise Uncertified(report | {"reason": str(e),
                                        "suggested_window": list(e.suggested_window or ())})
        report["decomposition"] = dec.as_dict()
        H = dec.homology
    else:
        H = dg_homology(M, window)
        if not H.certified:
            raise Uncertified(report | {"reason": H.reason,
                                        "suggested_window": list(H.suggested_window)})
    res = minimal_free_resolution(H, H.window)
    report["resolution"] = res.as_dict()
    if not res.certified:
        raise Uncertified(report | {"reason": res.reason})
    return report, [(plot_hilbert, (H.dims,)), (plot_betti, (res.betti(),))]


def cmd_embed(args):
    doc = load(args.file, args)
    M = _module(doc, args.file)
    if M.ring.nvars != 1:
        raise InputError("embed needs a ring in one variable")
    window = parse_window(args.window)
    report = _header(args, doc)
    try:
        w = embed(M, window)
    except CertificationError as e:
        raise Uncertified(report | {"reason": str(e),
                                    "suggested_window": list(e.suggested_window or ())})
    report["embedding"] = w.as_dict()
    if not w.ok:
        raise Uncertified(report | {"reason": "morphism not certified"})
    from .plotting import plot_hilbert

    return report, [(plot_hilbert, (w.decomposition.homology.dims,))]


def cmd_obstruct(args):
    from .plotting import plot_betti, plot_hilbert

    doc = load(args.file, args)
    M = _module(doc, args.file)
    report = _header(args, doc)
    try:
        v = tot_image_obstruction(M, parse_window(args.window))
    except ObstructionError as e:
        raise Uncertified(report | {"reason": str(e),
                                    "suggested_window": list(e.suggested_window or ())})
    report.update(v.as_dict())
    return report, [(plot_hilbert, (v.homology.dims,)), (plot_betti, (v.resolution.betti(),))]


def _two_complexes(args):
    da, db = load(args.file, args), load(args.other, args)
    X, Y = _complex(da, args.file), _complex(db, args.other)
    if X.ring != Y.ring:
        raise InputError(f"rings differ: {X.ring} and {Y.ring}")
    return da, X, Y


def cmd_tensorcheck(args):
    doc, X, Y = _two_complexes(args)
    cert = tensor_compat_check(X, Y, parse_window(args.window), args.sign_convention)
    report = _header(args, doc) | {"other": args.other, **cert.as_dict()}
    return report, []


def cmd_torcheck(args):
    from .plotting import plot_hilbert

    doc, X, Y = _two_complexes(args)
    tables = tor_decomposition_check(X, Y, parse_window(args.window), args.sign_convention)
    report = _header(args, doc) | {"other": args.other, **tables.as_dict()}
    return report, [(plot_hilbert, (tables.dg_side, "H(Tot X ⊗ Tot Y)")),
                    (plot_hilbert, (tables.complex_side, "Σ H(X ⊗ Y)"))]


def cmd_suite(args):
    from .plotting import plot_timings
    from .suites import SUITES, run_suite

    if args.file not in SUITES:
        raise InputError(f"unknown suite {args.file!r}; choose from {', '.join(sorted(SUITES))}")
    rep = run_suite(args.file, args.seed, args.count)
    report = {"command": "suite", **rep.as_dict()}
    return report, [(plot_timings, (rep.seconds,))]


COMMANDS = {
    "validate": cmd_validate, "homology": cmd_homology, "crossing": cmd_crossing,
    "detot": cmd_detot, "tot": cmd_tot, "resolve": cmd_resolve, "embed": cmd_embed,
    "obstruct": cmd_obstruct, "tensorcheck": cmd_tensorcheck, "torcheck": cmd_torcheck,
    "suite": cmd_suite,
}


# ---------------------------------------------------------------------------
# output


def render_text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                out.append(f"{pad}{k}:")
                out.extend(render_text(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                out.append(f"{pad}-")
                out.extend(render_text(v, indent + 1))
            else:
                out.append(f"{pad}- {_inline(v)}")
    else:
        out.append(f"{pad}{_inline(obj)}")
    return out


def _flat(v) -> bool:
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) for x in items)


def _inline(v) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(x)}" for k, x in v.items()) + "}"
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def emit(report: dict, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(report, indent=2, ensure_ascii=False, default=str) + "\n")
    else:
        stream.write("\n".join(render_text(report)) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", metavar="LO..HI", help="internal-degree window")
    common.add_argument("--sign-convention", choices=("even", "koszul"), default="even")
    common.add_argument("--field", help="override the coefficient field (Q or F<prime>)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--plot", metavar="PATH", help="also render a figure to PATH")

    parser = argparse.ArgumentParser(prog="dgtot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "homology", "resolve", "embed", "obstruct"):
        sub.add_parser(name, parents=[common]).add_argument("file")
    p = sub.add_parser("crossing", parents=[common])
    p.add_argument("file")
    p.add_argument("--eliminate", action="store_true")
    p.add_argument("--max-passes", type=int, default=None)
    p.add_argument("-o", "--output", help="write the rebased module here")
    for name in ("detot", "tot"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("file")
        p.add_argument("-o", "--output")
    for name in ("tensorcheck", "torcheck"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("file")
        p.add_argument("other")
    p = sub.add_parser("suite", parents=[common])
    p.add_argument("file", metavar="NAME")
    p.add_argument("--count", type=int, default=None)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    panels = []
    try:
        report, panels = COMMANDS[args.command](args)
        code = EXIT_OK
    except (ParseError, InputError) as e:
        report = {"command": args.command, "file": args.file, "error": str(e)}
        if isinstance(e, ParseError):
            report["line"], report["col"] = e.line, e.col
        code = EXIT_INPUT
    except Uncertified as e:
        report = {**e.report, "certified": False, "reason": str(e)}
        code = EXIT_UNCERTIFIED
    emit(report, args.format, stdout)
    if code == EXIT_OK and args.plot and panels:
        from .plotting import render

        render(args.plot, panels)
    elif args.plot and code == EXIT_OK:
        stderr.write(f"{args.command}: nothing to plot\n")
    return code


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
