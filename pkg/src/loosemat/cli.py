"""Command line: matrix files in, reports out.

Matrix file format (plain text, one item per line)::

    # any comment
    # designated e=<label> [f=<label> ...]
    q 2
    rows 3
    cols 4
    labels a b c d        (optional; default c1..cn)
    1 0 0 1
    0 1 0 1
    0 0 1 1

Entries are element codes of GF(q) as used by ``loosemat.gfq``: the integer
itself for prime q, the base-p packed polynomial coefficients otherwise.
Header lines come before the matrix rows; comments may appear anywhere.

Exit codes: 0 pass, 1 falsification (a suite violation, a failed check,
non-isomorphic inputs to ``iso``), 2 usage or guard errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from . import classify as C
from .families import FAMILY_NAMES, FamilyError, FamilyTag, build, build_structural, series_substitute, two_sum
from .gfq import FieldError, make_field
from .matroid import (
    LinearMatroid,
    ResourceGuardError,
    circuits,
    dual,
    element_status,
    girth,
    is_paving,
    is_sparse_paving,
    iso_check,
    relabel,
    restrict,
)
from .matvec import FqMatrix, UnknownLabelError
from .verify import SUITE_NAMES, ConfigError, default_config, run_suite

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class MatrixFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# matrix files


@dataclass
class MatrixFile:
    q: int
    entries: np.ndarray
    labels: tuple[str, ...] | None = None
    designated: dict = field(default_factory=dict)
    comments: list[str] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def column_labels(self) -> tuple[str, ...]:
        return self.labels if self.labels is not None else tuple(f"c{i + 1}" for i in range(self.cols))

    def to_matroid(self) -> LinearMatroid:
        rep = FqMatrix(make_field(self.q), self.entries, self.column_labels())
        return LinearMatroid(rep, self.designated)

    @classmethod
    def from_matroid(cls, M: LinearMatroid, comments=()) -> "MatrixFile":
        labels = tuple(M.labels)
        if labels == tuple(f"c{i + 1}" for i in range(M.n)):
            labels = None
        return cls(M.q, np.array(M.rep.entries), labels, dict(M.designated), list(comments))


def _int(tok: str, what: str, line: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MatrixFileError(f"{what} must be an integer, got {tok!r}", line) from None


def parse_matrix_file(text: str) -> MatrixFile:
    header: dict = {}
    designated: dict = {}
    comments: list[str] = []
    data: list[tuple[int, list[str]]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("designated"):
                for item in body.split()[1:]:
                    role, sep, lab = item.partition("=")
                    if not sep or not role or not lab:
                        raise MatrixFileError(f"bad designation {item!r}; expected role=label", no)
                    designated[role] = lab
            else:
                comments.append(body)
            continue
        key, *rest = line.split()
        if key in ("q", "rows", "cols", "labels"):
            if data:
                raise MatrixFileError(f"header line {key!r} after matrix rows", no)
            if key in header:
                raise MatrixFileError(f"repeated header {key!r}", no)
            if key == "labels":
                header[key] = (tuple(rest), no)
            else:
                if len(rest) != 1:
                    raise MatrixFileError(f"{key} takes exactly one value", no)
                header[key] = (_int(rest[0], key, no), no)
            continue
        data.append((no, line.split()))
    for key in ("q", "rows", "cols"):
        if key not in header:
            raise MatrixFileError(f"missing header line {key!r}")
    q, q_line = header["q"]
    try:
        make_field(q)
    except FieldError as err:
        raise MatrixFileError(str(err), q_line) from None
    rows, cols = header["rows"][0], header["cols"][0]
    if rows < 0 or cols < 0:
        raise MatrixFileError("rows and cols must be non-negative")
    if len(data) != rows:
        where = data[rows][0] if len(data) > rows else None
        raise MatrixFileError(f"expected {rows} matrix rows, found {len(data)}", where)
    ent = np.zeros((rows, cols), dtype=np.int64)
    for i, (no, toks) in enumerate(data):
        if len(toks) != cols:
            raise MatrixFileError(f"expected {cols} entries, found {len(toks)}", no)
        for j, tok in enumerate(toks):
            v = _int(tok, "entry", no)
            if not 0 <= v < q:
                raise MatrixFileError(f"entry {v} is not a code of GF({q})", no)
            ent[i, j] = v
    labels = None
    if "labels" in header:
        labels, no = header["labels"]
        if len(labels) != cols:
            raise MatrixFileError(f"{len(labels)} labels for {cols} columns", no)
        if len(set(labels)) != len(labels):
            raise MatrixFileError("labels must be distinct", no)
    mf = MatrixFile(q, ent, labels, designated, comments)
    known = set(mf.column_labels())
    for role, lab in designated.items():
        if lab not in known:
            raise MatrixFileError(f"designated {role}={lab} is not a column label")
    return mf


def format_matrix_file(mf: MatrixFile) -> str:
    out = [f"# {c}" if c else "#" for c in mf.comments]
    if mf.designated:
        out.append("# designated " + " ".join(f"{k}={v}" for k, v in sorted(mf.designated.items())))
    out += [f"q {mf.q}", f"rows {mf.rows}", f"cols {mf.cols}"]
    if mf.labels is not None:
        out.append("labels " + " ".join(mf.labels))
    out += [" ".join(str(int(x)) for x in row) for row in mf.entries]
    return "\n".join(out) + "\n"


def read_matrix_file(path: str) -> MatrixFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None
    try:
        return parse_matrix_file(text)
    except MatrixFileError as err:
        raise MatrixFileError(f"{path}: {err}") from None


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def report_schema() -> dict:
    """The JSON schema that ``--json`` reports follow."""
    return json.loads(resources.files("loosemat").joinpath("report.schema.json").read_text())


def _dump(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# construct


def _family_name(raw: str) -> str:
    for name in FAMILY_NAMES:
        if name.lower() == raw.lower():
            return name
    raise UsageError(f"unknown family {raw!r}; choose from {', '.join(FAMILY_NAMES)}")


def cmd_construct(args) -> int:
    name = _family_name(args.family)
    tag = FamilyTag(name, r=args.rank, m=args.m, n=args.n, q=args.q)
    if args.structural:
        if name not in ("Lr", "Jr", "Mr", "Nr"):
            raise UsageError("--structural applies to Lr, Jr, Mr and Nr")
        M = build_structural(tag)
    else:
        M = build(tag)
    desc = [f"family {name}"] + [f"{k}={v}" for k, v in (("rank", args.rank), ("m", args.m), ("n", args.n), ("q", args.q)) if v is not None]
    if args.structural:
        desc.append("structural")
    _write(format_matrix_file(MatrixFile.from_matroid(M, [" ".join(desc)])), args.out)
    return EXIT_PASS


# --------------------------------------------------------------------------
# analyze


def _element_verdict(M: LinearMatroid, e: str) -> dict:
    M.index(e)
    st = element_status(M, e)
    out: dict = {"element": e, "loose": st.is_loose, "free": st.is_free}
    if M.q == 2:
        try:
            out["binary_classification"] = C.classify_binary_loose(M, e).to_dict()
        except C.PreconditionError as err:
            out["binary_classification"] = {"not_applicable": str(err)}
    elif M.q == 3:
        if M.rank >= 5 and st.is_loose and not st.is_coloop:
            try:
                out["ternary_census"] = C.ternary_census(M, e).to_dict()
            except C.PreconditionError as err:
                out["ternary_census"] = {"not_applicable": str(err)}
        else:
            out["ternary_census"] = {"not_applicable": "needs rank >= 5 and e loose, not a coloop"}
    if st.is_free and not st.is_coloop and M.q in (2, 3):
        try:
            out["free_structure"] = C.free_structure_check(M, e).to_dict()
        except C.PreconditionError as err:
            out["free_structure"] = {"not_applicable": str(err)}
    return out


def analyze_report(M: LinearMatroid, element: str | None = None, with_circuits: bool = False) -> dict:
    elements = [asdict(element_status(M, x)) for x in M.labels]
    rep: dict = {
        "q": M.q,
        "rank": M.rank,
        "size": M.n,
        "girth": girth(M),
        "simple": M.simple_flag,
        "coloops": sorted(M.coloop_set, key=M.index),
        "paving": is_paving(M),
        "sparse_paving": is_sparse_paving(M),
        "loose": [d["element"] for d in elements if d["is_loose"] and not d["is_coloop"]],
        "elements": elements,
        "designated": dict(sorted(M.designated.items())),
    }
    if with_circuits:
        rep["circuits"] = [sorted(c, key=M.index) for c in circuits(M)]
    if element is not None:
        rep["element_report"] = _element_verdict(M, element)
    return rep


def _analyze_text(rep: dict) -> str:
    lines = [
        f"GF({rep['q']}) matroid: rank {rep['rank']}, {rep['size']} elements, girth {rep['girth']}",
        f"simple: {rep['simple']}  paving: {rep['paving']}  sparse paving: {rep['sparse_paving']}",
        f"coloops: {', '.join(rep['coloops']) or '-'}",
        f"loose: {', '.join(rep['loose']) or '-'}",
        "",
        f"{'element':<10} {'girth':>5}  loose  free  coloop",
    ]
    for d in rep["elements"]:
        g = "-" if d["girth_through"] is None else d["girth_through"]
        lines.append(f"{d['element']:<10} {g:>5}  {'yes' if d['is_loose'] else 'no':<5}  {'yes' if d['is_free'] else 'no':<4}  {'yes' if d['is_coloop'] else 'no'}")
    if "circuits" in rep:
        lines += ["", f"circuits ({len(rep['circuits'])}):"] + ["  {" + ", ".join(c) + "}" for c in rep["circuits"]]
    if "element_report" in rep:
        er = rep["element_report"]
        lines += ["", f"element {er['element']}: loose={er['loose']} free={er['free']}"]
        for key in ("binary_classification", "ternary_census", "free_structure"):
            if key in er:
                lines.append(f"  {key}: {json.dumps(er[key], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    M = read_matrix_file(args.file).to_matroid()
    element = args.element or M.designated.get("e")
    try:
        rep = analyze_report(M, element, args.circuits)
    except C.FalsificationError as err:
        report = {"schema_version": SCHEMA_VERSION, "command": _echo(args), "falsification": err.to_dict()}
        _write(_dump(report) if args.json else f"FALSIFIED: {err}\n", None)
        return EXIT_FAIL
    if args.json:
        _write(_dump({"schema_version": SCHEMA_VERSION, "command": _echo(args), "analysis": rep}), None)
    else:
        _write(_analyze_text(rep), None)
    return EXIT_PASS


# --------------------------------------------------------------------------
# verify


def _ranks(values) -> tuple[int, ...] | None:
    if not values:
        return None
    out = []
    for v in values:
        for tok in str(v).split(","):
            try:
                out.append(int(tok))
            except ValueError:
                raise UsageError(f"bad rank {tok!r}") from None
    return tuple(out)


def verify_config(args):
    kw = {"seed": args.seed}
    for key in ("samples", "chunk_size", "fault", "max_elements", "controls"):
        val = getattr(args, key)
        if val is not None:
            kw[key] = val
    if args.exhaustive:
        kw["mode"] = "exhaustive"
    return default_config(args.suite, q=args.q, ranks=_ranks(args.rank), **kw)


def cmd_verify(args) -> int:
    cfg = verify_config(args)
    outcome = run_suite(cfg, args.workers)
    if args.json:
        report = {"schema_version": SCHEMA_VERSION, "command": _echo(args), "outcome": outcome.to_dict(include_elapsed=False)}
        _write(_dump(report), None)
    else:
        lines = [f"{cfg.suite} q={cfg.q} ranks={list(cfg.ranks)} mode={cfg.mode} seed={cfg.seed}: {'PASS' if outcome.passed else 'FAIL'}"]
        lines += [f"  {k}: {v}" for k, v in sorted(outcome.counts.items())]
        for v in outcome.violations[:10]:
            lines.append(f"  violation {v['kind']}: {v['message']} (chunk {v['chunk']})")
        if len(outcome.violations) > 10:
            lines.append(f"  ... {len(outcome.violations) - 10} more")
        lines.append(f"  elapsed: {outcome.elapsed:.1f}s")
        _write("\n".join(lines) + "\n", None)
    return EXIT_PASS if outcome.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# transform and iso


def _split_labels(raw: str) -> list[str]:
    return [x for x in raw.split(",") if x]


def cmd_transform(args) -> int:
    A = read_matrix_file(args.file).to_matroid()
    op = args.op
    if op == "dual":
        out = dual(A)
    elif op == "restrict":
        if not args.keep:
            raise UsageError("restrict needs --keep")
        out = restrict(A, _split_labels(args.keep))
    elif op == "series-sub":
        if args.element is None or args.size is None:
            raise UsageError("series-sub needs --element and --size")
        out = series_substitute(A, args.element, args.size)
    else:
        if args.other is None or args.a is None or args.b is None:
            raise UsageError("two-sum needs a second file and --a, --b basepoints")
        B = read_matrix_file(args.other).to_matroid()
        clash = set(A.labels) & set(B.labels)
        b = args.b
        if clash:
            # keep the first file's labels; prefix the second file's
            B = relabel(B, {x: f"B.{x}" for x in B.labels})
            b = f"B.{b}"
        out = two_sum(A, B, args.a, b)
    note = f"{op} of {args.file}" + (f" and {args.other}" if op == "two-sum" else "")
    _write(format_matrix_file(MatrixFile.from_matroid(out, [note])), args.out)
    return EXIT_PASS


def cmd_iso(args) -> int:
    A = read_matrix_file(args.first).to_matroid()
    B = read_matrix_file(args.second).to_matroid()
    anchor = None
    if args.anchor:
        parts = _split_labels(args.anchor)
        if len(parts) != 2:
            raise UsageError("--anchor takes two labels: a,b")
        anchor = (parts[0], parts[1])
    phi = iso_check(A, B, anchor)
    if args.json:
        _write(_dump({"schema_version": SCHEMA_VERSION, "command": _echo(args), "isomorphism": phi}), None)
    else:
        _write("not isomorphic\n" if phi is None else "isomorphic: " + ", ".join(f"{k}->{v}" for k, v in phi.items()) + "\n", None)
    return EXIT_PASS if phi is not None else EXIT_FAIL


# --------------------------------------------------------------------------
# entry point

_NOT_ECHOED = {"handler", "usage", "json", "workers", "out"}


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loosemat", description="Loose elements of small linear matroids.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="write a family member as a matrix file")
    c.add_argument("--family", required=True, help=f"one of {', '.join(FAMILY_NAMES)} (case-insensitive)")
    c.add_argument("--rank", type=int)
    c.add_argument("--m", type=int, help="rank of U_{m,n}")
    c.add_argument("--n", type=int, help="size of U_{m,n}")
    c.add_argument("--q", type=int, help="field size for U and CircuitU")
    c.add_argument("--structural", action="store_true", help="use the minor-based construction")
    c.add_argument("--out", help="output path (default stdout)")
    c.set_defaults(usage=c.format_usage(), handler=cmd_construct)

    a = sub.add_parser("analyze", help="rank, girth, loose elements, paving flags")
    a.add_argument("file")
    a.add_argument("--json", action="store_true")
    a.add_argument("--circuits", action="store_true", help="list all circuits")
    a.add_argument("--element", help="classify this element (defaults to the designated e)")
    a.set_defaults(usage=a.format_usage(), handler=cmd_analyze)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITE_NAMES)
    v.add_argument("--q", type=int)
    v.add_argument("--rank", action="append", help="rank(s); repeat or comma-separate")
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--exhaustive", action="store_true")
    v.add_argument("--chunk-size", type=int)
    v.add_argument("--max-elements", type=int)
    v.add_argument("--controls", type=int)
    v.add_argument("--fault", help="inject a known fault (negative control)")
    v.add_argument("--workers", type=int, help="worker processes (default from LOOSEMAT_WORKERS, else 1)")
    v.add_argument("--json", action="store_true")
    v.set_defaults(usage=v.format_usage(), handler=cmd_verify)

    t = sub.add_parser("transform", help="dual, restrict, series substitution, 2-sum")
    t.add_argument("op", choices=("dual", "restrict", "series-sub", "two-sum"))
    t.add_argument("file")
    t.add_argument("other", nargs="?", help="second file for two-sum")
    t.add_argument("--keep", help="comma-separated labels for restrict")
    t.add_argument("--element", help="element to replace in series-sub")
    t.add_argument("--size", type=int, help="series class size for series-sub")
    t.add_argument("--a", help="basepoint in the first file (two-sum)")
    t.add_argument("--b", help="basepoint in the second file (two-sum)")
    t.add_argument("--out", help="output path (default stdout)")
    t.set_defaults(usage=t.format_usage(), handler=cmd_transform)

    i = sub.add_parser("iso", help="test two matrix files for isomorphism")
    i.add_argument("first")
    i.add_argument("second")
    i.add_argument("--anchor", help="a,b: require the isomorphism to send a to b")
    i.add_argument("--json", action="store_true")
    i.set_defaults(usage=i.format_usage(), handler=cmd_iso)
    return p


_USAGE_ERRORS = (UsageError, MatrixFileError, FamilyError, FieldError, ConfigError, ResourceGuardError, UnknownLabelError, C.PreconditionError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _USAGE_ERRORS as err:
        msg = f"unknown label {err.args[0]!r}" if isinstance(err, UnknownLabelError) else err
    except ValueError as err:
        # bad arguments to the underlying constructions
        msg = err
    sys.stderr.write(args.usage)
    print(f"loosemat {args.command}: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
