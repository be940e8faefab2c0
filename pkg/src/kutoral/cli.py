"""Command-line entry point: ``kutoral <command> ...``.

Exit codes: 0 pass, 1 claim failure, 2 usage or parse error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import List, Optional

from . import __version__
from . import families as fam
from .series import UsageError, m_series
from .solver import annihilator_staircase, elementary_divisors
from .tensor import ModuleContext, TensorElement, apply_boundary, normal_form
from . import verify as V

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

_TERM = re.compile(r"^\s*([+-]?\s*[0-9/]*)\s*\*?\s*(?:v(?:\^(\d+))?)?\s*\*?\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*$")


def parse_element(text: str, p: int) -> TensorElement:
    """Parse JSON (the element schema) or terms like ``18*v^2[1,1] - 4[1,2]``."""
    text = text.strip()
    if not text or text == "0":
        return TensorElement.zero()
    if text.startswith("{"):
        return TensorElement.from_json(json.loads(text), p)
    pieces = re.split(r"(?<=\])\s*(?=[+-])", text)
    terms = []
    for piece in pieces:
        mt = _TERM.match(piece)
        if not mt:
            raise UsageError(f"cannot parse term {piece!r}")
        raw, e, i, j = mt.groups()
        raw = raw.replace(" ", "")
        if raw in ("", "+"):
            c = Fraction(1)
        elif raw == "-":
            c = Fraction(-1)
        else:
            c = Fraction(raw)
        m = 0 if e is None and "v" not in piece.split("[")[0] else int(e or 1)
        terms.append(((int(i), int(j), m), c))
    return TensorElement(terms)


def _read_element(arg: str, p: int) -> TensorElement:
    if arg == "-":
        return parse_element(sys.stdin.read(), p)
    if os.path.exists(arg):
        with open(arg) as fh:
            return parse_element(fh.read(), p)
    return parse_element(arg, p)


class RunManifest:
    def __init__(self, args: argparse.Namespace, argv: List[str]):
        self.data = {
            "tool": "kutoral",
            "version": __version__,
            "argv": argv,
            "params": {k: getattr(args, k, None) for k in ("p", "n", "k", "convention", "vmax", "seed")},
            "started": datetime.now(timezone.utc).isoformat(),
        }

    def finish(self, summary: dict) -> dict:
        self.data["finished"] = datetime.now(timezone.utc).isoformat()
        self.data["summary"] = summary
        return self.data


def _emit(args, result, text: str, manifest: Optional[RunManifest] = None, summary: Optional[dict] = None) -> None:
    if args.format == "json":
        doc = {"result": result}
        if manifest is not None:
            doc["manifest"] = manifest.finish(summary or {})
        out = json.dumps(doc, sort_keys=True, indent=2)
    else:
        out = text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _ctx(args) -> ModuleContext:
    return ModuleContext(args.p, args.n, args.k, args.convention)


# ---------------------------------------------------------------------------
# commands


def cmd_series(args, argv) -> int:
    s = m_series(args.p, args.n, args.convention)
    text = ", ".join(f"{c}" + (f"*v^{t}" if t > 1 else ("*v" if t == 1 else "")) for t, c in enumerate(s.coeffs))
    _emit(args, s.to_json(), f"[{args.p}^{args.n}]-series coefficients: ({text})")
    return EXIT_PASS


def cmd_nf(args, argv) -> int:
    ctx = _ctx(args)
    x = _read_element(args.element, ctx.p)
    r = normal_form(x, ctx)
    _emit(args, r.to_json(), repr(r))
    return EXIT_PASS


def cmd_boundary(args, argv) -> int:
    ctx = _ctx(args)
    x = _read_element(args.element, ctx.p)
    r = apply_boundary(x, ctx)
    _emit(args, r.to_json(), repr(r))
    return EXIT_PASS


def cmd_ann(args, argv) -> int:
    ctx = _ctx(args)
    manifest = RunManifest(args, argv)
    st = annihilator_staircase(ctx, args.vmax)
    result = st.to_json()
    found = st.m0 is not None and st.m1 is not None
    text = f"p={st.p} k={st.k}: p^2 in ann: {st.p2}; m1 = {result['m1']}; m0 = {result['m0']}"
    _emit(args, result, text, manifest, {"found": found})
    return EXIT_PASS if found else EXIT_INCONCLUSIVE


def cmd_homology(args, argv) -> int:
    ctx = _ctx(args)
    manifest = RunManifest(args, argv)
    rows = []
    lines = ["W  coker  ker"]
    for W in range(2, args.wmax + 1):
        coker, ker = elementary_divisors(ctx, W)
        rows.append({"W": W, "coker": coker.to_json(), "ker": ker.to_json()})
        lines.append(f"{W}  {coker.describe()}  |  {ker.describe()}")
    _emit(args, rows, "\n".join(lines), manifest, {"weights": len(rows)})
    return EXIT_PASS


def _grid(args) -> List[tuple]:
    if args.grid == "desk":
        return [(p, k) for p in (2, 3) for k in range(2, 6)]
    return [(args.p, args.k)]


def cmd_verify(args, argv) -> int:
    manifest = RunManifest(args, argv)
    if args.claim == "replay":
        if not args.file:
            raise UsageError("verify replay needs --file")
        with open(args.file) as fh:
            reports = [V.replay_certificates(json.load(fh))]
    else:
        claims = V.CLAIMS if args.claim == "all" else (args.claim,)
        tasks = []
        for p, k in _grid(args):
            for claim in claims:
                if claim == "nf-unique":
                    tasks.append((V._nf_task, (p, args.n, k, args.samples, args.seed)))
                elif claim == "teoosa" and args.a is not None:
                    tasks.append((V.verify_teoosa, (p, k, args.a, args.b)))
                else:
                    tasks.extend(V.default_tasks(claim, p, k, args.n))
        reports = V.run_tasks(tasks, args.jobs)
    verdicts = [r.verdict for r in reports]
    summary = {v: verdicts.count(v) for v in sorted(set(verdicts))}
    text = "\n".join(f"{r.claim:14s} {json.dumps(r.params, sort_keys=True)}  {r.verdict}" for r in reports)
    _emit(args, [r.to_json(timing=False) for r in reports], text, manifest, summary)
    if any(v == V.FAIL for v in verdicts):
        return EXIT_FAIL
    if any(v == "inconclusive" for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def cmd_families(args, argv) -> int:
    if args.action != "dump":
        raise UsageError("only 'families dump' is supported")
    k = args.k
    cd = {f"{kk},{t}": list(fam.cd(kk, t)) for kk in range(2, k + 2) for t in range(0, kk)}
    pik = {f"{i},{k},{t}": fam.pik(i, k, t) for i in range(0, max(k - 2, 1)) for t in range(0, k)}
    result = {"k": k, "cd": cd, "pik": pik}
    if args.p:
        ctx = ModuleContext(args.p, 2, max(k, 1), args.convention, validate=False)
        result["p"] = args.p
        result["q0"] = [str(fam.q0_eval(i, ctx)) for i in range(args.p - 1)]
        result["u1"] = str(fam.u1(ctx))
    text = "\n".join(f"c,d_{key} = {val}" for key, val in cd.items())
    _emit(args, result, text)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2)
    common.add_argument("--n", type=int, default=2)
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--convention", choices=("unsigned", "signed"), default="unsigned")
    common.add_argument("--vmax", type=int, default=None)
    common.add_argument("--wmax", type=int, default=8)
    common.add_argument("--grid", choices=("single", "desk"), default="single")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", default=None)

    parser = argparse.ArgumentParser(prog="kutoral", description="Computations in F (x) ku_*(Z/p^n) and checks of the associated claims.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("series", parents=[common], help="[p^n]-series coefficients").set_defaults(func=cmd_series)
    for name, fn, desc in (("nf", cmd_nf, "normal form of an element"), ("boundary", cmd_boundary, "boundary d_{k+1}, normalized")):
        sp = sub.add_parser(name, parents=[common], help=desc)
        sp.add_argument("element", help="element text, JSON, file path, or - for stdin")
        sp.set_defaults(func=fn)
    sub.add_parser("ann", parents=[common], help="annihilator staircase of the toral class").set_defaults(func=cmd_ann)
    sub.add_parser("homology", parents=[common], help="per-weight cokernel/kernel invariants").set_defaults(func=cmd_homology)
    sp = sub.add_parser("verify", parents=[common], help="check claims")
    sp.add_argument("claim", choices=V.CLAIMS + ("all", "replay"))
    sp.add_argument("--a", type=int, default=None, help="a-bound for identity checks")
    sp.add_argument("--b", type=int, default=None, help="b-bound for identity checks")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--file", default=None, help="certificate JSON for replay")
    sp.set_defaults(func=cmd_verify)
    sp = sub.add_parser("families", parents=[common], help="recursive family tables")
    sp.add_argument("action", choices=("dump",))
    sp.set_defaults(func=cmd_families)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args, argv)
    except (UsageError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
