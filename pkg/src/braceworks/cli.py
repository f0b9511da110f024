"""Command-line front end.

Reports are JSON documents (or CSV degree tables) rendered deterministically;
field elements appear as exact strings ``"p/q"``.  Finished reports are cached
under ``$BRACEWORKS_CACHE`` (default ``~/.cache/braceworks``).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from typing import Dict, List, Optional

from . import __version__
from .bimod import Algebra, AlgebraError, FreeBimodComplex
from .linalg import Mod

CACHE_ENV = "BRACEWORKS_CACHE"


class UserError(Exception):
    pass


# ------------------------------------------------------------ serialization


def exact(x) -> str:
    if isinstance(x, Mod):
        return f"{x.v}/1"
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def jsonable(x):
    """Plain JSON data with exact scalars; tuples become lists."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, (Fraction, Mod)):
        return exact(x)
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    return repr(x)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if doc.get("degrees"):
        w.writerow(["degree", "dimension", "trusted"])
        for row in doc["degrees"]:
            w.writerow([row["degree"], row["dimension"], str(row["trusted"]).lower()])
    else:
        w.writerow(["check", "pass"])
        for c in doc.get("checks", []):
            w.writerow([c["name"], str(c["pass"]).lower()])
    return buf.getvalue()


def canonical_hash(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


# ------------------------------------------------------------------ inputs


def read_spec(arg: str) -> dict:
    from importlib import resources
    if os.path.exists(arg):
        try:
            with open(arg) as fh:
                return json.load(fh)
        except json.JSONDecodeError as exc:
            raise UserError(f"{arg}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    name = arg[:-5] if arg.endswith(".json") else arg
    try:
        return json.loads(resources.files("braceworks").joinpath("data", name + ".json").read_text())
    except (FileNotFoundError, OSError):
        raise UserError(f"no such file or bundled spec: {arg}") from None


def load_input(arg: str):
    spec = read_spec(arg)
    if not isinstance(spec, dict):
        raise UserError(f"{arg}: an algebra spec must be a JSON object")
    try:
        alg = Algebra.from_spec(spec)
    except AlgebraError as exc:
        raise UserError(f"{arg}: {exc}") from None
    return spec, alg


class FileResolution(FreeBimodComplex):
    """A free resolution read from a JSON document.

    ``{"generators": {"<index>": [names]}, "differential": {name: [[l, name, r, "c"], ...]},
    "augmentation": {name: [[a, "c"], ...]}, "unit": name}``
    """

    name = "file"

    def __init__(self, alg: Algebra, doc: dict):
        try:
            self._gens = {int(k): list(v) for k, v in doc["generators"].items()}
            super().__init__(alg, max(self._gens))
            self._index = {g: k for k, v in self._gens.items() for g in v}
            F = alg.field
            self._d = {g: {(int(l), h, int(r)): F.parse(str(c)) for l, h, r, c in rows}
                       for g, rows in doc.get("differential", {}).items()}
            self._eps = {g: {int(a): F.parse(str(c)) for a, c in rows}
                         for g, rows in doc.get("augmentation", {}).items()}
            self._unit = doc["unit"]
        except (KeyError, TypeError, ValueError) as exc:
            raise UserError(f"malformed resolution document: {exc}") from None
        for g, img in self._d.items():
            for (l, h, r) in img:
                if h not in self._index or self._index[h] != self._index[g] - 1:
                    raise UserError(f"resolution: d({g}) mentions {h} outside index {self._index[g] - 1}")
        if self._unit not in self._gens.get(0, []):
            raise UserError("resolution: unit generator must have index 0")

    def gens(self, k):
        return self._gens.get(k, [])

    def degree(self, g):
        return -self._index[g]

    def d_gen(self, g):
        return dict(self._d.get(g, {}))

    def eps_gen(self, g):
        return dict(self._eps.get(g, {}))

    def unit_gen(self):
        return self._unit


# ---------------------------------------------------------------- commands


def degree_rows(dims: Dict[int, int], trusted) -> List[dict]:
    return [{"degree": q, "dimension": dims[q], "trusted": q in trusted} for q in sorted(dims)]


def _deg_range(args, default_hi):
    lo = 0 if args.degree_min is None else args.degree_min
    hi = default_hi if args.degree_max is None else args.degree_max
    if hi < lo:
        raise UserError("degree-max is smaller than degree-min")
    return lo, hi


def cmd_hochschild(args, alg):
    from .binfty import TruncationWindow
    from .complexes import cohomology_dim
    from .hochbar import hochschild, hochschild_direct
    from .suites import check
    N = args.max_arity
    lo, hi = _deg_range(args, N - 1)
    H = hochschild(alg, TruncationWindow(N))
    dims = H.cohomology(lo, hi)
    trusted = set(range(0, N))
    X = hochschild_direct(alg, max(hi, 0) + 1)
    agree = {q: dims[q] == cohomology_dim(X, q) for q in dims if q in trusted and q >= 0}
    checks = [check("agrees with the classical coboundary on trusted degrees", all(agree.values()),
                    sorted(q for q, v in agree.items() if not v))]
    return {"degrees": degree_rows(dims, trusted), "checks": checks}


def _coalgebra(args, alg):
    from .hochbar import build_bar
    from .lift import PeriodicResolution, lift_coalgebra
    N = args.max_arity
    if args.resolution == "bar":
        return build_bar(alg, N), None
    if args.resolution == "periodic":
        if alg.dim != 2 or alg.mult[1][1]:
            raise UserError("the periodic resolution is only available for k[x]/(x^2)")
        P = PeriodicResolution(alg, N)
        return P, lift_coalgebra(P, args.lift_arity).components
    raise UserError(f"unknown resolution {args.resolution!r}")


def cmd_cohochschild(args, alg):
    from .complexes import cohomology_dim
    from .hochbar import cohochschild, hochschild_direct, projection_p
    from .suites import check
    C, comps = _coalgebra(args, alg)
    N = args.max_arity
    lo, hi = _deg_range(args, N - 1)
    coh = cohochschild(C, comps)
    dims = coh.cohomology(lo, hi)
    trusted = set(range(0, N))
    tl = [q for q in range(max(lo, 0), hi + 1) if q in trusted]
    checks = []
    if tl:
        p = projection_p(coh).check(tl[0], tl[-1])
        checks.append(check("p is a chain map", p["chain_map"]))
        checks.append(check("p is a quasi-isomorphism on trusted degrees", all(p["quasi_iso"].values()),
                            sorted(q for q, v in p["quasi_iso"].items() if not v)))
        X = hochschild_direct(alg, tl[-1] + 1)
        bad = [q for q in tl if dims[q] != cohomology_dim(X, q)]
        checks.append(check("matches Hochschild cohomology of A", not bad, bad))
    return {"degrees": degree_rows(dims, trusted), "checks": checks}


def cmd_schoch(args, alg):
    from .semico import (SchochReport, bar_input, build_schoch, column_collapse_check,
                         projection_morphisms, RelationFailure)
    from .suites import check
    N = args.max_arity
    lo, hi = _deg_range(args, N - 1)
    try:
        inp = bar_input(alg, N)
        S = build_schoch(inp)
    except RelationFailure as exc:
        raise UserError(str(exc)) from None
    dims = S.cohomology(lo, hi)
    trusted = set(S.trusted)
    R = SchochReport(S)
    L = R.equivalences()
    pm = projection_morphisms(inp)
    checks = []
    for p in ("pi_A", "pi_C"):
        pr = L["projections"][p]
        checks.append(check(f"{p} is a chain map", pr["chain_map"]))
        checks.append(check(f"H({p}) is an isomorphism on trusted degrees", pr["iso_all"], pr["quasi_iso"]))
        checks.append(check(f"{p} preserves differential, dot and braces on samples", all(pm[p].values()), pm[p]))
    checks.append(check("H(pi_A) iso iff H(f_MC) iso", L["pi_A iff f_MC"]))
    checks.append(check("H(pi_C) iso iff H(f_AM) iso", L["pi_C iff f_AM"]))
    les = R.long_exact_sequence()
    checks.append(check("long exact sequence of the mid block", les["pass"], les["degrees"]))
    if args.columns:
        cc = column_collapse_check(alg, 2, 0, 4)
        checks.append(check("trivial structure: columns alternate zero / iso and collapse", cc["pass"], cc["sigma"]))
    return {"degrees": degree_rows(dims, trusted), "checks": checks}


def cmd_lift(args, alg):
    from .hochbar import build_bar
    from .lift import (NotACycle, ObstructionNonzero, PeriodicResolution, counit_report, lift_coalgebra,
                       verify_coainfty, bar_seed)
    from .suites import check
    D = args.truncation
    if args.resolution == "bar":
        P = build_bar(alg, D)
        seed = bar_seed(P) if args.seed_bar else None
    elif args.resolution == "periodic":
        if alg.dim != 2 or alg.mult[1][1]:
            raise UserError("the periodic resolution is only available for k[x]/(x^2)")
        P, seed = PeriodicResolution(alg, D), None
    else:
        if not args.resolution_file:
            raise UserError("--resolution file needs --resolution-file")
        P, seed = FileResolution(alg, read_spec(args.resolution_file)), None
    try:
        S = lift_coalgebra(P, args.max_arity, seed=seed)
    except (NotACycle, ObstructionNonzero) as exc:
        return {"checks": [check("lifting solver", False, str(exc))], "data": {}}
    v = verify_coainfty(P, S.components, args.max_arity, S.window)
    cr = counit_report(S)
    checks = [check("obstructions are cocycles", all(S.cycle_checks.values()),
                    sorted(n for n, ok in S.cycle_checks.items() if not ok)),
              check("co-A-infinity identities", v["ok"], v["failures"][:1]),
              check("counit: left identity up to homotopy", cr["left"]["ok"]),
              check("counit: right identity up to homotopy", cr["right"]["ok"])]
    return {"checks": checks, "data": {"components": S.to_json(exact), "log": S.log,
                                       "nonzero_arities": S.nonzero_arities()}}


def cmd_bar(args, alg):
    from .hochbar import build_bar
    from .suites import check
    N = args.max_arity
    B = build_bar(alg, N)
    gens = {str(k): [list(g) for g in B.gens(k)] for k in range(N + 1)}
    diff = {}
    comult = {}
    for k in range(N + 1):
        for g in B.gens(k):
            key = ",".join(map(str, g)) or "()"
            diff[key] = sorted([[l, list(h), r, exact(c)] for (l, h, r), c in B.d_gen(g).items()], key=repr)
            comult[key] = sorted([[list(x) if isinstance(x, tuple) else x for x in ch] + [exact(c)]
                                  for ch, c in B.delta_gen(g).items()], key=repr)
    ver = B.verify(N)
    checks = [check(k, v) for k, v in sorted(ver.items())]
    return {"checks": checks, "data": {"generators": gens, "differential": diff, "comultiplication": comult}}


def cmd_verify(args, alg):
    from .suites import SUITES, run_suite
    if args.suite != "all" and args.suite not in SUITES:
        raise UserError(f"unknown suite {args.suite!r}")
    return {"checks": run_suite(args.suite)}


COMMANDS = {
    "hochschild": cmd_hochschild,
    "cohochschild": cmd_cohochschild,
    "schoch": cmd_schoch,
    "lift": cmd_lift,
    "bar": cmd_bar,
    "verify": cmd_verify,
}


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="braceworks", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"braceworks {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    common.add_argument("--timings", action="store_true", help="print the elapsed time on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_, arity_default, degrees=True, needs_input=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if needs_input:
            p.add_argument("--input", required=True, help="algebra spec file or bundled name")
        if arity_default is not None:
            p.add_argument("--max-arity", type=int, default=arity_default)
        if degrees:
            p.add_argument("--degree-min", type=int)
            p.add_argument("--degree-max", type=int)
        return p

    add("hochschild", "Hochschild cohomology", 4)
    p = add("cohochschild", "co-Hochschild cohomology of a resolution", 5)
    p.add_argument("--resolution", choices=["bar", "periodic"], default="bar")
    p.add_argument("--lift-arity", type=int, default=4)
    p = add("schoch", "semi-co-Hochschild cohomology with M = C = truncated bar", 4)
    p.add_argument("--no-columns", dest="columns", action="store_false")
    p = add("lift", "lift the co-A-infinity structure of a resolution", 4, degrees=False)
    p.add_argument("--resolution", choices=["bar", "periodic", "file"], default="periodic")
    p.add_argument("--resolution-file")
    p.add_argument("--truncation", type=int, default=5)
    p.add_argument("--seed-bar", action="store_true", help="start from the strict bar comultiplication")
    add("bar", "dump the truncated bar resolution", 4, degrees=False)
    p = add("verify", "run a verification suite", None, degrees=False, needs_input=False)
    p.add_argument("--suite", default="all",
                   choices=["signs", "binfty", "table", "dualbar", "counit", "keller", "mc", "sigma", "all"])
    return ap


def _params(args) -> dict:
    skip = {"command", "format", "output", "no_cache", "timings", "input"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cache_dir() -> str:
    return os.environ.get(CACHE_ENV) or os.path.join(os.path.expanduser("~"), ".cache", "braceworks")


def cache_get(key: str) -> Optional[dict]:
    path = os.path.join(cache_dir(), key + ".json")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None


def cache_put(key: str, doc: dict):
    d = cache_dir()
    try:
        os.makedirs(d, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(render(doc, "json"))
        os.replace(tmp, os.path.join(d, key + ".json"))
    except OSError:
        pass  # the cache is an optimisation only


def run(args) -> dict:
    if getattr(args, "input", None):
        spec, alg = load_input(args.input)
        inp = {"name": alg.name, "hash": canonical_hash(spec)}
    else:
        alg, inp = None, {"name": None, "hash": canonical_hash(None)}
    params = _params(args)
    key = canonical_hash([inp["hash"], args.command, params, __version__])[7:]
    if not args.no_cache:
        doc = cache_get(key)
        if doc is not None:
            return doc
    body = COMMANDS[args.command](args, alg)
    checks = body.get("checks", [])
    degrees = body.get("degrees", [])
    doc = {
        "tool": "braceworks",
        "version": __version__,
        "command": args.command,
        "parameters": params,
        "input": inp,
        "degrees": degrees,
        "checks": jsonable(checks),
        "pass": all(c["pass"] for c in checks) and all(r["trusted"] for r in degrees),
    }
    if "data" in body:
        doc["data"] = jsonable(body["data"])
    if not args.no_cache:
        cache_put(key, doc)
    return doc


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        doc = run(args)
    except UserError as exc:
        print(f"braceworks: error: {exc}", file=sys.stderr)
        return 2
    text = render(doc, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.timings:
        print(f"elapsed {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    untrusted = [r["degree"] for r in doc.get("degrees", []) if not r["trusted"]]
    if untrusted:
        print(f"braceworks: degrees {untrusted} lie outside the trusted window", file=sys.stderr)
    return 0 if doc["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
