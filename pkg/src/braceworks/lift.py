"""Lifting the trivial coalgebra on A to an A-infinity coalgebra on a resolution.

Given a free bimodule resolution P -> A we look for operations
xi_n : Sigma^{-1} P -> (Sigma^{-1} P)^{(x)_A n}, n >= 2, of degree 1 with

    Q^1(xi) + xi . xi = 0,        xi = sum_n xi_n,

and xi_2 lifting the identity of A (x)_A A = A through eps (x) eps.  In
arity n the equation reads Q^1(xi_n) = pi_n with

    pi_n = - sum_{i + j = n + 1} xi_i . xi_j      (2 <= i, j < n),

and pi_n is a cycle once the lower arities are solved.  We solve one
generator at a time, increasing index, so a larger truncation only ever
adds components.  Free variables are set to zero (first-pivot elimination).

Window: with P truncated at index D, xi_n(g) lands in chains of total index
``index(g) + n - 2``, so xi_n is computed on generators of index <= D - n + 2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .bimod import Algebra, ChainWorld, FreeBimodComplex, PeriodicResolution, _add
from .binfty import BInftyElement, brace_eval, q1_eval
from .graded import sgn
from .hochbar import BarResolution, xi_coalgebra
from .linalg import Inconsistent, SparseMatrix, solve
from .properad import Op, Signature


class ObstructionNonzero(ArithmeticError):
    """The obstruction pi_n is not a boundary: the hypotheses fail."""


class NotACycle(AssertionError):
    """Q^1(pi_n) != 0, which signals a sign error somewhere upstream."""


class TrivialResolution(FreeBimodComplex):
    """A = k resolved by itself: one generator in degree 0."""

    name = "trivial"

    def __init__(self, alg: Algebra, max_index: Optional[int] = 0):
        if alg.dim != 1:
            raise ValueError("the trivial resolution needs a one-dimensional algebra")
        super().__init__(alg, max_index)

    def gens(self, k):
        return [("e", 0)] if k == 0 else []

    def degree(self, g):
        return 0

    def d_gen(self, g):
        return {}

    def eps_gen(self, g):
        return {0: 1}

    def unit_gen(self):
        return ("e", 0)


def resolution(alg: Algebra, kind: str, D: int) -> FreeBimodComplex:
    if kind == "bar":
        return BarResolution(alg, D)
    if kind == "periodic":
        return PeriodicResolution(alg, D)
    if kind == "trivial":
        return TrivialResolution(alg)
    raise ValueError(f"unknown resolution {kind!r}")


@dataclass
class LiftState:
    P: FreeBimodComplex
    components: Dict[int, Dict[object, Dict[tuple, object]]]
    obstructions: Dict[int, Dict[object, Dict[tuple, object]]]
    cycle_checks: Dict[int, bool]
    window: Dict[int, int]
    max_arity: int
    log: List[str] = field(default_factory=list)

    def xi(self, world=None) -> BInftyElement:
        world = world or ChainWorld(self.P.alg, None, self.P)
        return xi_coalgebra(world, self.P, components=self.components)

    def nonzero_arities(self) -> List[int]:
        return sorted(n for n, d in self.components.items() if any(d.values()))

    def to_json(self, fmt) -> dict:
        out = {}
        for n in sorted(self.components):
            rows = []
            for g in sorted(self.components[n], key=repr):
                for seg, c in sorted(self.components[n][g].items(), key=lambda kv: repr(kv[0])):
                    rows.append({"generator": _label(g), "chain": [_label(x) for x in seg], "coefficient": fmt(c)})
            out[str(n)] = {"window": self.window[n], "entries": rows,
                           "obstruction_is_cycle": self.cycle_checks.get(n, True)}
        return out


def _label(x):
    if isinstance(x, tuple):
        return [_label(y) for y in x]
    return x


def _chains(P: FreeBimodComplex, n: int, J: int):
    """All chains (c0, g1, c1, ..., gn, cn) with generator indices summing to J."""
    d = P.alg.dim
    for parts in _compositions(J, n):
        gl = [P.gens(p) for p in parts]
        if any(not g for g in gl):
            continue
        for gs in itertools.product(*gl):
            for cs in itertools.product(range(d), repeat=n + 1):
                ch = (cs[0],)
                for g, c in zip(gs, cs[1:]):
                    ch += (g, c)
                yield ch


def _compositions(J, n):
    if n == 0:
        if J == 0:
            yield ()
        return
    if n == 1:
        yield (J,)
        return
    for a in range(J + 1):
        for rest in _compositions(J - a, n - 1):
            yield (a,) + rest


def _element(world, n, data, degree=1):
    sig = Signature(("C",), ("C",) * n)
    return BInftyElement.single(world, Op.from_data(sig, degree, data, "f"))


def _gen_input(g):
    return ((), (0, g, 0), False)


def _partial_xi(world, components) -> Dict[int, BInftyElement]:
    return {n: _element(world, n, d) for n, d in components.items() if d}


def obstruction_at(world, comps: Dict[int, BInftyElement], n: int, g) -> Dict[tuple, object]:
    """pi_n(g) = -sum xi_i . xi_j (g) over i + j = n + 1, i, j >= 2."""
    out = {}
    t = _gen_input(g)
    for i in range(2, n):
        j = n + 1 - i
        if i not in comps or j not in comps:
            continue
        for y, c in brace_eval(world, [comps[i]], [comps[j]], t).items():
            if len(y[1]) == 2 * n + 1:
                _add(out, y[1], -c)
    return out


def lift_coalgebra(P: FreeBimodComplex, max_arity: int = 4, D: Optional[int] = None,
                   seed: Optional[Dict[int, Dict[object, Dict[tuple, object]]]] = None) -> LiftState:
    """Solve for xi_2..xi_{max_arity} on P truncated at index D.

    Arities present in ``seed`` are taken as given (their obstructions are
    still computed and checked to be cycles and to vanish against Q^1).
    """
    seed = seed or {}
    D = P.max_index if D is None else D
    if D is None:
        raise ValueError("truncate the resolution first")
    world = ChainWorld(P.alg, None, P)
    field_ = P.alg.field
    unit = P.unit_gen()
    comps: Dict[int, Dict[object, Dict[tuple, object]]] = {}
    obstructions: Dict[int, Dict[object, Dict[tuple, object]]] = {}
    cycles: Dict[int, bool] = {}
    window: Dict[int, int] = {}
    log = []
    for n in range(2, max_arity + 1):
        Kn = D - n + 2
        window[n] = Kn
        lower = _partial_xi(world, comps)
        data: Dict[object, Dict[tuple, object]] = {}
        pis: Dict[object, Dict[tuple, object]] = {}
        if n == 2:
            data[unit] = {(0, unit, 0, unit, 0): 1}
        for k in range(0, Kn + 1):
            for g in P.gens(k):
                pi = obstruction_at(world, lower, n, g)
                if pi:
                    pis[g] = pi
        # Q^1 pi_n = 0 is the regression tripwire
        if pis:
            pel = _element(world, n, pis, 2)
            ok = all(not q1_eval(world, pel, _gen_input(g))
                     for k in range(0, Kn + 1) for g in P.gens(k))
        else:
            ok = True
        cycles[n] = ok
        if not ok:
            raise NotACycle(f"Q^1(pi_{n}) != 0")
        obstructions[n] = pis
        if n in seed:
            comps[n] = seed[n]
            res = verify_coainfty(P, {**comps}, n, {m: window[m] for m in window})
            if not res["ok"]:
                raise ObstructionNonzero(f"seeded arity {n} does not solve its equation")
            log.append(f"arity {n}: seeded")
            continue
        for k in range(0, Kn + 1):
            for g in P.gens(k):
                if n == 2 and g == unit:
                    continue
                sol = _solve_at(world, P, n, k, g, data, pis.get(g, {}), field_)
                if sol:
                    data[g] = sol
        comps[n] = data
        log.append(f"arity {n}: {sum(len(v) for v in data.values())} entries on index <= {Kn}")
    return LiftState(P, comps, obstructions, cycles, window, max_arity, log)


def _solve_at(world, P, n, k, g, known, pi_g, field_):
    """Find xi_n(g) with Q^1(xi_n)(g) = pi_n(g), lower generators fixed."""
    t = _gen_input(g)
    base = _element(world, n, known) if known else None
    rhs = dict(pi_g)
    if base is not None:
        for y, c in q1_eval(world, base, t).items():
            _add(rhs, y[1], -c)
    unknowns = list(_chains(P, n, k + n - 2))
    if not unknowns:
        if rhs:
            raise ObstructionNonzero(f"arity {n}, generator {g!r}: nothing to solve with")
        return {}
    rows: Dict[tuple, int] = {}
    ent = {}
    for ci, seg in enumerate(unknowns):
        el = _element(world, n, {g: {seg: 1}})
        for y, c in q1_eval(world, el, t).items():
            r = rows.setdefault(y[1], len(rows))
            _add(ent, (r, ci), c)
    for y in rhs:
        rows.setdefault(y, len(rows))
    M = SparseMatrix(len(rows), len(unknowns), ent, field_)
    b = [0] * len(rows)
    for y, c in rhs.items():
        b[rows[y]] = c
    try:
        x = solve(M, b)
    except Inconsistent:
        raise ObstructionNonzero(f"arity {n}, generator {g!r}: obstruction class nonzero")
    return {unknowns[i]: v for i, v in enumerate(x) if v}


# ------------------------------------------------------------- verification


def verify_coainfty(P: FreeBimodComplex, components, max_arity: int,
                    window: Optional[Dict[int, int]] = None) -> Dict[str, object]:
    """All co-Stasheff identities through ``max_arity`` on the trusted generators.

    Identity n is the arity-n part of Q^1(xi) + xi . xi; for a strict
    coalgebra these are d^2 = 0 (n = 1, automatic), co-Leibniz (n = 2) and
    coassociativity (n = 3).
    """
    world = ChainWorld(P.alg, None, P)
    D = P.max_index
    comps = _partial_xi(world, components)
    failures = []
    checked = 0
    for n in range(2, max_arity + 1):
        Kn = window[n] if window and n in window else D - n + 2
        for k in range(0, Kn + 1):
            for g in P.gens(k):
                t = _gen_input(g)
                acc = {}
                if n in comps:
                    for y, c in q1_eval(world, comps[n], t).items():
                        _add(acc, y[1], c)
                for i in range(2, n):
                    j = n + 1 - i
                    if i in comps and j in comps:
                        for y, c in brace_eval(world, [comps[i]], [comps[j]], t).items():
                            if len(y[1]) == 2 * n + 1:
                                _add(acc, y[1], c)
                checked += 1
                if acc:
                    ch, c = sorted(acc.items(), key=lambda kv: repr(kv[0]))[0]
                    failures.append({"identity": n, "generator": g, "chain": ch, "value": c})
    return {"ok": not failures, "failures": failures, "checked": checked}


def corrupt(P: FreeBimodComplex, components, n: int, delta=1):
    """Perturb the first entry of xi_n (or create one) for a negative control."""
    out = {m: {g: dict(v) for g, v in d.items()} for m, d in components.items()}
    d = out.setdefault(n, {})
    if d and any(d.values()):
        g = sorted((h for h in d if d[h]), key=repr)[0]
        seg = sorted(d[g], key=repr)[0]
    else:
        g = P.unit_gen()
        seg = first_chain(P, n, g)
    _add(d.setdefault(g, {}), seg, delta)
    return out


def corrupt_at(P, components, n: int, g, seg, delta=1):
    out = {m: {h: dict(v) for h, v in d.items()} for m, d in components.items()}
    row = out.setdefault(n, {}).setdefault(g, {})
    _add(row, seg, delta)
    return out


def first_chain(P: FreeBimodComplex, n: int, g) -> tuple:
    return next(iter(_chains(P, n, P.index(g) + n - 2)))


# ---------------------------------------------------------------- counit


def counit_maps(P: FreeBimodComplex, components) -> Tuple[dict, dict]:
    """(eps (x) id) xi_2 and (-1)^index (id (x) eps) xi_2 on generators."""
    A = P.alg
    left, right = {}, {}
    for g, im in components.get(2, {}).items():
        for seg, c in im.items():
            c0, g1, c1, g2, c2 = seg
            for x, cx in P.eps_gen(g1).items():
                for y, cy in _mul3(A, c0, x, c1).items():
                    _add(left.setdefault(g, {}), (y, g2, c2), c * cx * cy)
            for x, cx in P.eps_gen(g2).items():
                for y, cy in _mul3(A, c1, x, c2).items():
                    _add(right.setdefault(g, {}), (c0, g1, y), sgn(P.index(g)) * c * cx * cy)
    return left, right


def _mul3(A, a, b, c):
    out = {}
    for k, x in A.mult[a][b].items():
        for l, y in A.mult[k][c].items():
            _add(out, l, x * y)
    return out


def counit_homotopy(P: FreeBimodComplex, F: dict, D: Optional[int] = None) -> Dict[str, object]:
    """Solve d h + h d = F - id for a bimodule map h of degree -1, generator by generator.

    Returns the homotopy (empty when F = id on the nose).  Generators of the
    top index are skipped: h there would need index D + 1.
    """
    A = P.alg
    D = P.max_index if D is None else D
    h: Dict[object, Dict[tuple, object]] = {}
    exact = True
    for k in range(0, D):
        for g in P.gens(k):
            target = dict(F.get(g, {}))
            _add(target, (0, g, 0), -1)
            # subtract h(d g)
            for (l, g2, r), c in P.d_gen(g).items():
                for (a, g3, b), c2 in h.get(g2, {}).items():
                    for x, cx in A.mul(l, a).items():
                        for y, cy in A.mul(b, r).items():
                            _add(target, (x, g3, y), -c * c2 * cx * cy)
            if target:
                exact = False
            unknowns = [(a, g2, b) for g2 in P.gens(k + 1) for a in range(A.dim) for b in range(A.dim)]
            rows: Dict[tuple, int] = {}
            ent = {}
            for ci, (a, g2, b) in enumerate(unknowns):
                for lab, c in P.d_elem(a, g2, b).items():
                    _add(ent, (rows.setdefault(lab, len(rows)), ci), c)
            for lab in target:
                rows.setdefault(lab, len(rows))
            M = SparseMatrix(len(rows), len(unknowns), ent, A.field)
            bvec = [0] * len(rows)
            for lab, c in target.items():
                bvec[rows[lab]] = c
            try:
                x = solve(M, bvec)
            except Inconsistent:
                return {"ok": False, "generator": g, "homotopy": h, "exact": False}
            sol = {unknowns[i]: v for i, v in enumerate(x) if v}
            if sol:
                h[g] = sol
    return {"ok": True, "homotopy": h, "exact": exact}


def counit_report(state: LiftState) -> Dict[str, object]:
    left, right = counit_maps(state.P, state.components)
    return {"left": counit_homotopy(state.P, left), "right": counit_homotopy(state.P, right)}


def bar_seed(B: BarResolution) -> Dict[int, Dict[object, Dict[tuple, object]]]:
    """The strict shifted comultiplication of the bar resolution as arity-2 data."""
    return {2: {w: B.xi_gen(w) for k in range(0, B.max_index + 1) for w in B.gens(k)}}
