"""Verification suites shared by the command line and the test-suite.

Every suite returns a list of checks ``{"name", "pass", "witness"}``; the
witness is ``None`` on success and a short locator of the first failure
otherwise.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, Dict, List, Optional

from .bimod import Algebra, ChainWorld, _add, bundled_names, load_algebra
from .binfty import BInftyElement, Cotensor, TruncationWindow, brace_eval, q1_eval
from .graded import (GradedMap, GradedModule, koszul_sign, koszul_sign_inversions, sgn,
                     shift_operation, tensor_apply_sign, tensor_many)

Check = Dict[str, object]


def check(name: str, ok: bool, witness=None, found=None) -> Check:
    """``witness`` locates a failure; ``found`` is an exhibited object reported either way."""
    out = {"name": name, "pass": bool(ok), "witness": None if ok else witness}
    if found is not None:
        out["found"] = found
    return out


# ---------------------------------------------------------------- signs


def b2_identity(alg: Algebra) -> Optional[tuple]:
    """b2 (b2 (x) id) + b2 (id (x) b2) on (Sigma A)^3; first nonzero word or None."""
    A = GradedModule({0: list(range(alg.dim))})
    m = GradedMap.from_function(tensor_many([A, A]), tensor_many([A]), 0,
                                lambda w: {(k,): c for k, c in alg.mul(w[0], w[1]).items()}, alg.field)
    b2 = shift_operation(m, 2, 1, 1)

    def b(x, y):
        return {z[0]: c for z, c in b2.apply_label((x, y), -2).items()}

    for w in itertools.product(range(alg.dim), repeat=3):
        out = {}
        for k, c in b(w[0], w[1]).items():
            for z, c2 in b(k, w[2]).items():
                _add(out, z, c * c2)
        s = tensor_apply_sign([0, b2.degree], [-1, -2])
        for k, c in b(w[1], w[2]).items():
            for z, c2 in b(w[0], k).items():
                _add(out, z, s * c * c2)
        if out:
            return w
    return None


def _random_map(rng, m: int, n: int):
    X = GradedModule({0: ["x0", "x1"], 1: ["x2"]})
    Y = GradedModule({0: ["y0"], -1: ["y1", "y2"]})
    S, T = tensor_many([X] * m), tensor_many([Y] * n)
    deg = rng.choice([-1, 0, 1])
    tl = {d: T.basis(d) for d in T.degrees()}

    def fn(word):
        d = sum(X.degree_of(l) for l in word) + deg
        pool = tl.get(d, [])
        if not pool or rng.random() < 0.3:
            return {}
        return {rng.choice(pool): rng.choice([-1, 1, 2])}

    return GradedMap.from_function(S, T, deg, fn)


def suite_signs(samples: int = 1000, seed: int = 0) -> List[Check]:
    rng = random.Random(seed)
    out = []
    bad = {}
    for name in bundled_names():
        w = b2_identity(load_algebra(name))
        if w is not None:
            bad[name] = list(w)
    out.append(check("b2 o (b2 (x) id) + b2 o (id (x) b2) = 0 on every bundled algebra", not bad, bad))
    wit = None
    for trial in range(12):
        m, n = rng.choice([(1, 1), (2, 1), (1, 2), (2, 2)])
        f = _random_map(rng, m, n)
        for a, b in ((1, 1), (1, -1), (-1, 2), (2, -1), (-2, 1)):
            lhs = shift_operation(shift_operation(f, m, n, a), m, n, b)
            rhs = shift_operation(f, m, n, a + b)
            ok = lhs.degree == rhs.degree and all(
                lhs.apply_label(l) == rhs.apply_label(l) for d in lhs.source.degrees() for l in lhs.source.basis(d))
            if not ok and wit is None:
                wit = {"trial": trial, "a": a, "b": b}
    out.append(check("Xi^a o Xi^b = Xi^(a+b)", wit is None, wit))
    wit = None
    for i in range(samples):
        k = rng.randint(0, 6)
        degs = [rng.randint(-3, 3) for _ in range(k)]
        tau = list(range(k))
        sigma = list(range(k))
        rng.shuffle(tau)
        rng.shuffle(sigma)
        rho = [tau[j] for j in sigma]
        mid = [degs[t] for t in tau]
        ok = (koszul_sign(rho, degs) == koszul_sign(tau, degs) * koszul_sign(sigma, mid)
              and koszul_sign(rho, degs) == koszul_sign_inversions(rho, degs))
        if not ok and wit is None:
            wit = {"sample": i, "tau": tau, "sigma": sigma, "degrees": degs}
    out.append(check(f"koszul_sign decomposition-independence on {samples} permutations", wit is None, wit))
    return out


# -------------------------------------------------------------- B-infinity


def _lazy(world, fn: Callable, degree: int, shapes):
    from .semico import lazy_element
    return lazy_element(world, fn, degree, shapes)


def _dot(world, u, v, shapes):
    return _lazy(world, lambda t: brace_eval(world, [u], [v], t), u.degree + v.degree, shapes)


def _br(world, u, v, shapes):
    s = -sgn(u.degree * v.degree)

    def fn(t):
        out = dict(brace_eval(world, [u], [v], t))
        for y, c in brace_eval(world, [v], [u], t).items():
            _add(out, y, s * c)
        return out
    return _lazy(world, fn, u.degree + v.degree, shapes)


def _ev(el, t):
    return el.evaluate(t)


def _lin(*terms):
    out = {}
    for c, res in terms:
        for y, v in res.items():
            _add(out, y, c * v)
    return out


def _samples_hoch(world, rng):
    from .hochbar import random_hoch_cochain
    return [random_hoch_cochain(world, m, rng) for m in (0, 1, 2, 1)]


def _samples_cohoch(C, world, rng, K):
    from .hochbar import sample_cochain
    return [s for s in (sample_cochain(C, world, d, rng, K, max_n=2) for d in (0, 1, -1, 0)) if s.comps]


def suite_binfty(max_arity: int = 4, seed: int = 0) -> List[Check]:
    """Brace axioms on C_Hoch(k[x]/(x^2)), arity <= max_arity (derivation also on coHoch(B~A))."""
    from .bimod import dual_numbers
    from .hochbar import build_bar, coalgebra_inputs, letter_inputs, xi_algebra
    rng = random.Random(seed)
    A = dual_numbers()
    W = ChainWorld(A)
    hshapes = [("A",) * m for m in range(max_arity + 2)]
    ins = letter_inputs(A, max_arity)
    xs = _samples_hoch(W, rng)
    out = []

    # Q^1 derivation law for dot, on both sides of the duality
    B = build_bar(A, max_arity + 1)
    WC = ChainWorld(A, None, B)
    cshapes = [("C",)]
    cs = _samples_cohoch(B, WC, rng, max_arity - 1)
    cins = coalgebra_inputs(B, max_arity)
    wit = None
    for world, els, shapes, pts in ((W, xs, hshapes, ins), (WC, cs, cshapes, cins)):
        for u, v in itertools.product(els, repeat=2):
            uv = _dot(world, u, v, shapes)
            Qu = _lazy(world, lambda t, u=u: q1_eval(world, u, t), u.degree + 1, shapes)
            Qv = _lazy(world, lambda t, v=v: q1_eval(world, v, t), v.degree + 1, shapes)
            for t in pts:
                lhs = q1_eval(world, uv, t)
                rhs = _lin((1, brace_eval(world, [Qu], [v], t)), (sgn(u.degree), brace_eval(world, [u], [Qv], t)))
                if lhs != rhs and wit is None:
                    wit = {"input": repr(t)}
    out.append(check("Q^1 is a derivation of the dot product", wit is None, wit))

    # pre-Lie: assoc(u,v,w) antisymmetric in (v, w)
    wit = None
    for u, v, w in itertools.product(xs[:3], repeat=3):
        uv, vw, uw, wv = (_dot(W, a, b, hshapes) for a, b in ((u, v), (v, w), (u, w), (w, v)))
        for t in ins:
            a1 = _lin((1, brace_eval(W, [uv], [w], t)), (-1, brace_eval(W, [u], [vw], t)))
            a2 = _lin((1, brace_eval(W, [uw], [v], t)), (-1, brace_eval(W, [u], [wv], t)))
            if _lin((1, a1), (-sgn(v.degree * w.degree), a2)) and wit is None:
                wit = {"input": repr(t)}
    out.append(check("pre-Lie associator antisymmetry", wit is None, wit))

    # Jacobi
    wit = None
    for u, v, w in itertools.product(xs[:3], repeat=3):
        l1 = _br(W, u, _br(W, v, w, hshapes), hshapes)
        l2 = _br(W, _br(W, u, v, hshapes), w, hshapes)
        l3 = _br(W, v, _br(W, u, w, hshapes), hshapes)
        for t in ins:
            r = _lin((1, _ev(l1, t)), (-1, _ev(l2, t)), (-sgn(u.degree * v.degree), _ev(l3, t)))
            if r and wit is None:
                wit = {"input": repr(t)}
    out.append(check("Jacobi identity for the bracket", wit is None, wit))

    # associativity of m on T^c, words of length <= 3
    from .binfty import Basis
    T = Cotensor(W, ins, 3, max_arity)
    Bs = Basis(W)
    keys = []
    for x in xs:
        keys += sorted(Bs.expand(x), key=repr)[:2]
    wit = None
    for a, b, c in itertools.product(keys[:5], repeat=3):
        X, Y, Z = {(a,): 1}, {(b,): 1}, {(c,): 1}
        if T.m(T.m(X, Y), Z) != T.m(X, T.m(Y, Z)) and wit is None:
            wit = {"words": [repr(a), repr(b), repr(c)]}
    out.append(check("associativity of the assembled product m (word length <= 3)", wit is None, wit))

    # Q_xi^2 = 0
    xi = xi_algebra(W)

    def D(v):
        def fn(t):
            res = dict(q1_eval(W, v, t))
            for y, c in brace_eval(W, [xi], [v], t).items():
                _add(res, y, c)
            for y, c in brace_eval(W, [v], [xi], t).items():
                _add(res, y, -sgn(v.degree) * c)
            return res
        return _lazy(W, fn, v.degree + 1, hshapes)

    wit = None
    for v in xs:
        DD = D(D(v))
        for t in ins:
            if DD.evaluate(t) and wit is None:
                wit = {"input": repr(t)}
    out.append(check("Q_xi^2 = 0", wit is None, wit))
    return out


# -------------------------------------------------------------- assorted


def suite_table() -> List[Check]:
    from .semico import verify_composition_table
    r = verify_composition_table()
    bad = [k for k, v in r["entries"].items() if not v["pass"]]
    return [check(f"composition table: {len(r['entries'])} type pairs", not bad, bad[:3]),
            check("connection arity one", r["connection_arity_one"]),
            check("M is an ideal", r["ideal"]),
            check("decomposition A (+) M (+) C", r["decomposition"])]


def suite_dualbar(N: int = 5) -> List[Check]:
    from .hochbar import dual_bar_check
    bad = {n: r for n in bundled_names() if not (r := dual_bar_check(load_algebra(n), N))["commutes"]}
    return [check(f"Hom(B~A, Sigma A) = Sigma C_Hoch(A) commutes with differentials (arity <= {N - 1})",
                  not bad, sorted(bad))]


def suite_counit(N: int = 5) -> List[Check]:
    from .hochbar import counit_check
    bad = {}
    for n in bundled_names():
        r = counit_check(load_algebra(n), N)
        if not r["acyclic"]:
            bad[n] = {str(q): v for q, v in r["cone_dims"].items() if v and q in r["trusted"]}
    return [check(f"cone of the counit acyclic in trusted degrees (N = {N})", not bad, bad)]


def suite_keller(names=("dual", "product"), N: int = 2) -> List[Check]:
    from .bimod import UnitComplex
    from .hochbar import build_bar
    from .semico import FreeModule, keller_check
    out = []
    for name in names:
        A = load_algebra(name)
        X = FreeModule(A, {0: ["*"]})
        Z = FreeModule(A, {})
        B = build_bar(A, N + 4)
        for side in ("left", "right"):
            r = keller_check(UnitComplex(A), X, X, side, 0, lo=0, hi=2)
            out.append(check(f"{name}: M = A satisfies the {side} condition", r["pass"], r["degrees"]))
            r = keller_check(B, X, X, side, N)
            out.append(check(f"{name}: M = B~A satisfies the {side} condition (zigzag)", r["pass"] and r["zigzag"],
                             r["degrees"]))
        r = keller_check(Z, Z, Z, "left", 0, lo=0, hi=1)
        out.append(check(f"{name}: zero module, vacuous", r["pass"] and r["vacuous"]))
        r = keller_check(FreeModule(A, {0: ["m"]}), X, X, "left", 0, lo=0, hi=1)
        out.append(check(f"{name}: free A (x) A fails the left condition (control)", not r["pass"]))
    return out


def suite_mc(name: str = "dual", N: int = 3) -> List[Check]:
    from .semico import bar_input, negative_controls
    inp = bar_input(load_algebra(name), N)
    rel = inp.relations()
    res = inp.residual()
    nc = negative_controls(inp)
    out = [check("the five relations hold", all(rel.values()), [k for k, v in rel.items() if not v]),
           check("MC residual vanishes", all(res.values()), [k for k, v in res.items() if not v])]
    for r in ("Assoc(m)", "Assoc(m,mu)", "Coassoc(Delta)", "Coassoc(Delta,delta)", "Comp(mu,delta)"):
        v = nc["controls"].get(r)
        ok = v is not None and v["agree"] and r in v["residual"]
        out.append(check(f"perturbation breaking {r} is seen by the residual", ok, v))
    return out


def suite_sigma(seed: int = 0) -> List[Check]:
    from .bimod import dual_numbers
    from .hochbar import random_hoch_cochain, sigma
    rng = random.Random(seed)
    S = sigma(dual_numbers())
    hs = [random_hoch_cochain(S.hw, m, rng) for m in (0, 1, 2)]
    chain = [S.check_chain(h) for h in hs]
    br = [S.check_bracket(u, v) for u in hs for v in hs]
    wit = S.dot_witness(hs)
    return [check("sigma commutes with the differentials", all(chain), chain.index(False) if False in chain else None),
            check("sigma preserves brackets", all(br), br.index(False) if False in br else None),
            check("sigma fails to preserve the dot product (witness found)", wit is not None, None,
                  None if wit is None else {"u_arity": [0, 1, 2][wit[0]], "v_arity": [0, 1, 2][wit[1]], "seed": seed})]


def suite_lift(D: int = 5, max_arity: int = 4) -> List[Check]:
    from .bimod import dual_numbers
    from .lift import (NotACycle, ObstructionNonzero, PeriodicResolution, corrupt, lift_coalgebra,
                       verify_coainfty)
    P = PeriodicResolution(dual_numbers(), D)
    try:
        S = lift_coalgebra(P, max_arity)
    except (NotACycle, ObstructionNonzero) as exc:
        return [check("lifting solver", False, str(exc))]
    v = verify_coainfty(P, S.components, max_arity, S.window)
    bad = corrupt(P, S.components, 3)
    v2 = verify_coainfty(P, bad, max_arity, S.window)
    loc = v2["failures"][0] if v2["failures"] else None
    return [check(f"obstructions are cocycles (n <= {max_arity})", all(S.cycle_checks.values())),
            check("all obstructions solvable", True),
            check("output satisfies the co-A-infinity identities", v["ok"], v["failures"][:1]),
            check("corrupted xi fails with a located identity", not v2["ok"] and loc is not None,
                  None if loc is None else {"identity": loc["identity"]})]


def suite_cohoch(N: int = 5) -> List[Check]:
    from .bimod import dual_numbers
    from .hochbar import build_bar, cohochschild, periodic_oracle, projection_p
    A = dual_numbers()
    coh = cohochschild(build_bar(A, N))
    rep = coh.report()
    hi = max(rep)
    orc = periodic_oracle(A, hi)
    p = projection_p(coh).check(0, hi)
    return [check("p is a chain map", p["chain_map"]),
            check("p is a quasi-isomorphism on trusted degrees", all(p["quasi_iso"].values()),
                  {str(q): v for q, v in p["quasi_iso"].items() if not v}),
            check("H(coHoch(B~A)) matches the Hochschild oracle", all(rep[q] == orc[q] for q in rep),
                  {"computed": rep, "oracle": orc})]


def suite_schoch(names=("dual", "product"), N: int = 4, cols: int = 4) -> List[Check]:
    from .semico import (SchochReport, bar_input, build_schoch, column_collapse_check,
                         projection_morphisms)
    out = []
    for name in names:
        A = load_algebra(name)
        inp = bar_input(A, N)
        S = build_schoch(inp)
        R = SchochReport(S)
        L = R.equivalences()
        pm = projection_morphisms(inp)
        for p in ("pi_A", "pi_C"):
            pr = L["projections"][p]
            out.append(check(f"{name}: {p} is a chain map on the line complex", pr["chain_map"]))
            out.append(check(f"{name}: H({p}) iso on trusted degrees", pr["iso_all"], pr["quasi_iso"]))
            out.append(check(f"{name}: {p} preserves the differential, dot and braces on samples",
                             all(pm[p].values()), pm[p]))
        out.append(check(f"{name}: pi_A iso iff f_MC iso; pi_C iso iff f_AM iso", L["pass"]))
        les = R.long_exact_sequence()
        out.append(check(f"{name}: long exact sequence dimension count", les["pass"], les["degrees"]))
        cc = column_collapse_check(A, 2, 0, cols)
        out.append(check(f"{name}: columns alternate zero / iso and collapse to column 0", cc["pass"], cc["sigma"]))
    return out


def suite_hochschild() -> List[Check]:
    from .hochbar import hochschild, periodic_oracle
    dual = load_algebra("dual")
    h = hochschild(dual, TruncationWindow(5)).report()
    orc = periodic_oracle(dual, 3)
    g = hochschild(load_algebra("ground"), TruncationWindow(5)).report()
    p = hochschild(load_algebra("product"), TruncationWindow(5)).report()
    return [check("HH(k[x]/(x^2)) = 2,1,1,1 and matches the oracle",
                  [h[q] for q in range(4)] == [2, 1, 1, 1] == [orc[q] for q in range(4)], {"computed": h}),
            check("HH(k) = 1,0,0,0", [g[q] for q in range(4)] == [1, 0, 0, 0], g),
            check("HH^{>0}(k x k) = 0", all(v == 0 for q, v in p.items() if q > 0), p)]


SUITES = {
    "signs": suite_signs,
    "binfty": suite_binfty,
    "table": suite_table,
    "dualbar": suite_dualbar,
    "counit": suite_counit,
    "keller": suite_keller,
    "mc": suite_mc,
    "sigma": suite_sigma,
}


def run_suite(name: str) -> List[Check]:
    if name == "all":
        out = []
        for key, fn in SUITES.items():
            out += [dict(c, name=f"{key}: {c['name']}") for c in fn()]
        return out
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
