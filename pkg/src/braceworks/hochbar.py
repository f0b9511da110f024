"""Hochschild and co-Hochschild complexes, the bar resolution and friends.

Everything is computed in the bimodule tensor model (``bimod.ChainWorld``)
with the brace engine of ``binfty``:

* Hochschild cochains are operations on letters (elements of Sigma A);
  the differential is ``[xi_A, -]`` with ``xi_A = b_2``.
* co-Hochschild cochains of a free dg-coalgebra C are operations from one
  desuspended C leg to n of them; the differential is ``Q^1 + [xi_C, -]``.

Cohomology of the (infinite) co-Hochschild complex is computed by the
first-order method: filter by ``source index + number of outputs``.  The
associated graded differential is post-composition with d on the outputs,
whose cohomology is ``Hom_k(generators, A)`` sitting on the line
``degree = filtration``.  The spectral sequence therefore collapses after
one step and H is the cohomology of the induced differential
``d' = p D i`` on that line.  ``d'`` in degree q only involves generators
of index at most q + 1, which gives the trusted window.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .bimod import (Algebra, ChainWorld, FreeBimodComplex, PeriodicResolution, UnitComplex,
                    _add)
from .binfty import BInftyElement, Twisted, TruncationWindow, brace_eval, twisted_operation
from .complexes import ChainMap, Complex, DegreeWindow, cohomology_dim, cone, is_quasi_iso
from .graded import sgn
from .linalg import SparseMatrix
from .properad import Op, Signature


# ------------------------------------------------------------ bar resolution


class BarResolution(FreeBimodComplex):
    """B~A = A (x) (Sigma A)^{(x) n} (x) A, truncated at word length ``max_index``.

    Generators are words of basis indices.  The differential on 1 (x) w (x) 1
    multiplies the first letter out to the left, the last out to the right
    and adjacent letters together in between.
    """

    name = "bar"

    def __init__(self, alg: Algebra, max_index: Optional[int] = None):
        super().__init__(alg, max_index)
        self._gens = {}

    def gens(self, k):
        if k < 0 or (self.max_index is not None and k > self.max_index):
            return []
        g = self._gens.get(k)
        if g is None:
            g = self._gens[k] = [tuple(w) for w in itertools.product(range(self.alg.dim), repeat=k)]
        return g

    def degree(self, g):
        return -len(g)

    def d_gen(self, w):
        n = len(w)
        out = {}
        if n == 0:
            return out
        mt = self.alg.mult
        _add(out, (w[0], w[1:], 0), 1)
        for i in range(1, n):
            s = sgn(i)
            for k, c in mt[w[i - 1]][w[i]].items():
                _add(out, (0, w[:i - 1] + (k,) + w[i + 1:], 0), s * c)
        _add(out, (0, w[:-1], w[-1]), sgn(n))
        return out

    def eps_gen(self, w):
        return {0: 1} if not w else {}

    def unit_gen(self):
        return ()

    def delta_gen(self, w) -> Dict[tuple, object]:
        """Delta(1 (x) w (x) 1) as two-factor chains."""
        return {(0, w[:p], 0, w[p:], 0): 1 for p in range(len(w) + 1)}

    def xi_gen(self, w) -> Dict[tuple, object]:
        """The shifted comultiplication on the desuspension."""
        return {(0, w[:p], 0, w[p:], 0): sgn(p) for p in range(len(w) + 1)}

    def verify(self, max_index: Optional[int] = None) -> Dict[str, bool]:
        """d^2 = 0, eps d = 0, Delta a chain map, coassociativity and counit."""
        N = self.max_index if max_index is None else max_index
        if N is None:
            raise ValueError("verification needs a finite truncation")
        A = self.alg
        ca = _chain_alg(A)
        res = {"d_squared": True, "eps_chain": True, "delta_chain": True,
               "coassociative": True, "counit": True}
        for k in range(N + 1):
            for w in self.gens(k):
                dd = {}
                for (l, g, r), c in self.d_gen(w).items():
                    for lab, c2 in self.d_elem(l, g, r).items():
                        _add(dd, lab, c * c2)
                if dd:
                    res["d_squared"] = False
                e = {}
                for (l, g, r), c in self.d_gen(w).items():
                    for x, cx in self.eps_gen(g).items():
                        for y, cy in A.mul_vec(A.mul(l, x), {r: 1}).items():
                            _add(e, y, c * cx * cy)
                if e:
                    res["eps_chain"] = False
                # Delta d = (d (x) 1 + 1 (x) d) Delta
                lhs = {}
                for (l, g, r), c in self.d_gen(w).items():
                    for ch, c2 in self.delta_gen(g).items():
                        for ch2, c3 in ca.lmul(l, ch).items():
                            for ch3, c4 in ca.rmul(ch2, r).items():
                                _add(lhs, ch3, c * c2 * c3 * c4)
                rhs = {}
                for ch, c in self.delta_gen(w).items():
                    for j in (1, 2):
                        s = 1 if j == 1 else sgn(self.degree(ch[1]))
                        for seg, c2 in self.d_gen(ch[2 * j - 1]).items():
                            for ch2, c3 in ca.replace_factor(ch, j, seg).items():
                                _add(rhs, ch2, s * c * c2 * c3)
                if lhs != rhs:
                    res["delta_chain"] = False
                # (Delta (x) 1) Delta = (1 (x) Delta) Delta
                left, right = {}, {}
                for ch, c in self.delta_gen(w).items():
                    for seg, c2 in self.delta_gen(ch[1]).items():
                        for ch2, c3 in ca.replace_factor(ch, 1, seg).items():
                            _add(left, ch2, c * c2 * c3)
                    for seg, c2 in self.delta_gen(ch[3]).items():
                        for ch2, c3 in ca.replace_factor(ch, 2, seg).items():
                            _add(right, ch2, c * c2 * c3)
                if left != right:
                    res["coassociative"] = False
                # (eps (x) 1) Delta = id = (1 (x) eps) Delta
                for j in (1, 2):
                    acc = {}
                    for ch, c in self.delta_gen(w).items():
                        e = self.eps_gen(ch[2 * j - 1])
                        for x, cx in e.items():
                            for ch2, c2 in ca.replace_factor(ch, j, (x,)).items():
                                _add(acc, ch2, c * cx * c2)
                    if acc != {(0, w, 0): 1}:
                        res["counit"] = False
        return res


def _chain_alg(A):
    from .bimod import ChainAlgebra
    return ChainAlgebra(A)


def build_bar(alg: Algebra, N: int) -> BarResolution:
    return BarResolution(alg, N)


# ---------------------------------------------------------- MC elements


def xi_algebra(world: ChainWorld) -> BInftyElement:
    """xi_A = b_2 on letters: b_2(sa (x) sb) = s(ab)."""
    A = world.alg
    sig = Signature(("A", "A"), ("A",))
    data = {(i, j): {(k,): c for k, c in A.mult[i][j].items()}
            for i in range(A.dim) for j in range(A.dim) if A.mult[i][j]}
    return BInftyElement.single(world, Op.from_data(sig, 1, data, "e", "b2"))


def xi_coalgebra(world: ChainWorld, C: FreeBimodComplex, max_index: Optional[int] = None,
                 components: Optional[Dict[int, Dict[object, Dict[tuple, object]]]] = None) -> BInftyElement:
    """xi_C on the desuspension of C.

    For the bar resolution this is the shifted comultiplication; otherwise
    ``components[n]`` gives the arity-n part as ``{generator: {segment: c}}``.
    """
    comps = {}
    if components is None:
        if not isinstance(C, BarResolution):
            raise ValueError("pass explicit components for a coalgebra other than the bar resolution")
        N = C.max_index if max_index is None else max_index
        sig = Signature(("C",), ("C", "C"))
        comps[sig] = Op(sig, 1, C.xi_gen, "f", name="xi_C")
    else:
        for n, data in components.items():
            sig = Signature(("C",), ("C",) * n)
            comps[sig] = Op.from_data(sig, 1, data, "f", f"xi_{n}")
    return BInftyElement(world, comps, 1)


def letter_inputs(A: Algebra, max_arity: int, min_arity: int = 0) -> List[tuple]:
    return [(w, None, False) for m in range(min_arity, max_arity + 1)
            for w in itertools.product(range(A.dim), repeat=m)]


def coalgebra_inputs(C: FreeBimodComplex, max_index: int, min_index: int = 0) -> List[tuple]:
    return [((), (0, g, 0), False) for k in range(min_index, max_index + 1) for g in C.gens(k)]


def unit_segment(C: FreeBimodComplex, n: int, a: int) -> tuple:
    """(0, u, 0, u, ..., u, a): the section i(a) with n factors."""
    if n == 0:
        return (a,)
    u = C.unit_gen()
    seg = (0,)
    for j in range(n):
        seg += (u, a if j == n - 1 else 0)
    return seg


# ------------------------------------------------------------- E1 blocks


class HochBlock:
    """Items ("H", letters, a): the cochain sending ``letters`` to s(a)."""

    name = "H"

    def __init__(self, alg: Algebra):
        self.alg = alg

    def items(self, q: int) -> list:
        if q < 0:
            return []
        d = self.alg.dim
        return [("H", w, a) for w in itertools.product(range(d), repeat=q) for a in range(d)]

    def element(self, item, world) -> BInftyElement:
        _, w, a = item
        m = len(w)
        sig = Signature(("A",) * m, ("A",))
        return BInftyElement.single(world, Op.from_data(sig, m - 1, {w: {(a,): 1}}, "e"))

    def inputs_for(self, item) -> list:
        m = len(item[1])
        return letter_inputs(self.alg, m + 1, m + 1)

    def project(self, t, y, world):
        letters, chain, _ = t
        if chain is not None:
            return []
        out = y[0]
        if y[1] is not None or len(out) != 1:
            raise ValueError("Hochschild output is not a single letter")
        return [(("H", letters, out[0]), 1)]


class CoHochBlock:
    """Items ("C", g, n, a): the cochain sending g to i(a) with n outputs."""

    name = "C"

    def __init__(self, C: FreeBimodComplex, nmax: Optional[int] = None):
        if C.unit_like:
            raise ValueError("the first-order method needs a free coalgebra")
        self.C = C
        self.nmax = nmax

    def items(self, q: int) -> list:
        out = []
        d = self.C.alg.dim
        for k in range(0, q + 1):
            n = q - k
            if self.nmax is not None and n > self.nmax:
                continue
            for g in self.C.gens(k):
                for a in range(d):
                    out.append(("C", g, n, a))
        return out

    def element(self, item, world) -> BInftyElement:
        _, g, n, a = item
        k = self.C.index(g)
        sig = Signature(("C",), ("C",) * n)
        op = Op.from_data(sig, k + n - 1, {g: {unit_segment(self.C, n, a): 1}}, "f")
        return BInftyElement.single(world, op)

    def inputs_for(self, item) -> list:
        C = self.C
        g = item[1]
        k = C.index(g)
        same = [g] if isinstance(C, BarResolution) else C.gens(k)
        lower = [] if isinstance(C, BarResolution) else [h for j in range(k) for h in C.gens(j)]
        return [((), (0, h, 0), False) for h in lower + same + C.gens(k + 1)]

    def project(self, t, y, world):
        letters, chain, mfirst = t
        if letters or mfirst:
            return []
        g = chain[1]
        n = (len(y[1]) - 1) // 2
        if self.nmax is not None and n > self.nmax:
            return []
        return [(("C", g, n, a), c) for a, c in world.augment(y).items()]


class E1Complex:
    """The line complex (E1, d') of a filtered twisted complex."""

    def __init__(self, world, xi: BInftyElement, blocks: Sequence, name: str = ""):
        self.world = world
        self.xi = xi
        self.blocks = list(blocks)
        self.name = name
        self.field = world.field
        self.D = Twisted(world, xi, [], check=False)
        self._items = {}
        self._index = {}
        self._d = {}

    def items(self, q: int) -> list:
        it = self._items.get(q)
        if it is None:
            it = [x for b in self.blocks for x in b.items(q)]
            self._items[q] = it
            self._index[q] = {x: i for i, x in enumerate(it)}
        return it

    def index(self, q: int) -> Dict[tuple, int]:
        self.items(q)
        return self._index[q]

    def block_of(self, item):
        for b in self.blocks:
            if b.name == item[0]:
                return b
        raise KeyError(item[0])

    def element(self, item) -> BInftyElement:
        return self.block_of(item).element(item, self.world)

    def project(self, t, y):
        out = []
        for b in self.blocks:
            out.extend(b.project(t, y, self.world))
        return out

    def d1(self, q: int) -> SparseMatrix:
        M = self._d.get(q)
        if M is not None:
            return M
        cols = self.items(q)
        idx = self.index(q + 1)
        ent = {}
        for ci, item in enumerate(cols):
            phi = self.element(item)
            seen = set()
            for t in self._inputs(item):
                if t in seen:
                    continue
                seen.add(t)
                for y, c in self.D.eval(phi, t).items():
                    for it2, c2 in self.project(t, y):
                        r = idx.get(it2)
                        if r is None:
                            raise ValueError(f"projection landed outside the line: {it2}")
                        _add(ent, (r, ci), c * c2)
        M = SparseMatrix(len(idx), len(cols), ent, self.field)
        self._d[q] = M
        return M

    def _inputs(self, item):
        return self.block_of(item).inputs_for(item)

    def complex(self, lo: int, hi: int) -> Complex:
        """The line complex in degrees lo..hi+1 with d' from lo..hi."""
        dims = {q: len(self.items(q)) for q in range(lo, hi + 2)}
        mats = {q: self.d1(q) for q in range(lo, hi + 1)}
        return Complex.from_matrices(dims, mats, self.field)

    def cohomology(self, lo: int, hi: int) -> Dict[int, int]:
        X = self.complex(lo - 1, hi)
        return {q: cohomology_dim(X, q) for q in range(lo, hi + 1)}


class HochschildComplex(E1Complex):
    """C_Hoch(A) with differential [xi_A, -]; exact in every degree computed."""

    def __init__(self, alg: Algebra, window: TruncationWindow):
        world = ChainWorld(alg)
        super().__init__(world, xi_algebra(world), [HochBlock(alg)], "Hoch")
        self.alg = alg
        self.window = window

    @property
    def trusted(self) -> List[int]:
        return list(range(0, self.window.max_in_arity))

    def report(self) -> Dict[int, int]:
        return self.cohomology(0, self.window.max_in_arity - 1)


def hochschild(alg: Algebra, window: Optional[TruncationWindow] = None) -> HochschildComplex:
    return HochschildComplex(alg, window or TruncationWindow(4))


class CoHochschildComplex(E1Complex):
    """C_coHoch(C) for a free dg-coalgebra C with MC element xi_C."""

    def __init__(self, C: FreeBimodComplex, xi_components=None, nmax: Optional[int] = None):
        world = ChainWorld(C.alg, None, C)
        xi = xi_coalgebra(world, C, components=xi_components)
        super().__init__(world, xi, [CoHochBlock(C, nmax)], "coHoch")
        self.C = C
        if C.max_index is None:
            raise ValueError("truncate the coalgebra first")

    @property
    def trusted(self) -> List[int]:
        return list(range(0, self.C.max_index))

    def report(self) -> Dict[int, int]:
        return self.cohomology(0, self.C.max_index - 1)


def cohochschild(C: FreeBimodComplex, xi_components=None) -> CoHochschildComplex:
    return CoHochschildComplex(C, xi_components)


def dual_line_complex(C: FreeBimodComplex) -> E1Complex:
    """The n = 0 column C^v = Hom_{A-A}(C, A) with its differential Q^1."""
    world = ChainWorld(C.alg, None, C)
    return E1Complex(world, BInftyElement.zero(world, 1), [CoHochBlock(C, nmax=0)], "dual")


def stable_window(build, K: int, lo: int = 0) -> Dict[str, object]:
    """Compare cohomology at truncation K and K+1 on degrees lo..K-1."""
    a = build(K).cohomology(lo, K - 1)
    b = build(K + 1).cohomology(lo, K - 1)
    return {"dims": a, "stable": a == b,
            "trusted": [q for q in range(lo, K) if a[q] == b[q]]}


# ------------------------------------------------------ classical oracle


def hochschild_direct(alg: Algebra, max_arity: int) -> Complex:
    """C^n = Hom(A^{(x) n}, A) with the classical coboundary.

    (delta f)(a_1..a_{n+1}) = a_1 f(a_2..) + sum (-1)^i f(..a_i a_{i+1}..)
    + (-1)^{n+1} f(a_1..a_n) a_{n+1}.  Independent of the brace machinery.
    """
    d = alg.dim
    words = {n: list(itertools.product(range(d), repeat=n)) for n in range(max_arity + 2)}
    labels = {n: [(w, a) for w in words[n] for a in range(d)] for n in range(max_arity + 2)}
    index = {n: {l: i for i, l in enumerate(labels[n])} for n in labels}
    mats = {}
    for n in range(max_arity + 1):
        ent = {}
        for ci, (w, a) in enumerate(labels[n]):
            # f = e_{w -> a}; evaluate delta f on every word of length n+1
            for v in words[n + 1]:
                vals = {}
                if v[1:] == w:
                    for k, c in alg.mult[v[0]][a].items():
                        _add(vals, k, c)
                for i in range(1, n + 1):
                    for k, c in alg.mult[v[i - 1]][v[i]].items():
                        if v[:i - 1] + (k,) + v[i + 1:] == w:
                            _add(vals, a, sgn(i) * c)
                if v[:-1] == w:
                    for k, c in alg.mult[a][v[-1]].items():
                        _add(vals, k, sgn(n + 1) * c)
                for k, c in vals.items():
                    _add(ent, (index[n + 1][(v, k)], ci), c)
        mats[n] = SparseMatrix(len(labels[n + 1]), len(labels[n]), ent, alg.field)
    dims = {n: len(labels[n]) for n in range(max_arity + 2)}
    return Complex.from_matrices(dims, mats, alg.field)


def periodic_oracle(alg: Algebra, max_q: int) -> Dict[int, int]:
    """HH^q(k[x]/(x^2)) from Hom_{A-A}(P, A) = A -0-> A -2x-> A -0-> ..."""
    from .bimod import hom_AA
    P = PeriodicResolution(alg, max_q + 1).to_bimodule_complex(max_q + 1)
    A = _regular_complex(alg)
    H = hom_AA(P, A)
    return {q: cohomology_dim(H, q) for q in range(0, max_q + 1)}


def _regular_complex(alg):
    from .bimod import BimoduleComplex
    return BimoduleComplex.regular(alg)


# ----------------------------------------------------------- comparisons


def counit_check(alg: Algebra, N: int) -> Dict[str, object]:
    """eps: B~A|_{<=N} -> A is a quasi-isomorphism away from the truncation.

    Returns the cone cohomology per degree; degrees -N..0 are trusted (the
    top of the truncation carries the cycles that the next letter kills).
    """
    bar = BarResolution(alg, N)
    P, Areg, f = bar.augmentation_map(N)
    F = ChainMap(P.complex, Areg.complex, f)
    Cn = cone(F)
    degs = list(range(-N - 1, 1))
    dims = {q: cohomology_dim(Cn, q) for q in degs}
    trusted = list(range(-N, 1))
    return {"cone_dims": dims, "trusted": trusted,
            "acyclic": all(dims[q] == 0 for q in trusted)}


def dual_bar_check(alg: Algebra, N: int) -> Dict[str, object]:
    """Hom_{A-A}(B~A, Sigma A) = Sigma C_Hoch(A) via g -> (-1)^arity g(1 (x) - (x) 1).

    For every basis cochain of arity m < N compares (Q^1 g)~ with
    [xi_A, g~] on all words of length m+1.  The naive restriction
    anticommutes with the differentials; the sign (-1)^arity turns it into
    an isomorphism of complexes.
    """
    bar = BarResolution(alg, N)
    H = hochschild(alg, TruncationWindow(N))
    d = alg.dim
    naive = set()
    twisted_ok = True
    checked = 0
    for m in range(0, N):
        for w in itertools.product(range(d), repeat=m):
            for a in range(d):
                phi = H.element(("H", w, a))
                for v in itertools.product(range(d), repeat=m + 1):
                    q1g = {}
                    for (l, g, r), c in bar.d_gen(v).items():
                        if g == w:
                            for x, cx in alg.mul_vec(alg.mul(l, a), {r: 1}).items():
                                _add(q1g, x, -sgn(m - 1) * c * cx)
                    br = {}
                    for y, c in H.D.eval(phi, (v, None, False)).items():
                        _add(br, y[0][0], c)
                    # twisted iso: Phi(g) = (-1)^m g~, Phi(Q^1 g) = (-1)^(m+1) (Q^1 g)~
                    lhs = {x: sgn(m + 1) * c for x, c in q1g.items()}
                    rhs = {x: sgn(m) * c for x, c in br.items()}
                    if lhs != rhs:
                        twisted_ok = False
                    if q1g or br:
                        if q1g == br:
                            naive.add(1)
                        elif q1g == {x: -c for x, c in br.items()}:
                            naive.add(-1)
                        else:
                            naive.add(0)
                    checked += 1
    return {"commutes": twisted_ok, "naive_relation": sorted(naive), "max_arity": N,
            "checked": checked}


# -------------------------------------------------------- dual coalgebra


def _col0(res):
    return {y: c for y, c in res.items() if len(y[1]) == 1}


class DualCoalgebra:
    """C^v = Hom_{A-A}(Sigma^{-1} C, A) with its induced A-infinity structure.

    b_1 is Q^1 and b_n is the column-0 part of the operation induced by
    ``Q^1 + [xi_C, -]`` (``binfty.twisted_operation``).
    """

    def __init__(self, C: FreeBimodComplex, xi_components=None, max_index: Optional[int] = None):
        self.C = C
        self.N = C.max_index if max_index is None else max_index
        self.world = ChainWorld(C.alg, None, C)
        self.xi = xi_coalgebra(self.world, C, components=xi_components)
        self.inputs = coalgebra_inputs(C, self.N)
        self.line = dual_line_complex(C)

    def element(self, values: Dict[object, Dict[int, object]]) -> BInftyElement:
        """``values[g] = {a: c}``; all generators must have the same index."""
        idx = {self.C.index(g) for g in values}
        if len(idx) > 1:
            raise ValueError("inhomogeneous element")
        k = idx.pop() if idx else 0
        sig = Signature(("C",), ())
        data = {g: {(a,): c for a, c in im.items() if c} for g, im in values.items()}
        return BInftyElement.single(self.world, Op.from_data(sig, k - 1, data, "f"))

    def counit(self) -> BInftyElement:
        return self.element({self.C.unit_gen(): {0: 1}})

    def b(self, phis: Sequence[BInftyElement]) -> BInftyElement:
        from .binfty import materialize
        W = self.world
        deg = sum(p.degree for p in phis) + 1
        return materialize(W, lambda t: _col0(twisted_operation(W, self.xi, list(phis), t)),
                           self.inputs, deg)

    def verify(self, samples: Sequence[BInftyElement], max_arity: int = 3) -> Dict[str, object]:
        """Stasheff identities sum b(.., b_c(..), ..) = 0 for arities <= max_arity."""
        fails = []
        for n in range(1, max_arity + 1):
            for combo in itertools.product(samples, repeat=n):
                acc = None
                for c in range(1, n + 1):
                    for a in range(0, n - c + 1):
                        inner = self.b(combo[a:a + c])
                        s = sgn(sum(p.degree for p in combo[:a]))
                        outer = self.b(list(combo[:a]) + [inner] + list(combo[a + c:])).scale(s)
                        acc = outer if acc is None else acc + outer
                if acc is not None and not acc.is_zero():
                    fails.append({"arity": n, "degrees": [p.degree for p in combo]})
        return {"ok": not fails, "failures": fails[:5]}

    def higher_vanish(self, samples, n: int = 3) -> bool:
        return all(self.b(list(c)).is_zero() for c in itertools.product(samples, repeat=n))

    def line_map(self, fn, lo: int, hi: int, degree: int = 0) -> Dict[int, SparseMatrix]:
        """Matrices of an element map on the line complex in degrees lo..hi."""
        blocks = {}
        for q in range(lo, hi + 1):
            src = self.line.items(q)
            tgt = self.line.index(q + degree)
            ent = {}
            for ci, it in enumerate(src):
                el = fn(self.line.element(it))
                for sig, op in el.comps.items():
                    for g, im in (op.data or {}).items():
                        for (a,), c in im.items():
                            r = tgt.get(("C", g, 0, a))
                            if r is not None:
                                _add(ent, (r, ci), c)
            blocks[q] = SparseMatrix(len(tgt), len(src), ent, self.world.field)
        return blocks

    def unit_homotopies(self) -> Dict[str, object]:
        """b_2(e, -) and b_2(-, e) against +-id: signs and witness homotopies."""
        from .complexes import find_nullhomotopy
        X = self.line.complex(0, self.N - 1)
        e = self.counit()
        out = {}
        for side in ("left", "right"):
            fn = (lambda v: self.b([e, v])) if side == "left" else (lambda v: self.b([v, e]))
            M = self.line_map(fn, 0, self.N)
            ident = {q: SparseMatrix.identity(X.dim(q), self.world.field) for q in range(0, self.N + 1)}
            signs = {}
            for q in M:
                for s in (1, -1):
                    if (M[q] - ident[q].scale(s)).is_zero():
                        signs[q] = s
            # a Koszul unit: e acts by +-1 in each degree
            signs_full = {q: signs.get(q, 1) for q in M}
            diff = {q: M[q] - ident[q].scale(signs_full[q]) for q in M}
            exact = all(B.is_zero() for B in diff.values())
            h_zero = None
            if all(q in signs for q in M):
                h_zero = True
            else:
                try:
                    h_zero = find_nullhomotopy(ChainMap.from_blocks(X, X, 0, diff)).is_zero()
                except Exception:
                    h_zero = None
            out[side] = {"signs": signs_full, "exact": exact, "homotopy_zero": h_zero}
        return out


def dual_coalgebra(C: FreeBimodComplex, xi_components=None) -> DualCoalgebra:
    return DualCoalgebra(C, xi_components)


# ------------------------------------------------------------ projection


class ProjectionP:
    """p: C_coHoch(C) -> C^v, the projection onto the column n = 0."""

    def __init__(self, coh: CoHochschildComplex):
        self.coh = coh
        self.dual = dual_line_complex(coh.C)

    @staticmethod
    def apply(el: BInftyElement) -> BInftyElement:
        return el.restrict(lambda s: s.outputs == ())

    def matrix(self, q: int) -> SparseMatrix:
        src = self.coh.items(q)
        tgt = self.dual.index(q)
        ent = {(tgt[it], i): 1 for i, it in enumerate(src) if it[2] == 0}
        return SparseMatrix(len(tgt), len(src), ent, self.coh.field)

    def check(self, lo: int, hi: int) -> Dict[str, object]:
        X = self.coh.complex(lo, hi)
        Y = self.dual.complex(lo, hi)
        blocks = {q: self.matrix(q) for q in range(lo, hi + 2)}
        chain = all((self.dual.d1(q) @ blocks[q] - blocks[q + 1] @ self.coh.d1(q)).is_zero()
                    for q in range(lo, hi + 1))
        f = ChainMap.from_blocks(X, Y, 0, blocks, check=False)
        qi = is_quasi_iso(f, DegreeWindow(lo, hi))
        return {"chain_map": chain, "quasi_iso": qi}

    def strictness(self, samples: Sequence[BInftyElement], max_arity: int = 2) -> bool:
        """p b_n(v_1..v_n) = b_n(p v_1, .., p v_n) on the coalgebra inputs."""
        W = self.coh.world
        xi = self.coh.xi
        inputs = coalgebra_inputs(self.coh.C, self.coh.C.max_index)
        for n in range(1, max_arity + 1):
            for combo in itertools.product(samples, repeat=n):
                pc = [self.apply(v) for v in combo]
                for t in inputs:
                    a = _col0(twisted_operation(W, xi, list(combo), t))
                    b = _col0(twisted_operation(W, xi, pc, t))
                    if a != b:
                        return False
        return True


def projection_p(coh: CoHochschildComplex) -> ProjectionP:
    return ProjectionP(coh)


def sample_cochain(C: FreeBimodComplex, world, degree: int, rng, max_index: int, max_n: int = 2,
                   density: float = 0.5) -> BInftyElement:
    """A random co-Hochschild cochain of the given degree with small support.

    Components go from generators of index k to n factors whose generator
    indices sum to j = k + n - 1 - degree (bar words: letters).
    """
    comps = {}
    d = C.alg.dim
    for n in range(0, max_n + 1):
        sig = Signature(("C",), ("C",) * n)
        data = {}
        for k in range(0, max_index + 1):
            j = k + n - 1 - degree
            if j < 0 or (n == 0 and j != 0):
                continue
            for g in C.gens(k):
                if rng.random() > density:
                    continue
                seg = _random_segment(C, n, j, d, rng)
                if seg is None:
                    continue
                c = rng.choice([-2, -1, 1, 2])
                data.setdefault(g, {})
                _add(data[g], seg, c)
        data = {g: v for g, v in data.items() if v}
        if data:
            comps[sig] = Op.from_data(sig, degree, data, "f")
    return BInftyElement(world, comps, degree)


def _random_segment(C, n, j, d, rng):
    if n == 0:
        return (rng.randrange(d),)
    cuts = sorted(rng.randint(0, j) for _ in range(n - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [j])]
    seg = (rng.randrange(d),)
    for p in parts:
        gs = C.gens(p)
        if not gs:
            return None
        seg += (rng.choice(gs), rng.randrange(d))
    return seg


# ------------------------------------------------------- action morphism


class ActionMorphism:
    """f_1: C^v -> End_{A-A}(C), phi -> (phi (x) id) o Delta; f_n = 0 for n >= 2.

    Elements of End(C) are tables ``{g: {(l, g', r): c}}`` (unshifted,
    bimodule maps determined on generators).  For the bar resolution f_1 is
    a chain map and satisfies
    f_1(b_2(u, v)) = (-1)^{|v|(|u|+1)} f_1(v) o f_1(u),
    i.e. it is strictly multiplicative into End(C)^op after unshifting.
    """

    def __init__(self, dual: DualCoalgebra):
        if not isinstance(dual.C, BarResolution):
            raise ValueError("the explicit action morphism is implemented for the bar resolution")
        self.dual = dual
        self.C = dual.C
        self.alg = dual.C.alg

    def f1(self, phi: BInftyElement) -> Dict[tuple, Dict[tuple, object]]:
        out = {}
        data = next(iter(phi.comps.values())).data if phi.comps else {}
        for t in self.dual.inputs:
            w = t[1][1]
            acc = {}
            for p in range(len(w) + 1):
                for (a,), c in data.get(w[:p], {}).items():
                    _add(acc, (a, w[p:], 0), c)
            if acc:
                out[w] = acc
        return out

    def d_end(self, F, deg: int):
        """[d, F] = d F - (-1)^{|F|} F d on generators."""
        B, A = self.C, self.alg
        out = {}
        for t in self.dual.inputs:
            w = t[1][1]
            acc = {}
            for (l, g, r), c in F.get(w, {}).items():
                for lab, c2 in B.d_elem(l, g, r).items():
                    _add(acc, lab, c * c2)
            for (l, g, r), c in B.d_gen(w).items():
                for (l2, g2, r2), c2 in F.get(g, {}).items():
                    for x, cx in A.mul(l, l2).items():
                        for y, cy in A.mul(r2, r).items():
                            _add(acc, (x, g2, y), -sgn(deg) * c * c2 * cx * cy)
            if acc:
                out[w] = acc
        return out

    def compose(self, F, G):
        A = self.alg
        out = {}
        for w, im in G.items():
            acc = {}
            for (l, g, r), c in im.items():
                for (l2, g2, r2), c2 in F.get(g, {}).items():
                    for x, cx in A.mul(l, l2).items():
                        for y, cy in A.mul(r2, r).items():
                            _add(acc, (x, g2, y), c * c2 * cx * cy)
            if acc:
                out[w] = acc
        return out

    def verify(self, samples: Sequence[BInftyElement]) -> Dict[str, object]:
        D = self.dual
        chain = all(self.f1(D.b([u])) == self.d_end(self.f1(u), u.degree + 1) for u in samples)
        mult = True
        for u in samples:
            for v in samples:
                lhs = self.f1(D.b([u, v]))
                rhs = self.compose(self.f1(v), self.f1(u))
                s = sgn(v.degree * (u.degree + 1))
                if lhs != {w: {k: s * c for k, c in im.items()} for w, im in rhs.items()}:
                    mult = False
        return {"chain_map": chain, "multiplicative": mult}

    def counit_composite(self) -> Dict[str, object]:
        """(eps o -) o f_1 against the identity of C^v, with a witness homotopy."""
        from .complexes import find_nullhomotopy
        D = self.dual
        C = self.C

        def comp(phi):
            F = self.f1(phi)
            vals = {}
            for w, im in F.items():
                for (l, g, r), c in im.items():
                    for x, cx in C.eps_gen(g).items():
                        for y, cy in self.alg.mul_vec(self.alg.mul(l, x), {r: 1}).items():
                            _add(vals.setdefault(w, {}), y, c * cx * cy)
            vals = {w: v for w, v in vals.items() if v}
            if not vals:
                return BInftyElement.zero(D.world, phi.degree)
            return D.element(vals)

        X = D.line.complex(0, D.N - 1)
        M = D.line_map(comp, 0, D.N)
        diff = {q: M[q] - SparseMatrix.identity(X.dim(q), D.world.field) for q in M}
        exact = all(B.is_zero() for B in diff.values())
        h = find_nullhomotopy(ChainMap.from_blocks(X, X, 0, diff))
        return {"identity_on_the_nose": exact, "homotopy_zero": h.is_zero()}


def action_morphism(dual: DualCoalgebra) -> ActionMorphism:
    return ActionMorphism(dual)


# ------------------------------------------------------------------ sigma


class Sigma:
    """sigma = (sigma_0, sigma_1): C_Hoch(A) -> C_coHoch(B~A).

    sigma_0 extends a cochain freely to a bimodule map B~A -> A (column 0);
    sigma_1 is its coderivation extension (column 1): the cochain is applied
    to every window of consecutive letters, with the Koszul sign
    (-1)^{i(m-1)} for i letters passed.  With these signs sigma commutes
    with the twisted differentials and with brackets.
    """

    def __init__(self, alg: Algebra, max_len: int = 4):
        self.alg = alg
        self.L = max_len
        self.bar = BarResolution(alg, max_len)
        self.hw = ChainWorld(alg)
        self.cw = ChainWorld(alg, None, self.bar)
        self.xi_A = xi_algebra(self.hw)
        self.xi_C = xi_coalgebra(self.cw, self.bar)
        self.DH = Twisted(self.hw, self.xi_A, [], check=False)
        self.DC = Twisted(self.cw, self.xi_C, [], check=False)
        self.h_inputs = letter_inputs(alg, max_len)
        self.c_inputs = [t for t in coalgebra_inputs(self.bar, max_len - 1)]

    def __call__(self, phi: BInftyElement) -> BInftyElement:
        S0 = {}
        ops = []
        for sig, op in phi.comps.items():
            for w, im in (op.data or {}).items():
                for (a,), c in im.items():
                    _add(S0.setdefault(w, {}), (a,), c)
            ops.append((sig.m, op))

        def s1(v):
            out = {}
            n = len(v)
            for m, op in ops:
                for i in range(0, n - m + 1):
                    for (a,), c in op.fn(v[i:i + m]).items():
                        _add(out, (0, v[:i] + (a,) + v[i + m:], 0), sgn(i * (m - 1)) * c)
            return out

        deg = phi.degree
        sig0 = Signature(("C",), ())
        sig1 = Signature(("C",), ("C",))
        comps = {sig0: Op.from_data(sig0, deg, {w: v for w, v in S0.items() if v}, "f"),
                 sig1: Op(sig1, deg, s1, "f", name="sigma1")}
        return BInftyElement(self.cw, comps, deg)

    def materialize_hoch(self, fn, degree) -> BInftyElement:
        from .binfty import materialize
        return materialize(self.hw, fn, self.h_inputs, degree)

    def _table(self, fn):
        out = {}
        for t in self.c_inputs:
            r = fn(t)
            if r:
                out[t] = r
        return out

    def check_chain(self, phi) -> bool:
        d = self.materialize_hoch(lambda t: self.DH.eval(phi, t), phi.degree + 1)
        sd = self(d)
        sp = self(phi)
        return self._table(sd.evaluate) == self._table(lambda t: self.DC.eval(sp, t))

    def _bracket_eval(self, W, u, v, t, dot_only=False):
        out = dict(brace_eval(W, [u], [v], t))
        if dot_only:
            return out
        for y, c in brace_eval(W, [v], [u], t).items():
            _add(out, y, -sgn(u.degree * v.degree) * c)
        return out

    def check_bracket(self, u, v, dot_only: bool = False) -> bool:
        b = self.materialize_hoch(lambda t: self._bracket_eval(self.hw, u, v, t, dot_only),
                                  u.degree + v.degree)
        su, sv = self(u), self(v)
        lhs = self._table(self(b).evaluate)
        rhs = self._table(lambda t: self._bracket_eval(self.cw, su, sv, t, dot_only))
        return lhs == rhs

    def dot_witness(self, samples):
        """First pair (u, v) with sigma(u . v) != sigma(u) . sigma(v)."""
        for i, u in enumerate(samples):
            for j, v in enumerate(samples):
                if not self.check_bracket(u, v, dot_only=True):
                    return i, j
        return None


def sigma(alg: Algebra, max_len: int = 4) -> Sigma:
    return Sigma(alg, max_len)


def hoch_cochain(world, data: Dict[tuple, Dict[int, object]]) -> BInftyElement:
    """A homogeneous Hochschild cochain from ``{letters: {a: c}}``."""
    ms = {len(w) for w in data}
    if len(ms) != 1:
        raise ValueError("cochain must have a single arity")
    m = ms.pop()
    sig = Signature(("A",) * m, ("A",))
    return BInftyElement.single(world, Op.from_data(sig, m - 1, {w: {(a,): c for a, c in im.items() if c}
                                                                  for w, im in data.items()}, "e"))


def random_hoch_cochain(world, m: int, rng, density: float = 0.7) -> BInftyElement:
    d = world.alg.dim
    data = {}
    for w in itertools.product(range(d), repeat=m):
        if rng.random() < density:
            data[w] = {rng.randrange(d): rng.choice([-2, -1, 1, 2])}
    if not data:
        data[(0,) * m] = {0: 1}
    return hoch_cochain(world, data)
