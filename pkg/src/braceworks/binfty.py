"""Brace operations, the dot product and the B-infinity structure of C(O).

The engine is generic over a *world*: an object describing tensors of legs
(``legs``, ``colours``, ``valid``), how an operation acts on a block of legs
(``apply``) and the internal differential (``differential``).  Two worlds
ship with the package: ``properad.KWorld`` for endomorphism properads of
graded modules and ``bimod.ChainWorld`` for the bimodule model.

B^s_t(phi_1..phi_s; psi_1..psi_t) evaluated on a tensor x is the sum over
all two-level graphs: the psi's sit on disjoint blocks of x in order, the
phi's sit on disjoint blocks of the middle layer in order, every leg of the
middle layer that comes from x unchanged is consumed by some phi (no
identity strand runs through both levels), and the graph is connected.
The sign is the Koszul sign of applying each row.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .complexes import DegreeWindow
from .graded import koszul_sign, sgn
from .properad import Op, Signature


def _add(acc, key, val):
    v = acc.get(key, 0) + val
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


@dataclass(frozen=True)
class TruncationWindow:
    max_in_arity: int
    max_out_arity: int = 1
    degrees: Optional[DegreeWindow] = None

    def __post_init__(self):
        if self.max_in_arity < 0 or self.max_out_arity < 0:
            raise ValueError("window arities must be non-negative")


class BInftyElement:
    """A finite sum of homogeneous components of C(O).

    ``comps`` maps a signature to an ``Op``; ``max_in`` is the largest input
    arity for which the element is known (``None`` when no component beyond
    the listed ones can exist).  Results of operations carry ``clipped``:
    the set of input colour sequences where an unknown component could have
    contributed.
    """

    def __init__(self, world, comps: Dict[Signature, Op], degree: int,
                 max_in: Optional[int] = None, clipped: Optional[set] = None):
        self.world = world
        self.degree = degree
        self.max_in = max_in
        self.clipped = set(clipped or ())
        self.comps = {s: op for s, op in comps.items()}
        self._by_in: Dict[tuple, List[Op]] = {}
        for s, op in self.comps.items():
            if op.degree != degree:
                raise ValueError(f"component {s} has degree {op.degree}, not {degree}")
            self._by_in.setdefault(s.inputs, []).append(op)

    @classmethod
    def zero(cls, world, degree: int = 0):
        return cls(world, {}, degree)

    @classmethod
    def single(cls, world, op: Op, max_in=None):
        return cls(world, {op.sig: op}, op.degree, max_in)

    def ops_for(self, colours: tuple) -> List[Op]:
        return self._by_in.get(colours, [])

    def evaluate(self, t) -> Dict[tuple, object]:
        """Sum of all components on a whole tensor."""
        out = {}
        cols = self.world.colours(t)
        for op in self.ops_for(cols):
            for t2, c in self.world.apply(t, 0, len(cols), op).items():
                _add(out, t2, c)
        return out

    def data(self) -> Dict[Signature, dict]:
        return {s: op.data for s, op in self.comps.items()}

    def is_zero(self) -> bool:
        """True when every component is explicitly zero (lazy ones never are)."""
        return all(op.data is not None and not op.data for op in self.comps.values())

    def __add__(self, o: "BInftyElement") -> "BInftyElement":
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if o.degree != self.degree:
            raise ValueError("adding elements of different degrees")
        comps = {}
        for s in set(self.comps) | set(o.comps):
            acc = {}
            for src in (self.comps.get(s), o.comps.get(s)):
                if src is None:
                    continue
                for k, img in src.data.items():
                    tgt = acc.setdefault(k, {})
                    for r, c in img.items():
                        _add(tgt, r, c)
            kind = (self.comps.get(s) or o.comps.get(s)).kind
            comps[s] = Op.from_data(s, self.degree, {k: v for k, v in acc.items() if v}, kind)
        mi = _min_win(self.max_in, o.max_in)
        return BInftyElement(self.world, comps, self.degree, mi, self.clipped | o.clipped)

    def scale(self, c) -> "BInftyElement":
        return BInftyElement(self.world, {s: op.scaled(c) for s, op in self.comps.items()},
                             self.degree, self.max_in, self.clipped)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, o):
        return self + (-o)

    def restrict(self, keep: Callable[[Signature], bool]) -> "BInftyElement":
        return BInftyElement(self.world, {s: op for s, op in self.comps.items() if keep(s)},
                             self.degree, self.max_in, self.clipped)

    def equals(self, o: "BInftyElement", ignore_clipped: bool = True) -> bool:
        sk = {s for s in set(self.comps) | set(o.comps)}
        skip = (self.clipped | o.clipped) if ignore_clipped else set()
        for s in sk:
            if s.inputs in skip:
                continue
            a = self.comps.get(s)
            b = o.comps.get(s)
            da = a.data if a else {}
            db = b.data if b else {}
            if da != db:
                return False
        return True

    def __repr__(self):
        return f"BInftyElement(deg={self.degree}, comps={len(self.comps)})"


def _min_win(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# --------------------------------------------------------------- placements


def _placements(colours: Sequence[str], elems: Sequence[BInftyElement], world):
    """Yield (blocks, clipped) with blocks = [(start, stop, op)] in order."""
    n = len(colours)
    out = []
    clipped = [False]

    def rec(j, pointer, acc):
        if j == len(elems):
            out.append(list(acc))
            return
        el = elems[j]
        for s in range(pointer, n + 1):
            for L in range(0, n - s + 1):
                block = tuple(colours[s:s + L])
                ops = el.ops_for(block)
                if el.max_in is not None and L > el.max_in and _plausible(block, el):
                    clipped[0] = True
                if ops and block in el.clipped:
                    clipped[0] = True
                for op in ops:
                    acc.append((s, s + L, op))
                    rec(j + 1, s + L, acc)
                    acc.pop()

    rec(0, 0, [])
    return out, clipped[0]


def _plausible(block, el: BInftyElement) -> bool:
    """Whether an unknown component of ``el`` could accept this block."""
    if not el.comps:
        return False
    proto = next(iter(el.comps))
    ins = proto.inputs
    if not ins:
        return all(c == "A" for c in block)
    # same colour pattern family: letters followed by the same tail colour
    if all(c == ins[0] for c in ins):
        return all(c == ins[0] for c in block)
    return block[-1:] == ins[-1:] and all(c == ins[0] for c in block[:-1])


class BraceGraph:
    """Cached enumeration of graphs for given operands and input colours."""

    def __init__(self, world, tops: Sequence[BInftyElement], bottoms: Sequence[BInftyElement]):
        self.world = world
        self.tops = list(tops)
        self.bottoms = list(bottoms)
        self._cache: Dict[tuple, tuple] = {}

    def terms(self, colours: tuple):
        hit = self._cache.get(colours)
        if hit is not None:
            return hit
        W = self.world
        terms = []
        clipped = False
        bots, cl = _placements(colours, self.bottoms, W)
        clipped |= cl
        for bp in bots:
            # middle layer: origins and colours
            mid_cols = []
            origin = []
            pos = 0
            for j, (s, e, op) in enumerate(bp):
                for i in range(pos, s):
                    mid_cols.append(colours[i])
                    origin.append(None)
                for c in op.sig.outputs:
                    mid_cols.append(c)
                    origin.append(j)
                pos = e
            for i in range(pos, len(colours)):
                mid_cols.append(colours[i])
                origin.append(None)
            if not W.valid(mid_cols):
                continue
            tops, cl = _placements(tuple(mid_cols), self.tops, W)
            clipped |= cl
            for tp in tops:
                if not _legal(tp, origin, len(self.tops), len(self.bottoms)):
                    continue
                out_cols = []
                pos = 0
                for (s, e, op) in tp:
                    out_cols.extend(mid_cols[pos:s])
                    out_cols.extend(op.sig.outputs)
                    pos = e
                out_cols.extend(mid_cols[pos:])
                if not W.valid(out_cols):
                    continue
                terms.append((bp, tp))
        res = (terms, clipped)
        self._cache[colours] = res
        return res

    def evaluate(self, t) -> Dict[tuple, object]:
        W = self.world
        terms, _ = self.terms(W.colours(t))
        out: Dict[tuple, object] = {}
        for bp, tp in terms:
            vec = {t: 1}
            for s, e, op in reversed(bp):
                nxt = {}
                for x, c in vec.items():
                    for y, cy in W.apply(x, s, e, op, c).items():
                        _add(nxt, y, cy)
                vec = nxt
                if not vec:
                    break
            if not vec:
                continue
            for s, e, op in reversed(tp):
                nxt = {}
                for x, c in vec.items():
                    for y, cy in W.apply(x, s, e, op, c).items():
                        _add(nxt, y, cy)
                vec = nxt
                if not vec:
                    break
            for y, c in vec.items():
                _add(out, y, c)
        return out


def _legal(tp, origin, ns, nt) -> bool:
    covered = [False] * len(origin)
    parent = list(range(ns + nt))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (s, e, op) in enumerate(tp):
        for k in range(s, e):
            covered[k] = True
            j = origin[k]
            if j is not None:
                a, b = find(i), find(ns + j)
                if a != b:
                    parent[a] = b
    for k, o in enumerate(origin):
        if o is None and not covered[k]:
            return False
    root = find(0)
    return all(find(x) == root for x in range(ns + nt))


# ------------------------------------------------------------ operations


class UnboundedConnectivity(ValueError):
    pass


def _check_world(world):
    if not getattr(world, "bounded_connectivity", True):
        raise UnboundedConnectivity("brace sums need an ambient with bounded connectivity")


def brace_eval(world, tops: Sequence[BInftyElement], bottoms: Sequence[BInftyElement], t):
    """B^s_t(tops; bottoms) evaluated on one input tensor."""
    _check_world(world)
    s, k = len(tops), len(bottoms)
    if s == 0 or k == 0:
        if (s, k) == (1, 0):
            return tops[0].evaluate(t)
        if (s, k) == (0, 1):
            return bottoms[0].evaluate(t)
        return {}
    return BraceGraph(world, tops, bottoms).evaluate(t)


def materialize(world, fn: Callable, inputs: Iterable, degree: int, kind_of=None,
                max_in=None, clipped=None) -> BInftyElement:
    """Turn an evaluator on whole tensors into an explicit element."""
    comps: Dict[Signature, dict] = {}
    for t in inputs:
        res = fn(t)
        if not res:
            continue
        cin = world.colours(t)
        key = world.key_of(t)
        for y, c in res.items():
            sig = Signature(cin, world.colours(y))
            tgt = comps.setdefault(sig, {}).setdefault(key, {})
            _add(tgt, world.result_of(y), c)
    ops = {}
    for sig, data in comps.items():
        data = {k: v for k, v in data.items() if v}
        if data:
            ops[sig] = Op.from_data(sig, degree, data, world.kind_of(sig))
    return BInftyElement(world, ops, degree, max_in, clipped)


def brace(world, tops: Sequence[BInftyElement], bottoms: Sequence[BInftyElement],
          inputs: Iterable, max_in=None) -> BInftyElement:
    """B^s_t(tops; bottoms) materialized on the given input tensors."""
    _check_world(world)
    s, k = len(tops), len(bottoms)
    deg = sum(e.degree for e in tops) + sum(e.degree for e in bottoms)
    inputs = list(inputs)
    if s == 0 or k == 0:
        if (s, k) == (1, 0):
            return tops[0]
        if (s, k) == (0, 1):
            return bottoms[0]
        return BInftyElement.zero(world, deg)
    G = BraceGraph(world, tops, bottoms)
    clipped = set()
    for t in inputs:
        if G.terms(world.colours(t))[1]:
            clipped.add(world.colours(t))
    el = materialize(world, G.evaluate, inputs, deg, max_in=max_in, clipped=clipped)
    return el


def dot(world, v: BInftyElement, w: BInftyElement, inputs, max_in=None) -> BInftyElement:
    return brace(world, [v], [w], inputs, max_in)


def bracket(world, v: BInftyElement, w: BInftyElement, inputs, max_in=None) -> BInftyElement:
    """[v, w] = v.w - (-1)^{|v||w|} w.v."""
    return dot(world, v, w, inputs, max_in) - dot(world, w, v, inputs, max_in).scale(sgn(v.degree * w.degree))


def q1_eval(world, v: BInftyElement, t) -> Dict[tuple, object]:
    """Q^1(v) = d o v - (-1)^{|v|} v o d on one tensor."""
    out = {}
    for y, c in v.evaluate(t).items():
        for z, cz in world.differential(y).items():
            _add(out, z, c * cz)
    s = sgn(v.degree)
    for y, c in world.differential(t).items():
        for z, cz in v.evaluate(y).items():
            _add(out, z, -s * c * cz)
    return out


def q1(world, v: BInftyElement, inputs, max_in=None) -> BInftyElement:
    return materialize(world, lambda t: q1_eval(world, v, t), inputs, v.degree + 1,
                       max_in=max_in, clipped=v.clipped)


def mc_residual(world, xi: BInftyElement, inputs, max_in=None) -> BInftyElement:
    """Q^1(xi) + xi.xi."""
    if xi.degree != 1 and not xi.is_zero():
        raise ValueError("a Maurer-Cartan element has degree 1")
    return q1(world, xi, inputs, max_in) + dot(world, xi, xi, inputs, max_in)


class Twisted:
    """The differential Q_xi = Q^1 + [xi, -] (zero Q^1 when ``internal`` is False)."""

    def __init__(self, world, xi: BInftyElement, inputs, check: bool = True, max_in=None):
        self.world = world
        self.xi = xi
        self.inputs = list(inputs)
        self.max_in = max_in
        if check and not xi.is_zero():
            r = mc_residual(world, xi, self.inputs, max_in)
            bad = [s for s in r.comps if s.inputs not in r.clipped and r.comps[s].data]
            if bad:
                raise ValueError(f"Maurer-Cartan equation fails in components {[str(s) for s in bad]}")

    def _graphs(self, v: BInftyElement):
        # callers evaluate one cochain on many inputs; keep its graphs
        last = getattr(self, "_last", None)
        if last is None or last[0] is not v:
            _check_world(self.world)
            last = self._last = (v, BraceGraph(self.world, [self.xi], [v]), BraceGraph(self.world, [v], [self.xi]))
        return last[1], last[2]

    def eval(self, v: BInftyElement, t) -> Dict[tuple, object]:
        out = q1_eval(self.world, v, t)
        if not self.xi.is_zero():
            left, right = self._graphs(v)
            for y, c in left.evaluate(t).items():
                _add(out, y, c)
            s = sgn(v.degree)
            for y, c in right.evaluate(t).items():
                _add(out, y, -s * c)
        return out

    def __call__(self, v: BInftyElement) -> BInftyElement:
        clipped = set(v.clipped)
        if not self.xi.is_zero():
            for G in (BraceGraph(self.world, [self.xi], [v]), BraceGraph(self.world, [v], [self.xi])):
                for t in self.inputs:
                    if G.terms(self.world.colours(t))[1]:
                        clipped.add(self.world.colours(t))
        return materialize(self.world, lambda t: self.eval(v, t), self.inputs, v.degree + 1,
                           max_in=self.max_in, clipped=clipped)


def twist(world, xi: BInftyElement, inputs, max_in=None) -> Twisted:
    return Twisted(world, xi, inputs, True, max_in)


def verify_prelie(world, u, v, w, inputs, max_in=None):
    """assoc(u,v,w) - (-1)^{|v||w|} assoc(u,w,v) = 0 on unclipped inputs."""
    def assoc(a, b, c):
        ab = dot(world, a, b, inputs, max_in)
        bc = dot(world, b, c, inputs, max_in)
        return dot(world, ab, c, inputs, max_in) - dot(world, a, bc, inputs, max_in)

    lhs = assoc(u, v, w) - assoc(u, w, v).scale(sgn(v.degree * w.degree))
    bad = [s for s in lhs.comps if s.inputs not in lhs.clipped and lhs.comps[s].data]
    return not bad, lhs


# ---------------------------------------------------------- cotensor T^c(V)


class Basis:
    """Elementary operations of a world as a basis of V = C(O).

    A basis key is ``(sig, input_key, output_result)``; its element sends
    that input to that output and everything else to zero.
    """

    def __init__(self, world):
        self.world = world

    def element(self, key) -> BInftyElement:
        sig, k, r = key
        deg = self.degree(key)
        return BInftyElement(self.world, {sig: Op.from_data(sig, deg, {k: {r: 1}}, self.world.kind_of(sig))}, deg)

    def degree(self, key) -> int:
        sig, k, r = key
        return self.world.result_degree(sig.outputs, r) - self.world.key_degree(sig.inputs, k)

    def expand(self, el: BInftyElement) -> Dict[tuple, object]:
        out = {}
        for sig, op in el.comps.items():
            for k, img in (op.data or {}).items():
                for r, c in img.items():
                    _add(out, (sig, k, r), c)
        return out

    def combine(self, vec: Dict[tuple, object]) -> Optional[BInftyElement]:
        acc = None
        for key, c in vec.items():
            e = self.element(key).scale(c)
            acc = e if acc is None else acc + e
        return acc


class Cotensor:
    """T^c(V) truncated at a word length, with the assembled product m.

    Words are tuples of basis keys.  ``m_st(vs, ws)`` computes the brace
    m^{s,t} of basis elements (expanded in the basis).
    """

    def __init__(self, world, inputs, max_len: int = 3, max_in=None):
        self.world = world
        self.B = Basis(world)
        self.inputs = list(inputs)
        self.max_len = max_len
        self.max_in = max_in
        self._cache = {}
        self.clipped = False

    def m_st(self, vs: Tuple, ws: Tuple) -> Dict[tuple, object]:
        key = (vs, ws)
        if key in self._cache:
            return self._cache[key]
        s, t = len(vs), len(ws)
        if (s, t) == (1, 0):
            res = {vs[0]: 1}
        elif (s, t) == (0, 1):
            res = {ws[0]: 1}
        elif s == 0 or t == 0:
            res = {}
        else:
            el = brace(self.world, [self.B.element(v) for v in vs], [self.B.element(w) for w in ws],
                       self.inputs, self.max_in)
            if el.clipped:
                self.clipped = True
            res = self.B.expand(el)
        self._cache[key] = res
        return res

    def m(self, X: Dict[tuple, object], Y: Dict[tuple, object]) -> Dict[tuple, object]:
        out = {}
        for vw, a in X.items():
            for ww, b in Y.items():
                for z, c in self.m_words(vw, ww).items():
                    _add(out, z, a * b * c)
        return out

    def m_words(self, vw: tuple, ww: tuple) -> Dict[tuple, object]:
        """Sum over block decompositions, rearranged with the Koszul sign."""
        s, t = len(vw), len(ww)
        out = {}
        degs = [self.B.degree(x) for x in vw] + [self.B.degree(x) for x in ww]
        for u in range(1, s + t + 1):
            for scomp in _compositions(s, u):
                for tcomp in _compositions(t, u):
                    if any(a == 0 and b == 0 for a, b in zip(scomp, tcomp)):
                        continue
                    if any((a == 0 and b >= 2) or (b == 0 and a >= 2) for a, b in zip(scomp, tcomp)):
                        continue
                    if u > self.max_len:
                        continue
                    perm = []
                    pi = pj = 0
                    blocks = []
                    for a, b in zip(scomp, tcomp):
                        perm.extend(range(pi, pi + a))
                        perm.extend(range(s + pj, s + pj + b))
                        blocks.append((vw[pi:pi + a], ww[pj:pj + b]))
                        pi += a
                        pj += b
                    sign = koszul_sign(perm, degs)
                    acc = {(): sign}
                    for bv, bw in blocks:
                        img = self.m_st(bv, bw)
                        nxt = {}
                        for w0, c0 in acc.items():
                            for k, c in img.items():
                                _add(nxt, w0 + (k,), c0 * c)
                        acc = nxt
                        if not acc:
                            break
                    for z, c in acc.items():
                        _add(out, z, c)
        return out

    def m_two_arg(self, v, w) -> Dict[tuple, object]:
        """m(v, w) = v(x)w + (-1)^{|v||w|} w(x)v + v.w for basis keys v, w.

        ``None`` stands for the empty word, the unit of m.
        """
        if v is None:
            return {() if w is None else (w,): 1}
        if w is None:
            return {(v,): 1}
        out = {(v, w): 1}
        _add(out, (w, v), sgn(self.B.degree(v) * self.B.degree(w)))
        for k, c in self.m_st((v,), (w,)).items():
            _add(out, (k,), c)
        return out


def _compositions(n: int, parts: int):
    """Weak compositions of n into ``parts`` non-negative parts."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


# --------------------------------------------------- induced A-infinity ops


def twisted_operation(world, xi: BInftyElement, vs: Sequence[BInftyElement], t):
    """The arity-n component of Q + [xi, -] on T^c, evaluated on one tensor.

    b_1 = Q^1 + [xi, -]; for n >= 2,
    b_n(v_1..v_n) = B^1_n(xi; v_1..v_n) - (-1)^{sum |v_i|} B^n_1(v_1..v_n; xi).
    """
    n = len(vs)
    if n == 0:
        raise ValueError("no arity-0 operation")
    if n == 1:
        return Twisted(world, xi, [], check=False).eval(vs[0], t)
    out = dict(brace_eval(world, [xi], list(vs), t))
    s = sgn(sum(v.degree for v in vs))
    for y, c in brace_eval(world, list(vs), [xi], t).items():
        _add(out, y, -s * c)
    return out
