"""Coloured asymmetric properads: signatures, elementary composition sites,
endomorphism properads of graded modules, and weighted shifts.

An elementary composition puts phi on top of psi.  In the middle layer the
outputs of psi occupy an interval and the inputs of phi occupy an interval;
the two intervals overlap (the overlap is the set of internal edges) and
together cover the whole layer, so no identity strand runs through both
levels.  The four shapes are:

    "insert"   psi's outputs lie inside phi's inputs
    "coinsert" phi's inputs lie inside psi's outputs
    "left"     phi's inputs start left of psi's outputs and end inside them
    "right"    the mirror image
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .complexes import Complex, hom_complex
from .graded import (GradedMap, GradedModule, eta_sign, pass_sign, sgn, suspend, tensor_many,
                     xi_inv_sign, xi_sign)
from .linalg import QQ, Field


def _add(acc, key, val):
    v = acc.get(key, 0) + val
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


@dataclass(frozen=True)
class Signature:
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]

    @property
    def m(self):
        return len(self.inputs)

    @property
    def n(self):
        return len(self.outputs)

    def __str__(self):
        return f"({','.join(self.inputs)};{','.join(self.outputs)})"


class Op:
    """A homogeneous operation with a signature, a degree and an evaluator.

    ``kind`` tells the tensor model how to cut out the piece of a tensor the
    operation acts on; ``fn(piece)`` returns ``{result: coefficient}``.
    """

    __slots__ = ("sig", "degree", "kind", "fn", "data", "name")

    def __init__(self, sig: Signature, degree: int, fn: Callable, kind: str = "k",
                 data: Optional[dict] = None, name: str = ""):
        self.sig = sig
        self.degree = degree
        self.kind = kind
        self.fn = fn
        self.data = data
        self.name = name

    @classmethod
    def from_data(cls, sig: Signature, degree: int, data: dict, kind: str = "k", name: str = ""):
        data = {k: dict(v) for k, v in data.items() if v}
        empty = {}
        return cls(sig, degree, lambda piece: data.get(piece, empty), kind, data, name)

    def scaled(self, c) -> "Op":
        f = self.fn
        if self.data is not None:
            return Op.from_data(self.sig, self.degree,
                                {k: {r: c * v for r, v in im.items()} for k, im in self.data.items()},
                                self.kind, self.name)
        return Op(self.sig, self.degree, lambda p: {r: c * v for r, v in f(p).items()}, self.kind, None, self.name)

    def __repr__(self):
        return f"Op({self.name or '?'}{self.sig}, deg={self.degree}, kind={self.kind})"


# ------------------------------------------------------------------- sites


@dataclass(frozen=True)
class CompositionSite:
    """phi over psi: top row id^a0 phi id^a1, bottom row id^b0 psi id^b1."""
    a0: int
    a1: int
    b0: int
    b1: int
    connections: int
    shape: str


def connection_arity(site: CompositionSite) -> int:
    return site.connections


def _shape(a0, q, b0, p) -> str:
    if a0 <= b0 and a0 + q >= b0 + p:
        return "insert"
    if b0 <= a0 and b0 + p >= a0 + q:
        return "coinsert"
    return "left" if a0 < b0 else "right"


def enumerate_sites(phi_in: Sequence[str], psi_out: Sequence[str],
                    match: Optional[Callable[[str, str], bool]] = None) -> List[CompositionSite]:
    """All legal planar connected sites of phi (inputs ``phi_in``) over psi (outputs ``psi_out``).

    Colours at connected legs must match; the colours of the identity legs
    are then forced.
    """
    q, p = len(phi_in), len(psi_out)
    match = match or (lambda x, y: x == y)
    out = []
    for delta in range(-q + 1, p):
        # phi's input i sits over psi's output i + delta
        lo, hi = max(0, -delta), min(q, p - delta)
        if hi - lo < 1:
            continue
        if not all(match(phi_in[i], psi_out[i + delta]) for i in range(lo, hi)):
            continue
        # middle layer starts at min(0, delta) in psi-output coordinates
        start = min(0, delta)
        end = max(p, q + delta)
        b0 = 0 - start
        a0 = delta - start
        b1 = end - p
        a1 = end - (q + delta)
        if a0 and b0:
            continue
        if a1 and b1:
            continue
        out.append(CompositionSite(a0, a1, b0, b1, hi - lo, _shape(a0, q, b0, p)))
    return out


def site_colours(site: CompositionSite, phi_sig: Signature, psi_sig: Signature):
    """(middle, composite inputs, composite outputs) colour sequences."""
    mid = [None] * (site.b0 + psi_sig.n + site.b1)
    for i, c in enumerate(psi_sig.outputs):
        mid[site.b0 + i] = c
    for i, c in enumerate(phi_sig.inputs):
        mid[site.a0 + i] = c
    inputs = tuple(mid[:site.b0]) + psi_sig.inputs + tuple(mid[len(mid) - site.b1:])
    outputs = tuple(mid[:site.a0]) + phi_sig.outputs + tuple(mid[len(mid) - site.a1:])
    return tuple(mid), inputs, outputs


# ------------------------------------------------------- k-linear model


class KWorld:
    """Tensor words over a coloured family of graded modules.

    A tensor is a tuple of ``(colour, label)`` pairs.
    """

    def __init__(self, V: Dict[str, GradedModule], field: Field = QQ,
                 differentials: Optional[Dict[str, GradedMap]] = None):
        self.V = V
        self.field = field
        self.differentials = differentials or {}
        self._deg = {c: {l: d for d in M.degrees() for l in M.basis(d)} for c, M in V.items()}

    def legs(self, t):
        return [(c, self._deg[c][l]) for c, l in t]

    def colours(self, t):
        return tuple(c for c, _ in t)

    @staticmethod
    def valid(colours) -> bool:
        return True

    def normalize(self, t):
        return {t: 1}

    def degree(self, t) -> int:
        return sum(self._deg[c][l] for c, l in t)

    # hooks used by the brace engine
    def key_of(self, t):
        return t

    def result_of(self, t):
        return t

    @staticmethod
    def kind_of(sig) -> str:
        return "k"

    def key_degree(self, colours, key) -> int:
        return self.degree(key)

    result_degree = key_degree

    def differential(self, t) -> Dict[tuple, object]:
        out = {}
        left = 0
        for i, (c, l) in enumerate(t):
            d = self._deg[c][l]
            dX = self.differentials.get(c)
            if dX is not None:
                for l2, v in dX.apply_label(l, d).items():
                    _add(out, t[:i] + ((c, l2),) + t[i + 1:], pass_sign(1, left) * v)
            left += d
        return out

    def inputs(self, colour_seqs) -> List[tuple]:
        return [w for cols in colour_seqs for w in self.words(cols)]

    def words(self, colours: Sequence[str]) -> List[tuple]:
        pools = [[(c, l) for d in self.V[c].degrees() for l in self.V[c].basis(d)] for c in colours]
        return [tuple(w) for w in itertools.product(*pools)]

    def apply(self, t, start, stop, op: Op, coef=1):
        legs = self.legs(t)
        s = pass_sign(op.degree, sum(d for _, d in legs[:start]))
        out = {}
        for res, c in op.fn(t[start:stop]).items():
            _add(out, t[:start] + res + t[stop:], s * c * coef)
        return out

    def apply_row(self, vec: Dict[tuple, object], placements) -> Dict[tuple, object]:
        """Apply ops at disjoint (start, stop, op) placements, right to left."""
        for start, stop, op in sorted(placements, key=lambda x: -x[0]):
            nxt = {}
            for t, c in vec.items():
                for t2, c2 in self.apply(t, start, stop, op, c).items():
                    _add(nxt, t2, c2)
            vec = nxt
        return vec


def identity_op(X: str, kind: str = "k") -> Op:
    return Op(Signature((X,), (X,)), 0, lambda piece: {piece: 1}, kind, name=f"id_{X}")


class EndProperad:
    """End_V for a coloured family V of finite graded modules (over k).

    ``differentials`` optionally attaches a degree +1 square-zero map per
    colour, making each component a Hom complex.
    """

    def __init__(self, V: Dict[str, GradedModule], field: Field = QQ,
                 differentials: Optional[Dict[str, GradedMap]] = None):
        self.V = V
        self.field = field
        self.world = KWorld(V, field, differentials)
        self.differentials = differentials or {}

    def identity(self, X: str) -> Op:
        return identity_op(X)

    def element(self, sig: Signature, degree: int, data: Dict[tuple, Dict[tuple, object]], name="") -> Op:
        """Wrap ``{input word: {output word: coef}}``; words are label tuples."""
        full = {}
        for k, v in data.items():
            kk = tuple(zip(sig.inputs, k))
            full[kk] = {tuple(zip(sig.outputs, r)): c for r, c in v.items() if c}
        return Op.from_data(sig, degree, full, "k", name)

    def words(self, colours):
        return self.world.words(colours)

    def evaluate(self, op: Op) -> Dict[tuple, Dict[tuple, object]]:
        """Explicit data of an op on all input basis words."""
        out = {}
        for w in self.world.words(op.sig.inputs):
            img = op.fn(w)
            img = {k: v for k, v in img.items() if v}
            if img:
                out[w] = img
        return out

    def equal(self, f: Op, g: Op) -> bool:
        return f.sig == g.sig and self.evaluate(f) == self.evaluate(g)

    def sites(self, phi: Op, psi: Op) -> List[CompositionSite]:
        return enumerate_sites(phi.sig.inputs, psi.sig.outputs)

    def elementary_compose(self, phi: Op, psi: Op, site: CompositionSite) -> Op:
        if site.connections < 1:
            raise ValueError("disconnected composition site")
        legal = self.sites(phi, psi)
        if site not in legal:
            raise ValueError(f"illegal composition site {site}")
        mid, ins, outs = site_colours(site, phi.sig, psi.sig)
        sig = Signature(ins, outs)
        data = {}
        W = self.world
        for w in W.words(ins):
            vec = W.apply(w, site.b0, site.b0 + psi.sig.m, psi)
            vec = W.apply_row(vec, [(site.a0, site.a0 + phi.sig.m, phi)])
            vec = {k: v for k, v in vec.items() if v}
            if vec:
                data[w] = vec
        return Op.from_data(sig, phi.degree + psi.degree, data, "k", f"({phi.name})o({psi.name})")

    def component(self, sig: Signature) -> Complex:
        """End_V(sig) as the Hom complex between tensor products."""
        from .complexes import tensor_complex

        def tcx(cols):
            U = tensor_many([self.V[c] for c in cols]) if cols else GradedModule({0: [()]})
            # differential on tensor words via the Koszul rule
            def fn(word):
                out = {}
                left = 0
                for i, (c, l) in enumerate(zip(cols, word)):
                    dX = self.differentials.get(c)
                    d = self.V[c].degree_of(l)
                    if dX is not None:
                        for l2, v in dX.apply_label(l, d).items():
                            _add(out, word[:i] + (l2,) + word[i + 1:], pass_sign(1, left) * v)
                    left += d
                return out
            return Complex(U, GradedMap.from_function(U, U, 1, fn, self.field), self.field)

        return hom_complex(tcx(sig.inputs), tcx(sig.outputs))


def check_bounded_connectivity(O: EndProperad, elements: Sequence[Op], p: int):
    """Whether every nonzero elementary composition among ``elements`` has arity <= p.

    Returns ``(verdict, witnesses)`` where witnesses lists nonzero sites of
    arity > p.
    """
    bad = []
    for phi in elements:
        for psi in elements:
            for site in O.sites(phi, psi):
                if site.connections > p:
                    comp = O.elementary_compose(phi, psi, site)
                    if O.evaluate(comp):
                        bad.append((phi.name, psi.name, site))
    return (not bad), bad


# ---------------------------------------------------------- weighted shift


def colour_shift(op: Op, V: Dict[str, GradedModule], X: str, direction: int) -> Op:
    """Xi_X or Xi_X^{-1} of a k-linear op, per the eta-rearrangement signs.

    The result acts on words over V' where V'_X = Sigma^{direction} V_X and
    the labels are unchanged.
    """
    in_mask = [c == X for c in op.sig.inputs]
    out_mask = [c == X for c in op.sig.outputs]
    mX, nX = sum(in_mask), sum(out_mask)
    deg = op.degree + direction * (mX - nX)
    dg = {c: {l: d for d in M.degrees() for l in M.basis(d)} for c, M in V.items()}
    f = op.fn
    fdeg = op.degree

    def fn(word):
        out = {}
        if direction == 1:
            udegs = [dg[c][l] for c, l in word]
            for y, v in f(word).items():
                ydegs = [dg[c][l] for c, l in y]
                _add(out, y, v * xi_sign(fdeg, udegs, in_mask, ydegs, out_mask))
        else:
            sdegs = [dg[c][l] - (1 if c == X else 0) for c, l in word]
            for y, v in f(word).items():
                ydegs = [dg[c][l] - (1 if c == X else 0) for c, l in y]
                _add(out, y, v * xi_inv_sign(fdeg, sdegs, in_mask, ydegs, out_mask))
        return out

    return Op(op.sig, deg, fn, op.kind, None, f"Xi_{X}^{direction}({op.name})")


def shifted_family(V: Dict[str, GradedModule], w: Dict[str, int]) -> Dict[str, GradedModule]:
    return {c: suspend(M, w.get(c, 0)).shifted for c, M in V.items()}


class ShiftedProperad:
    """Xi^w End_V, realized as End_{V'} with the transport map from End_V."""

    def __init__(self, O: EndProperad, w: Dict[str, int]):
        self.base = O
        self.w = {c: w.get(c, 0) for c in O.V}
        self.target = EndProperad(shifted_family(O.V, self.w), O.field)

    def transport(self, op: Op) -> Op:
        """Apply the colour shifts one colour at a time (colours in sorted order)."""
        cur = op
        V = dict(self.base.V)
        for X in sorted(self.w):
            a = self.w[X]
            step = 1 if a > 0 else -1
            for _ in range(abs(a)):
                cur = colour_shift(cur, V, X, step)
                V[X] = suspend(V[X], step).shifted
        return Op.from_data(cur.sig, cur.degree, self.target.evaluate(cur), "k", cur.name)

    def compose(self, phi: Op, psi: Op, site: CompositionSite) -> Op:
        return self.target.elementary_compose(phi, psi, site)


def weighted_shift(O: EndProperad, w: Dict[str, int]) -> ShiftedProperad:
    return ShiftedProperad(O, w)


def shift_composition_sign(site: CompositionSite, phi: Op, psi: Op, w: Dict[str, int]) -> int:
    """The eta-cancellation sign e with Xi^w(phi o psi) = e * (Xi^w phi o Xi^w psi).

    For one colour X and one application of Xi_X: (-1)^{(M+K)|phi| + a0(m-n)_phi + b0(m-n)_psi}
    counted on X-coloured legs only, where M and K are the numbers of
    X-coloured composite inputs and middle legs and a0, b0 count X-coloured
    identity legs to the left.  Iterated shifts multiply, with degrees
    updated after each step.
    """
    mid, ins, outs = site_colours(site, phi.sig, psi.sig)
    e = 0
    dphi, dpsi = phi.degree, psi.degree
    for X in sorted(w):
        a = w[X]
        step = 1 if a > 0 else -1
        cnt = lambda seq: sum(1 for c in seq if c == X)
        M, K = cnt(ins), cnt(mid)
        a0 = cnt(mid[:site.a0])
        b0 = cnt(ins[:site.b0])
        mp, np_ = cnt(phi.sig.inputs), cnt(phi.sig.outputs)
        ms, ns = cnt(psi.sig.inputs), cnt(psi.sig.outputs)
        for _ in range(abs(a)):
            if step == 1:
                e += (M + K) * dphi + a0 * (mp - np_) + b0 * (ms - ns)
            else:
                # the inverse shift undoes a forward shift from the shifted degrees
                dphi_s = dphi - (mp - np_)
                e += (M + K) * dphi_s + a0 * (mp - np_) + b0 * (ms - ns)
            dphi += step * (mp - np_)
            dpsi += step * (ms - ns)
    return sgn(e)
