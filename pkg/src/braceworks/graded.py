"""Graded modules, homogeneous maps, Koszul signs, suspension and the shift Xi.

Every sign used elsewhere in the package is computed by one of the helpers
here: ``koszul_sign`` for permutations, ``tensor_apply_sign`` for applying a
tensor product of homogeneous maps, and ``eta_sign``/``xi_sign``/``xi_inv_sign``
for the eta-rearrangements behind the operation shift.

Degrees are cohomological and the suspension lowers degrees: an element x
of degree d gives eta(x) in Sigma X of degree d - 1.
"""
from __future__ import annotations

from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .linalg import QQ, Field, SparseMatrix


def sgn(e: int) -> int:
    """(-1)^e."""
    return -1 if e & 1 else 1


# ------------------------------------------------------------------ signs


def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of rearranging x_0,...,x_{k-1} into x_{perm[0]},...,x_{perm[k-1]}.

    Computed by bubbling the permutation into place with adjacent
    transpositions, each contributing (-1)^{d_i d_j}.
    """
    if len(permutation) != len(degrees):
        raise ValueError("permutation and degrees differ in length")
    if sorted(permutation) != list(range(len(permutation))):
        raise ValueError(f"not a permutation: {permutation!r}")
    seq = list(permutation)
    e = 0
    n = len(seq)
    for i in range(n):
        for j in range(n - 1 - i):
            if seq[j] > seq[j + 1]:
                e += degrees[seq[j]] * degrees[seq[j + 1]]
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
    return sgn(e)


def koszul_sign_inversions(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """The same sign counted over inversions; kept as an independent check."""
    e = 0
    for a in range(len(permutation)):
        for b in range(a + 1, len(permutation)):
            if permutation[a] > permutation[b]:
                e += degrees[permutation[a]] * degrees[permutation[b]]
    return sgn(e)


def tensor_apply_sign(map_degrees: Sequence[int], block_degrees: Sequence[int]) -> int:
    """Sign of (f_1 (x) ... (x) f_k)(X_1 (x) ... (x) X_k).

    ``block_degrees[i]`` is the total degree of the block fed to f_i.  Each
    f_j passes the blocks to its left.
    """
    e = 0
    left = 0
    for fd, bd in zip(map_degrees, block_degrees):
        e += fd * left
        left += bd
    return sgn(e)


def eta_sign(degrees: Sequence[int], mask: Sequence[bool]) -> int:
    """Sign s with eta^{(x)mask}(x_1 (x) ... (x) x_k) = s * (shifted word).

    ``degrees`` are the degrees of the elements eta is applied to; eta has
    odd degree on masked legs and the identity acts elsewhere.
    """
    e = 0
    left = 0
    for d, m in zip(degrees, mask):
        if m:
            e += left
        left += d
    return sgn(e)


def xi_sign(f_deg: int, in_degs: Sequence[int], in_mask: Sequence[bool],
            out_degs: Sequence[int], out_mask: Sequence[bool]) -> int:
    """Sign of Xi f = (-1)^{m|f|} eta^{(x)n} f (eta^{(x)m})^{-1} on basis words.

    ``in_degs``/``out_degs`` are the unshifted degrees of the input word x
    and output word y of f.  Only masked legs are shifted; m counts masked
    inputs.
    """
    m = sum(1 for b in in_mask if b)
    return sgn(m * f_deg) * eta_sign(in_degs, in_mask) * eta_sign(out_degs, out_mask)


def xi_inv_sign(f_deg: int, in_degs_shifted: Sequence[int], in_mask: Sequence[bool],
                out_degs_shifted: Sequence[int], out_mask: Sequence[bool]) -> int:
    """Sign of Xi^{-1} f = (-1)^{(n+1+|f|)m} (eta^{(x)n})^{-1} f eta^{(x)m}.

    Here eta: Sigma^{-1}X -> X and the degrees are those of the desuspended
    input word x' and output word y'.
    """
    m = sum(1 for b in in_mask if b)
    n = sum(1 for b in out_mask if b)
    return (sgn((n + 1 + f_deg) * m) * eta_sign(in_degs_shifted, in_mask)
            * eta_sign(out_degs_shifted, out_mask))


# --------------------------------------------------------------- modules


class GradedModule:
    """Based free module with finitely many nonzero degrees."""

    def __init__(self, components: Dict[int, Sequence[Hashable]], factors=None):
        comps = {}
        for d, labels in components.items():
            labels = list(labels)
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate labels in degree {d}")
            if labels:
                comps[int(d)] = labels
        self.components = comps
        self.factors = factors
        self._index = {d: {l: i for i, l in enumerate(ls)} for d, ls in comps.items()}

    def basis(self, d: int) -> List[Hashable]:
        return self.components.get(d, [])

    def dim(self, d: Optional[int] = None) -> int:
        if d is None:
            return sum(len(v) for v in self.components.values())
        return len(self.components.get(d, []))

    def degrees(self) -> List[int]:
        return sorted(self.components)

    def index(self, d: int, label) -> int:
        return self._index[d][label]

    def degree_of(self, label) -> int:
        for d, idx in self._index.items():
            if label in idx:
                return d
        raise KeyError(label)

    def __eq__(self, o):
        return isinstance(o, GradedModule) and self.components == o.components

    def __hash__(self):
        return hash(tuple((d, tuple(v)) for d, v in sorted(self.components.items())))

    def __repr__(self):
        return "GradedModule(" + ", ".join(f"{d}:{len(v)}" for d, v in sorted(self.components.items())) + ")"


def concentrated(labels: Sequence[Hashable], degree: int = 0) -> GradedModule:
    return GradedModule({degree: labels})


def tensor(M: GradedModule, N: GradedModule) -> GradedModule:
    """M (x) N with labels the ordered pairs."""
    comps: Dict[int, list] = {}
    for i in M.degrees():
        for j in N.degrees():
            comps.setdefault(i + j, [])
    for k in sorted(comps):
        out = []
        for i in M.degrees():
            for a in M.basis(i):
                for b in N.basis(k - i):
                    out.append((a, b))
        comps[k] = out
    return GradedModule(comps)


def tensor_power(M: GradedModule, n: int) -> GradedModule:
    """M^{(x)n} with labels the n-tuples of labels of M."""
    return tensor_many([M] * n)


def tensor_many(mods: Sequence[GradedModule]) -> GradedModule:
    words: Dict[int, list] = {0: [()]}
    for M in mods:
        nxt: Dict[int, list] = {}
        for d, ws in words.items():
            for e in M.degrees():
                lst = nxt.setdefault(d + e, [])
                for w in ws:
                    for l in M.basis(e):
                        lst.append(w + (l,))
        words = nxt
    return GradedModule(words, factors=list(mods))


# ------------------------------------------------------------------ maps


class GradedMap:
    """Homogeneous map; ``blocks[d]`` sends source degree d to target degree d + degree."""

    def __init__(self, source: GradedModule, target: GradedModule, degree: int,
                 blocks: Optional[Dict[int, SparseMatrix]] = None, field: Field = QQ):
        self.source = source
        self.target = target
        self.degree = degree
        self.field = field
        clean = {}
        for d, B in (blocks or {}).items():
            if B.shape != (target.dim(d + degree), source.dim(d)):
                raise ValueError(f"block at degree {d} has shape {B.shape}, expected "
                                 f"{(target.dim(d + degree), source.dim(d))}")
            if not B.is_zero():
                clean[d] = B
        self.blocks = clean

    @classmethod
    def from_function(cls, source, target, degree, fn, field: Field = QQ):
        """Build from ``fn(label) -> {target_label: coef}`` on source basis labels."""
        blocks = {}
        for d in source.degrees():
            td = d + degree
            cols = []
            for l in source.basis(d):
                img = fn(l)
                col = {}
                for tl, c in img.items():
                    if c:
                        col[target.index(td, tl)] = c
                cols.append(col)
            blocks[d] = SparseMatrix.from_columns(target.dim(td), cols, field)
        return cls(source, target, degree, blocks, field)

    @classmethod
    def identity(cls, M: GradedModule, field: Field = QQ):
        return cls(M, M, 0, {d: SparseMatrix.identity(M.dim(d), field) for d in M.degrees()}, field)

    @classmethod
    def zero(cls, source, target, degree, field: Field = QQ):
        return cls(source, target, degree, {}, field)

    def block(self, d: int) -> SparseMatrix:
        B = self.blocks.get(d)
        if B is None:
            return SparseMatrix.zero(self.target.dim(d + self.degree), self.source.dim(d), self.field)
        return B

    def apply_label(self, label, d: Optional[int] = None) -> Dict[Hashable, object]:
        if d is None:
            d = self.source.degree_of(label)
        B = self.blocks.get(d)
        if B is None:
            return {}
        col = B.columns().get(self.source.index(d, label), {})
        tb = self.target.basis(d + self.degree)
        return {tb[i]: v for i, v in col.items()}

    def compose(self, f: "GradedMap") -> "GradedMap":
        """self o f."""
        if f.target != self.source:
            raise ValueError("composition of incompatible maps")
        blocks = {}
        for d in f.source.degrees():
            blocks[d] = self.block(d + f.degree) @ f.block(d)
        return GradedMap(f.source, self.target, f.degree + self.degree, blocks, self.field)

    def __matmul__(self, f):
        return self.compose(f)

    def __add__(self, o: "GradedMap") -> "GradedMap":
        if (o.source, o.target, o.degree) != (self.source, self.target, self.degree):
            raise ValueError("adding incompatible maps")
        blocks = dict(self.blocks)
        for d, B in o.blocks.items():
            blocks[d] = blocks[d] + B if d in blocks else B
        return GradedMap(self.source, self.target, self.degree, blocks, self.field)

    def scale(self, s) -> "GradedMap":
        return GradedMap(self.source, self.target, self.degree,
                         {d: B.scale(s) for d, B in self.blocks.items()}, self.field)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, o):
        return self + (-o)

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, o):
        if not isinstance(o, GradedMap):
            return NotImplemented
        return (self.source == o.source and self.target == o.target and self.degree == o.degree
                and self.blocks == o.blocks)

    def __repr__(self):
        return f"GradedMap(deg={self.degree}, {self.source!r} -> {self.target!r})"


def tensor_maps(f: GradedMap, g: GradedMap) -> GradedMap:
    """(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)."""
    S = tensor(f.source, g.source)
    T = tensor(f.target, g.target)

    def fn(label):
        a, b = label
        da = f.source.degree_of(a)
        s = tensor_apply_sign([f.degree, g.degree], [da, g.source.degree_of(b)])
        out = {}
        for x, cx in f.apply_label(a, da).items():
            for y, cy in g.apply_label(b).items():
                out[(x, y)] = out.get((x, y), 0) + s * cx * cy
        return out

    return GradedMap.from_function(S, T, f.degree + g.degree, fn, f.field)


def tensor_maps_many(maps: Sequence[GradedMap]) -> GradedMap:
    """f_1 (x) ... (x) f_k on tensor_many modules, Koszul signs included."""
    S = tensor_many([f.source for f in maps])
    T = tensor_many([f.target for f in maps])
    field = maps[0].field if maps else QQ

    def fn(word):
        degs = [f.source.degree_of(l) for f, l in zip(maps, word)]
        s = tensor_apply_sign([f.degree for f in maps], degs)
        acc = {(): s}
        for f, l, d in zip(maps, word, degs):
            nxt = {}
            img = f.apply_label(l, d)
            for w, c in acc.items():
                for y, cy in img.items():
                    nxt[w + (y,)] = nxt.get(w + (y,), 0) + c * cy
            acc = nxt
        return acc

    return GradedMap.from_function(S, T, sum(f.degree for f in maps), fn, field)


# ------------------------------------------------------------- suspension


class SuspensionWitness:
    """Sigma^a of a module with the label-preserving identification."""

    def __init__(self, base: GradedModule, amount: int):
        self.base = base
        self.amount = amount
        self.shifted = GradedModule({d - amount: ls for d, ls in base.components.items()})

    def eta(self, field: Field = QQ) -> GradedMap:
        """eta^a: base -> shifted, of degree -a, label preserving."""
        return GradedMap(self.base, self.shifted, -self.amount,
                         {d: SparseMatrix.identity(self.base.dim(d), field) for d in self.base.degrees()},
                         field)


def suspend(M: GradedModule, a: int = 1) -> SuspensionWitness:
    return SuspensionWitness(M, a)


def suspend_map(f: GradedMap, a: int = 1) -> GradedMap:
    """Sigma^a f, with Sigma f = (-1)^{|f|} eta f eta^{-1} applied a times."""
    S = suspend(f.source, a).shifted
    T = suspend(f.target, a).shifted
    s = sgn(a * f.degree)
    blocks = {d - a: B.scale(s) for d, B in f.blocks.items()}
    return GradedMap(S, T, f.degree, blocks, f.field)


def _xi_once(f: GradedMap, m: int, n: int, direction: int) -> GradedMap:
    X = f.source.factors
    Y = f.target.factors
    if X is None or Y is None or len(X) != m or len(Y) != n:
        raise ValueError("shift_operation needs maps between tensor_many modules of the stated arities")
    Xs = [suspend(M, direction).shifted for M in X]
    Ys = [suspend(M, direction).shifted for M in Y]
    S = tensor_many(Xs)
    T = tensor_many(Ys)
    in_mask = [True] * m
    out_mask = [True] * n
    deg = f.degree + direction * (m - n)

    def fn(word):
        out = {}
        if direction == 1:
            udegs = [M.degree_of(l) for M, l in zip(X, word)]
            for y, c in f.apply_label(word, sum(udegs)).items():
                ydegs = [M.degree_of(l) for M, l in zip(Y, y)]
                out[y] = out.get(y, 0) + c * xi_sign(f.degree, udegs, in_mask, ydegs, out_mask)
            return out
        sdegs = [M.degree_of(l) for M, l in zip(Xs, word)]
        for y, c in f.apply_label(word, sum(sdegs) - m).items():
            ydegs = [M.degree_of(l) + 1 for M, l in zip(Y, y)]
            out[y] = out.get(y, 0) + c * xi_inv_sign(f.degree, sdegs, in_mask, ydegs, out_mask)
        return out

    return GradedMap.from_function(S, T, deg, fn, f.field)


def shift_operation(f: GradedMap, m: int, n: int, a: int = 1) -> GradedMap:
    """Xi^a f for f: X^{(x)m} -> Y^{(x)n}, iterating Xi or Xi^{-1}."""
    g = f
    step = 1 if a > 0 else -1
    for _ in range(abs(a)):
        g = _xi_once(g, m, n, step)
    return g


def pass_sign(op_deg: int, left_deg: int) -> int:
    """Koszul sign of an operation of degree ``op_deg`` passing ``left_deg``."""
    return sgn(op_deg * left_deg)
