"""Cochain complexes, Hom and tensor complexes, cones, cohomology and homotopies."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence

from .graded import GradedMap, GradedModule, sgn, suspend, tensor, tensor_maps
from .linalg import QQ, Echelon, Field, Inconsistent, SparseMatrix, kernel_basis, rank, solve


class NotNullhomotopic(Exception):
    """The map represents a nonzero class in cohomology."""


@dataclass(frozen=True)
class DegreeWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty degree window")

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, q):
        return self.lo <= q <= self.hi


class Complex:
    """A graded module with a square-zero differential of degree +1."""

    def __init__(self, underlying: GradedModule, d: Optional[Dict[int, SparseMatrix]] = None,
                 field: Field = QQ, check: bool = True):
        self.underlying = underlying
        self.field = field
        if isinstance(d, GradedMap):
            self.d = d
        else:
            self.d = GradedMap(underlying, underlying, 1, d or {}, field)
        if check:
            for q in underlying.degrees():
                sq = self.d.block(q + 1) @ self.d.block(q)
                if not sq.is_zero():
                    raise ValueError(f"d o d != 0 starting in degree {q}")

    @classmethod
    def from_matrices(cls, dims: Dict[int, int], mats: Dict[int, SparseMatrix], field: Field = QQ,
                      check: bool = True):
        """``mats[q]`` is the differential from degree q to q+1; labels are (q, i)."""
        U = GradedModule({q: [(q, i) for i in range(n)] for q, n in dims.items()})
        blocks = {}
        for q, B in mats.items():
            if U.dim(q) and not B.is_zero():
                blocks[q] = B
        return cls(U, blocks, field, check)

    def dim(self, q: int) -> int:
        return self.underlying.dim(q)

    def degrees(self) -> List[int]:
        return self.underlying.degrees()

    def dmat(self, q: int) -> SparseMatrix:
        return self.d.block(q)

    def __repr__(self):
        return f"Complex({self.underlying!r})"


class ChainMap:
    """A homogeneous map of complexes; ``closed`` is verified when requested."""

    def __init__(self, source: Complex, target: Complex, f: GradedMap, check: bool = True):
        self.source = source
        self.target = target
        self.f = f
        self.degree = f.degree
        self.closed = None
        if check:
            self.closed = q1(source, target, f).is_zero()
            if not self.closed:
                raise ValueError("map does not commute with the differentials")

    @classmethod
    def from_blocks(cls, source: Complex, target: Complex, degree: int,
                    blocks: Dict[int, SparseMatrix], check: bool = True):
        f = GradedMap(source.underlying, target.underlying, degree, blocks, source.field)
        return cls(source, target, f, check)

    def block(self, q):
        return self.f.block(q)


def q1(X: Complex, Y: Complex, f: GradedMap) -> GradedMap:
    """Q^1(f) = d_Y o f - (-1)^{|f|} f o d_X."""
    return Y.d.compose(f) - f.compose(X.d).scale(sgn(f.degree))


# ------------------------------------------------------------ hom complex


def _check_bounded(X: Complex):
    if X.underlying.dim() == 0:
        return
    if not X.degrees():
        raise ValueError("complex with unbounded support")


def hom_complex(X: Complex, Y: Complex) -> Complex:
    """Hom(X, Y) with the Q^1 differential; basis labels (d, x, y)."""
    _check_bounded(X)
    _check_bounded(Y)
    xs, ys = X.degrees(), Y.degrees()
    comps: Dict[int, list] = {}
    if xs and ys:
        for t in range(min(ys) - max(xs) - 1, max(ys) - min(xs) + 2):
            labels = []
            for d in xs:
                for a in X.underlying.basis(d):
                    for b in Y.underlying.basis(d + t):
                        labels.append((d, a, b))
            comps[t] = labels
    H = GradedModule(comps)
    field = X.field
    blocks = {}
    for t in H.degrees():
        cols = []
        for (d, a, b) in H.basis(t):
            f = _elementary(X, Y, t, d, a, b)
            g = q1(X, Y, f)
            cols.append(_hom_vector(H, t + 1, g))
        blocks[t] = SparseMatrix.from_columns(H.dim(t + 1), cols, field)
    C = Complex(H, blocks, field)
    C.hom_source, C.hom_target = X, Y
    return C


def _elementary(X: Complex, Y: Complex, t: int, d: int, a, b) -> GradedMap:
    i = X.underlying.index(d, a)
    j = Y.underlying.index(d + t, b)
    B = SparseMatrix(Y.dim(d + t), X.dim(d), {(j, i): 1}, X.field)
    return GradedMap(X.underlying, Y.underlying, t, {d: B}, X.field)


def _hom_vector(H: GradedModule, t: int, g: GradedMap) -> Dict[int, object]:
    col = {}
    if t not in H.components:
        if not g.is_zero():
            raise ValueError("Hom component missing for a nonzero map")
        return col
    X = g.source
    Y = g.target
    for d, B in g.blocks.items():
        xb = X.basis(d)
        yb = Y.basis(d + t)
        for r, c, v in B.entries:
            col[H.index(t, (d, xb[c], yb[r]))] = v
    return col


def map_to_vector(C: Complex, g: GradedMap) -> Dict[int, object]:
    return _hom_vector(C.underlying, g.degree, g)


def vector_to_map(C: Complex, t: int, vec) -> GradedMap:
    X, Y = C.hom_source, C.hom_target
    if not isinstance(vec, dict):
        vec = {i: v for i, v in enumerate(vec) if v}
    blocks: Dict[int, dict] = {}
    labels = C.underlying.basis(t)
    for i, v in vec.items():
        d, a, b = labels[i]
        blocks.setdefault(d, {})[(Y.underlying.index(d + t, b), X.underlying.index(d, a))] = v
    return GradedMap(X.underlying, Y.underlying, t,
                     {d: SparseMatrix(Y.dim(d + t), X.dim(d), e, X.field) for d, e in blocks.items()},
                     X.field)


# ------------------------------------------------------------- cohomology


def cohomology(C: Complex, q: int):
    """(dim H^q, representative cocycles as sparse vectors)."""
    dq = C.dmat(q)
    Z = kernel_basis(dq, sparse=True) if C.dim(q) else []
    E = Echelon(C.field)
    if C.dim(q - 1):
        B = C.dmat(q - 1)
        for col in B.columns().values():
            E.add(col)
    reps = []
    for z in Z:
        if E.add(z) is not None:
            reps.append(z)
    return len(reps), reps


def cohomology_dim(C: Complex, q: int) -> int:
    n = C.dim(q)
    if n == 0:
        return 0
    return n - rank(C.dmat(q)) - (rank(C.dmat(q - 1)) if C.dim(q - 1) else 0)


def induced_rank(f: ChainMap, q: int) -> int:
    """Rank of H^q(f)."""
    _, reps = cohomology(f.source, q)
    Y = f.target
    qt = q + f.degree
    E = Echelon(Y.field)
    if Y.dim(qt - 1):
        for col in Y.dmat(qt - 1).columns().values():
            E.add(col)
    r0 = E.rank
    M = f.block(q)
    for z in reps:
        E.add(M.apply(z))
    return E.rank - r0


def is_quasi_iso(f: ChainMap, w: DegreeWindow) -> Dict[int, bool]:
    out = {}
    for q in w:
        hx = cohomology_dim(f.source, q)
        hy = cohomology_dim(f.target, q + f.degree)
        out[q] = hx == hy and induced_rank(f, q) == hx
    return out


def find_nullhomotopy(f: ChainMap) -> GradedMap:
    """h of degree |f| - 1 with Q^1(h) = f."""
    H = hom_complex(f.source, f.target)
    t = f.degree
    b = map_to_vector(H, f.f)
    if H.dim(t - 1) == 0:
        if b:
            raise NotNullhomotopic("no maps of degree one lower")
        return GradedMap.zero(f.source.underlying, f.target.underlying, t - 1, f.source.field)
    try:
        x = solve(H.dmat(t - 1), b if H.dim(t) else {}, sparse=True)
    except Inconsistent as exc:
        raise NotNullhomotopic(str(exc)) from None
    return vector_to_map(H, t - 1, x)


# ------------------------------------------------------- cones and tensors


def cone(f: ChainMap) -> Complex:
    """cone(f)^q = X^{q+1} + Y^q with d(x, y) = (-d x, f x + d y)."""
    if f.degree != 0:
        raise ValueError("cone needs a degree-0 map")
    X, Y = f.source, f.target
    SX = suspend(X.underlying, 1).shifted
    qs = sorted(set(SX.degrees()) | set(Y.degrees()))
    comps = {q: [("x", l) for l in SX.basis(q)] + [("y", l) for l in Y.underlying.basis(q)] for q in qs}
    U = GradedModule(comps)
    blocks = {}
    for q in qs:
        nx0, nx1 = X.dim(q + 1), X.dim(q + 2)
        ent = {}
        for r, c, v in X.dmat(q + 1).entries:
            ent[(r, c)] = -v
        for r, c, v in f.block(q + 1).entries:
            ent[(nx1 + r, c)] = v
        for r, c, v in Y.dmat(q).entries:
            ent[(nx1 + r, nx0 + c)] = v
        blocks[q] = SparseMatrix(U.dim(q + 1), U.dim(q), ent, X.field)
    return Complex(U, blocks, X.field)


def tensor_complex(X: Complex, Y: Complex) -> Complex:
    idX = GradedMap.identity(X.underlying, X.field)
    idY = GradedMap.identity(Y.underlying, Y.field)
    d = tensor_maps(X.d, idY) + tensor_maps(idX, Y.d)
    return Complex(d.source, d, X.field)


def identity_map(X: Complex) -> ChainMap:
    return ChainMap(X, X, GradedMap.identity(X.underlying, X.field))


def zero_map(X: Complex, Y: Complex, degree: int = 0) -> ChainMap:
    return ChainMap(X, Y, GradedMap.zero(X.underlying, Y.underlying, degree, X.field))
