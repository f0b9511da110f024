"""Finite-dimensional algebras, their bimodules, and free bimodule complexes.

Two models of bimodules live here.  The dense model (``Bimodule``,
``BimoduleComplex``) stores action matrices and computes Hom_{A-A} and
tensor products over A by linear algebra; it is used for small cross
checks.  The tensor-word model (``FreeBimodComplex``, ``ChainWorld``) stores
elements of M (x)_A C (x)_A ... (x)_A C as chains

    (c0, w1, c1, w2, c2, ..., wr, cr)

where the w_i are generators of free bimodules A (x) V (x) A and the c_i are
basis indices of A sitting between consecutive factors.  This is a basis of
the tensor product over A, which is what makes the large computations
feasible.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .complexes import Complex
from .graded import GradedMap, GradedModule, pass_sign, sgn, tensor
from .linalg import QQ, Echelon, Field, Inconsistent, SparseMatrix, kernel_basis, solve


class AlgebraError(ValueError):
    """Raised for malformed or non-associative algebra specifications."""


def _add(acc: dict, key, val):
    v = acc.get(key, 0) + val
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


# ----------------------------------------------------------------- algebra


class Algebra:
    """Unital associative algebra with basis e_0..e_{d-1}; e_0 is the unit.

    ``mult[i][j]`` is the sparse expansion of e_i e_j.
    """

    def __init__(self, name: str, field: Field, labels: Sequence[str],
                 mult: Sequence[Sequence[Dict[int, object]]], check: bool = True):
        self.name = name
        self.field = field
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.mult = [[{k: field.coerce(v) for k, v in mult[i][j].items() if v}
                      for j in range(self.dim)] for i in range(self.dim)]
        self.unit = 0
        if check:
            self.verify()

    # structure
    def mul(self, i: int, j: int) -> Dict[int, object]:
        return self.mult[i][j]

    def mul_vec(self, u: Dict[int, object], v: Dict[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mult[i][j].items():
                    _add(out, k, a * b * c)
        return out

    def verify(self):
        d = self.dim
        for i in range(d):
            if self.mult[0][i] != {i: 1} or self.mult[i][0] != {i: 1}:
                raise AlgebraError(f"{self.name}: basis element 0 is not a two-sided unit (fails at e_{i})")
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    lhs = self.mul_vec(self.mult[i][j], {k: 1})
                    rhs = self.mul_vec({i: 1}, self.mult[j][k])
                    if lhs != rhs:
                        raise AlgebraError(f"{self.name}: associativity fails at "
                                           f"({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")

    def is_commutative(self) -> bool:
        return all(self.mult[i][j] == self.mult[j][i] for i in range(self.dim) for j in range(self.dim))

    def center_dim(self) -> int:
        """dim Z(A) by solving the centralizer equations directly."""
        rows = {}
        r = 0
        for j in range(self.dim):
            for k in range(self.dim):
                row = {}
                for i in range(self.dim):
                    c = self.mult[i][j].get(k, 0) - self.mult[j][i].get(k, 0)
                    if c:
                        row[i] = c
                if row:
                    rows[r] = row
                r += 1
        M = SparseMatrix.from_rows(max(r, 1), self.dim, rows, self.field)
        return len(kernel_basis(M))

    def perturbed(self, i: int, j: int, k: int, delta=1) -> "Algebra":
        mult = [[dict(self.mult[a][b]) for b in range(self.dim)] for a in range(self.dim)]
        _add(mult[i][j], k, self.field.coerce(delta))
        return Algebra(self.name + "~", self.field, self.labels, mult, check=False)

    # serialization
    @classmethod
    def from_spec(cls, spec: dict) -> "Algebra":
        """Load an AlgebraSpec document, moving the unit to basis position 0."""
        try:
            name = spec.get("name", "algebra")
            fname = spec.get("field", "Q")
            if fname == "Q":
                field = QQ
            elif fname.startswith("Fp:"):
                field = Field(int(fname[3:]))
            else:
                raise AlgebraError(f"unknown field {fname!r}")
            dim = int(spec["dim"])
            labels = [str(l) for l in spec.get("basis", [f"e{i}" for i in range(dim)])]
            if len(labels) != dim:
                raise AlgebraError(f"{name}: basis has {len(labels)} labels but dim is {dim}")
            unit = [field.coerce(field.parse(str(u))) for u in spec["unit"]]
            if len(unit) != dim:
                raise AlgebraError(f"{name}: unit vector has wrong length")
            mult = [[{} for _ in range(dim)] for _ in range(dim)]
            for n, entry in enumerate(spec.get("products", [])):
                if len(entry) != 4:
                    raise AlgebraError(f"{name}: products[{n}] must be [i, j, k, value]")
                i, j, k = int(entry[0]), int(entry[1]), int(entry[2])
                if not all(0 <= x < dim for x in (i, j, k)):
                    raise AlgebraError(f"{name}: products[{n}] index out of range")
                _add(mult[i][j], k, field.parse(str(entry[3])))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, AlgebraError):
                raise
            raise AlgebraError(f"malformed algebra spec: {exc}") from None
        mult, labels = _normalize_unit(field, dim, labels, unit, mult, name)
        return cls(name, field, labels, mult)

    def to_spec(self) -> dict:
        prods = []
        for i in range(self.dim):
            for j in range(self.dim):
                for k, v in sorted(self.mult[i][j].items()):
                    prods.append([i, j, k, self.field.fmt(v)])
        return {"name": self.name, "field": self.field.name, "dim": self.dim,
                "basis": self.labels, "unit": ["1"] + ["0"] * (self.dim - 1), "products": prods}

    def __repr__(self):
        return f"Algebra({self.name!r}, dim={self.dim}, {self.field!r})"


def _normalize_unit(field, dim, labels, unit, mult, name):
    """Change basis so that the unit becomes e_0."""
    nz = [i for i, u in enumerate(unit) if u]
    if not nz:
        raise AlgebraError(f"{name}: unit vector is zero")
    if nz == [0] and unit[0] == 1:
        return mult, labels
    r = nz[0]
    # new basis f_0 = unit, f_t = e_{others[t-1]}
    others = [i for i in range(dim) if i != r]
    P = [[0] * dim for _ in range(dim)]  # columns: new basis in old coordinates
    for i in range(dim):
        P[i][0] = unit[i]
    for t, i in enumerate(others, start=1):
        P[i][t] = 1
    Pm = SparseMatrix.from_dense(P, field)
    if unit == [1 if i == r else 0 for i in range(dim)]:
        new_labels = [labels[r]] + [labels[i] for i in others]
    else:
        new_labels = ["1"] + [labels[i] for i in others]

    def old_mul(u, v):
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in mult[i][j].items():
                    _add(out, k, a * b * c)
        return out

    cols = [{i: P[i][t] for i in range(dim) if P[i][t]} for t in range(dim)]
    new_mult = [[{} for _ in range(dim)] for _ in range(dim)]
    for s in range(dim):
        for t in range(dim):
            prod = old_mul(cols[s], cols[t])
            try:
                x = solve(Pm, [prod.get(i, 0) for i in range(dim)], sparse=True)
            except Inconsistent:
                raise AlgebraError(f"{name}: singular basis change") from None
            new_mult[s][t] = x
    return new_mult, new_labels


def load_algebra(path_or_name: str) -> Algebra:
    """Load a spec file, or a bundled spec by name."""
    import os
    from importlib import resources
    if os.path.exists(path_or_name):
        with open(path_or_name) as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise AlgebraError(f"{path_or_name}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return Algebra.from_spec(spec)
    name = path_or_name[:-5] if path_or_name.endswith(".json") else path_or_name
    try:
        text = resources.files("braceworks").joinpath("data", name + ".json").read_text()
    except (FileNotFoundError, OSError):
        raise AlgebraError(f"no such algebra spec: {path_or_name}") from None
    return Algebra.from_spec(json.loads(text))


def bundled_names() -> List[str]:
    from importlib import resources
    d = resources.files("braceworks").joinpath("data")
    return sorted(p.name[:-5] for p in d.iterdir() if p.name.endswith(".json"))


def dual_numbers(field: Field = QQ) -> Algebra:
    return Algebra(f"dual numbers over {field.name}", field, ["1", "x"],
                   [[{0: 1}, {1: 1}], [{1: 1}, {}]])


def ground(field: Field = QQ) -> Algebra:
    return Algebra(f"{field.name}", field, ["1"], [[{0: 1}]])


# --------------------------------------------------------- dense bimodules


class Bimodule:
    """Graded A-bimodule with degree-0 action matrices per basis element of A."""

    def __init__(self, alg: Algebra, underlying: GradedModule,
                 left: Sequence[GradedMap], right: Sequence[GradedMap], check: bool = True):
        self.alg = alg
        self.underlying = underlying
        self.left = list(left)
        self.right = list(right)
        self.field = alg.field
        if check:
            self.verify()

    def verify(self):
        A = self.alg
        U = self.underlying
        idU = GradedMap.identity(U, self.field)

        def lin(maps, vec):
            acc = GradedMap.zero(U, U, 0, self.field)
            for k, c in vec.items():
                acc = acc + maps[k].scale(c)
            return acc

        if self.left[0] != idU or self.right[0] != idU:
            raise ValueError("unit does not act as the identity")
        for i in range(A.dim):
            for j in range(A.dim):
                if self.left[i] @ self.left[j] != lin(self.left, A.mult[i][j]):
                    raise ValueError(f"left action fails at ({i},{j})")
                if self.right[j] @ self.right[i] != lin(self.right, A.mult[i][j]):
                    raise ValueError(f"right action fails at ({i},{j})")
                if self.left[i] @ self.right[j] != self.right[j] @ self.left[i]:
                    raise ValueError(f"actions do not commute at ({i},{j})")

    @classmethod
    def regular(cls, alg: Algebra, degree: int = 0) -> "Bimodule":
        U = GradedModule({degree: list(range(alg.dim))})
        left = [GradedMap.from_function(U, U, 0, lambda l, i=i: alg.mul(i, l), alg.field) for i in range(alg.dim)]
        right = [GradedMap.from_function(U, U, 0, lambda l, i=i: alg.mul(l, i), alg.field) for i in range(alg.dim)]
        return cls(alg, U, left, right)

    @classmethod
    def zero(cls, alg: Algebra) -> "Bimodule":
        U = GradedModule({})
        z = GradedMap.zero(U, U, 0, alg.field)
        return cls(alg, U, [z] * alg.dim, [z] * alg.dim, check=False)

    def dim(self, d=None):
        return self.underlying.dim(d)


class BimoduleComplex:
    """A complex of bimodules whose differential is a bimodule map."""

    def __init__(self, bimod: Bimodule, d: Optional[GradedMap] = None, check: bool = True):
        self.bimod = bimod
        self.alg = bimod.alg
        self.field = bimod.field
        U = bimod.underlying
        self.d = d if d is not None else GradedMap.zero(U, U, 1, self.field)
        self.complex = Complex(U, self.d, self.field, check=check)
        if check:
            for i in range(self.alg.dim):
                for act in (bimod.left[i], bimod.right[i]):
                    if self.d @ act != act @ self.d:
                        raise ValueError("differential is not a bimodule map")

    @classmethod
    def regular(cls, alg: Algebra) -> "BimoduleComplex":
        return cls(Bimodule.regular(alg))

    @property
    def underlying(self):
        return self.bimod.underlying

    def dim(self, d=None):
        return self.bimod.dim(d)


def free_bimodule(alg: Algebra, V: GradedModule) -> Bimodule:
    """L(V) = A (x) V (x) A with labels (a, v, b)."""
    comps = {d: [(a, v, b) for a in range(alg.dim) for v in V.basis(d) for b in range(alg.dim)]
             for d in V.degrees()}
    U = GradedModule(comps)

    def lact(i):
        def fn(l):
            a, v, b = l
            return {(k, v, b): c for k, c in alg.mul(i, a).items()}
        return GradedMap.from_function(U, U, 0, fn, alg.field)

    def ract(i):
        def fn(l):
            a, v, b = l
            return {(a, v, k): c for k, c in alg.mul(b, i).items()}
        return GradedMap.from_function(U, U, 0, fn, alg.field)

    return Bimodule(alg, U, [lact(i) for i in range(alg.dim)], [ract(i) for i in range(alg.dim)])


def oplax_L(alg: Algebra, V: GradedModule) -> Bimodule:
    return free_bimodule(alg, V)


def oplax_phi(alg: Algebra, V: GradedModule, W: GradedModule):
    """phi_{V,W}: L(V (x) W) -> L(V) (x)_A L(W), a(v w)a' |-> (a v 1)(1 w a')."""
    LVW = BimoduleComplex(free_bimodule(alg, tensor(V, W)))
    LV = BimoduleComplex(free_bimodule(alg, V))
    LW = BimoduleComplex(free_bimodule(alg, W))
    T = tensor_over_A(LV, LW)

    def fn(l):
        a, (v, w), b = l
        return T.project({((a, v, 0), (0, w, b)): 1})

    f = GradedMap.from_function(LVW.underlying, T.underlying, 0, fn, alg.field)
    return LVW, T, f


def counit_L(alg: Algebra):
    """The comparison m: L(k) = A (x) A -> A."""
    k = GradedModule({0: ["*"]})
    L = BimoduleComplex(free_bimodule(alg, k))
    Areg = BimoduleComplex.regular(alg)
    f = GradedMap.from_function(L.underlying, Areg.underlying, 0,
                                lambda l: dict(alg.mul(l[0], l[2])), alg.field)
    return L, Areg, f


class TensorOverA(BimoduleComplex):
    """X (x)_A Y as a quotient of X (x)_k Y, with deterministic representatives."""

    def project(self, vec: Dict[Hashable, object]) -> Dict[Hashable, object]:
        """Reduce a vector of X (x)_k Y to quotient basis coordinates."""
        by_deg: Dict[int, dict] = {}
        big = self._big
        for lab, c in vec.items():
            q = big.degree_of(lab)
            _add(by_deg.setdefault(q, {}), big.index(q, lab), c)
        out = {}
        for q, v in by_deg.items():
            nf = _normal_form(self._rrefs.get(q, {}), v, self.field)
            basis = big.basis(q)
            for i, c in nf.items():
                out[basis[i]] = c
        return out


def _normal_form(rref: Dict[int, Dict[int, object]], v: Dict[int, object], field: Field) -> Dict[int, object]:
    """Reduce v modulo the span of rref rows (pivot columns cleared)."""
    v = dict(v)
    for c in sorted(rref):
        a = v.get(c)
        if not a:
            continue
        row = rref[c]
        f = field.div(a, row[c])
        for k, w in row.items():
            _add(v, k, -f * w)
    return {k: field.coerce(x) for k, x in v.items() if x}


def tensor_over_A(X: BimoduleComplex, Y: BimoduleComplex) -> TensorOverA:
    alg = X.alg
    field = X.field
    big = tensor(X.underlying, Y.underlying)
    rrefs = {}
    comps = {}
    for q in big.degrees():
        E = Echelon(field)
        for dx in X.underlying.degrees():
            for x in X.underlying.basis(dx):
                for y in Y.underlying.basis(q - dx):
                    for i in range(alg.dim):
                        rel = {}
                        for x2, c in X.bimod.right[i].apply_label(x, dx).items():
                            _add(rel, big.index(q, (x2, y)), c)
                        for y2, c in Y.bimod.left[i].apply_label(y, q - dx).items():
                            _add(rel, big.index(q, (x, y2)), -c)
                        if rel:
                            E.add(rel)
        R = E.rref()
        rrefs[q] = {c: {k: field.coerce(v) for k, v in row.items()} for c, row in R.items()}
        comps[q] = [big.basis(q)[i] for i in range(big.dim(q)) if i not in R]
    U = GradedModule(comps)

    TT = TensorOverA.__new__(TensorOverA)
    TT._big = big
    TT._rrefs = rrefs
    TT.field = field
    project_raw = TT.project

    def lact(i):
        def fn(l):
            x, y = l
            return project_raw({(x2, y): c for x2, c in X.bimod.left[i].apply_label(x).items()})
        return GradedMap.from_function(U, U, 0, fn, field)

    def ract(i):
        def fn(l):
            x, y = l
            return project_raw({(x, y2): c for y2, c in Y.bimod.right[i].apply_label(y).items()})
        return GradedMap.from_function(U, U, 0, fn, field)

    def dfn(l):
        x, y = l
        dx = X.underlying.degree_of(x)
        acc = {}
        for x2, c in X.d.apply_label(x, dx).items():
            _add(acc, (x2, y), c)
        for y2, c in Y.d.apply_label(y).items():
            _add(acc, (x, y2), pass_sign(1, dx) * c)
        return project_raw(acc)

    B = Bimodule(alg, U, [lact(i) for i in range(alg.dim)], [ract(i) for i in range(alg.dim)], check=False)
    d = GradedMap.from_function(U, U, 1, dfn, field)
    BimoduleComplex.__init__(TT, B, d, check=True)
    return TT


class HomAA(Complex):
    """Hom_{A-A}(X, Y) with basis given by explicit bimodule maps."""


def hom_AA(X: BimoduleComplex, Y: BimoduleComplex, degrees: Optional[Iterable[int]] = None) -> HomAA:
    """Bimodule maps of every degree, with the Q^1 differential."""
    field = X.field
    alg = X.alg
    xs, ys = X.underlying.degrees(), Y.underlying.degrees()
    if degrees is None:
        degrees = range(min(ys) - max(xs) - 1, max(ys) - min(xs) + 2) if xs and ys else []
    degrees = list(degrees)
    bases: Dict[int, List[GradedMap]] = {}
    for t in degrees:
        bases[t] = _bimodule_maps(X, Y, t)
    comps = {t: list(range(len(b))) for t, b in bases.items()}
    U = GradedModule(comps)
    blocks = {}
    for t in degrees:
        if t + 1 not in bases or not bases[t]:
            continue
        target = bases[t + 1]
        cols = []
        for f in bases[t]:
            g = Y.d @ f - (f @ X.d).scale(sgn(t))
            cols.append(_coords(g, target, field))
        blocks[t] = SparseMatrix.from_columns(len(target), cols, field)
    H = HomAA.__new__(HomAA)
    Complex.__init__(H, U, blocks, field)
    H.maps = bases
    H.source, H.target = X, Y
    return H


def _map_vector(f: GradedMap) -> Dict[Tuple[int, int, int], object]:
    out = {}
    for d, B in f.blocks.items():
        for r, c, v in B.entries:
            out[(d, r, c)] = v
    return out


def _coords(g: GradedMap, basis: List[GradedMap], field: Field) -> Dict[int, object]:
    if g.is_zero():
        return {}
    keys = {}
    cols = []
    for f in basis:
        v = _map_vector(f)
        cols.append({keys.setdefault(k, len(keys)): c for k, c in v.items()})
    gv = _map_vector(g)
    b = {}
    for k, c in gv.items():
        if k not in keys:
            raise ValueError("map outside the span of bimodule maps")
        b[keys[k]] = c
    M = SparseMatrix.from_columns(len(keys), cols, field)
    return solve(M, b, sparse=True)


def _bimodule_maps(X: BimoduleComplex, Y: BimoduleComplex, t: int) -> List[GradedMap]:
    field = X.field
    alg = X.alg
    # unknowns: entries of blocks X_d -> Y_{d+t}
    var = {}
    for d in X.underlying.degrees():
        for c in range(X.dim(d)):
            for r in range(Y.dim(d + t)):
                var[(d, r, c)] = len(var)
    if not var:
        return []
    rows = {}
    nr = 0
    for i in range(1, alg.dim):
        for side in ("left", "right"):
            ax = getattr(X.bimod, side)[i]
            ay = getattr(Y.bimod, side)[i]
            for d in X.underlying.degrees():
                Ax = ax.block(d)
                Ay = ay.block(d + t)
                # (f o ax - ay o f) = 0 entrywise on block d
                axc = Ax.columns()
                for c in range(X.dim(d)):
                    for r in range(Y.dim(d + t)):
                        row = {}
                        for k, v in axc.get(c, {}).items():
                            _add(row, var[(d, r, k)], v)
                        for k, v in Ay.row(r).items():
                            _add(row, var[(d, k, c)], -v)
                        if row:
                            rows[nr] = row
                        nr += 1
    M = SparseMatrix.from_rows(max(nr, 1), len(var), rows, field)
    inv = {v: k for k, v in var.items()}
    out = []
    for vec in kernel_basis(M, sparse=True):
        blocks: Dict[int, dict] = {}
        for idx, c in vec.items():
            d, r, cc = inv[idx]
            blocks.setdefault(d, {})[(r, cc)] = c
        out.append(GradedMap(X.underlying, Y.underlying, t,
                             {d: SparseMatrix(Y.dim(d + t), X.dim(d), e, field) for d, e in blocks.items()},
                             field))
    return out


def tensor_map_over_A(T1: TensorOverA, T2: TensorOverA, f: GradedMap, g: GradedMap) -> GradedMap:
    """f (x)_A g between tensor products over A, Koszul sign (-1)^{|g||x|}."""
    field = T1.field
    X = f.source
    Yb = g.source

    def fn(l):
        x, y = l
        dx = X.degree_of(x)
        s = pass_sign(g.degree, dx)
        acc = {}
        for x2, c in f.apply_label(x, dx).items():
            for y2, e in g.apply_label(y).items():
                _add(acc, (x2, y2), s * c * e)
        return T2.project(acc)

    return GradedMap.from_function(T1.underlying, T2.underlying, f.degree + g.degree, fn, field)


# -------------------------------------------------- tensor-word model


class FreeBimodComplex:
    """A right-bounded complex of free bimodules A (x) V (x) A given by generators.

    Subclasses provide ``gens(k)`` (generators of homological index k),
    ``degree(g)``, ``d_gen(g)`` = d(1 (x) g (x) 1) as a dict of (l, g', r)
    and ``eps_gen(g)`` = the augmentation of 1 (x) g (x) 1 in A.
    """

    unit_like = False
    name = "P"

    def __init__(self, alg: Algebra, max_index: Optional[int] = None):
        self.alg = alg
        self.max_index = max_index

    def gens(self, k: int) -> list:
        raise NotImplementedError

    def degree(self, g) -> int:
        raise NotImplementedError

    def index(self, g) -> int:
        return -self.degree(g)

    def d_gen(self, g) -> Dict[tuple, object]:
        raise NotImplementedError

    def eps_gen(self, g) -> Dict[int, object]:
        return {}

    def unit_gen(self):
        """A degree-0 generator with eps = 1 (representing 1 in H^0)."""
        raise NotImplementedError

    def d_elem(self, l: int, g, r: int) -> Dict[tuple, object]:
        A = self.alg
        out = {}
        for (a, g2, b), c in self.d_gen(g).items():
            for a2, ca in A.mul(l, a).items():
                for b2, cb in A.mul(b, r).items():
                    _add(out, (a2, g2, b2), c * ca * cb)
        return out

    def to_bimodule_complex(self, max_index: int) -> BimoduleComplex:
        """Dense truncation in indices 0..max_index (and the quotient structure)."""
        A = self.alg
        comps = {}
        for k in range(max_index + 1):
            gs = self.gens(k)
            if gs:
                comps[-k] = [(a, g, b) for a in range(A.dim) for g in gs for b in range(A.dim)]
        U = GradedModule(comps)
        B = _rebuild_free(A, U)

        def dfn(lab):
            a, g, b = lab
            return self.d_elem(a, g, b)

        d = GradedMap.from_function(U, U, 1, dfn, A.field)
        return BimoduleComplex(B, d)

    def augmentation_map(self, max_index: int):
        """eps as a chain map from the dense truncation to A."""
        P = self.to_bimodule_complex(max_index)
        Areg = BimoduleComplex.regular(self.alg)
        A = self.alg

        def fn(lab):
            a, g, b = lab
            out = {}
            for k, c in self.eps_gen(g).items():
                for x, cx in A.mul_vec(A.mul(a, k), {b: 1}).items():
                    _add(out, x, c * cx)
            return out

        f = GradedMap.from_function(P.underlying, Areg.underlying, 0, fn, A.field)
        return P, Areg, f


def _rebuild_free(A: Algebra, U: GradedModule) -> Bimodule:
    def lact(i):
        def fn(l):
            a, v, b = l
            return {(k, v, b): c for k, c in A.mul(i, a).items()}
        return GradedMap.from_function(U, U, 0, fn, A.field)

    def ract(i):
        def fn(l):
            a, v, b = l
            return {(a, v, k): c for k, c in A.mul(b, i).items()}
        return GradedMap.from_function(U, U, 0, fn, A.field)

    return Bimodule(A, U, [lact(i) for i in range(A.dim)], [ract(i) for i in range(A.dim)], check=False)


class UnitComplex(FreeBimodComplex):
    """A itself, as the quotient of A (x) A by its single relation-free generator U.

    Chains built from U-factors are normalized by pushing boundaries left,
    which realizes A (x)_A A = A.
    """

    unit_like = True
    name = "A"

    def gens(self, k):
        return ["U"] if k == 0 else []

    def degree(self, g):
        return 0

    def d_gen(self, g):
        return {}

    def eps_gen(self, g):
        return {0: 1}

    def unit_gen(self):
        return "U"


class PeriodicResolution(FreeBimodComplex):
    """The 2-periodic resolution of k[x]/(x^2) by A (x) A in each degree.

    d(e_n) = x e_{n-1} 1 + (-1)^n 1 e_{n-1} x.
    """

    name = "periodic"

    def __init__(self, alg: Algebra, max_index: Optional[int] = None):
        super().__init__(alg, max_index)
        if alg.dim != 2 or alg.mult[1][1] or alg.mult[0][1] != {1: 1}:
            raise ValueError("the periodic resolution needs A = k[x]/(x^2) with basis (1, x)")

    def gens(self, k):
        if k < 0 or (self.max_index is not None and k > self.max_index):
            return []
        return [("e", k)]

    def degree(self, g):
        return -g[1]

    def d_gen(self, g):
        n = g[1]
        if n == 0:
            return {}
        return {(1, ("e", n - 1), 0): 1, (0, ("e", n - 1), 1): sgn(n)}

    def eps_gen(self, g):
        return {0: 1} if g[1] == 0 else {}

    def unit_gen(self):
        return ("e", 0)


# ---------------------------------------------------------------- chains


class ChainAlgebra:
    """Arithmetic on chains (c0, w1, c1, ..., wr, cr) over an algebra."""

    def __init__(self, alg: Algebra):
        self.alg = alg
        self.mt = alg.mult

    def mul3(self, a: int, b: int, c: int) -> Dict[int, object]:
        out = {}
        for k, x in self.mt[a][b].items():
            for l, y in self.mt[k][c].items():
                _add(out, l, x * y)
        return out

    def lmul(self, a: int, chain: tuple) -> Dict[tuple, object]:
        if a == 0:
            return {chain: 1}
        return {(k,) + chain[1:]: c for k, c in self.mt[a][chain[0]].items()}

    def rmul(self, chain: tuple, a: int) -> Dict[tuple, object]:
        if a == 0:
            return {chain: 1}
        return {chain[:-1] + (k,): c for k, c in self.mt[chain[-1]][a].items()}

    def replace_factor(self, chain: tuple, j: int, seg: tuple) -> Dict[tuple, object]:
        """Replace factor j (1-based) with the chain segment ``seg``."""
        left = chain[:2 * (j - 1)]
        cl = chain[2 * (j - 1)]
        cr = chain[2 * j]
        rest = chain[2 * j + 1:]
        out = {}
        if len(seg) == 1:
            for k, c in self.mul3(cl, seg[0], cr).items():
                out[left + (k,) + rest] = c
            return out
        lefts = self.mt[cl][seg[0]] if cl else {seg[0]: 1}
        rights = self.mt[seg[-1]][cr] if cr else {seg[-1]: 1}
        mid = seg[1:-1]
        for a, ca in lefts.items():
            for b, cb in rights.items():
                _add(out, left + (a,) + mid + (b,) + rest, ca * cb)
        return out

    def normalize(self, chain: tuple, unit_like: Sequence[bool]) -> Dict[tuple, object]:
        """Push boundaries left across unit-like factors (right to left)."""
        r = (len(chain) - 1) // 2
        vec = {chain: 1}
        for j in range(r, 0, -1):
            if not unit_like[j - 1]:
                continue
            nxt = {}
            for ch, c in vec.items():
                cr = ch[2 * j]
                if cr == 0:
                    _add(nxt, ch, c)
                    continue
                for k, x in self.mt[ch[2 * j - 2]][cr].items():
                    _add(nxt, ch[:2 * j - 2] + (k,) + ch[2 * j - 1:2 * j] + (0,) + ch[2 * j + 1:], c * x)
            vec = nxt
        return vec


class _Sig:
    def __init__(self, inputs):
        self.inputs = inputs


class ChainWorld:
    """Tensor words for the brace engine in the bimodule setting.

    A tensor is ``(letters, chain, mfirst)``: letters are basis indices of A
    read as elements of Sigma A (degree -1 each); ``chain`` is ``None`` or a
    chain whose first factor lies in ``M`` when ``mfirst`` and in
    Sigma^{-1} C otherwise.  Leg colours are ``"A"``, ``"M"``, ``"C"``.
    """

    def __init__(self, alg: Algebra, M: Optional[FreeBimodComplex] = None,
                 C: Optional[FreeBimodComplex] = None):
        self.alg = alg
        self.M = M
        self.C = C
        self.ca = ChainAlgebra(alg)
        self.field = alg.field

    # legs
    def factor_complexes(self, t) -> list:
        letters, chain, mfirst = t
        if chain is None:
            return []
        r = (len(chain) - 1) // 2
        if r == 0:
            return []
        return ([self.M] if mfirst else [self.C]) + [self.C] * (r - 1)

    def legs(self, t) -> List[Tuple[str, int]]:
        letters, chain, mfirst = t
        out = [("A", -1)] * len(letters)
        if chain is not None:
            r = (len(chain) - 1) // 2
            for j in range(1, r + 1):
                w = chain[2 * j - 1]
                if j == 1 and mfirst:
                    out.append(("M", self.M.degree(w)))
                else:
                    out.append(("C", self.C.degree(w) + 1))
        return out

    def colours(self, t) -> Tuple[str, ...]:
        return tuple(c for c, _ in self.legs(t))

    @staticmethod
    def valid(colours: Sequence[str]) -> bool:
        seen_m = False
        seen_c = False
        for c in colours:
            if c == "A":
                if seen_m or seen_c:
                    return False
            elif c == "M":
                if seen_m or seen_c:
                    return False
                seen_m = True
            else:
                seen_c = True
        return True

    def degree(self, t) -> int:
        return sum(d for _, d in self.legs(t))

    # hooks used by the brace engine
    @staticmethod
    def kind_of(sig) -> str:
        ins = sig.inputs
        if all(c == "A" for c in ins):
            return "e"
        if ins[-1] == "M" and all(c == "A" for c in ins[:-1]):
            return "a"
        if ins == ("C",):
            return "f"
        raise ValueError(f"no operation kind for inputs {ins}")

    def key_of(self, t):
        letters, chain, mfirst = t
        if chain is None:
            return letters
        if mfirst and len(chain) == 3 and chain[2] == 0:
            return (letters, chain[0], chain[1])
        if not mfirst and not letters and len(chain) == 3 and chain[0] == 0 and chain[2] == 0:
            return chain[1]
        raise ValueError("tensor is not an operation input")

    @staticmethod
    def result_of(t):
        letters, chain, mfirst = t
        if chain is None:
            return letters
        if letters:
            raise ValueError("mixed letters and chain in an operation output")
        return chain

    def key_degree(self, colours, key) -> int:
        k = self.kind_of(_Sig(tuple(colours)))
        if k == "e":
            return -len(key)
        if k == "a":
            return -len(key[0]) + self.M.degree(key[2])
        return self.C.degree(key) + 1

    def result_degree(self, colours, res) -> int:
        if not colours or colours[0] == "A":
            return -len(res)
        return self.degree(((), res, colours[0] == "M"))

    def tensor_of(self, colours, key):
        k = self.kind_of(_Sig(tuple(colours)))
        if k == "e":
            return (tuple(key), None, False)
        if k == "a":
            return (tuple(key[0]), (key[1], key[2], 0), True)
        return ((), (0, key, 0), False)

    def normalize(self, t) -> Dict[tuple, object]:
        letters, chain, mfirst = t
        if chain is None:
            return {t: 1}
        fcs = self.factor_complexes(t)
        if not any(fc.unit_like for fc in fcs):
            return {t: 1}
        return {(letters, ch, mfirst): c
                for ch, c in self.ca.normalize(chain, [fc.unit_like for fc in fcs]).items()}

    def apply(self, t, start: int, stop: int, op, coef=1) -> Dict[tuple, object]:
        """Apply ``op`` to legs [start, stop) of t, with the Koszul sign."""
        letters, chain, mfirst = t
        legs = self.legs(t)
        s = pass_sign(op.degree, sum(d for _, d in legs[:start]))
        nl = len(letters)
        out: Dict[tuple, object] = {}
        kind = op.kind
        if kind == "e":
            if stop > nl:
                raise ValueError("letter operation placed on chain legs")
            for res, c in op.fn(letters[start:stop]).items():
                _add(out, (letters[:start] + res + letters[stop:], chain, mfirst), s * c * coef)
            return out
        if kind == "a":
            if stop != nl + 1 or not mfirst:
                raise ValueError("module operation must end on the M leg")
            c0, w, c1 = chain[0], chain[1], chain[2]
            rest = chain[3:]
            for seg, c in op.fn((letters[start:nl], c0, w)).items():
                for seg2, c2 in self.ca.rmul(seg, c1).items():
                    nt = (letters[:start], seg2 + rest, True)
                    for nt2, c3 in self.normalize(nt).items():
                        _add(out, nt2, s * c * c2 * c3 * coef)
            return out
        if kind == "f":
            if stop != start + 1 or start < nl:
                raise ValueError("coalgebra operation must act on one chain leg")
            j = start - nl + 1
            if j == 1 and mfirst:
                raise ValueError("coalgebra operation placed on the M leg")
            w = chain[2 * j - 1]
            for seg, c in op.fn(w).items():
                for ch, c2 in self.ca.replace_factor(chain, j, seg).items():
                    for nt2, c3 in self.normalize((letters, ch, mfirst)).items():
                        _add(out, nt2, s * c * c2 * c3 * coef)
            return out
        raise ValueError(f"unknown operation kind {kind!r}")

    def differential(self, t) -> Dict[tuple, object]:
        """d on a tensor: d_M on the M leg, -d_C on desuspended C legs."""
        letters, chain, mfirst = t
        if chain is None:
            return {}
        out: Dict[tuple, object] = {}
        legs = self.legs(t)
        nl = len(letters)
        left = sum(d for _, d in legs[:nl])
        r = (len(chain) - 1) // 2
        for j in range(1, r + 1):
            w = chain[2 * j - 1]
            is_m = (j == 1 and mfirst)
            cx = self.M if is_m else self.C
            s = pass_sign(1, left) * (1 if is_m else sgn(1))
            for (a, g2, b), c in cx.d_gen(w).items():
                for ch, c2 in self.ca.replace_factor(chain, j, (a, g2, b)).items():
                    for nt, c3 in self.normalize((letters, ch, mfirst)).items():
                        _add(out, nt, s * c * c2 * c3)
            left += legs[nl + j - 1][1]
        return out

    def augment(self, t) -> Dict[int, object]:
        """Apply eps to every chain factor and multiply out (letters must be empty)."""
        letters, chain, mfirst = t
        if letters:
            raise ValueError("augmentation of a tensor with letters")
        fcs = self.factor_complexes(t)
        vec = {chain[0]: 1}
        for j, fc in enumerate(fcs, start=1):
            e = fc.eps_gen(chain[2 * j - 1])
            if not e:
                return {}
            nxt = {}
            for a, ca in vec.items():
                for k, ck in e.items():
                    for x, cx in self.ca.mul3(a, k, chain[2 * j]).items():
                        _add(nxt, x, ca * ck * cx)
            vec = nxt
        return vec
