"""Exact sparse linear algebra over the rationals and prime fields.

Scalars are plain Python ``int``/``Fraction`` values over QQ and ``Mod``
residues over GF(p).  Elimination over QQ is fraction free: rows are kept
as primitive integer vectors and only the final back substitution divides.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence


class Inconsistent(Exception):
    """Raised when a linear system has no solution."""


class Mod:
    """A residue class modulo a prime."""

    __slots__ = ("v", "p")

    def __init__(self, v, p: int):
        if isinstance(v, Mod):
            v = v.v
        elif isinstance(v, Fraction):
            if v.denominator % p == 0:
                raise ZeroDivisionError(f"denominator of {v} vanishes mod {p}")
            v = v.numerator * pow(v.denominator, -1, p)
        self.v = int(v) % p
        self.p = p

    def _other(self, o):
        if isinstance(o, Mod):
            if o.p != self.p:
                raise ValueError("mixed characteristics")
            return o.v
        if isinstance(o, int):
            return o
        if isinstance(o, Fraction):
            return Mod(o, self.p).v
        return NotImplemented

    def __add__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return w
        return Mod(self.v + w, self.p)

    __radd__ = __add__

    def __sub__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return w
        return Mod(self.v - w, self.p)

    def __rsub__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return w
        return Mod(w - self.v, self.p)

    def __mul__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return w
        return Mod(self.v * w, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.v, self.p)

    def __pos__(self):
        return self

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("inverse of zero")
        return Mod(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return w
        return self * Mod(w, self.p).inverse()

    def __rtruediv__(self, o):
        return Mod(o, self.p) * self.inverse()

    def __eq__(self, o):
        if isinstance(o, Mod):
            return self.p == o.p and self.v == o.v
        if isinstance(o, (int, Fraction)):
            try:
                return self.v == Mod(o, self.p).v
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Mod({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """The rationals (``p == 0``) or the prime field GF(p)."""

    def __init__(self, p: int = 0):
        if p < 0 or p == 1:
            raise ValueError("characteristic must be 0 or a prime")
        if p > 1 and any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    def coerce(self, x):
        if self.p:
            return Mod(x, self.p)
        if isinstance(x, Mod):
            raise ValueError("cannot coerce a residue into QQ")
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        if isinstance(x, int):
            return x
        if isinstance(x, str):
            return self.parse(x)
        raise TypeError(f"not a scalar: {x!r}")

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def div(self, a, b):
        if self.p:
            return Mod(a, self.p) * Mod(b, self.p).inverse()
        return self.coerce(Fraction(a) / Fraction(b))

    def parse(self, s: str):
        """Parse ``"p/q"`` or an integer string."""
        s = str(s).strip()
        if "/" in s:
            n, d = s.split("/")
            val = Fraction(int(n), int(d))
        else:
            val = Fraction(int(s))
        return self.coerce(val)

    def fmt(self, x) -> str:
        x = self.coerce(x)
        if self.p:
            return str(x.v)
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def __eq__(self, o):
        return isinstance(o, Field) and o.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def is_zero(x) -> bool:
    return not x


# ---------------------------------------------------------------- matrices


class SparseMatrix:
    """Immutable sparse matrix with rows stored as dictionaries."""

    __slots__ = ("nrows", "ncols", "field", "_rows")

    def __init__(self, nrows: int, ncols: int, entries=None, field: Field = QQ):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        rows: Dict[int, Dict[int, object]] = {}
        if entries:
            if isinstance(entries, dict):
                items = [(r, c, v) for (r, c), v in entries.items()]
            else:
                items = entries
            for r, c, val in items:
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise IndexError(f"entry ({r},{c}) outside {nrows}x{ncols}")
                val = field.coerce(val)
                row = rows.setdefault(r, {})
                acc = row.get(c, 0) + val
                if acc:
                    row[c] = acc
                else:
                    row.pop(c, None)
            rows = {r: row for r, row in rows.items() if row}
        self._rows = rows

    @classmethod
    def from_rows(cls, nrows: int, ncols: int, rows: Dict[int, Dict[int, object]], field: Field = QQ):
        m = cls(nrows, ncols, None, field)
        clean = {}
        for r, row in rows.items():
            cr = {c: field.coerce(v) for c, v in row.items() if v}
            if cr:
                clean[r] = cr
        m._rows = clean
        return m

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], field: Field = QQ, ncols: Optional[int] = None):
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(data)}
        return cls.from_rows(nrows, ncols, rows, field)

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[Dict[int, object]], field: Field = QQ):
        rows: Dict[int, Dict[int, object]] = {}
        for j, col in enumerate(cols):
            for i, v in col.items():
                if v:
                    rows.setdefault(i, {})[j] = v
        return cls.from_rows(nrows, len(cols), rows, field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ):
        return cls.from_rows(n, n, {i: {i: 1} for i in range(n)}, field)

    @classmethod
    def zero(cls, nrows: int, ncols: int, field: Field = QQ):
        return cls(nrows, ncols, None, field)

    @property
    def entries(self) -> List[tuple]:
        """Canonically sorted ``(row, col, value)`` triples."""
        return [(r, c, self._rows[r][c]) for r in sorted(self._rows) for c in sorted(self._rows[r])]

    def rows(self) -> Dict[int, Dict[int, object]]:
        return {r: dict(row) for r, row in self._rows.items()}

    def row(self, r: int) -> Dict[int, object]:
        return dict(self._rows.get(r, {}))

    def columns(self) -> Dict[int, Dict[int, object]]:
        cols: Dict[int, Dict[int, object]] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                cols.setdefault(c, {})[r] = v
        return cols

    def __getitem__(self, rc):
        r, c = rc
        return self._rows.get(r, {}).get(c, self.field.zero)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return not self._rows

    def to_dense(self) -> List[List]:
        z = self.field.zero
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for r, row in self._rows.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_rows(self.ncols, self.nrows, self.columns(), self.field)

    def __eq__(self, o):
        if not isinstance(o, SparseMatrix):
            return NotImplemented
        return self.shape == o.shape and self._rows == o._rows

    def __hash__(self):
        return hash((self.shape, tuple(self.entries)))

    def _check_same(self, o):
        if self.shape != o.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {o.shape}")

    def __add__(self, o: "SparseMatrix") -> "SparseMatrix":
        self._check_same(o)
        rows = self.rows()
        for r, row in o._rows.items():
            tgt = rows.setdefault(r, {})
            for c, v in row.items():
                acc = tgt.get(c, 0) + v
                if acc:
                    tgt[c] = acc
                else:
                    tgt.pop(c, None)
        return SparseMatrix.from_rows(self.nrows, self.ncols, rows, self.field)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, o):
        return self + (-o)

    def scale(self, s) -> "SparseMatrix":
        s = self.field.coerce(s)
        if not s:
            return SparseMatrix.zero(self.nrows, self.ncols, self.field)
        return SparseMatrix.from_rows(
            self.nrows, self.ncols,
            {r: {c: v * s for c, v in row.items()} for r, row in self._rows.items()},
            self.field)

    def __matmul__(self, o: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != o.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {o.shape}")
        out: Dict[int, Dict[int, object]] = {}
        for r, row in self._rows.items():
            acc: Dict[int, object] = {}
            for k, v in row.items():
                orow = o._rows.get(k)
                if not orow:
                    continue
                for c, w in orow.items():
                    acc[c] = acc.get(c, 0) + v * w
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out[r] = acc
        return SparseMatrix.from_rows(self.nrows, o.ncols, out, self.field)

    def apply(self, vec: Dict[int, object]) -> Dict[int, object]:
        """Multiply a sparse column vector (dict index -> value)."""
        out: Dict[int, object] = {}
        for r, row in self._rows.items():
            s = 0
            for c, v in row.items():
                w = vec.get(c)
                if w:
                    s = s + v * w
            if s:
                out[r] = s
        return out

    def apply_dense(self, vec: Sequence) -> List:
        res = self.apply({i: v for i, v in enumerate(vec) if v})
        z = self.field.zero
        return [res.get(i, z) for i in range(self.nrows)]

    def hstack(self, o: "SparseMatrix") -> "SparseMatrix":
        if self.nrows != o.nrows:
            raise ValueError("row count mismatch")
        rows = self.rows()
        for r, row in o._rows.items():
            rows.setdefault(r, {}).update({c + self.ncols: v for c, v in row.items()})
        return SparseMatrix.from_rows(self.nrows, self.ncols + o.ncols, rows, self.field)

    def vstack(self, o: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != o.ncols:
            raise ValueError("column count mismatch")
        rows = self.rows()
        for r, row in o._rows.items():
            rows[r + self.nrows] = dict(row)
        return SparseMatrix.from_rows(self.nrows + o.nrows, self.ncols, rows, self.field)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        cmap = {c: j for j, c in enumerate(cols)}
        out = {}
        for i, r in enumerate(rows):
            row = self._rows.get(r)
            if row:
                sel = {cmap[c]: v for c, v in row.items() if c in cmap}
                if sel:
                    out[i] = sel
        return SparseMatrix.from_rows(len(rows), len(cols), out, self.field)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, {self.field!r})"


# ------------------------------------------------------------ elimination


def _to_raw(row: Dict[int, object], field: Field) -> Dict[int, int]:
    """Field row -> raw integer row (primitive over QQ, reduced mod p)."""
    if field.p:
        p = field.p
        out = {}
        for c, v in row.items():
            w = (v.v if isinstance(v, Mod) else Mod(v, p).v)
            if w:
                out[c] = w
        return out
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            d = v.denominator
            den = den * d // gcd(den, d)
    out = {c: int(Fraction(v) * den) for c, v in row.items() if v}
    return _primitive(out)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


class Echelon:
    """Incremental row echelon form.

    Rows are inserted one at a time; a new pivot is created at the first
    nonzero column of the reduced row.  Over QQ the rows are primitive
    integer vectors.  ``bound`` limits pivot columns to ``c < bound`` so the
    columns from ``bound`` on behave as an augmented part.
    """

    def __init__(self, field: Field = QQ, bound: Optional[int] = None):
        self.field = field
        self.bound = bound
        self.pivots: Dict[int, Dict[int, int]] = {}
        self.order: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce(self, row: Dict[int, int], full: bool = False) -> Dict[int, int]:
        p = self.field.p
        pivots = self.pivots
        bound = self.bound
        heap = [c for c in row if c in pivots]
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            a = row.get(c)
            if not a:
                continue
            prow = pivots[c]
            pc = prow[c]
            if p:
                f = a * pow(pc, -1, p) % p
                for k, v in prow.items():
                    nv = (row.get(k, 0) - f * v) % p
                    if nv:
                        row[k] = nv
                        if k in pivots and k not in seen:
                            heapq.heappush(heap, k)
                    else:
                        row.pop(k, None)
            else:
                g = gcd(a, pc)
                fa, fp = pc // g, a // g
                if fa != 1:
                    row = {k: v * fa for k, v in row.items()}
                for k, v in prow.items():
                    nv = row.get(k, 0) - fp * v
                    if nv:
                        row[k] = nv
                        if k in pivots and k not in seen:
                            heapq.heappush(heap, k)
                    else:
                        row.pop(k, None)
                row = _primitive(row)
        return row

    def add_raw(self, row: Dict[int, int]) -> Optional[int]:
        """Insert a raw row; return the new pivot column or ``None``."""
        row = self._reduce(dict(row))
        if not row:
            return None
        lead_cols = [c for c in row if self.bound is None or c < self.bound]
        if not lead_cols:
            return -1
        lead = min(lead_cols)
        self.pivots[lead] = row
        self.order.append(lead)
        return lead

    def add(self, row: Dict[int, object]) -> Optional[int]:
        return self.add_raw(_to_raw(row, self.field))

    def contains(self, row: Dict[int, object]) -> bool:
        return not self._reduce(_to_raw(row, self.field))

    def reduce(self, row: Dict[int, object]) -> Dict[int, object]:
        """Normal form of a row modulo the span (up to a scalar over QQ)."""
        raw = self._reduce(_to_raw(row, self.field))
        return {c: self.field.coerce(v) for c, v in raw.items()}

    def rref(self) -> Dict[int, Dict[int, int]]:
        """Fully reduced pivot rows (raw form), keyed by pivot column."""
        p = self.field.p
        cols = sorted(self.pivots, reverse=True)
        done: Dict[int, Dict[int, int]] = {}
        for c in cols:
            row = dict(self.pivots[c])
            for k in sorted([k for k in row if k in done and k != c]):
                a = row.get(k)
                if not a:
                    continue
                prow = done[k]
                pk = prow[k]
                if p:
                    f = a * pow(pk, -1, p) % p
                    for kk, v in prow.items():
                        nv = (row.get(kk, 0) - f * v) % p
                        if nv:
                            row[kk] = nv
                        else:
                            row.pop(kk, None)
                else:
                    g = gcd(a, pk)
                    fa, fp = pk // g, a // g
                    if fa != 1:
                        row = {kk: v * fa for kk, v in row.items()}
                    for kk, v in prow.items():
                        nv = row.get(kk, 0) - fp * v
                        if nv:
                            row[kk] = nv
                        else:
                            row.pop(kk, None)
                    row = _primitive(row)
            done[c] = row
        return done


def _echelon_of(M: SparseMatrix, bound=None) -> Echelon:
    E = Echelon(M.field, bound)
    for r in sorted(M._rows):
        E.add(M._rows[r])
    return E


def rank(M: SparseMatrix) -> int:
    return _echelon_of(M).rank


def _div(field: Field, a: int, b: int):
    if field.p:
        return Mod(a * pow(b, -1, field.p), field.p)
    return field.coerce(Fraction(a, b))


def kernel_basis(M: SparseMatrix, sparse: bool = False) -> list:
    """Basis of the null space, one vector per free column in increasing order."""
    E = _echelon_of(M)
    R = E.rref()
    pivset = set(R)
    out = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        vec: Dict[int, object] = {f: M.field.one}
        for c, row in R.items():
            a = row.get(f)
            if a:
                vec[c] = _div(M.field, -a, row[c])
        if sparse:
            out.append(vec)
        else:
            z = M.field.zero
            out.append([vec.get(i, z) for i in range(M.ncols)])
    return out


def solve(M: SparseMatrix, b, sparse: bool = False):
    """One solution of ``M x = b`` (free variables set to zero)."""
    nc = M.ncols
    if isinstance(b, dict):
        bvec = {i: v for i, v in b.items() if v}
    else:
        if len(b) != M.nrows:
            raise ValueError("right-hand side has wrong length")
        bvec = {i: v for i, v in enumerate(b) if v}
    E = Echelon(M.field, bound=nc)
    for r in range(M.nrows):
        row = dict(M._rows.get(r, {}))
        if r in bvec:
            row[nc] = bvec[r]
        if row:
            if E.add(row) == -1:
                raise Inconsistent(f"row {r} reduces to 0 = nonzero")
    R = E.rref()
    x: Dict[int, object] = {}
    for c, row in R.items():
        a = row.get(nc)
        if a:
            x[c] = _div(M.field, a, row[c])
    if sparse:
        return x
    z = M.field.zero
    return [x.get(i, z) for i in range(nc)]


def image_basis(M: SparseMatrix) -> List[Dict[int, object]]:
    """Echelon basis of the column space, as sparse column vectors."""
    E = _echelon_of(M.transpose())
    R = E.rref()
    return [{k: M.field.coerce(v) for k, v in R[c].items()} for c in sorted(R)]


def nullity(M: SparseMatrix) -> int:
    return M.ncols - rank(M)


def quotient_dim(sub: Iterable[Dict[int, object]], amb: Iterable[Dict[int, object]], field: Field = QQ) -> int:
    """dim span(amb + sub) - dim span(sub)."""
    E = Echelon(field)
    for v in sub:
        E.add(v)
    r0 = E.rank
    for v in amb:
        E.add(v)
    return E.rank - r0
