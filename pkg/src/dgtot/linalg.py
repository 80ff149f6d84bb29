"""Sparse exact linear algebra over a ``Field``.

Vectors are dicts ``index -> nonzero coefficient``.  A ``Mat`` stores its
columns; rows are derived on demand.
"""

from __future__ import annotations


def vec_axpy(field, y: dict, a, x: dict) -> dict:
    """Return y + a*x (new dict)."""
    add, mul = field.add, field.mul
    out = dict(y)
    for k, v in x.items():
        w = mul(a, v)
        if k in out:
            w = add(out[k], w)
            if w:
                out[k] = w
            else:
                del out[k]
        elif w:
            out[k] = w
    return out


def vec_scale(field, a, x: dict) -> dict:
    if not a:
        return {}
    mul = field.mul
    return {k: mul(a, v) for k, v in x.items()}


class Echelon:
    """A subspace kept in fully reduced echelon form.

    Every basis vector has pivot = its smallest index, pivot coefficient 1,
    and no basis vector contains another's pivot.
    """

    def __init__(self, field, vectors=()):
        self.field = field
        self.rows: dict[int, dict] = {}
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        f = self.field
        out = dict(v)
        for p in [k for k in v if k in self.rows]:
            c = out.get(p)
            if c:
                out = vec_axpy(f, out, f.neg(c), self.rows[p])
        return out

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def add(self, v: dict) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        f = self.field
        p = min(r)
        r = vec_scale(f, f.inv(r[p]), r)
        for q, row in list(self.rows.items()):
            c = row.get(p)
            if c:
                self.rows[q] = vec_axpy(f, row, f.neg(c), r)
        self.rows[p] = r
        return True

    def basis(self) -> list[dict]:
        return [self.rows[p] for p in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)


class Mat:
    """An ``nrows x ncols`` matrix over ``field`` stored by sparse columns."""

    def __init__(self, field, nrows: int, ncols: int, cols=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else [{} for _ in range(ncols)]
        self._rows = None

    @classmethod
    def from_dense(cls, field, rows) -> Mat:
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                v = field(v)
                if v:
                    cols[j][i] = v
        return cls(field, nrows, ncols, cols)

    @classmethod
    def identity(cls, field, n: int) -> Mat:
        return cls(field, n, n, [{i: field.one} for i in range(n)])

    @property
    def rows(self) -> list[dict]:
        if self._rows is None:
            rows = [{} for _ in range(self.nrows)]
            for j, col in enumerate(self.cols):
                for i, v in col.items():
                    rows[i][j] = v
            self._rows = rows
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_dense(self) -> list[list]:
        z = self.field.zero
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def apply(self, v: dict) -> dict:
        f = self.field
        out: dict = {}
        for j, c in v.items():
            if c:
                out = vec_axpy(f, out, c, self.cols[j])
        return out

    def __matmul__(self, other: Mat) -> Mat:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Mat(self.field, self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def __add__(self, other: Mat) -> Mat:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        f = self.field
        return Mat(f, self.nrows, self.ncols,
                   [vec_axpy(f, a, f.one, b) for a, b in zip(self.cols, other.cols)])

    def __neg__(self) -> Mat:
        f = self.field
        return Mat(f, self.nrows, self.ncols, [vec_scale(f, f.neg(f.one), c) for c in self.cols])

    def __sub__(self, other: Mat) -> Mat:
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def is_zero(self) -> bool:
        return not any(self.cols)

    def transpose(self) -> Mat:
        return Mat(self.field, self.ncols, self.nrows, [dict(r) for r in self.rows])

    def rank(self) -> int:
        # forward elimination only; no back substitution is needed for the count
        f = self.field
        rows: dict[int, dict] = {}
        for v in self.cols:
            r = v
            while r:
                p = min(r)
                row = rows.get(p)
                if row is None:
                    rows[p] = vec_scale(f, f.inv(r[p]), r)
                    break
                r = vec_axpy(f, r, f.neg(r[p]), row)
        return len(rows)

    def image(self) -> list[dict]:
        """Reduced echelon basis of the column space."""
        return Echelon(self.field, self.cols).basis()

    def rref_rows(self) -> Echelon:
        return Echelon(self.field, self.rows)

    def kernel(self) -> list[dict]:
        """Basis of the null space, one vector per free column (RREF order)."""
        return [v for _, v in self.kernel_pairs()]

    def kernel_pairs(self) -> list[tuple[int, dict]]:
        """``(free column, kernel vector)`` pairs; the vector is 1 at its free
        column and 0 at every other free column."""
        f = self.field
        ech = self.rref_rows()
        pivots = set(ech.rows)
        out = []
        for free in range(self.ncols):
            if free in pivots:
                continue
            v = {free: f.one}
            for p, row in ech.rows.items():
                c = row.get(free)
                if c:
                    v[p] = f.neg(c)
            out.append((free, v))
        return out

    def solve(self, b: dict):
        """A particular solution x of ``self @ x = b`` (free variables 0), or None."""
        f = self.field
        n = self.ncols
        aug = [dict(r) for r in self.rows]
        for i, c in b.items():
            aug[i][n] = c
        ech = Echelon(f, aug)
        if n in ech.rows:
            return None
        return {p: row[n] for p, row in ech.rows.items() if n in row}


def zero_mat(field, nrows: int, ncols: int) -> Mat:
    return Mat(field, nrows, ncols)


def block_mat(field, blocks, row_sizes, col_sizes) -> Mat:
    """Assemble a block matrix from ``{(bi, bj): Mat}``."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    cols = [{} for _ in range(coff[-1])]
    for (bi, bj), m in blocks.items():
        for j, col in enumerate(m.cols):
            tgt = cols[coff[bj] + j]
            for i, v in col.items():
                tgt[roff[bi] + i] = v
    return Mat(field, roff[-1], coff[-1], cols)
