"""Independent oracles for the test suite.

Everything here avoids the package's linear algebra: ranks go through
sympy's DomainMatrix, degreewise matrices are assembled from scratch, and
invariant factors come from determinantal divisors.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy
from sympy.polys.domains import GF, QQ as SQQ
from sympy.polys.matrices import DomainMatrix


def _domain(field):
    return SQQ if field.characteristic == 0 else GF(field.characteristic)


def rank(field, rows: list[list]) -> int:
    """Rank of a dense matrix given as rows of field elements."""
    if not rows or not rows[0]:
        return 0
    K = _domain(field)
    conv = [[K.convert(sympy.Rational(Fraction(a)) if field.characteristic == 0 else int(a))
             for a in row] for row in rows]
    return DomainMatrix(conv, (len(rows), len(rows[0])), K).rank()


def mat_rank(m) -> int:
    """Rank of a package ``Mat`` via sympy (only the entries are borrowed)."""
    rows = [[m.cols[j].get(i, m.field.zero) for j in range(m.ncols)] for i in range(m.nrows)]
    return rank(m.field, rows)


def _piece(ring, degrees, d):
    return [(j, e) for j, n in enumerate(degrees) for e in ring.monomials(d - n)]


def dg_differential_rows(M, d):
    """Dense matrix of ∂: M_d -> M_{d-1}, built term by term."""
    src = _piece(M.ring, M.degrees, d)
    tgt = _piece(M.ring, M.degrees, d - 1)
    index = {b: k for k, b in enumerate(tgt)}
    field = M.ring.field
    rows = [[field.zero] * len(src) for _ in tgt]
    for col, (j, e) in enumerate(src):
        s = -1 if (M.convention == "koszul" and sum(e) % 2) else 1
        for i in range(M.rank):
            for f, c in M.D[i][j].terms.items():
                key = (i, tuple(a + b for a, b in zip(e, f)))
                rows[index[key]][col] = field.add(rows[index[key]][col], field.mul(field(s), c))
    return rows, len(src), len(tgt)


def dg_homology_dims(M, window) -> dict:
    """dim H_d(M) for d in the window."""
    lo, hi = window
    out = {}
    for d in range(lo, hi + 1):
        rows, n_src, _ = dg_differential_rows(M, d)
        up, _, _ = dg_differential_rows(M, d + 1)
        out[d] = n_src - rank(M.ring.field, rows) - rank(M.ring.field, up)
    return out


def invariant_factor_degrees(P) -> list[int]:
    """Degrees of the invariant factors of a univariate homogeneous matrix.

    The k-th determinantal divisor of a matrix of monomials is x^(minimal
    degree among nonzero k×k minors); invariant factors are the successive
    quotients.
    """
    x = sympy.Symbol("x")
    rows = [[sympy.Poly(sum(sympy.Rational(Fraction(c)) * x ** e[0] for e, c in p.terms.items()),
                        x).as_expr() for p in row] for row in P.entries]
    m = sympy.Matrix(rows) if rows and rows[0] else sympy.zeros(len(rows), 0)
    nr, nc = m.shape
    divisors = [0]
    for k in range(1, min(nr, nc) + 1):
        best = None
        for r in itertools.combinations(range(nr), k):
            for c in itertools.combinations(range(nc), k):
                det = sympy.expand(m.extract(list(r), list(c)).det())
                if det != 0:
                    deg = sympy.Poly(det, x).degree()
                    best = deg if best is None else min(best, deg)
        if best is None:
            break
        divisors.append(best)
    return [divisors[k] - divisors[k - 1] for k in range(1, len(divisors))]


def end0_dimension(P, window) -> int:
    """dim of degree-zero endomorphisms of coker P by a quotient-space solve.

    Unknowns: the image of each generator g_k as a vector in H_{r_k}, written
    in coordinates of a complement of im P.  Constraints: every relation must
    map to zero in H at its degree.
    """
    ring = P.ring
    field = ring.field
    F0, F1 = P.target, P.source
    r, c = list(F0.twists), list(F1.twists)

    def image_rows(d):
        m = P.realize(d)
        return [[m.cols[j].get(i, field.zero) for j in range(m.ncols)] for i in range(m.nrows)]

    def complement(d):
        """Indices of unit vectors completing a basis of im P_d inside F0_d."""
        rows = image_rows(d)
        cols = [list(col) for col in zip(*rows)] if rows and rows[0] else []
        base = rank(field, [list(v) for v in zip(*cols)]) if cols else 0
        chosen = []
        current = cols
        for k in range(F0.dim(d)):
            unit = [field.one if t == k else field.zero for t in range(F0.dim(d))]
            trial = current + [unit]
            if rank(field, [list(v) for v in zip(*trial)]) > base + len(chosen):
                chosen.append(k)
                current = trial
        return chosen, cols

    unknowns = []  # (generator, coordinate index in F0_{r_k})
    for k, rk in enumerate(r):
        comp, _ = complement(rk)
        unknowns.extend((k, u) for u in comp)
    # constraint for relation b: Σ_k P[k][b] ψ(g_k) lies in im P at degree c_b
    # variables: unknowns plus coefficients of im P_{c_b} (spanning columns)
    equations = []
    extra_cols = 0
    blocks = []
    for b, cb in enumerate(c):
        dim = F0.dim(cb)
        span = image_rows(cb)
        span_cols = [list(col) for col in zip(*span)] if span and span[0] else []
        block = [[field.zero] * len(unknowns) for _ in range(dim)]
        for u, (k, coord) in enumerate(unknowns):
            vec = F0.from_coords(r[k], {coord: field.one})
            p = P.entries[k][b]
            if not p:
                continue
            img = [p * q for q in vec]
            coords = F0.to_coords(cb, img)
            for idx, val in coords.items():
                block[idx][u] = val
        blocks.append((block, span_cols, dim))
        extra_cols += len(span_cols)
    ncols = len(unknowns) + extra_cols
    offset = len(unknowns)
    for block, span_cols, dim in blocks:
        for row_idx in range(dim):
            row = list(block[row_idx]) + [field.zero] * extra_cols
            for t, col in enumerate(span_cols):
                row[offset + t] = field.neg(col[row_idx])
            equations.append(row)
        offset += len(span_cols)
    if not unknowns:
        return 0
    # dimension of the projection of the solution space onto the unknowns
    full = ncols - rank(field, equations) if equations else ncols
    # solutions with all unknowns zero: only the span coefficients
    sub = [row[len(unknowns):] for row in equations]
    kernel_extra = extra_cols - (rank(field, sub) if sub and extra_cols else 0)
    return full - kernel_extra
