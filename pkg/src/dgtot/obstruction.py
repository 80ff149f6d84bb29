"""Rank versus Betti numbers: certifying that a DG module is not a totaling.

If M is minimal and H(M) is indecomposable, then M lies in the image of Tot
only if rank M equals the total Betti number of H(M).  This module computes
minimal free resolutions degreewise, the degree-zero endomorphism algebra of
H(M), and decides indecomposability where it can.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field

from .algebra import Field, Poly
from .dg import (
    HomologyPresentation,
    SemifreeDG,
    SubquotientPresentation,
    default_slack,
    dg_homology,
    is_minimal,
    lift_matrix,
    suggest_window,
    validate_dg,
)
from .graded import GradedMatrix, graded_min_gens
from .linalg import Echelon, Mat


# ---------------------------------------------------------------------------
# minimal free resolutions


@dataclass
class BettiResolution:
    maps: list  # maps[i]: F_{i+1} -> F_i
    twists: list  # twists[i] of F_i
    window: tuple
    certified: bool
    reason: str | None = None
    method: str = "degreewise"

    @property
    def length(self) -> int:
        return len([t for t in self.twists if t]) - 1

    def betti(self) -> dict:
        out = {}
        for i, tw in enumerate(self.twists):
            if not tw:
                continue
            row: dict = {}
            for a in tw:
                row[a] = row.get(a, 0) + 1
            out[i] = dict(sorted(row.items()))
        return out

    def betti_numbers(self) -> list[int]:
        return [len(t) for t in self.twists if t]

    @property
    def betti_sum(self) -> int:
        return sum(self.betti_numbers())

    def as_dict(self):
        return {
            "method": self.method,
            "window": list(self.window),
            "certified": self.certified,
            "reason": self.reason,
            "betti_numbers": self.betti_numbers(),
            "betti_sum": self.betti_sum,
            "twists": [sorted(t) for t in self.twists if t],
            "betti_table": {str(i): {str(j): c for j, c in row.items()}
                            for i, row in self.betti().items()},
        }


def _presentation_of(H) -> SubquotientPresentation:
    if isinstance(H, HomologyPresentation):
        return H.subquotient
    return H


def minimal_free_resolution(H, window=None, method: str = "auto", slack=None,
                            max_length=None) -> BettiResolution:
    """Minimal graded free resolution of coker(presentation).

    ``method`` is ``degreewise`` (iterated kernels and minimal generators),
    ``diagonalize`` (one variable only) or ``auto`` (diagonalize when the
    ring has one variable).
    """
    sq = _presentation_of(H)
    P = sq.relations
    ring = P.ring
    if window is None:
        window = sq.window
    if method == "auto":
        method = "diagonalize" if ring.nvars == 1 else "degreewise"
    if method == "diagonalize":
        from .univariate import graded_diagonalize

        snf = graded_diagonalize(P)
        F0 = sorted([r for r, _ in snf.pairs] + list(snf.free_twists))
        F1 = sorted(c for _, c in snf.pairs)
        twists = [F0, F1] if F1 else [F0]
        return BettiResolution([P], twists, tuple(window), sq.certified,
                               sq.reason, "diagonalize")
    if slack is None:
        slack = default_slack(window)
    if max_length is None:
        max_length = ring.nvars + 1
    lo, hi = window
    maps = [P]
    twists = [list(P.target.twists), list(P.source.twists)]
    certified, reason = sq.certified, sq.reason
    current = P
    while current.source.rank and len(maps) <= max_length:
        src = current.source

        def ker_at(d, m=current):
            return m.realize(d).kernel()

        gens = graded_min_gens(src, ker_at, window, slack=slack)
        if not gens.degrees:
            nxt = None
        else:
            nxt = lift_matrix(src, gens.degrees, gens.vectors)
        if not gens.stable and certified:
            certified, reason = False, f"syzygies found within {slack} of the window top {hi}"
        start = min(lo, min(src.twists, default=lo))
        for d in range(start, hi + 1):
            k = current.realize(d).ncols - current.realize(d).rank()
            im = nxt.realize(d).rank() if nxt is not None else 0
            if k != im and certified:
                certified = False
                reason = f"step {len(maps)} is not exact in degree {d}"
        if nxt is None:
            break
        maps.append(nxt)
        twists.append(list(nxt.source.twists))
        current = nxt
    twists = [t for t in twists if t] or [[]]
    return BettiResolution(maps, twists, tuple(window), certified, reason, "degreewise")


# ---------------------------------------------------------------------------
# degree-zero endomorphisms


@dataclass
class End0Algebra:
    """k-basis (identity first) of degree-zero endomorphisms of coker(P)."""

    presentation: GradedMatrix
    basis: list  # generator-level matrices (Poly), basis[0] is the identity
    mult: list  # mult[a][b] = coordinates of basis[a] ∘ basis[b]
    field: Field

    @property
    def dim(self) -> int:
        return len(self.basis)

    def product(self, u: list, v: list) -> list:
        f = self.field
        out = [f.zero] * self.dim
        for a, ua in enumerate(u):
            if not ua:
                continue
            for b, vb in enumerate(v):
                if not vb:
                    continue
                c = f.mul(ua, vb)
                for k, w in enumerate(self.mult[a][b]):
                    if w:
                        out[k] = f.add(out[k], f.mul(c, w))
        return out

    def unit(self) -> list:
        f = self.field
        return [f.one] + [f.zero] * (self.dim - 1)

    def matrix_of(self, u: list) -> list:
        ring = self.presentation.ring
        n = self.presentation.target.rank
        out = [[ring.zero] * n for _ in range(n)]
        for a, c in enumerate(u):
            if c:
                for i in range(n):
                    for j in range(n):
                        if self.basis[a][i][j]:
                            out[i][j] = out[i][j] + self.basis[a][i][j].scale(c)
        return out

    def format(self, u: list) -> list[list[str]]:
        return [[str(p) for p in row] for row in self.matrix_of(u)]

    def as_dict(self):
        return {"dim": self.dim, "basis": [[[str(p) for p in row] for row in B]
                                           for B in self.basis]}


class _Coords:
    """Coefficient coordinates for generator-level matrices of a fixed degree pattern."""

    def __init__(self, ring, row_twists, col_twists):
        self.ring = ring
        self.index = {}
        self.keys = []
        for k, rk in enumerate(row_twists):
            for l, cl in enumerate(col_twists):
                for m in ring.monomials(cl - rk):
                    self.index[(k, l, m)] = len(self.keys)
                    self.keys.append((k, l, m))
        self.shape = (len(row_twists), len(col_twists))

    def vector(self, mat) -> dict:
        out = {}
        for k, row in enumerate(mat):
            for l, p in enumerate(row):
                for e, c in p.terms.items():
                    out[self.index[(k, l, e)]] = c
        return out

    def matrix(self, vec) -> list:
        terms = [[{} for _ in range(self.shape[1])] for _ in range(self.shape[0])]
        for u, c in vec.items():
            k, l, m = self.keys[u]
            terms[k][l][m] = c
        return [[Poly(self.ring, t, _clean=True) for t in row] for row in terms]


def _matmul(ring, A, B):
    inner = len(B)
    m = len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(inner) if A[i][k] and B[k][j]), ring.zero)
             for j in range(m)] for i in range(len(A))]


def end0(H, window=None) -> End0Algebra:
    """Degree-zero endomorphisms of coker(P), P: F1 -> F0 the presentation.

    ψ is given on generators by a matrix Ψ; it is well defined iff ΨP = PQ for
    some degree-zero Q, and it is zero iff Ψ = PR for some R.  Both conditions
    are finite linear systems in the coefficients, so no window is needed.
    """
    P = _presentation_of(H).relations
    ring = P.ring
    field = ring.field
    r = list(P.target.twists)
    c = list(P.source.twists)
    psi = _Coords(ring, r, r)
    q = _Coords(ring, c, c)
    out = _Coords(ring, r, c)
    # columns of the map (Ψ, Q) -> ΨP - PQ
    cols = []
    for (k, l, m) in psi.keys:
        E = [[ring.zero] * len(r) for _ in r]
        E[k][l] = ring.monomial(m)
        cols.append(out.vector(_matmul(ring, E, P.entries)))
    for (a, b, m) in q.keys:
        E = [[ring.zero] * len(c) for _ in c]
        E[a][b] = ring.monomial(m)
        prod = _matmul(ring, P.entries, E)
        cols.append({u: field.neg(v) for u, v in out.vector(prod).items()})
    system = Mat(field, len(out.keys), len(cols), cols)
    npsi = len(psi.keys)
    valid = Echelon(field)
    for v in system.kernel():
        w = {u: x for u, x in v.items() if u < npsi}
        if w:
            valid.add(w)
    trivial = Echelon(field)
    for (a, l) in itertools.product(range(len(c)), range(len(r))):
        for m in ring.monomials(r[l] - c[a]):
            R = [[ring.zero] * len(r) for _ in c]
            R[a][l] = ring.monomial(m)
            trivial.add(psi.vector(_matmul(ring, P.entries, R)))
    ident = psi.vector([[ring.one if i == j else ring.zero for j in range(len(r))]
                        for i in range(len(r))])
    reps = []
    span = Echelon(field, trivial.basis())
    for v in [ident] + valid.basis():
        if span.add(v):
            reps.append(v)
    basis = [psi.matrix(v) for v in reps]
    # structure constants by solving against reps + trivial
    gen_cols = [dict(v) for v in reps] + trivial.basis()
    solver = Mat(field, len(psi.keys), len(gen_cols), gen_cols)
    mult = []
    for A in basis:
        row = []
        for B in basis:
            sol = solver.solve(psi.vector(_matmul(ring, A, B)))
            if sol is None:
                raise AssertionError("endomorphisms are not closed under composition")
            row.append([sol.get(k, field.zero) for k in range(len(reps))])
        mult.append(row)
    if not reps:
        return End0Algebra(P, [], [], field)
    return End0Algebra(P, basis, mult, field)


# ---------------------------------------------------------------------------
# univariate polynomials over a field, as coefficient lists (low degree first)


def _ptrim(f, field):
    f = list(f)
    while f and not f[-1]:
        f.pop()
    return f


def _pdivmod(f, g, field):
    f = _ptrim(f, field)
    g = _ptrim(g, field)
    q = [field.zero] * max(len(f) - len(g) + 1, 0)
    inv = field.inv(g[-1])
    while len(f) >= len(g) and f:
        c = field.mul(f[-1], inv)
        s = len(f) - len(g)
        q[s] = c
        for i, gi in enumerate(g):
            f[s + i] = field.sub(f[s + i], field.mul(c, gi))
        f = _ptrim(f, field)
    return _ptrim(q, field), f


def _pmul(f, g, field):
    if not f or not g:
        return []
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return _ptrim(out, field)


def _psub(f, g, field):
    n = max(len(f), len(g))
    f = list(f) + [field.zero] * (n - len(f))
    g = list(g) + [field.zero] * (n - len(g))
    return _ptrim([field.sub(a, b) for a, b in zip(f, g)], field)


def _pgcdex(f, g, field):
    """(d, u, v) with u f + v g = d monic."""
    r0, r1 = _ptrim(f, field), _ptrim(g, field)
    s0, s1 = [field.one], []
    t0, t1 = [], [field.one]
    while r1:
        q, r = _pdivmod(r0, r1, field)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1, field), field)
        t0, t1 = t1, _psub(t0, _pmul(q, t1, field), field)
    inv = field.inv(r0[-1])
    sc = lambda p: [field.mul(inv, a) for a in p]  # noqa: E731
    return sc(r0), sc(s0), sc(t0)


def _pderiv(f, field):
    return _ptrim([field.mul(field(i), a) for i, a in enumerate(f)][1:], field)


def _peval(f, x, field):
    out = field.zero
    for a in reversed(f):
        out = field.add(field.mul(out, x), a)
    return out


def _rational_roots(f, field, limit=10**6):
    from fractions import Fraction
    from math import lcm

    den = 1
    for a in f:
        den = lcm(den, a.denominator)
    ints = [int(a * den) for a in f]
    while ints and ints[0] == 0:
        return [Fraction(0)] + [r for r in _rational_roots(f[1:], field, limit) if r]
    a0, an = abs(ints[0]), abs(ints[-1])
    if a0 > limit or an > limit:
        return []
    divs = lambda n: [d for d in range(1, n + 1) if n % d == 0]  # noqa: E731
    roots = []
    for p in divs(a0):
        for qd in divs(an):
            for s in (1, -1):
                x = Fraction(s * p, qd)
                if x not in roots and _peval(f, x, field) == 0:
                    roots.append(x)
    return roots


def _find_root(f, field):
    if len(f) == 2:
        return field.neg(field.div(f[0], f[1]))
    p = field.characteristic
    if p == 0:
        roots = _rational_roots(f, field)
        return roots[0] if roots else None
    if p <= 10**5:
        for x in range(p):
            if _peval(f, x, field) == 0:
                return x
    return None


# ---------------------------------------------------------------------------
# indecomposability


def _power_vectors(alg: End0Algebra, u: list):
    """Minimal polynomial of u (coefficient list, monic) via its powers."""
    f = alg.field
    powers = [alg.unit()]
    while True:
        nxt = alg.product(powers[-1], u)
        cols = [{k: v for k, v in enumerate(p) if v} for p in powers]
        sol = Mat(f, alg.dim, len(powers), cols).solve({k: v for k, v in enumerate(nxt) if v})
        if sol is not None:
            coeffs = [f.neg(sol.get(k, f.zero)) for k in range(len(powers))] + [f.one]
            return coeffs, powers
        powers.append(nxt)


def _evaluate(alg: End0Algebra, poly, powers_of):
    f = alg.field
    out = [f.zero] * alg.dim
    cur = alg.unit()
    for k, a in enumerate(poly):
        if k:
            cur = alg.product(cur, powers_of)
        if a:
            out = [f.add(x, f.mul(a, y)) for x, y in zip(out, cur)]
    return out


def _is_idempotent(alg, e) -> bool:
    if alg.product(e, e) != e:
        return False
    return any(e) and e != alg.unit()


def _single_eigenvalue(alg, u):
    """λ if u - λ·1 is nilpotent, else None; also returns an idempotent if u splits."""
    f = alg.field
    mp, _ = _power_vectors(alg, u)
    d = _pderiv(mp, f)
    if d:
        g, _, _ = _pgcdex(mp, d, f)
        sqf, _ = _pdivmod(mp, g, f)
    else:
        sqf = mp
    if len(sqf) == 2:
        return f.neg(f.div(sqf[0], sqf[1])), None
    lam = _find_root(sqf, f) if len(sqf) > 2 else None
    if lam is None:
        return None, None
    # split mp = (x - λ)^k h with h(λ) != 0
    lin = [f.neg(lam), f.one]
    a, h = [f.one], mp
    while True:
        q, rem = _pdivmod(h, lin, f)
        if rem:
            break
        a, h = _pmul(a, lin, f), q
    _, s, t = _pgcdex(a, h, f)
    # e = t h (b) is 1 on the λ-part and 0 on the rest
    e_poly = _pmul(t, h, f)
    e = _evaluate(alg, e_poly, u)
    return None, (e if _is_idempotent(alg, e) else None)


@dataclass
class Indecomposability:
    verdict: str  # YES | NO | INDETERMINATE
    criterion: str | None
    witness: list | None = None  # idempotent as a generator-level matrix (strings)
    end0_dim: int = 0
    notes: list = dc_field(default_factory=list)

    def as_dict(self):
        return {"verdict": self.verdict, "criterion": self.criterion,
                "witness": self.witness, "end0_dim": self.end0_dim, "notes": self.notes}


def _nilpotent_complement(alg: End0Algebra, lambdas: list) -> bool:
    """Is N = span{b_k - λ_k} (k >= 1) a nilpotent subalgebra?"""
    f = alg.field
    N = []
    for k in range(1, alg.dim):
        v = [f.zero] * alg.dim
        v[k] = f.one
        v[0] = f.sub(v[0], lambdas[k])
        N.append(v)
    span = Echelon(f, [{k: x for k, x in enumerate(v) if x} for v in N])
    for a in N:
        for b in N:
            p = alg.product(a, b)
            if not span.contains({k: x for k, x in enumerate(p) if x}):
                return False
    power = N
    for _ in range(alg.dim + 1):
        nxt = Echelon(f)
        for a in power:
            for b in N:
                nxt.add({k: x for k, x in enumerate(alg.product(a, b)) if x})
        if not nxt.dim:
            return True
        power = [[v.get(k, f.zero) for k in range(alg.dim)] for v in nxt.basis()]
    return False


def _subset_projections(alg: End0Algebra, P: GradedMatrix):
    """Diagonal 0/1 generator projections that are well defined and nontrivial."""
    ring = P.ring
    n = P.target.rank
    if n > 12:
        return None
    coords = _Coords(ring, P.target.twists, P.target.twists)
    for size in range(1, n):
        for S in itertools.combinations(range(n), size):
            E = [[ring.one if (i == j and i in S) else ring.zero for j in range(n)]
                 for i in range(n)]
            e = _in_algebra(alg, P, coords.vector(E))
            if e is not None and _is_idempotent(alg, e):
                return e
    return None


def _in_algebra(alg: End0Algebra, P: GradedMatrix, vec: dict):
    """Coordinates of a generator-level matrix in End0, or None if not well defined."""
    ring = P.ring
    f = alg.field
    coords = _Coords(ring, P.target.twists, P.target.twists)
    mat = coords.matrix(vec)
    # well defined iff ΨP ⊆ im P: check column by column with exact solves
    r = list(P.target.twists)
    c = list(P.source.twists)
    q = _Coords(ring, c, c)
    out = _Coords(ring, r, c)
    cols = []
    for (a, b, m) in q.keys:
        E = [[ring.zero] * len(c) for _ in c]
        E[a][b] = ring.monomial(m)
        cols.append(out.vector(_matmul(ring, P.entries, E)))
    target = out.vector(_matmul(ring, mat, P.entries))
    if target and (not cols or Mat(f, len(out.keys), len(cols), cols).solve(target) is None):
        return None
    gen_cols = [coords.vector(B) for B in alg.basis]
    trivial = []
    for a in range(len(c)):
        for l in range(len(r)):
            for m in ring.monomials(r[l] - c[a]):
                R = [[ring.zero] * len(r) for _ in c]
                R[a][l] = ring.monomial(m)
                trivial.append(coords.vector(_matmul(ring, P.entries, R)))
    solver = Mat(f, len(coords.keys), len(gen_cols) + len(trivial), gen_cols + trivial)
    sol = solver.solve(vec)
    if sol is None:
        return None
    return [sol.get(k, f.zero) for k in range(alg.dim)]


def is_indecomposable(H, window=None, alg: End0Algebra | None = None, seed: int = 0,
                      exhaustive_limit: int = 10**6) -> Indecomposability:
    P = _presentation_of(H).relations
    if alg is None:
        alg = end0(H, window)
    f = alg.field
    dim = alg.dim
    if dim == 0:
        return Indecomposability("INDETERMINATE", None, None, 0, ["H(M) is zero"])
    if dim == 1:
        return Indecomposability("YES", "one_dimensional", None, 1)
    e = _subset_projections(alg, P)
    if e is not None:
        return Indecomposability("NO", "generator_projection", alg.format(e), dim)
    rng = random.Random(seed)
    lambdas = [f.one]
    local = True
    candidates = []
    for k in range(1, dim):
        v = [f.zero] * dim
        v[k] = f.one
        candidates.append(v)
    for _ in range(4):
        candidates.append([f(rng.randint(-3, 3)) for _ in range(dim)])
    for idx, u in enumerate(candidates):
        lam, idem = _single_eigenvalue(alg, u)
        if idem is not None:
            return Indecomposability("NO", "fitting_idempotent", alg.format(idem), dim)
        if idx < dim - 1:
            if lam is None:
                local = False
            lambdas.append(lam)
    if local and _nilpotent_complement(alg, lambdas):
        return Indecomposability("YES", "local_ring", None, dim)
    p = f.characteristic
    if p and p ** dim <= exhaustive_limit:
        for coeffs in itertools.product(range(p), repeat=dim):
            u = list(coeffs)
            if _is_idempotent(alg, u):
                return Indecomposability("NO", "exhaustive", alg.format(u), dim)
        return Indecomposability("YES", "exhaustive", None, dim)
    return Indecomposability("INDETERMINATE", None, None, dim,
                             ["no idempotent found; local-ring criterion not met"])


# ---------------------------------------------------------------------------


@dataclass
class ObstructionVerdict:
    verdict: str  # NOT_IN_TOT_IMAGE | NO_OBSTRUCTION | INCONCLUSIVE
    rank: int
    betti_sum: int
    minimal: bool
    indecomposable: Indecomposability | None
    resolution: BettiResolution
    homology: HomologyPresentation
    failing_hypothesis: str | None = None

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "betti_sum": self.betti_sum,
            "betti_numbers": self.resolution.betti_numbers(),
            "betti_table": self.resolution.as_dict()["betti_table"],
            "twists": self.resolution.as_dict()["twists"],
            "minimal": self.minimal,
            "indecomposable": self.indecomposable.verdict if self.indecomposable else None,
            "indecomposability": self.indecomposable.as_dict() if self.indecomposable else None,
            "failing_hypothesis": self.failing_hypothesis,
            "homology": self.homology.as_dict(),
            "resolution": self.resolution.as_dict(),
        }


class ObstructionError(RuntimeError):
    def __init__(self, message, suggested_window=None):
        super().__init__(message)
        self.suggested_window = suggested_window


def tot_image_obstruction(M: SemifreeDG, window=None) -> ObstructionVerdict:
    check = validate_dg(M)
    if not check.ok:
        raise ValueError(check.violation.message)
    H = dg_homology(M, window)
    if not H.certified:
        raise ObstructionError(H.reason, H.suggested_window)
    res = minimal_free_resolution(H, H.window, method="degreewise")
    if not res.certified:
        raise ObstructionError(res.reason, suggest_window(H.window))
    minimal = is_minimal(M)
    total = res.betti_sum
    ind = is_indecomposable(H)
    if M.rank == total:
        return ObstructionVerdict("NO_OBSTRUCTION", M.rank, total, minimal, ind, res, H)
    if not minimal:
        return ObstructionVerdict("INCONCLUSIVE", M.rank, total, minimal, ind, res, H,
                                  "minimality")
    if ind.verdict != "YES":
        return ObstructionVerdict("INCONCLUSIVE", M.rank, total, minimal, ind, res, H,
                                  "indecomposability")
    return ObstructionVerdict("NOT_IN_TOT_IMAGE", M.rank, total, minimal, ind, res, H)
