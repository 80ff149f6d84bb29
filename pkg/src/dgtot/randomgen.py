"""Seeded random inputs: semifree modules, bounded complexes, presentations.

Every generator takes a ``random.Random`` so suites are reproducible from
one integer seed.  Coefficients are small integers so exact arithmetic stays
cheap.
"""

from __future__ import annotations

import random

from .algebra import Poly, PolyRing
from .complex import GradedComplex
from .dg import SemifreeDG
from .graded import GradedMatrix, TwistedFreeModule
from .linalg import Mat

COEFFS = (-3, -2, -1, 1, 2, 3)


def _combine(field, basis: list, rng: random.Random, density: float) -> dict:
    """A random nonzero combination of ``basis`` (sparse vectors), or {}."""
    out: dict = {}
    for v in basis:
        if rng.random() > density:
            continue
        c = field(rng.choice(COEFFS))
        for k, x in v.items():
            y = field.add(out.get(k, field.zero), field.mul(c, x))
            if y:
                out[k] = y
            else:
                out.pop(k, None)
    if not out and basis:
        out = dict(basis[rng.randrange(len(basis))])
    return out


def random_cycle(M: SemifreeDG, degree: int, support: list[int], max_entry: int,
                 rng: random.Random, density: float = 0.7) -> list[Poly]:
    """A random cycle of M in ``degree`` using only basis elements in ``support``."""
    ring = M.ring
    field = ring.field
    unknowns = [(i, m) for i in support
                for m in ring.monomials(degree - M.degrees[i])
                if 0 <= degree - M.degrees[i] <= max_entry]
    if not unknowns:
        return [ring.zero] * M.rank
    rows: dict = {}
    cols = []
    for i, m in unknowns:
        vec = [ring.zero] * M.rank
        vec[i] = ring.monomial(m)
        col = {}
        for r, p in enumerate(M.apply(vec)):
            for e, c in p.terms.items():
                col[rows.setdefault((r, e), len(rows))] = c
        cols.append(col)
    kernel = Mat(field, len(rows), len(cols), cols).kernel()
    combo = _combine(field, kernel, rng, density)
    terms = [{} for _ in range(M.rank)]
    for u, c in combo.items():
        i, m = unknowns[u]
        terms[i][m] = c
    return [Poly(ring, t, _clean=True) for t in terms]


def random_semifree(ring: PolyRing, rng: random.Random, max_rank: int = 5,
                    max_degree: int = 10, max_entry: int = 8, convention: str = "even",
                    zero_prob: float = 0.15, rank: int | None = None) -> SemifreeDG:
    """A semifree DG module; ∂e_j is a random cycle on the earlier basis elements."""
    if rank is None:
        rank = rng.randint(1, max_rank)
    degrees = sorted(rng.randint(0, max_degree) for _ in range(rank))
    labels = [f"e{k + 1}" for k in range(rank)]
    D = [[ring.zero] * rank for _ in range(rank)]
    for j in range(rank):
        if rng.random() < zero_prob:
            continue
        M = SemifreeDG(ring, labels, degrees, D, convention)
        earlier = [i for i in range(j) if degrees[i] < degrees[j]]
        z = random_cycle(M, degrees[j] - 1, earlier, max_entry, rng)
        for i in range(rank):
            D[i][j] = z[i]
    return SemifreeDG(ring, labels, degrees, D, convention, "M")


def _random_kernel_column(d: GradedMatrix | None, F: TwistedFreeModule, degree: int,
                          max_entry: int, rng: random.Random) -> list[Poly]:
    """A random element of F_degree killed by ``d`` with entries of degree <= max_entry."""
    ring = F.ring
    field = ring.field
    allowed = []
    for k in range(F.dim(degree)):
        vec = F.from_coords(degree, {k: field.one})
        if max(p.degree() for p in vec if p) <= max_entry:
            allowed.append(k)
    if not allowed:
        return [ring.zero] * F.rank
    if d is None or d.target.rank == 0:
        basis = [{u: field.one} for u in range(len(allowed))]
    else:
        full = d.realize(degree)
        sub = Mat(field, full.nrows, len(allowed), [full.cols[k] for k in allowed])
        basis = sub.kernel()
    combo = _combine(field, basis, rng, 0.6)
    return F.from_coords(degree, {allowed[u]: c for u, c in combo.items()})


def random_complex(ring: PolyRing, rng: random.Random, max_rank: int = 3,
                   max_positions: int = 3, max_entry: int = 3, zero_prob: float = 0.1
                   ) -> GradedComplex:
    """A bounded complex in positions 0..p-1 with ∂∘∂ = 0 by construction."""
    p = rng.randint(1, max_positions)
    mods = {}
    base = rng.randint(0, 2)
    for i in range(p):
        r = rng.randint(1, max_rank)
        mods[i] = TwistedFreeModule(ring, sorted(base + rng.randint(0, 3) for _ in range(r)))
        base += rng.randint(0, 2)
    diffs = {}
    for i in range(1, p):
        src, tgt = mods[i], mods[i - 1]
        prev = diffs.get(i - 1)
        cols = []
        for c in src.twists:
            if rng.random() < zero_prob:
                cols.append([ring.zero] * tgt.rank)
            else:
                cols.append(_random_kernel_column(prev, tgt, c, max_entry, rng))
        rows = [[cols[b][a] for b in range(src.rank)] for a in range(tgt.rank)]
        diffs[i] = GradedMatrix(src, tgt, rows)
    return GradedComplex(ring, mods, diffs, "X")


def random_presentation(ring: PolyRing, rng: random.Random, max_rows: int = 4,
                        max_cols: int = 4, max_twist: int = 8, density: float = 0.6
                        ) -> GradedMatrix:
    """A random homogeneous matrix over k[x] (units and zero columns allowed)."""
    t = rng.randint(1, max_rows)
    s = rng.randint(0, max_cols)
    rows_tw = sorted(rng.randint(0, max_twist // 2) for _ in range(t))
    cols_tw = sorted(rng.randint(0, max_twist) for _ in range(s))
    x = ring.gen(0)
    entries = [[ring.zero] * s for _ in range(t)]
    for a, r in enumerate(rows_tw):
        for b, c in enumerate(cols_tw):
            if c >= r and rng.random() < density:
                entries[a][b] = x ** (c - r) * rng.choice(COEFFS)
    return GradedMatrix(TwistedFreeModule(ring, cols_tw), TwistedFreeModule(ring, rows_tw),
                        entries)
