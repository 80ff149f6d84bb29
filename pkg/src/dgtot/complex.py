"""Bounded chain complexes of twisted graded free modules."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Poly, PolyRing, sign
from .graded import (
    DegreewiseRealization,
    GradedMatrix,
    QuasiIsoCertificate,
    TwistedFreeModule,
    is_quasiiso_realized,
)
from .linalg import Echelon, Mat


class GradedComplex:
    """X = (modules, differentials) with ∂_i: X_i -> X_{i-1}."""

    def __init__(self, ring: PolyRing, modules: dict, diffs: dict | None = None, name=None):
        self.ring = ring
        self.name = name
        self.modules = {int(i): m for i, m in modules.items() if m.rank > 0}
        self.diffs = {}
        for i, d in (diffs or {}).items():
            i = int(i)
            if d.source != self.module(i) or d.target != self.module(i - 1):
                raise ValueError(f"differential {i} does not match the modules")
            if not d.is_zero():
                self.diffs[i] = d

    @property
    def support(self) -> list[int]:
        return sorted(self.modules)

    def module(self, i: int) -> TwistedFreeModule:
        return self.modules.get(i) or TwistedFreeModule(self.ring, [])

    def diff(self, i: int) -> GradedMatrix:
        d = self.diffs.get(i)
        if d is None:
            return GradedMatrix(self.module(i), self.module(i - 1))
        return d

    def twists(self) -> list[int]:
        return [a for i in self.support for a in self.modules[i].twists]

    def max_entry_degree(self) -> int:
        degs = [p.degree() for d in self.diffs.values() for row in d.entries for p in row if p]
        return max(degs, default=0)

    def auto_window(self, slack: int = 2) -> tuple[int, int]:
        tw = self.twists() or [0]
        return (min(tw), max(tw) + self.max_entry_degree() + slack)

    def __eq__(self, other):
        if not isinstance(other, GradedComplex):
            return NotImplemented
        if self.ring != other.ring or self.support != other.support:
            return False
        if any(self.modules[i] != other.modules[i] for i in self.support):
            return False
        keys = set(self.diffs) | set(other.diffs)
        return all(self.diff(i) == other.diff(i) for i in keys)

    def __repr__(self):
        mods = ", ".join(f"{i}:{list(self.modules[i].twists)}" for i in self.support)
        return f"GradedComplex({self.ring}, {{{mods}}})"

    def realize(self, window) -> DegreewiseRealization:
        lo, hi = window
        field = self.ring.field
        dims, diffs = {}, {}
        for i in self.support:
            for j in range(lo, hi + 1):
                dims[(i, j)] = self.modules[i].dim(j)
        for i in self.support:
            if i - 1 not in self.modules or i not in self.diffs:
                continue
            for j in range(lo, hi + 1):
                diffs[(i, j)] = self.diffs[i].realize(j)
        return DegreewiseRealization(field, dims, diffs)


@dataclass
class Violation:
    position: int
    entry: tuple | None
    message: str

    def as_dict(self):
        return {"position": self.position,
                "entry": list(self.entry) if self.entry else None,
                "message": self.message}


def validate_complex(X: GradedComplex) -> Violation | None:
    """None if X is a complex; otherwise the first offending position and entry."""
    for i in X.support:
        bad = X.diff(i).homogeneity_violation()
        if bad is not None:
            r, c, got, want = bad
            return Violation(i, (r, c), f"entry ({r},{c}) of d{i} has degree {got}, expected {want}")
    for i in sorted(set(X.diffs) | {p + 1 for p in X.diffs}):
        if i not in X.diffs or (i - 1) not in X.diffs:
            continue
        comp = X.diff(i - 1) @ X.diff(i)
        for r, row in enumerate(comp.entries):
            for c, p in enumerate(row):
                if p:
                    return Violation(
                        i, (r, c),
                        f"d{i - 1}*d{i} has nonzero entry ({r},{c}) = {p}",
                    )
    return None


class ComplexMorphism:
    """Degree-zero chain map with components μ_i: X_i -> Y_i."""

    def __init__(self, source: GradedComplex, target: GradedComplex, comps: dict | None = None,
                 name=None):
        self.source = source
        self.target = target
        self.name = name
        self.comps = {}
        for i, m in (comps or {}).items():
            if m.source != source.module(i) or m.target != target.module(i):
                raise ValueError(f"component {i} does not match the modules")
            self.comps[int(i)] = m

    @property
    def positions(self) -> list[int]:
        return sorted(set(self.source.support) | set(self.target.support))

    def comp(self, i: int) -> GradedMatrix:
        m = self.comps.get(i)
        if m is None:
            return GradedMatrix(self.source.module(i), self.target.module(i))
        return m

    def realize(self, window) -> dict:
        lo, hi = window
        return {(i, j): self.comp(i).realize(j)
                for i in self.positions for j in range(lo, hi + 1)}


def identity_morphism(X: GradedComplex) -> ComplexMorphism:
    comps = {}
    for i in X.support:
        F = X.module(i)
        ring = X.ring
        ent = [[ring.one if r == c else ring.zero for c in range(F.rank)] for r in range(F.rank)]
        comps[i] = GradedMatrix(F, F, ent)
    return ComplexMorphism(X, X, comps)


def zero_morphism(X: GradedComplex, Y: GradedComplex) -> ComplexMorphism:
    return ComplexMorphism(X, Y, {})


def validate_morphism(mu: ComplexMorphism) -> Violation | None:
    for i in mu.positions:
        bad = mu.comp(i).homogeneity_violation()
        if bad is not None:
            r, c, got, want = bad
            return Violation(i, (r, c), f"entry ({r},{c}) of component {i} has degree {got}, expected {want}")
        lhs = mu.target.diff(i) @ mu.comp(i)
        rhs = mu.comp(i - 1) @ mu.source.diff(i)
        if lhs != rhs:
            diff = lhs - rhs
            for r, row in enumerate(diff.entries):
                for c, p in enumerate(row):
                    if p:
                        return Violation(i, (r, c), f"∂μ - μ∂ at position {i} has entry {p}")
    return None


def shift_complex(X: GradedComplex, d: int) -> GradedComplex:
    mods = {i + d: m for i, m in X.modules.items()}
    s = sign(d)
    diffs = {}
    for i, m in X.diffs.items():
        ent = m.entries if s > 0 else [[-p for p in row] for row in m.entries]
        diffs[i + d] = GradedMatrix(m.source, m.target, ent, check=False)
    return GradedComplex(X.ring, mods, diffs)


def tensor_complexes(X: GradedComplex, Y: GradedComplex) -> GradedComplex:
    """X ⊗_A Y with ∂(x⊗y) = ∂x⊗y + (-1)^j x⊗∂y for x in X_j.

    A is commutative, so X carries its bimodule structure for free.
    Generators of position i are pairs (g, h) ordered by the X-position,
    then g, then h.
    """
    if X.ring != Y.ring:
        raise ValueError("tensor product needs a common ring")
    ring = X.ring
    layout: dict[int, list] = {}
    for j in X.support:
        for l in Y.support:
            for g in range(X.modules[j].rank):
                for h in range(Y.modules[l].rank):
                    layout.setdefault(j + l, []).append((j, g, l, h))
    mods = {}
    index = {}
    for i, gens in layout.items():
        tw = [X.modules[j].twists[g] + Y.modules[l].twists[h] for (j, g, l, h) in gens]
        mods[i] = TwistedFreeModule(ring, tw)
        for k, gen in enumerate(gens):
            index[gen] = k
    diffs = {}
    for i, gens in layout.items():
        if i - 1 not in layout:
            continue
        rows = [[ring.zero] * len(gens) for _ in layout[i - 1]]
        for col, (j, g, l, h) in enumerate(gens):
            dx = X.diff(j)
            if j - 1 in X.modules:
                for g2 in range(X.modules[j - 1].rank):
                    p = dx.entries[g2][g]
                    if p:
                        r = index[(j - 1, g2, l, h)]
                        rows[r][col] = rows[r][col] + p
            dy = Y.diff(l)
            if l - 1 in Y.modules:
                for h2 in range(Y.modules[l - 1].rank):
                    p = dy.entries[h2][h]
                    if p:
                        r = index[(j, g, l - 1, h2)]
                        rows[r][col] = rows[r][col] + (p if j % 2 == 0 else -p)
        diffs[i] = GradedMatrix(mods[i], mods[i - 1], rows)
    return GradedComplex(ring, mods, diffs)


def homology_truncated(X: GradedComplex, window) -> dict:
    """``{(i, j): dim_k H_i(X)_j}`` for i in the support and j in the window."""
    R = X.realize(window)
    lo, hi = window
    return {(i, j): R.homology_dim((i, j)) for i in X.support for j in range(lo, hi + 1)}


def is_quasiiso(mu: ComplexMorphism, window) -> QuasiIsoCertificate:
    src = mu.source.realize(window)
    tgt = mu.target.realize(window)
    lo, hi = window
    keys = [(i, j) for i in mu.positions for j in range(lo, hi + 1)]
    return is_quasiiso_realized(src, tgt, mu.realize(window), keys)


def homotopy_between(mu: ComplexMorphism, lam: ComplexMorphism) -> dict | None:
    """Components σ_i: X_i -> Y_{i+1} with ∂σ + σ∂ = μ - λ, or None.

    The homotopy is A-linear, so its entries have finitely many unknown
    coefficients; all of them are solved for in one exact system.
    """
    X, Y = mu.source, mu.target
    ring = X.ring
    field = ring.field
    # unknowns: (i, row, col, monomial)
    unknowns = []
    for i in X.support:
        if i + 1 not in Y.modules:
            continue
        src, tgt = X.modules[i], Y.modules[i + 1]
        for r, rt in enumerate(tgt.twists):
            for c, ct in enumerate(src.twists):
                for m in ring.monomials(ct - rt):
                    unknowns.append((i, r, c, m))
    eq_index: dict = {}
    cols = [{} for _ in unknowns]

    def add_eq(key, col, coeff):
        k = eq_index.setdefault(key, len(eq_index))
        v = field.add(cols[col].get(k, field.zero), coeff)
        if v:
            cols[col][k] = v
        else:
            cols[col].pop(k, None)

    for u, (i, r, c, m) in enumerate(unknowns):
        # contributes ∂^Y_{i+1} σ_i  at position i: rows of Y_i, col c
        dY = Y.diff(i + 1)
        for r2 in range(Y.module(i).rank):
            p = dY.entries[r2][r] if Y.module(i).rank else None
            if p:
                for e, coeff in p.terms.items():
                    add_eq((i, r2, c, tuple(a + b for a, b in zip(e, m))), u, coeff)
        # contributes σ_i ∂^X_{i+1} at position i+1: rows of Y_{i+1} (= r), cols of X_{i+1}
        dX = X.diff(i + 1)
        for c2 in range(X.module(i + 1).rank):
            p = dX.entries[c][c2]
            if p:
                for e, coeff in p.terms.items():
                    add_eq((i + 1, r, c2, tuple(a + b for a, b in zip(e, m))), u, coeff)
    rhs = {}
    for i in mu.positions:
        diff = mu.comp(i) - lam.comp(i)
        for r, row in enumerate(diff.entries):
            for c, p in enumerate(row):
                for e, coeff in p.terms.items():
                    k = eq_index.setdefault((i, r, c, e), len(eq_index))
                    rhs[k] = coeff
    A = Mat(field, len(eq_index), len(unknowns), cols)
    if not unknowns:
        return {} if not rhs else None
    sol = A.solve(rhs)
    if sol is None:
        return None
    out = {}
    for i in X.support:
        if i + 1 not in Y.modules:
            continue
        src, tgt = X.modules[i], Y.modules[i + 1]
        terms = [[{} for _ in src.twists] for _ in tgt.twists]
        out[i] = terms
    for u, c in sol.items():
        i, r, col, m = unknowns[u]
        out[i][r][col][m] = c
    sigma = {}
    for i, terms in out.items():
        ent = [[Poly(ring, t, _clean=True) for t in row] for row in terms]
        sigma[i] = GradedMatrix(X.modules[i], Y.modules[i + 1], ent)
    if not check_homotopy(mu, lam, sigma):
        raise AssertionError("homotopy solve returned an invalid solution")
    return sigma


def check_homotopy(mu: ComplexMorphism, lam: ComplexMorphism, sigma: dict) -> bool:
    X, Y = mu.source, mu.target

    def s(i):
        m = sigma.get(i)
        if m is None:
            return GradedMatrix(X.module(i), Y.module(i + 1))
        return m

    for i in mu.positions:
        lhs = Y.diff(i + 1) @ s(i) + s(i - 1) @ X.diff(i)
        if lhs != mu.comp(i) - lam.comp(i):
            return False
    return True


@dataclass
class ConcentratedReplacement:
    """The zig-zag X <-ι- Y -π-> H_n(X), realized degreewise."""

    position: int
    window: tuple
    source: DegreewiseRealization
    intermediate: DegreewiseRealization
    homology: DegreewiseRealization
    iota: dict
    pi: dict
    iota_certificate: QuasiIsoCertificate
    pi_certificate: QuasiIsoCertificate

    @property
    def certified(self) -> bool:
        return self.iota_certificate.ok and self.pi_certificate.ok


def concentrated_replacement(X: GradedComplex, n: int, window) -> ConcentratedReplacement:
    lo, hi = window
    field = X.ring.field
    R = X.realize(window)
    positions = sorted(set(X.support) | {n})
    for i in positions:
        if i == n:
            continue
        for j in range(lo, hi + 1):
            if R.homology_dim((i, j)):
                raise ValueError(f"concentration hypothesis fails: H_{i}(X)_{j} != 0")
    Y_dims, Y_diffs, iota = {}, {}, {}
    H_dims, pi = {}, {}
    for j in range(lo, hi + 1):
        pairs = R.diff((n, j)).kernel_pairs()
        Z = [z for _, z in pairs]
        free_cols = [f for f, _ in pairs]
        for i in X.support:
            if i > n:
                Y_dims[(i, j)] = R.dim((i, j))
                iota[(i, j)] = Mat.identity(field, R.dim((i, j)))
                if i - 1 > n:
                    Y_diffs[(i, j)] = R.diff((i, j))
        Y_dims[(n, j)] = len(Z)
        iota[(n, j)] = Mat(field, R.dim((n, j)), len(Z), [dict(z) for z in Z])
        # ∂_{n+1} expressed in cycle coordinates
        up = R.diff((n + 1, j))
        zcols = []
        for col in up.cols:
            zcols.append({a: col[f] for a, f in enumerate(free_cols) if col.get(f)})
        zdiff = Mat(field, len(Z), R.dim((n + 1, j)), zcols)
        if R.dim((n + 1, j)):
            Y_diffs[(n + 1, j)] = zdiff
        B = Echelon(field, zdiff.cols)
        complement = [a for a in range(len(Z)) if a not in B.rows]
        pos = {a: b for b, a in enumerate(complement)}
        H_dims[(n, j)] = len(complement)
        pcols = []
        for a in range(len(Z)):
            rem = B.reduce({a: field.one})
            pcols.append({pos[k]: v for k, v in rem.items()})
        pi[(n, j)] = Mat(field, len(complement), len(Z), pcols)
    Y = DegreewiseRealization(field, Y_dims, Y_diffs)
    H = DegreewiseRealization(field, H_dims, {})
    keys = [(i, j) for i in positions for j in range(lo, hi + 1)]
    iota_cert = is_quasiiso_realized(Y, R, iota, keys)
    pi_cert = is_quasiiso_realized(Y, H, pi, keys)
    return ConcentratedReplacement(n, (lo, hi), R, Y, H, iota, pi, iota_cert, pi_cert)


def homology_concentration(X: GradedComplex, window) -> list[int]:
    """Positions carrying nonzero homology inside the window."""
    table = homology_truncated(X, window)
    return sorted({i for (i, j), v in table.items() if v})
