"""The totaling functor from complexes of graded free modules to semifree DG modules.

A generator of X_i with twist a becomes a basis element of homological
degree a + i.  Under the ``koszul`` convention the A-action on Tot X is
a·x = (-1)^{|a| i} a x for x in X_i, so a coefficient f of ∂^X acquires the
sign (-1)^{|f| (i-1)} when written on the Tot basis; under ``even`` no signs
appear.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Poly, sign
from .complex import ComplexMorphism, GradedComplex, tensor_complexes
from .dg import DGMorphism, DGMorphismCertificate, SemifreeDG, dg_morphism_check, validate_dg
from .graded import DegreewiseRealization, QuasiIsoCertificate, is_quasiiso_realized
from .linalg import block_mat
from .parsing import default_labels


def _signed(p: Poly, s: int) -> Poly:
    return -p if s < 0 else p


def _sign_by_degree(p: Poly, k: int) -> Poly:
    """Multiply the degree-m component of p by (-1)^{m k}."""
    if k % 2 == 0 or not p:
        return p
    neg = p.ring.field.neg
    return Poly(p.ring, {e: (neg(c) if sum(e) % 2 else c) for e, c in p.terms.items()},
                _clean=True)


@dataclass
class TotLayout:
    """Where each Tot basis element comes from: (position, generator index)."""

    entries: list

    def index(self) -> dict:
        return {pg: k for k, pg in enumerate(self.entries)}


def tot_layout(X: GradedComplex) -> TotLayout:
    return TotLayout([(i, g) for i in X.support for g in range(X.modules[i].rank)])


def _labels(X: GradedComplex) -> list[str]:
    out = []
    for i in X.support:
        F = X.modules[i]
        out.extend(F.labels if F.labels else default_labels(i, F.rank))
    return out


def tot(X: GradedComplex, convention: str = "even") -> SemifreeDG:
    if not X.support:
        return SemifreeDG(X.ring, [], [], [], convention, X.name)
    layout = tot_layout(X)
    index = layout.index()
    degrees = [X.modules[i].twists[g] + i for i, g in layout.entries]
    labels = _labels(X)
    if len(set(labels)) != len(labels):
        labels = [f"{lab}_{k}" for k, lab in enumerate(labels)]
    n = len(degrees)
    ring = X.ring
    D = [[ring.zero] * n for _ in range(n)]
    for col, (i, g) in enumerate(layout.entries):
        if i - 1 not in X.modules:
            continue
        d = X.diff(i)
        for h in range(X.modules[i - 1].rank):
            p = d.entries[h][g]
            if p:
                if convention == "koszul":
                    p = _sign_by_degree(p, i - 1)
                D[index[(i - 1, h)]][col] = p
    M = SemifreeDG(ring, labels, degrees, D, convention, X.name)
    M.weights = [i for i, _ in layout.entries]
    return M


def tot_morphism(mu: ComplexMorphism, convention: str = "even") -> DGMorphism:
    X, Y = mu.source, mu.target
    M, N = tot(X, convention), tot(Y, convention)
    src, tgt = tot_layout(X).entries, tot_layout(Y).index()
    ring = X.ring
    mat = [[ring.zero] * M.rank for _ in range(N.rank)]
    for col, (i, g) in enumerate(src):
        if i not in Y.modules:
            continue
        comp = mu.comp(i)
        for h in range(Y.modules[i].rank):
            p = comp.entries[h][g]
            if p:
                mat[tgt[(i, h)]][col] = _sign_by_degree(p, i) if convention == "koszul" else p
    return DGMorphism(M, N, mat)


# ---------------------------------------------------------------------------
# realized totaling


def _positions(R: DegreewiseRealization) -> list[int]:
    return sorted({i for (i, _) in R.dims})


def _internal(R: DegreewiseRealization) -> tuple[int, int]:
    js = [j for (_, j) in R.dims]
    return (min(js), max(js))


def tot_realized_range(R: DegreewiseRealization) -> tuple[int, int]:
    """Total degrees d for which every piece (i, d - i) lies in the realization."""
    pos = _positions(R)
    lo, hi = _internal(R)
    return (lo + max(pos), hi + min(pos))


def tot_realized(R: DegreewiseRealization, drange=None) -> DegreewiseRealization:
    """(Tot R)_d = ⊕_i R_(i, d-i) with block differentials; stored at keys (d, 0)."""
    pos = _positions(R)
    if drange is None:
        drange = tot_realized_range(R)
    lo, hi = drange
    field = R.field
    dims, diffs = {}, {}
    for d in range(lo - 1, hi + 2):
        dims[(d, 0)] = sum(R.dim((i, d - i)) for i in pos)
    for d in range(lo, hi + 2):
        rows = [R.dim((i, d - 1 - i)) for i in pos]
        cols = [R.dim((i, d - i)) for i in pos]
        blocks = {}
        for b, i in enumerate(pos):
            if b > 0 and pos[b - 1] == i - 1:
                blocks[(b - 1, b)] = R.diff((i, d - i))
        diffs[(d, 0)] = block_mat(field, blocks, rows, cols)
    return DegreewiseRealization(field, dims, diffs)


def tot_realized_maps(src: DegreewiseRealization, tgt: DegreewiseRealization, maps: dict,
                      drange) -> dict:
    pos_s, pos_t = _positions(src), _positions(tgt)
    field = src.field
    lo, hi = drange
    out = {}
    for d in range(lo - 1, hi + 2):
        rows = [tgt.dim((i, d - i)) for i in pos_t]
        cols = [src.dim((i, d - i)) for i in pos_s]
        blocks = {}
        for b, i in enumerate(pos_s):
            if i in pos_t:
                m = maps.get((i, d - i))
                if m is not None:
                    blocks[(pos_t.index(i), b)] = m
        out[(d, 0)] = block_mat(field, blocks, rows, cols)
    return out


def tot_quasiiso_realized(src: DegreewiseRealization, tgt: DegreewiseRealization, maps: dict
                          ) -> QuasiIsoCertificate:
    """Certify Tot of a realized chain map on the total degrees fully covered by both sides."""
    a, b = tot_realized_range(src), tot_realized_range(tgt)
    lo, hi = max(a[0], b[0]), min(a[1], b[1]) - 1
    ts, tt = tot_realized(src, (lo, hi)), tot_realized(tgt, (lo, hi))
    tm = tot_realized_maps(src, tgt, maps, (lo, hi))
    return is_quasiiso_realized(ts, tt, tm, [(d, 0) for d in range(lo, hi + 1)])


# ---------------------------------------------------------------------------
# tensor products


def tensor_dg(M: SemifreeDG, N: SemifreeDG, wM=None, wN=None) -> SemifreeDG:
    """M ⊗_A N for DG modules carrying integer weights with ∂ lowering weight by one.

    ∂(e⊗f) = ∂e⊗f + ε e⊗∂f where ε = (-1)^{w(e)} under ``even`` and
    (-1)^{n_e + |b| w(e)} on the term b·f' of ∂f under ``koszul``.
    Weights default to the ``weights`` attribute set by ``tot``.
    """
    if M.ring != N.ring or M.convention != N.convention:
        raise ValueError("tensor product needs a common ring and sign convention")
    wM = wM if wM is not None else M.weights
    wN = wN if wN is not None else N.weights
    if wM is None or wN is None:
        raise ValueError("tensor product of DG modules needs weights on both factors")
    ring = M.ring
    pairs = [(a, b) for a in range(M.rank) for b in range(N.rank)]
    index = {p: k for k, p in enumerate(pairs)}
    n = len(pairs)
    D = [[ring.zero] * n for _ in range(n)]
    koszul = M.convention == "koszul"
    for col, (a, b) in enumerate(pairs):
        for a2 in range(M.rank):
            p = M.D[a2][a]
            if p:
                r = index[(a2, b)]
                D[r][col] = D[r][col] + p
        for b2 in range(N.rank):
            p = N.D[b2][b]
            if p:
                if koszul:
                    s = sign(M.degrees[a] + p.degree() * wM[a])
                else:
                    s = sign(wM[a])
                r = index[(a, b2)]
                D[r][col] = D[r][col] + _signed(p, s)
    labels = [f"{M.labels[a]}.{N.labels[b]}" for a, b in pairs]
    degrees = [M.degrees[a] + N.degrees[b] for a, b in pairs]
    T = SemifreeDG(ring, labels, degrees, D, M.convention)
    T.weights = [wM[a] + wN[b] for a, b in pairs]
    return T


def tensor_comparison(X: GradedComplex, Y: GradedComplex, convention: str = "even"
                      ) -> DGMorphism:
    """λ: Tot(X⊗Y) -> Tot X ⊗ Tot Y on bases, E_(g,h) ↦ ±e_g⊗f_h.

    The sign is (-1)^{l a_g} under ``koszul`` (l the position of h, a_g the
    twist of g) and +1 under ``even``.
    """
    XY = tensor_complexes(X, Y)
    src = tot(XY, convention)
    tgt = tensor_dg(tot(X, convention), tot(Y, convention))
    xi, yi = tot_layout(X).index(), tot_layout(Y).index()
    rank_y = len(yi)
    ring = X.ring
    mat = [[ring.zero] * src.rank for _ in range(tgt.rank)]
    col = 0
    for i in XY.support:
        for j in X.support:
            l = i - j
            if l not in Y.modules:
                continue
            for g in range(X.modules[j].rank):
                for h in range(Y.modules[l].rank):
                    s = 1
                    if convention == "koszul":
                        s = sign(l * X.modules[j].twists[g])
                    row = xi[(j, g)] * rank_y + yi[(l, h)]
                    mat[row][col] = ring.const(s)
                    col += 1
    return DGMorphism(src, tgt, mat)


@dataclass
class TensorCertificate:
    ok: bool
    chain_map: bool
    bijective: bool
    failure: dict | None
    window: tuple
    rank_source: int
    rank_target: int

    def as_dict(self):
        return {"ok": self.ok, "chain_map": self.chain_map, "bijective": self.bijective,
                "failure": self.failure, "window": list(self.window),
                "rank_tot_tensor": self.rank_source, "rank_tensor_tot": self.rank_target}


def _window_for(*Ms: SemifreeDG) -> tuple[int, int]:
    """Every generator plus a margin of two beyond the largest differential entry."""
    lo = min((min(M.degrees, default=0) for M in Ms), default=0)
    hi = max((max(M.degrees, default=0) + M.max_entry_degree() for M in Ms), default=0) + 2
    return (lo, hi)


def tensor_compat_check(X: GradedComplex, Y: GradedComplex, window=None,
                        convention: str = "even") -> TensorCertificate:
    lam = tensor_comparison(X, Y, convention)
    src, tgt = lam.source, lam.target
    if window is None:
        window = _window_for(src)
    lo, hi = window
    chain = dg_morphism_check_polynomial(lam)
    bij = True
    failure = chain
    g = lam.graded()
    for d in range(lo, hi + 1):
        m = g.realize(d)
        if m.nrows != m.ncols or m.rank() != m.ncols:
            bij = False
            failure = failure or {"degree": d, "message": "λ is not bijective"}
            break
    sr, tr = src.realize(window), tgt.realize(window)
    maps = lam.realize(window)
    for d in range(lo, hi + 1):
        if tr.diff((d, 0)) @ maps[(d, 0)] != maps[(d - 1, 0)] @ sr.diff((d, 0)):
            failure = failure or {"degree": d, "message": "λ∂ differs from ∂λ"}
            chain = failure
            break
    ok = chain is None and bij
    return TensorCertificate(ok, chain is None, bij, failure, tuple(window), src.rank, tgt.rank)


def dg_morphism_check_polynomial(f: DGMorphism) -> dict | None:
    """None if f commutes with the differentials as a polynomial identity."""
    M, N = f.source, f.target
    for j in range(M.rank):
        lhs = N.apply([row[j] for row in f.matrix])
        rhs = [sum((f.matrix[r][i] * M.D[i][j] for i in range(M.rank)), M.ring.zero)
               for r in range(N.rank)]
        if lhs != rhs:
            return {"element": M.labels[j], "degree": M.degrees[j],
                    "message": "d f(e) differs from f(d e)"}
    return None


@dataclass
class TorTables:
    ok: bool
    window: tuple
    dg_side: dict  # j -> dim H_j(Tot X ⊗ Tot Y)
    complex_side: dict  # j -> Σ_i dim H_i(X⊗Y)_{j-i}

    def as_dict(self):
        return {"ok": self.ok, "window": list(self.window),
                "dg_side": {str(k): v for k, v in sorted(self.dg_side.items())},
                "complex_side": {str(k): v for k, v in sorted(self.complex_side.items())}}


def tor_decomposition_check(X: GradedComplex, Y: GradedComplex, window=None,
                            convention: str = "even") -> TorTables:
    T = tensor_dg(tot(X, convention), tot(Y, convention))
    XY = tensor_complexes(X, Y)
    if window is None:
        window = _window_for(T)
    lo, hi = window
    R = T.realize(window)
    left = {d: R.homology_dim((d, 0)) for d in range(lo, hi + 1)}
    pos = XY.support or [0]
    C = XY.realize((lo - max(pos), hi - min(pos)))
    right = {d: sum(C.homology_dim((i, d - i)) for i in XY.support) for d in range(lo, hi + 1)}
    return TorTables(left == right, tuple(window), left, right)


def tot_dimension_tables(X: GradedComplex, window, convention: str = "even") -> dict:
    """Per total degree: (dim Tot_d, Σ_i dim (X_i)_{d-i}, dim H_d(Tot), Σ_i dim H_i(X)_{d-i})."""
    M = tot(X, convention)
    lo, hi = window
    R = M.realize(window)
    pos = X.support or [0]
    C = X.realize((lo - max(pos), hi - min(pos)))
    out = {}
    for d in range(lo, hi + 1):
        out[d] = (R.dim((d, 0)), sum(C.dim((i, d - i)) for i in X.support),
                  R.homology_dim((d, 0)), sum(C.homology_dim((i, d - i)) for i in X.support))
    return out


def tot_is_semifree(X: GradedComplex, convention: str = "even") -> bool:
    return validate_dg(tot(X, convention)).ok


def tot_quasiiso(mu: ComplexMorphism, window=None, convention: str = "even"
                 ) -> DGMorphismCertificate:
    f = tot_morphism(mu, convention)
    return dg_morphism_check(f, window)
