"""Structure of semifree DG modules over A = k[x].

Homogeneous elements of k[x] are scalar multiples of powers of x, so a
homogeneous presentation matrix diagonalizes by pivoting on an entry of
least degree.  From the diagonal form we read off H(M) as a sum of cyclic
modules, build its minimal free resolution F, and write down an explicit
quasi-isomorphism Tot F -> M.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Poly, PolyRing, sign
from .complex import GradedComplex
from .dg import (
    DGMorphism,
    DGMorphismCertificate,
    HomologyPresentation,
    SemifreeDG,
    dg_homology,
    dg_morphism_check,
)
from .graded import GradedMatrix, TwistedFreeModule
from .totaling import tot


def _require_univariate(ring: PolyRing) -> None:
    if ring.nvars != 1:
        raise ValueError(f"expected a polynomial ring in one variable, got {ring}")


def _identity(ring, n):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def _matmul(ring, A, B):
    n, m = len(A), len(B[0]) if B else 0
    inner = len(B)
    return [[sum((A[i][k] * B[k][j] for k in range(inner) if A[i][k] and B[k][j]), ring.zero)
             for j in range(m)] for i in range(n)]


@dataclass
class GradedSNF:
    """U·P·V = Δ where Δ has the pivots h_i = x^{c_i - r_i} on its leading diagonal.

    ``row_twists`` / ``col_twists`` are the twists of the rows and columns of
    Δ (a permutation of those of P).  Unit pivots are cancelled pairs and do
    not contribute to the minimal resolution.
    """

    pairs: list  # (r_i, c_i) with positive-degree pivot
    free_twists: list
    unit_pairs: list
    zero_col_twists: list
    U: list
    V: list
    U_inv: list
    V_inv: list
    diagonal: list
    row_twists: list
    col_twists: list
    pivot_rows: list  # row index in Δ of each pair, same order as ``pairs``
    free_rows: list

    @property
    def s(self) -> int:
        return len(self.pairs)

    @property
    def t(self) -> int:
        return len(self.pairs) + len(self.free_twists)

    def betti(self) -> dict:
        b0: dict = {}
        b1: dict = {}
        for r, c in self.pairs:
            b0[r] = b0.get(r, 0) + 1
            b1[c] = b1.get(c, 0) + 1
        for r in self.free_twists:
            b0[r] = b0.get(r, 0) + 1
        out = {0: b0}
        if b1:
            out[1] = b1
        return out

    def as_dict(self):
        return {
            "torsion_pairs": [list(p) for p in self.pairs],
            "free_twists": list(self.free_twists),
            "cancelled_unit_pairs": [list(p) for p in self.unit_pairs],
            "zero_column_twists": list(self.zero_col_twists),
        }


def graded_diagonalize(P: GradedMatrix) -> GradedSNF:
    ring = P.ring
    _require_univariate(ring)
    field = ring.field
    nr, nc = P.target.rank, P.source.rank
    A = [list(row) for row in P.entries]
    U, Ui = _identity(ring, nr), _identity(ring, nr)
    V, Vi = _identity(ring, nc), _identity(ring, nc)
    rt, ct = list(P.target.twists), list(P.source.twists)

    def swap_rows(a, b):
        if a == b:
            return
        A[a], A[b] = A[b], A[a]
        U[a], U[b] = U[b], U[a]
        for row in Ui:
            row[a], row[b] = row[b], row[a]
        rt[a], rt[b] = rt[b], rt[a]

    def swap_cols(a, b):
        if a == b:
            return
        for M in (A, V):
            for row in M:
                row[a], row[b] = row[b], row[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]
        ct[a], ct[b] = ct[b], ct[a]

    def row_op(i, f, l):
        # R_i -= f R_l  (U on the left); inverse adds f R_l back
        A[i] = [a - f * b for a, b in zip(A[i], A[l])]
        U[i] = [a - f * b for a, b in zip(U[i], U[l])]
        for row in Ui:
            row[l] = row[l] + row[i] * f

    def col_op(j, f, l):
        # C_j -= f C_l
        for M in (A, V):
            for row in M:
                row[j] = row[j] - row[l] * f
        Vi[l] = [a + f * b for a, b in zip(Vi[l], Vi[j])]

    def scale_row(i, c):
        A[i] = [a.scale(c) for a in A[i]]
        U[i] = [a.scale(c) for a in U[i]]
        inv = field.inv(c)
        for row in Ui:
            row[i] = row[i].scale(inv)

    k = 0
    while k < min(nr, nc):
        best = None
        for i in range(k, nr):
            for j in range(k, nc):
                p = A[i][j]
                if p and (best is None or p.degree() < best[0]):
                    best = (p.degree(), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(k, i)
        swap_cols(k, j)
        piv = A[k][k]
        (e, c), = piv.terms.items()
        scale_row(k, field.inv(c))
        for i in range(nr):
            if i != k and A[i][k]:
                (e2, c2), = A[i][k].terms.items()
                row_op(i, ring.monomial((e2[0] - e[0],), c2), k)
        for j in range(nc):
            if j != k and A[k][j]:
                (e2, c2), = A[k][j].terms.items()
                col_op(j, ring.monomial((e2[0] - e[0],), c2), k)
        k += 1
    pairs, units, pivot_rows = [], [], []
    for i in range(k):
        if A[i][i].degree() == 0:
            units.append((rt[i], ct[i]))
        else:
            pairs.append((rt[i], ct[i]))
            pivot_rows.append(i)
    free_rows = list(range(k, nr))
    snf = GradedSNF(pairs, [rt[i] for i in free_rows], units, ct[k:], U, V, Ui, Vi, A,
                    rt, ct, pivot_rows, free_rows)
    _check_snf(P, snf)
    return snf


def _check_snf(P: GradedMatrix, snf: GradedSNF) -> None:
    ring = P.ring
    lhs = _matmul(ring, _matmul(ring, snf.U, P.entries), snf.V) if P.entries and P.entries[0] \
        else snf.diagonal
    if lhs != snf.diagonal:
        raise AssertionError("U P V does not reproduce the diagonal form")
    for X, Y in ((snf.U, snf.U_inv), (snf.V, snf.V_inv)):
        if X and _matmul(ring, X, Y) != _identity(ring, len(X)):
            raise AssertionError("transformation inverse is wrong")


# ---------------------------------------------------------------------------


@dataclass
class HomologyDecomposition:
    module: SemifreeDG
    homology: HomologyPresentation
    snf: GradedSNF
    torsion: list  # (r_i, c_i, z_i)
    free: list  # (r_i, z_i)

    @property
    def torsion_pairs(self) -> list:
        return [(r, c) for r, c, _ in self.torsion]

    @property
    def free_twists(self) -> list:
        return [r for r, _ in self.free]

    def as_dict(self):
        M = self.module
        return {
            "torsion": [{"r": r, "c": c, "h": str(M.ring.monomial((c - r,))),
                         "cycle": M.format_element(z)} for r, c, z in self.torsion],
            "free": [{"r": r, "cycle": M.format_element(z)} for r, z in self.free],
            "homology_certified": self.homology.certified,
            "window": list(self.homology.window),
        }


def homology_decompose(M: SemifreeDG, window=None) -> HomologyDecomposition:
    _require_univariate(M.ring)
    H = dg_homology(M, window)
    if not H.certified:
        raise CertificationError(H.reason or "homology not certified", H.suggested_window)
    snf = graded_diagonalize(H.presentation)
    ring = M.ring
    # generator k of the diagonal form is Σ_i U_inv[i][k] (old generator i)
    new_cycles = []
    for k in range(len(snf.row_twists)):
        z = [ring.zero] * M.rank
        for i, old in enumerate(H.cycles):
            c = snf.U_inv[i][k]
            if c:
                z = [a + c * b for a, b in zip(z, old)]
        new_cycles.append(z)
    torsion = sorted(((r, c, new_cycles[i]) for (r, c), i in zip(snf.pairs, snf.pivot_rows)),
                     key=lambda t: (t[0], t[1]))
    free = sorted(((snf.row_twists[i], new_cycles[i]) for i in snf.free_rows),
                  key=lambda t: t[0])
    return HomologyDecomposition(M, H, snf, torsion, free)


class CertificationError(RuntimeError):
    def __init__(self, message, suggested_window=None):
        super().__init__(message)
        self.suggested_window = suggested_window


@dataclass
class ResolutionComplex:
    """F = ⊕ G_i; G_i is Σ^{c_i}A -[h_i]-> Σ^{r_i}A or Σ^{r_i}A alone."""

    complex: GradedComplex
    summands: list  # per summand: dict(kind, r, c, position0 index, position1 index)

    def subcomplex(self, i: int) -> GradedComplex:
        s = self.summands[i]
        ring = self.complex.ring
        F0 = TwistedFreeModule(ring, [s["r"]], [f"u{i + 1}"])
        if s["kind"] == "free":
            return GradedComplex(ring, {0: F0})
        F1 = TwistedFreeModule(ring, [s["c"]], [f"v{i + 1}"])
        h = ring.monomial((s["c"] - s["r"],))
        return GradedComplex(ring, {0: F0, 1: F1}, {1: GradedMatrix(F1, F0, [[h]])})


def build_resolution_complex(dec: HomologyDecomposition) -> ResolutionComplex:
    ring = dec.module.ring
    summands = []
    r0, l0, c1, l1 = [], [], [], []
    for r, c, _ in dec.torsion:
        summands.append({"kind": "torsion", "r": r, "c": c, "row": len(r0), "col": len(c1)})
        l0.append(f"u{len(summands)}")
        r0.append(r)
        l1.append(f"v{len(summands)}")
        c1.append(c)
    for r, _ in dec.free:
        summands.append({"kind": "free", "r": r, "c": None, "row": len(r0), "col": None})
        l0.append(f"u{len(summands)}")
        r0.append(r)
    mods = {0: TwistedFreeModule(ring, r0, l0)}
    diffs = {}
    if c1:
        mods[1] = TwistedFreeModule(ring, c1, l1)
        ent = [[ring.zero] * len(c1) for _ in r0]
        for k, (r, c) in enumerate(zip(r0, c1)):
            ent[k][k] = ring.monomial((c - r,))
        diffs[1] = GradedMatrix(mods[1], mods[0], ent)
    return ResolutionComplex(GradedComplex(ring, mods, diffs, "F"), summands)


def boundary_preimage(M: SemifreeDG, target, degree: int | None = None) -> list[Poly]:
    """Some m with ∂m = target; ``target`` is a homogeneous element of M."""
    F = M.free_module()
    if not any(target):
        return [M.ring.zero] * M.rank
    if degree is None:
        degree = next(p.degree() + n for p, n in zip(target, M.degrees) if p)
    coords = F.to_coords(degree, target)
    sgn = sign if M.convention == "koszul" else None
    mat = M.graded_differential().realize(degree, sgn)
    sol = mat.solve(coords)
    if sol is None:
        raise ValueError(f"target is not a boundary in degree {degree}")
    m = F.from_coords(degree + 1, sol)
    if M.apply(m) != list(target):
        raise AssertionError("boundary preimage does not map to the target")
    return m


@dataclass
class EmbedWitness:
    decomposition: HomologyDecomposition
    resolution: ResolutionComplex
    tot_resolution: SemifreeDG
    preimages: list  # m_i per torsion summand
    morphism: DGMorphism
    certificate: DGMorphismCertificate
    window: tuple

    @property
    def ok(self) -> bool:
        return self.certificate.ok

    def summand_maps(self) -> list[dict]:
        """Images of the generators of each Tot G_i."""
        M = self.decomposition.module
        out = []
        T = self.tot_resolution
        for i, s in enumerate(self.resolution.summands):
            entry = {"summand": i + 1, "kind": s["kind"], "r": s["r"], "c": s["c"]}
            u = T.index(f"u{i + 1}")
            entry["images"] = {f"sigma^{{{s['r']}}}1": M.format_element(
                [row[u] for row in self.morphism.matrix])}
            if s["kind"] == "torsion":
                v = T.index(f"v{i + 1}")
                entry["images"][f"sigma^{{{s['c'] + 1}}}1"] = M.format_element(
                    [row[v] for row in self.morphism.matrix])
            out.append(entry)
        return out

    def as_dict(self):
        return {
            "window": list(self.window),
            "decomposition": self.decomposition.as_dict(),
            "resolution": {
                "summands": [
                    {"kind": s["kind"], "r": s["r"], "c": s["c"]}
                    for s in self.resolution.summands
                ],
            },
            "maps": self.summand_maps(),
            "certificate": self.certificate.as_dict(),
            "ok": self.ok,
        }


def embed_window(M: SemifreeDG, dec: HomologyDecomposition | None = None) -> tuple[int, int]:
    cs = [c for _, c, _ in dec.torsion] if dec else []
    lo = min([0] + list(M.degrees))
    hi = max(cs + [0]) + max(M.degrees, default=0) + 4
    return (lo, hi)


def embed(M: SemifreeDG, window=None, homology_window=None) -> EmbedWitness:
    """Build μ: Tot F -> M from the decomposition of H(M) and certify it.

    μ sends the generator σ^{r_i}1 of Tot G_i to the cycle z_i and, for a
    torsion summand, σ^{c_i+1}1 to a chosen m_i with ∂m_i = x^{c_i-r_i} z_i.
    """
    _require_univariate(M.ring)
    ring = M.ring
    dec = homology_decompose(M, homology_window or window)
    res = build_resolution_complex(dec)
    T = tot(res.complex, M.convention)
    preimages = []
    cols = {}
    for i, s in enumerate(res.summands):
        if s["kind"] == "torsion":
            r, c, z = dec.torsion[i]
            h = ring.monomial((c - r,))
            m = boundary_preimage(M, [h * p for p in z], c)
            preimages.append(m)
            cols[f"v{i + 1}"] = m
            cols[f"u{i + 1}"] = z
        else:
            _, z = dec.free[i - len(dec.torsion)]
            cols[f"u{i + 1}"] = z
    mat = [[ring.zero] * T.rank for _ in range(M.rank)]
    for lab, vec in cols.items():
        j = T.index(lab)
        for r in range(M.rank):
            mat[r][j] = vec[r]
    f = DGMorphism(T, M, mat)
    if window is None:
        window = embed_window(M, dec)
    cert = dg_morphism_check(f, window)
    return EmbedWitness(dec, res, T, preimages, f, cert, tuple(window))
