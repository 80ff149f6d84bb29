"""Finite-rank semifree DG modules over a standard-graded polynomial ring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

from .algebra import Poly, PolyRing, koszul_twist, sign
from .graded import (
    DegreewiseRealization,
    GradedMatrix,
    QuasiIsoCertificate,
    TwistedFreeModule,
    graded_min_gens,
    is_quasiiso_realized,
)
from .linalg import Echelon, Mat

CONVENTIONS = ("even", "koszul")


class SemifreeDG:
    """Basis e_1..e_n in homological degrees n_j with ∂e_j = Σ_i D[i][j] e_i.

    Under the ``even`` convention ∂(a m) = a ∂m; under ``koszul``
    ∂(a m) = (-1)^|a| a ∂m for homogeneous a.
    """

    def __init__(self, ring: PolyRing, labels, degrees, D=None, convention="even", name=None):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown sign convention {convention!r}")
        self.ring = ring
        self.labels = tuple(labels)
        self.degrees = tuple(int(n) for n in degrees)
        if len(self.labels) != len(self.degrees):
            raise ValueError("one degree per basis label required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be distinct")
        n = len(self.labels)
        if D is None:
            D = [[ring.zero] * n for _ in range(n)]
        if len(D) != n or any(len(row) != n for row in D):
            raise ValueError("differential matrix must be square of size rank")
        self.D = [list(row) for row in D]
        self.convention = convention
        self.name = name
        # optional integer grading lowered by one along ∂ (set by ``tot``)
        self.weights = None

    @classmethod
    def from_map(cls, ring, basis, diffs, convention="even", name=None):
        """``basis``: list of (label, degree); ``diffs``: label -> {label: Poly}."""
        labels = [b[0] for b in basis]
        index = {lab: k for k, lab in enumerate(labels)}
        n = len(labels)
        D = [[ring.zero] * n for _ in range(n)]
        for src, terms in diffs.items():
            for tgt, p in terms.items():
                D[index[tgt]][index[src]] = D[index[tgt]][index[src]] + p
        return cls(ring, labels, [b[1] for b in basis], D, convention, name)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)

    def differential_of(self, label) -> dict:
        j = self.index(label)
        return {self.labels[i]: self.D[i][j] for i in range(self.rank) if self.D[i][j]}

    def with_convention(self, convention: str) -> SemifreeDG:
        out = SemifreeDG(self.ring, self.labels, self.degrees, self.D, convention, self.name)
        out.weights = self.weights
        return out

    def free_module(self) -> TwistedFreeModule:
        """M as a graded A-module: generator e_j sits in degree n_j."""
        return TwistedFreeModule(self.ring, self.degrees, self.labels)

    def graded_differential(self) -> GradedMatrix:
        """∂ as a degree-zero map Σ^{n_j - 1}A -> Σ^{n_i}A (realize at d-1 for ∂_d)."""
        src = TwistedFreeModule(self.ring, [n - 1 for n in self.degrees])
        return GradedMatrix(src, self.free_module(), self.D, check=False)

    def max_entry_degree(self) -> int:
        return max((p.degree() for row in self.D for p in row if p), default=0)

    def default_window(self) -> tuple[int, int]:
        lo = min(self.degrees, default=0)
        hi = 2 * (max(self.degrees, default=0) + self.max_entry_degree()) + 4
        return (lo, hi)

    def twisted(self, p: Poly) -> Poly:
        return koszul_twist(p) if self.convention == "koszul" else p

    def apply(self, vec) -> list[Poly]:
        """∂ of the element Σ_j vec[j] e_j."""
        out = [self.ring.zero] * self.rank
        for j, a in enumerate(vec):
            if not a:
                continue
            a = self.twisted(a)
            for i in range(self.rank):
                if self.D[i][j]:
                    out[i] = out[i] + self.D[i][j] * a
        return out

    def d_squared(self) -> list[list[Poly]]:
        """Matrix of ∂∘∂ on the basis (column j is ∂∂e_j)."""
        cols = [self.apply([self.D[i][j] for i in range(self.rank)]) for j in range(self.rank)]
        return [[cols[j][i] for j in range(self.rank)] for i in range(self.rank)]

    def well_order(self) -> list[int]:
        return sorted(range(self.rank), key=lambda k: (self.degrees[k], k))

    def realize(self, window) -> DegreewiseRealization:
        return realize_dg(self, window)

    def format_element(self, vec) -> str:
        return format_element(self.ring, self.labels, vec)

    def __eq__(self, other):
        if not isinstance(other, SemifreeDG):
            return NotImplemented
        if self.ring != other.ring or self.convention != other.convention:
            return False
        if dict(zip(self.labels, self.degrees)) != dict(zip(other.labels, other.degrees)):
            return False
        return all(self.differential_of(l) == other.differential_of(l) for l in self.labels)

    def __repr__(self):
        basis = ", ".join(f"{l}:{n}" for l, n in zip(self.labels, self.degrees))
        return f"SemifreeDG({self.ring}, [{basis}], {self.convention})"


def format_element(ring, labels, vec) -> str:
    parts = []
    for p, lab in zip(vec, labels):
        if not p:
            continue
        s = str(p)
        if p.is_constant():
            if s == "1":
                term = lab
            elif s == "-1":
                term = f"-{lab}"
            else:
                term = f"{s}*{lab}"
        elif len(p.terms) == 1:
            term = f"{s}*{lab}"
        else:
            term = f"({s})*{lab}"
        if parts:
            term = f"- {term[1:]}" if term.startswith("-") else f"+ {term}"
        parts.append(term)
    return " ".join(parts) if parts else "0"


@dataclass
class DGViolation:
    kind: str  # "homogeneity" or "d_squared"
    element: str
    entry: str | None
    message: str

    def as_dict(self):
        return {"kind": self.kind, "element": self.element, "entry": self.entry,
                "message": self.message}


@dataclass
class DGValidation:
    ok: bool
    violation: DGViolation | None
    well_order: list = dc_field(default_factory=list)

    def as_dict(self):
        return {"ok": self.ok,
                "violation": self.violation.as_dict() if self.violation else None,
                "well_order": list(self.well_order)}


def validate_dg(M: SemifreeDG) -> DGValidation:
    """Check homogeneity and ∂² = 0; emit the well-order by (degree, index)."""
    for j in range(M.rank):
        for i in range(M.rank):
            p = M.D[i][j]
            want = M.degrees[j] - M.degrees[i] - 1
            if p and not p.is_homogeneous(want):
                got = p.degree() if p.is_homogeneous() else "mixed"
                v = DGViolation(
                    "homogeneity", M.labels[j], M.labels[i],
                    f"coefficient of {M.labels[i]} in d {M.labels[j]} has degree {got}, "
                    f"expected {want}",
                )
                return DGValidation(False, v)
    sq = M.d_squared()
    for j in range(M.rank):
        col = [sq[i][j] for i in range(M.rank)]
        if any(col):
            i = next(k for k, p in enumerate(col) if p)
            v = DGViolation(
                "d_squared", M.labels[j], M.labels[i],
                f"d(d {M.labels[j]}) = {M.format_element(col)} is not zero",
            )
            return DGValidation(False, v)
    return DGValidation(True, None, [M.labels[k] for k in M.well_order()])


def realize_dg(M: SemifreeDG, window) -> DegreewiseRealization:
    """∂_d: M_d -> M_{d-1} for d in the window, stored at keys (d, 0)."""
    lo, hi = window
    gm = M.graded_differential()
    F = M.free_module()
    sgn = sign if M.convention == "koszul" else None
    dims, diffs = {}, {}
    for d in range(lo - 1, hi + 2):
        dims[(d, 0)] = F.dim(d)
    for d in range(lo, hi + 2):
        diffs[(d, 0)] = gm.realize(d - 1, sgn)
    labels = {(d, 0): F.piece(d) for d in range(lo, hi + 1)}
    return DegreewiseRealization(M.ring.field, dims, diffs, labels)


def is_minimal(M: SemifreeDG) -> bool:
    return all(not p or p.degree() >= 1 for row in M.D for p in row)


# ---------------------------------------------------------------------------
# presentations of graded subquotients


def default_slack(window) -> int:
    lo, hi = window
    return max(1, math.ceil((hi - lo) / 4))


def suggest_window(window) -> tuple[int, int]:
    lo, hi = window
    return (lo, max(2 * hi, hi + 8))


class _Cache:
    def __init__(self, fn):
        self.fn = fn
        self.values = {}

    def __call__(self, j):
        if j not in self.values:
            self.values[j] = self.fn(j)
        return self.values[j]


def lift_matrix(target: TwistedFreeModule, degrees, vectors) -> GradedMatrix:
    """The map Σ^{degrees} A -> target sending generator k to ``vectors[k]``."""
    src = TwistedFreeModule(target.ring, degrees)
    cols = [target.from_coords(d, v) for d, v in zip(degrees, vectors)]
    entries = [[cols[c][r] for c in range(len(cols))] for r in range(target.rank)]
    return GradedMatrix(src, target, entries, check=False)


def submodule_kernel(G: GradedMatrix, mod_at, j: int) -> list[dict]:
    """Basis of {u in source_j : G u in span(mod_at(j))}."""
    field = G.ring.field
    Gj = G.realize(j)
    extra = mod_at(j) if mod_at else []
    n = Gj.ncols
    cols = list(Gj.cols) + [dict(b) for b in extra]
    big = Mat(field, Gj.nrows, n + len(extra), cols)
    out = Echelon(field)
    for v in big.kernel():
        u = {k: c for k, c in v.items() if k < n}
        if u:
            out.add(u)
    return out.basis()


@dataclass
class SubquotientPresentation:
    """Minimal presentation coker(relations) of V/W, both inside ``ambient``."""

    ambient: TwistedFreeModule
    generator_degrees: list
    generator_vectors: list  # coordinates in ambient pieces
    lift: GradedMatrix  # generators -> ambient
    relations: GradedMatrix  # relation module -> generators
    dims: dict  # d -> dim (V/W)_d
    window: tuple
    certified: bool
    reason: str | None = None

    @property
    def relation_degrees(self) -> list:
        return list(self.relations.source.twists)


def present_subquotient(F: TwistedFreeModule, sub_at, mod_at, window, slack=None
                        ) -> SubquotientPresentation:
    lo, hi = window
    if slack is None:
        slack = default_slack(window)
    sub_at = _Cache(sub_at)
    mod_at = _Cache(mod_at) if mod_at else None
    gens = graded_min_gens(F, sub_at, window, mod_at=mod_at, slack=slack)
    G = lift_matrix(F, gens.degrees, gens.vectors)
    G0 = G.source
    rels = graded_min_gens(G0, lambda j: submodule_kernel(G, mod_at, j), window, slack=slack)
    P = lift_matrix(G0, rels.degrees, rels.vectors)
    dims = {}
    reason = None
    start = min(lo, min(F.twists, default=lo))
    for d in range(start, hi + 1):
        dims[d] = len(sub_at(d)) - (len(mod_at(d)) if mod_at else 0)
        got = G0.dim(d) - P.realize(d).rank()
        if got != dims[d] and reason is None:
            reason = f"presentation predicts dimension {got} in degree {d}, actual {dims[d]}"
    if reason is None and not (gens.stable and rels.stable):
        reason = f"generators or relations found within {slack} of the window top {hi}"
    return SubquotientPresentation(F, gens.degrees, gens.vectors, G, P,
                                   {d: v for d, v in dims.items() if d >= lo}, tuple(window),
                                   reason is None, reason)


@dataclass
class HomologyPresentation:
    """H(M) = coker(presentation) with generators the classes of ``cycles``."""

    module: SemifreeDG
    generator_degrees: list
    cycles: list  # list of Poly vectors (elements of M)
    presentation: GradedMatrix
    dims: dict
    window: tuple
    certified: bool
    reason: str | None
    suggested_window: tuple | None
    subquotient: SubquotientPresentation

    @property
    def relation_degrees(self) -> list:
        return list(self.presentation.source.twists)

    def as_dict(self) -> dict:
        M = self.module
        P = self.presentation
        return {
            "window": list(self.window),
            "certified": self.certified,
            "reason": self.reason,
            "suggested_window": list(self.suggested_window) if self.suggested_window else None,
            "generator_degrees": list(self.generator_degrees),
            "generators": [M.format_element(z) for z in self.cycles],
            "relation_degrees": self.relation_degrees,
            "presentation": [[str(p) for p in row] for row in P.entries],
            "hilbert_function": {str(d): v for d, v in sorted(self.dims.items())},
        }


def dg_homology(M: SemifreeDG, window=None, slack=None) -> HomologyPresentation:
    if window is None:
        window = M.default_window()
    lo, hi = window
    gm = M.graded_differential()
    sgn = sign if M.convention == "koszul" else None
    F = M.free_module()

    def Z_at(d):
        return gm.realize(d - 1, sgn).kernel()

    def B_at(d):
        return gm.realize(d, sgn).image()

    sq = present_subquotient(F, Z_at, B_at, (lo, hi), slack)
    cycles = [F.from_coords(d, v) for d, v in zip(sq.generator_degrees, sq.generator_vectors)]
    return HomologyPresentation(
        M, list(sq.generator_degrees), cycles, sq.relations, sq.dims, (lo, hi),
        sq.certified, sq.reason, None if sq.certified else suggest_window((lo, hi)), sq,
    )


# ---------------------------------------------------------------------------
# morphisms


class DGMorphism:
    """Degree-zero A-linear map given on bases: f(e_j) = Σ_i matrix[i][j] e'_i."""

    def __init__(self, source: SemifreeDG, target: SemifreeDG, matrix):
        if source.ring != target.ring:
            raise ValueError("morphism needs a common ring")
        self.source = source
        self.target = target
        self.matrix = [list(row) for row in matrix]
        if len(self.matrix) != target.rank or any(len(r) != source.rank for r in self.matrix):
            raise ValueError("morphism matrix has the wrong shape")

    def graded(self) -> GradedMatrix:
        return GradedMatrix(self.source.free_module(), self.target.free_module(), self.matrix,
                            check=False)

    def realize(self, window) -> dict:
        lo, hi = window
        g = self.graded()
        return {(d, 0): g.realize(d) for d in range(lo - 1, hi + 2)}

    def image_of(self, label) -> list[Poly]:
        j = self.source.index(label)
        return [row[j] for row in self.matrix]


@dataclass
class DGMorphismCertificate:
    chain_map: bool
    failure: dict | None
    quasi_iso: QuasiIsoCertificate | None

    @property
    def ok(self) -> bool:
        return self.chain_map and self.quasi_iso is not None and self.quasi_iso.ok

    def as_dict(self):
        return {
            "chain_map": self.chain_map,
            "failure": self.failure,
            "quasi_isomorphism": self.quasi_iso.ok if self.quasi_iso else False,
            "certificate": self.quasi_iso.as_dict() if self.quasi_iso else None,
        }


def dg_morphism_check(f: DGMorphism, window=None) -> DGMorphismCertificate:
    """Check f is a DG morphism (polynomial identity) then test quasi-iso in the window."""
    M, N = f.source, f.target
    if M.convention != N.convention:
        raise ValueError("source and target use different sign conventions")
    if window is None:
        a, b = M.default_window(), N.default_window()
        window = (min(a[0], b[0]), max(a[1], b[1]))
    g = f.graded()
    bad = g.homogeneity_violation()
    if bad is not None:
        r, c, got, want = bad
        return DGMorphismCertificate(False, {
            "element": M.labels[c], "degree": M.degrees[c],
            "message": f"coefficient of {N.labels[r]} has degree {got}, expected {want}",
        }, None)
    for j in range(M.rank):
        lhs = N.apply([row[j] for row in f.matrix])
        rhs = [sum((f.matrix[r][i] * M.D[i][j] for i in range(M.rank)), M.ring.zero)
               for r in range(N.rank)]
        if lhs != rhs:
            return DGMorphismCertificate(False, {
                "element": M.labels[j], "degree": M.degrees[j],
                "message": "d f(e) differs from f(d e)",
            }, None)
    lo, hi = window
    cert = is_quasiiso_realized(M.realize(window), N.realize(window), f.realize(window),
                                [(d, 0) for d in range(lo, hi + 1)])
    return DGMorphismCertificate(True, None, cert)


def identity_dg_morphism(M: SemifreeDG) -> DGMorphism:
    n = M.rank
    return DGMorphism(M, M, [[M.ring.one if i == j else M.ring.zero for j in range(n)]
                             for i in range(n)])
