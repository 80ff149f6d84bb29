"""Twisted graded free modules, homogeneous matrices, and their degreewise realization.

Convention: a homogeneous map from a copy of A twisted by ``c`` to one twisted
by ``r`` is multiplication by a form of degree ``c - r``.  Inside a graded
piece, coordinates are ordered by generator (declaration order) and then by
monomial (lexicographically descending).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algebra import Poly, PolyRing
from .linalg import Echelon, Mat


class TwistedFreeModule:
    """F = Σ^{a_1}A ⊕ ... ⊕ Σ^{a_n}A."""

    def __init__(self, ring: PolyRing, twists, labels=None):
        self.ring = ring
        self.twists = tuple(int(a) for a in twists)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != len(self.twists):
                raise ValueError("one label per generator required")
        self.labels = labels

    @property
    def rank(self) -> int:
        return len(self.twists)

    def __eq__(self, other):
        return (
            isinstance(other, TwistedFreeModule)
            and self.ring == other.ring
            and self.twists == other.twists
        )

    def __hash__(self):
        return hash((self.ring, self.twists))

    def __repr__(self):
        return f"TwistedFreeModule({self.ring}, {list(self.twists)})"

    def dim(self, j: int) -> int:
        return sum(self.ring.piece_dim(j - a) for a in self.twists)

    def offsets(self, j: int) -> list[int]:
        out = [0]
        for a in self.twists:
            out.append(out[-1] + self.ring.piece_dim(j - a))
        return out

    def piece(self, j: int) -> list[tuple[int, tuple]]:
        """Labeled basis of F_j: ``(generator, exponent vector)`` pairs."""
        return [(g, m) for g, a in enumerate(self.twists) for m in self.ring.monomials(j - a)]

    def zero_vector(self) -> list[Poly]:
        return [self.ring.zero] * self.rank

    def basis_vector(self, g: int) -> list[Poly]:
        v = self.zero_vector()
        v[g] = self.ring.one
        return v

    def to_coords(self, j: int, vec) -> dict:
        """Coordinates of a homogeneous element of degree ``j``."""
        off = self.offsets(j)
        out = {}
        for g, p in enumerate(vec):
            if not p:
                continue
            idx = self.ring.monomial_index(j - self.twists[g])
            for e, c in p.terms.items():
                if e not in idx:
                    raise ValueError(
                        f"component {g} has a term of degree {sum(e)}, "
                        f"expected {j - self.twists[g]}"
                    )
                out[off[g] + idx[e]] = c
        return out

    def from_coords(self, j: int, coords: dict) -> list[Poly]:
        off = self.offsets(j)
        terms = [{} for _ in self.twists]
        for k, c in coords.items():
            g = _locate(off, k)
            m = self.ring.monomials(j - self.twists[g])[k - off[g]]
            terms[g][m] = c
        return [Poly(self.ring, t, _clean=True) for t in terms]

    def multiply_coords(self, j: int, coords: dict, var: int) -> dict:
        """Coordinates (degree j+1) of x_var times a degree-j element."""
        off_src = self.offsets(j)
        off_tgt = self.offsets(j + 1)
        out = {}
        for k, c in coords.items():
            g = _locate(off_src, k)
            m = list(self.ring.monomials(j - self.twists[g])[k - off_src[g]])
            m[var] += 1
            out[off_tgt[g] + self.ring.monomial_index(j + 1 - self.twists[g])[tuple(m)]] = c
        return out


def _locate(offsets: list[int], k: int) -> int:
    lo, hi = 0, len(offsets) - 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if offsets[mid] <= k:
            lo = mid
        else:
            hi = mid - 1
    return lo


def vector_degree_ok(F: TwistedFreeModule, j: int, vec) -> bool:
    return all(not p or p.is_homogeneous(j - a) for p, a in zip(vec, F.twists))


class GradedMatrix:
    """A degree-zero homomorphism source -> target given by a Poly matrix.

    ``entries[i][j]`` maps source generator j to target generator i and must
    be zero or homogeneous of degree ``source.twists[j] - target.twists[i]``.
    """

    def __init__(self, source: TwistedFreeModule, target: TwistedFreeModule, entries=None,
                 check=True):
        self.source = source
        self.target = target
        ring = source.ring
        if entries is None:
            entries = [[ring.zero] * source.rank for _ in range(target.rank)]
        self.entries = [list(row) for row in entries]
        if len(self.entries) != target.rank or any(len(r) != source.rank for r in self.entries):
            raise ValueError(
                f"matrix shape does not match {target.rank}x{source.rank}"
            )
        if check:
            bad = self.homogeneity_violation()
            if bad is not None:
                i, j, got, want = bad
                raise ValueError(
                    f"entry ({i},{j}) = {self.entries[i][j]} has degree {got}, expected {want}"
                )

    @property
    def ring(self) -> PolyRing:
        return self.source.ring

    def homogeneity_violation(self):
        for i, r in enumerate(self.target.twists):
            for j, c in enumerate(self.source.twists):
                p = self.entries[i][j]
                if p and not p.is_homogeneous(c - r):
                    got = sorted({sum(e) for e in p.terms})
                    return (i, j, got[0] if len(got) == 1 else got, c - r)
        return None

    def is_zero(self) -> bool:
        return not any(p for row in self.entries for p in row)

    def column(self, j: int) -> list[Poly]:
        return [row[j] for row in self.entries]

    def apply(self, vec) -> list[Poly]:
        out = []
        for row in self.entries:
            acc = self.ring.zero
            for p, v in zip(row, vec):
                if p and v:
                    acc = acc + p * v
            out.append(acc)
        return out

    def __matmul__(self, other: GradedMatrix) -> GradedMatrix:
        if other.target.twists != self.source.twists:
            raise ValueError("composition: twist mismatch")
        ring = self.ring
        rows = []
        for row in self.entries:
            new = []
            for j in range(other.source.rank):
                acc = ring.zero
                for k, p in enumerate(row):
                    q = other.entries[k][j]
                    if p and q:
                        acc = acc + p * q
                new.append(acc)
            rows.append(new)
        return GradedMatrix(other.source, self.target, rows, check=False)

    def __add__(self, other: GradedMatrix) -> GradedMatrix:
        return GradedMatrix(self.source, self.target,
                            [[a + b for a, b in zip(r1, r2)]
                             for r1, r2 in zip(self.entries, other.entries)], check=False)

    def __neg__(self) -> GradedMatrix:
        return GradedMatrix(self.source, self.target,
                            [[-a for a in r] for r in self.entries], check=False)

    def __sub__(self, other: GradedMatrix) -> GradedMatrix:
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.entries == other.entries)

    def map_entries(self, fn) -> GradedMatrix:
        return GradedMatrix(self.source, self.target,
                            [[fn(i, j, p) for j, p in enumerate(r)]
                             for i, r in enumerate(self.entries)], check=False)

    def __repr__(self):
        rows = "; ".join(", ".join(str(p) for p in r) for r in self.entries)
        return f"GradedMatrix({list(self.source.twists)} -> {list(self.target.twists)}, [{rows}])"

    def realize(self, j: int, sign=None) -> Mat:
        return realize_degree(self, j, sign)


def realize_degree(m: GradedMatrix, j: int, sign=None) -> Mat:
    """The k-matrix of ``m`` from source_j to target_j.

    ``sign(k)`` (optional) multiplies the image of a basis vector whose
    monomial has degree k; used for the Koszul-signed A-action.
    """
    src, tgt = m.source, m.target
    field = m.ring.field
    toff = tgt.offsets(j)
    cols = []
    for g, a in enumerate(src.twists):
        column = m.column(g)
        mons = m.ring.monomials(j - a)
        for mono in mons:
            col: dict = {}
            s = sign(j - a) if sign else 1
            for i, p in enumerate(column):
                if not p:
                    continue
                idx = m.ring.monomial_index(j - tgt.twists[i])
                base = toff[i]
                for e, c in p.terms.items():
                    k = base + idx[tuple(x + y for x, y in zip(e, mono))]
                    col[k] = field.neg(c) if s < 0 else c
            cols.append(col)
    return Mat(field, tgt.dim(j), src.dim(j), cols)


def validate_homogeneity(m: GradedMatrix) -> bool:
    return m.homogeneity_violation() is None


@dataclass
class DegreewiseImage:
    degree: int
    kernel: list
    image: list


def kernel_image_degreewise(m: GradedMatrix, window) -> dict[int, DegreewiseImage]:
    lo, hi = window
    out = {}
    for j in range(lo, hi + 1):
        mat = realize_degree(m, j)
        out[j] = DegreewiseImage(j, mat.kernel(), mat.image())
    return out


@dataclass
class MinimalGenerators:
    """Degrees and lifted representatives of minimal generators of V/W."""

    degrees: list[int]
    vectors: list[dict]  # coordinates in the ambient piece of the given degree
    top_degree: int
    stable: bool = True
    dims: dict = dc_field(default_factory=dict)


def decomposable_span(F: TwistedFreeModule, j: int, lower: list[dict], extra=()) -> Echelon:
    """Span of x_i * lower (lower is a basis of a degree j-1 subspace) plus ``extra``."""
    ech = Echelon(F.ring.field, extra)
    for v in lower:
        for var in range(F.ring.nvars):
            ech.add(F.multiply_coords(j - 1, v, var))
    return ech


def graded_min_gens(F: TwistedFreeModule, sub_at, window, mod_at=None,
                    slack: int = 0) -> MinimalGenerators:
    """Minimal homogeneous generators of the graded subquotient V/W of F.

    ``sub_at(j)`` spans V_j; ``mod_at(j)`` spans W_j (inside V_j).  V must be
    closed under the variable action.  Generators are searched in degrees
    ``lo..hi``; if one appears in the top ``slack`` degrees the result is
    flagged as not stable.
    """
    lo, hi = window
    start = min(lo, min(F.twists, default=lo))
    field = F.ring.field
    prev = sub_at(start - 1)
    degrees, vectors, dims = [], [], {}
    for j in range(start, hi + 1):
        cur = sub_at(j)
        ech = decomposable_span(F, j, prev, mod_at(j) if mod_at else ())
        for v in cur:
            r = ech.reduce(v)
            if r:
                p = min(r)
                r = {k: field.div(c, r[p]) for k, c in r.items()}
                ech.add(r)
                degrees.append(j)
                vectors.append(r)
        dims[j] = len(cur)
        prev = cur
    stable = not any(d > hi - slack for d in degrees)
    return MinimalGenerators(degrees, vectors, hi, stable, dims)


class DegreewiseRealization:
    """Finite-dimensional k-spaces on keys (position, internal degree).

    The differential at key (i, j) maps to (i - 1, j).  Missing keys are zero.
    """

    def __init__(self, field, dims=None, diffs=None, labels=None):
        self.field = field
        self.dims: dict = dict(dims or {})
        self.diffs: dict = dict(diffs or {})
        self.labels = labels or {}

    def dim(self, key) -> int:
        return self.dims.get(key, 0)

    def diff(self, key) -> Mat:
        i, j = key
        m = self.diffs.get(key)
        if m is None:
            return Mat(self.field, self.dim((i - 1, j)), self.dim(key))
        return m

    def cycles(self, key) -> list[dict]:
        return self.diff(key).kernel()

    def boundaries(self, key) -> list[dict]:
        i, j = key
        return self.diff((i + 1, j)).image()

    def homology_dim(self, key) -> int:
        i, j = key
        d = self.diff(key)
        up = self.diff((i + 1, j))
        return self.dim(key) - d.rank() - up.rank()

    def keys(self):
        return sorted(self.dims)

    def d_squared_violations(self) -> list:
        bad = []
        for (i, j) in self.keys():
            comp = self.diff((i - 1, j)) @ self.diff((i, j))
            if not comp.is_zero():
                bad.append((i, j))
        return bad


@dataclass
class QuasiIsoCertificate:
    ok: bool
    chain_map: bool
    per_key: dict  # key -> (dim H source, dim H target, rank of H(mu))
    failures: list

    def as_dict(self):
        return {
            "quasi_isomorphism": self.ok,
            "chain_map": self.chain_map,
            "degrees": [
                {"key": list(k), "h_source": a, "h_target": b, "rank": r}
                for k, (a, b, r) in sorted(self.per_key.items())
            ],
            "failures": [list(k) for k in self.failures],
        }


def induced_homology_rank(src: DegreewiseRealization, tgt: DegreewiseRealization,
                          mu: Mat, key) -> tuple[int, int, int]:
    """(dim H src, dim H tgt, rank of H(mu)) at ``key``."""
    field = src.field
    z_src = src.cycles(key)
    b_tgt = Echelon(field, tgt.boundaries(key))
    nb = b_tgt.dim
    for z in z_src:
        b_tgt.add(mu.apply(z))
    return src.homology_dim(key), tgt.homology_dim(key), b_tgt.dim - nb


def realized_chain_map_failures(src, tgt, maps, keys) -> list:
    bad = []
    for key in keys:
        i, j = key
        lower = (i - 1, j)
        m_here = maps.get(key) or Mat(src.field, tgt.dim(key), src.dim(key))
        m_low = maps.get(lower) or Mat(src.field, tgt.dim(lower), src.dim(lower))
        if not (tgt.diff(key) @ m_here == m_low @ src.diff(key)):
            bad.append(key)
    return bad


def is_quasiiso_realized(src: DegreewiseRealization, tgt: DegreewiseRealization,
                         maps: dict, keys) -> QuasiIsoCertificate:
    keys = list(keys)
    chain_bad = realized_chain_map_failures(src, tgt, maps, keys)
    per_key, failures = {}, []
    for key in keys:
        mu = maps.get(key) or Mat(src.field, tgt.dim(key), src.dim(key))
        hs, ht, r = induced_homology_rank(src, tgt, mu, key)
        per_key[key] = (hs, ht, r)
        if not (hs == ht == r):
            failures.append(key)
    return QuasiIsoCertificate(not chain_bad and not failures, not chain_bad, per_key,
                               failures)
