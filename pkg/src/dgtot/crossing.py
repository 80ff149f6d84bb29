"""Level partitions of a semibasis, crossing detection, de-totaling and rebasing.

Level 0 holds the cycles of the basis; level l holds the basis elements
whose differential is nonzero and supported on level l-1.  A basis has
crossing when some element gets no level.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .algebra import Poly, koszul_twist, sign
from .complex import GradedComplex
from .dg import SemifreeDG, format_element
from .graded import GradedMatrix, TwistedFreeModule
from .linalg import Mat


@dataclass
class LevelPartition:
    labels: tuple
    levels: dict  # label -> level or None

    @property
    def unassigned(self) -> list:
        return [l for l in self.labels if self.levels[l] is None]

    @property
    def has_crossing(self) -> bool:
        return bool(self.unassigned)

    def level_sets(self) -> list[list]:
        top = max((v for v in self.levels.values() if v is not None), default=-1)
        return [[l for l in self.labels if self.levels[l] == k] for k in range(top + 1)]

    def as_dict(self):
        return {
            "levels": [list(s) for s in self.level_sets()],
            "unassigned": self.unassigned,
            "has_crossing": self.has_crossing,
        }


def _support(M: SemifreeDG, j: int) -> list[int]:
    return [i for i in range(M.rank) if M.D[i][j]]


def partition(M: SemifreeDG) -> LevelPartition:
    level: dict[int, int | None] = {j: None for j in range(M.rank)}
    current = [j for j in range(M.rank) if not _support(M, j)]
    for j in current:
        level[j] = 0
    ell = 0
    while current:
        ell += 1
        prev = set(current)
        current = [j for j in range(M.rank)
                   if level[j] is None and set(_support(M, j)) <= prev and _support(M, j)]
        for j in current:
            level[j] = ell
    return LevelPartition(M.labels, {M.labels[j]: level[j] for j in range(M.rank)})


def has_crossing(M: SemifreeDG) -> bool:
    return partition(M).has_crossing


def _sign_by_degree(p: Poly, k: int) -> Poly:
    return koszul_twist(p) if k % 2 else p


def detot(M: SemifreeDG) -> GradedComplex:
    """The complex X with Tot X = M, for a basis without crossing.

    Position l carries one generator per element of level l, twisted by
    n_e - l and labeled like the basis element.
    """
    part = partition(M)
    if part.has_crossing:
        raise ValueError(f"basis has crossing: {', '.join(part.unassigned)} unassigned")
    sets = part.level_sets()
    index = {lab: k for k, lab in enumerate(M.labels)}
    ring = M.ring
    mods = {}
    for ell, labs in enumerate(sets):
        if labs:
            mods[ell] = TwistedFreeModule(ring, [M.degrees[index[l]] - ell for l in labs], labs)
    diffs = {}
    for ell in range(1, len(sets)):
        src, tgt = sets[ell], sets[ell - 1]
        rows = []
        for t in tgt:
            row = []
            for s in src:
                p = M.D[index[t]][index[s]]
                if M.convention == "koszul":
                    p = _sign_by_degree(p, ell - 1)
                row.append(p)
            rows.append(row)
        diffs[ell] = GradedMatrix(mods[ell], mods[ell - 1], rows)
    return GradedComplex(ring, mods, diffs, M.name)


@dataclass
class BasisChange:
    """New basis e'_j = Σ_i T[i][j] e_i (unit upper triangular in the well-order)."""

    labels: tuple
    T: list  # Poly matrix

    def is_identity(self) -> bool:
        n = len(self.labels)
        return all((self.T[i][j] == (1 if i == j else 0)) for i in range(n) for j in range(n))

    def substitutions(self) -> list[str]:
        out = []
        for j, lab in enumerate(self.labels):
            col = [self.T[i][j] for i in range(len(self.labels))]
            if any(col[i] for i in range(len(col)) if i != j):
                ring = col[j].ring
                order = [j] + [i for i in range(len(col)) if i != j]
                text = format_element(ring, [self.labels[i] for i in order],
                                      [col[i] for i in order])
                out.append(f"{lab}' = {text}")
        return out

    def as_dict(self):
        return {"identity": self.is_identity(), "substitutions": self.substitutions()}


def conjugation_holds(old: SemifreeDG, new: SemifreeDG, change: BasisChange) -> bool:
    """Check T·D_new = D_old·S(T), S the Koszul twist of entries under ``koszul``."""
    n = old.rank
    T = change.T
    S = [[old.twisted(p) for p in row] for row in T]
    zero = old.ring.zero
    for i in range(n):
        for j in range(n):
            lhs = sum((T[i][k] * new.D[k][j] for k in range(n)), zero)
            rhs = sum((old.D[i][k] * S[k][j] for k in range(n)), zero)
            if lhs != rhs:
                return False
    return True


@dataclass
class EliminationResult:
    success: bool
    module: SemifreeDG
    change: BasisChange
    partition: LevelPartition
    passes: int
    unsolved: list = dc_field(default_factory=list)  # {"element", "degree", "levels_tried"}

    def as_dict(self):
        M = self.module
        return {
            "success": self.success,
            "passes": self.passes,
            "change": self.change.as_dict(),
            "partition": self.partition.as_dict(),
            "differential": {
                lab: M.format_element([M.D[i][j] for i in range(M.rank)])
                for j, lab in enumerate(M.labels)
            },
            "unsolved": self.unsolved,
        }


def _solve_rebase(M: SemifreeDG, j: int, allowed: set, smaller: list):
    """Find b = Σ_k c_k e_k (k in ``smaller``) with ∂(e_j - b) supported on ``allowed``.

    Returns the coefficient list c (Poly per basis index) or None.
    """
    ring = M.ring
    field = ring.field
    n_e = M.degrees[j]
    unknowns = [(k, m) for k in smaller for m in ring.monomials(n_e - M.degrees[k])]
    eqs: dict = {}
    cols = []
    for k, m in unknowns:
        col = {}
        s = sign(sum(m)) if M.convention == "koszul" else 1
        for i in range(M.rank):
            if i in allowed or not M.D[i][k]:
                continue
            for e, c in M.D[i][k].terms.items():
                key = eqs.setdefault((i, tuple(a + b for a, b in zip(e, m))), len(eqs))
                col[key] = c if s > 0 else field.neg(c)
        cols.append(col)
    rhs = {}
    for i in range(M.rank):
        if i in allowed or not M.D[i][j]:
            continue
        for e, c in M.D[i][j].terms.items():
            rhs[eqs.setdefault((i, e), len(eqs))] = c
    if not rhs:
        return [ring.zero] * M.rank
    if not unknowns:
        return None
    sol = Mat(field, len(eqs), len(unknowns), cols).solve(rhs)
    if sol is None:
        return None
    terms = [{} for _ in range(M.rank)]
    for u, c in sol.items():
        k, m = unknowns[u]
        terms[k][m] = c
    return [Poly(ring, t, _clean=True) for t in terms]


def _apply_rebase(D: list, T: list, j: int, b: list, M: SemifreeDG) -> None:
    """Replace e_j by e_j - b in place (D and T are mutated)."""
    n = len(D)
    zero = M.ring.zero
    # ∂(e_j - b)
    db = M.apply(b)
    for i in range(n):
        D[i][j] = D[i][j] - db[i]
    # other differentials mention e_j = e'_j + b
    for f in range(n):
        a = D[j][f]
        if f == j or not a:
            continue
        for k in range(n):
            if b[k]:
                D[k][f] = D[k][f] + a * b[k]
    # original coordinates of the new element
    for i in range(n):
        shift = sum((T[i][k] * b[k] for k in range(n) if b[k]), zero)
        T[i][j] = T[i][j] - shift


def eliminate_crossing(M: SemifreeDG, max_passes: int | None = None) -> EliminationResult:
    """Search unit upper-triangular rebasings that remove crossing.

    Elements are processed in the well-order.  For an unassigned element e
    whose differential is supported on levelled elements, the target level is
    one more than the largest level in the support; we solve for b on strictly
    smaller elements so that ∂(e - b) lies on the level below the target,
    trying lower targets when that fails.  Failure is inconclusive.
    """
    if max_passes is None:
        max_passes = max(1, M.rank)
    ring = M.ring
    n = M.rank
    D = [list(row) for row in M.D]
    T = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    order = M.well_order()
    position = {j: k for k, j in enumerate(order)}

    def current():
        out = SemifreeDG(ring, M.labels, M.degrees, D, M.convention, M.name)
        return out

    passes = 0
    unsolved = []
    while passes < max_passes:
        W = current()
        part = partition(W)
        if not part.has_crossing:
            break
        passes += 1
        unsolved = []
        changed = False
        for j in order:
            W = current()
            part = partition(W)
            lab = M.labels[j]
            if part.levels[lab] is not None:
                continue
            supp = _support(W, j)
            levels = [part.levels[M.labels[i]] for i in supp]
            known = [v for v in levels if v is not None]
            if not known:
                unsolved.append({"element": lab, "degree": M.degrees[j], "levels_tried": []})
                continue
            top = 1 + max(known)
            smaller = [k for k in order if position[k] < position[j]
                       and M.degrees[k] <= M.degrees[j]]
            tried = []
            for ell in range(top, 0, -1):
                allowed = {k for k in range(n) if part.levels[M.labels[k]] == ell - 1}
                tried.append(ell)
                b = _solve_rebase(W, j, allowed, smaller)
                if b is None:
                    continue
                if any(b):
                    _apply_rebase(D, T, j, b, W)
                    changed = True
                break
            else:
                unsolved.append({"element": lab, "degree": M.degrees[j], "levels_tried": tried})
        if not changed:
            break
    W = current()
    part = partition(W)
    change = BasisChange(M.labels, T)
    return EliminationResult(not part.has_crossing, W, change, part, passes,
                             unsolved if part.has_crossing else [])


@dataclass
class Rank3Shape:
    shape: str
    description: list
    coefficients: dict
    elimination: EliminationResult

    def as_dict(self):
        return {"shape": self.shape, "description": self.description,
                "coefficients": self.coefficients,
                "elimination": self.elimination.as_dict()}


def rank3_classify(M: SemifreeDG) -> Rank3Shape:
    """Match a module of rank at most 3 to one of the possible differential shapes."""
    if M.rank > 3:
        raise ValueError(f"rank {M.rank} exceeds 3")
    order = M.well_order()
    lab = [M.labels[j] for j in order]
    a = {}
    for x in range(len(order)):
        for y in range(x + 1, len(order)):
            p = M.D[order[x]][order[y]]
            if p:
                a[f"a{x + 1}{y + 1}"] = str(p)
    r = M.rank
    if r <= 1:
        shape, desc = "rank1", [f"d({l}) = 0" for l in lab]
    elif r == 2:
        shape, desc = "rank2", [f"d({lab[0]}) = 0", f"d({lab[1]}) = a12*{lab[0]}"]
    elif "a23" not in a:
        shape = "rank3_parallel"
        desc = [f"d({lab[0]}) = 0", f"d({lab[1]}) = a12*{lab[0]}", f"d({lab[2]}) = a13*{lab[0]}"]
    elif "a12" not in a:
        shape = "rank3_joined"
        desc = [f"d({lab[0]}) = 0", f"d({lab[1]}) = 0",
                f"d({lab[2]}) = a13*{lab[0]} + a23*{lab[1]}"]
    else:
        raise ValueError("a12 and a23 are both nonzero; d^2 = 0 fails in a domain")
    if r and M.D[order[0]][order[0]]:
        raise ValueError("first basis element must be a cycle")
    result = eliminate_crossing(M)
    if not result.success:
        raise AssertionError("rank <= 3 module with crossing after elimination")
    return Rank3Shape(shape, desc, a, result)
