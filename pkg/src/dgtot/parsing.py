"""Text formats for polynomials, DG modules, complexes and morphisms.

A document is a ring declaration followed by one or more objects::

    ring Q[x1,x2]
    dgmodule E1
    basis e1:0 e2:3 e3:4 e4:8
    d e2 = x1*x2*e1
    d e4 = x1^7*e1 - x2^4*e2 + x1*x2^2*e3

    complex X
    module 0 twists [0]
    module 1 twists [1, 2] labels [e2, e3]
    d 1 = [x, y*z]

    morphism f source X target Y
    map 0 = [1]

Matrix rows are indexed by target generators and separated by ``;``.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import Field, Poly, PolyRing
from .complex import ComplexMorphism, GradedComplex
from .dg import SemifreeDG, format_element
from .graded import GradedMatrix, TwistedFreeModule


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class SemanticError(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str, line: int | None = None, col0: int = 0) -> list[tuple[str, str, int]]:
    """Tokens as ``(kind, value, column)``; kind is num, name or sym."""
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        num, name, sym = m.groups()
        start = m.start(1) if num else m.start(2) if name else m.start(3)
        if num:
            out.append(("num", num, col0 + start + 1))
        elif name:
            out.append(("name", name, col0 + start + 1))
        elif sym is not None:
            if sym not in "+-*/^()[],;:=":
                raise ParseError(f"unexpected character {sym!r}", line, col0 + start + 1)
            out.append(("sym", sym, col0 + start + 1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, ring: PolyRing, labels=(), line=None):
        self.toks = tokens
        self.i = 0
        self.ring = ring
        self.labels = {lab: k for k, lab in enumerate(labels)}
        self.vars = {v: k for k, v in enumerate(ring.variables)}
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg):
        t = self.peek()
        raise ParseError(msg, self.line, t[2] if t else None)

    def take(self, kind=None, value=None):
        t = self.peek()
        if t is None or (kind and t[0] != kind) or (value and t[1] != value):
            want = value or kind or "token"
            self.error(f"expected {want!r}" + (f", found {t[1]!r}" if t else " at end of input"))
        self.i += 1
        return t

    def at(self, value) -> bool:
        t = self.peek()
        return t is not None and t[0] == "sym" and t[1] == value

    def done(self) -> bool:
        return self.i >= len(self.toks)

    # poly := sterm (('+'|'-') sterm)*, with an optional leading sign
    def poly(self) -> Poly:
        neg = False
        if self.at("+") or self.at("-"):
            neg = self.take()[1] == "-"
        total = self.sterm()
        if neg:
            total = -total
        while self.at("+") or self.at("-"):
            s = self.take()[1]
            t = self.sterm()
            total = total + t if s == "+" else total - t
        return total

    def coeff(self):
        n = int(self.take("num")[1])
        if self.at("/"):
            self.take()
            d = int(self.take("num")[1])
            if d == 0:
                self.error("zero denominator")
            return Fraction(n, d)
        return n

    def factor(self) -> Poly:
        t = self.peek()
        if t and t[0] == "sym" and t[1] == "(":
            self.take()
            p = self.poly()
            self.take("sym", ")")
        elif t and t[0] == "num":
            p = self.ring.const(self.coeff())
        elif t and t[0] == "name" and t[1] in self.vars:
            self.take()
            p = self.ring.gen(self.vars[t[1]])
        elif t and t[0] == "name":
            self.error(f"unknown variable {t[1]!r}")
        else:
            self.error("expected a coefficient, variable or '('")
        if self.at("^"):
            self.take()
            p = p ** int(self.take("num")[1])
        return p

    def _starts_factor(self) -> bool:
        t = self.peek()
        if t is None:
            return False
        if t[0] == "num" or (t[0] == "sym" and t[1] == "("):
            return True
        return t[0] == "name" and t[1] in self.vars

    def sterm(self) -> Poly:
        p = self.factor()
        while True:
            if self.at("*"):
                nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
                if nxt and nxt[0] == "name" and nxt[1] in self.labels:
                    return p
                self.take()
                p = p * self.factor()
            elif self._starts_factor():
                p = p * self.factor()
            else:
                return p

    # modelem := mterm (('+'|'-') mterm)* | '0'
    def element(self) -> list[Poly]:
        vec = [self.ring.zero] * len(self.labels)
        t = self.peek()
        if t and t[0] == "num" and t[1] == "0" and self.i + 1 == len(self.toks):
            self.take()
            return vec
        first = True
        while True:
            neg = False
            if self.at("+") or self.at("-"):
                neg = self.take()[1] == "-"
            elif not first:
                break
            first = False
            t = self.peek()
            if t and t[0] == "name" and t[1] in self.labels:
                coeff = self.ring.one
            else:
                coeff = self.sterm()
                if self.at("*"):
                    self.take()
            lab = self.take("name")
            if lab[1] not in self.labels:
                raise ParseError(f"unknown basis label {lab[1]!r}", self.line, lab[2])
            k = self.labels[lab[1]]
            vec[k] = vec[k] + (-coeff if neg else coeff)
            if self.done():
                break
        return vec

    def matrix(self) -> list[list[Poly]]:
        self.take("sym", "[")
        rows = [[]]
        if self.at("]"):
            self.take()
            return []
        while True:
            rows[-1].append(self.poly())
            if self.at(","):
                self.take()
            elif self.at(";"):
                self.take()
                rows.append([])
            else:
                self.take("sym", "]")
                break
        if len({len(r) for r in rows}) != 1:
            self.error("matrix rows have different lengths")
        return rows

    def int_list(self) -> list[int]:
        self.take("sym", "[")
        out = []
        if self.at("]"):
            self.take()
            return out
        while True:
            neg = False
            if self.at("-"):
                self.take()
                neg = True
            v = int(self.take("num")[1])
            out.append(-v if neg else v)
            if self.at(","):
                self.take()
            else:
                self.take("sym", "]")
                return out

    def name_list(self) -> list[str]:
        self.take("sym", "[")
        out = []
        while not self.at("]"):
            out.append(self.take("name")[1])
            if self.at(","):
                self.take()
        self.take("sym", "]")
        return out

    def integer(self) -> int:
        neg = False
        if self.at("-"):
            self.take()
            neg = True
        v = int(self.take("num")[1])
        return -v if neg else v


def parse_poly(text: str, ring: PolyRing) -> Poly:
    p = _Parser(tokenize(text), ring)
    out = p.poly()
    if not p.done():
        p.error("unexpected trailing input")
    return out


def parse_element(text: str, ring: PolyRing, labels) -> list[Poly]:
    p = _Parser(tokenize(text), ring, labels)
    out = p.element()
    if not p.done():
        p.error("unexpected trailing input")
    return out


_RING = re.compile(r"^ring\s+(Q|F(\d+))\s*\[(.*)\]\s*$")


def parse_ring(line: str, lineno: int | None = None) -> PolyRing:
    m = _RING.match(line.strip())
    if not m:
        raise ParseError("expected 'ring Q[...]' or 'ring F<p>[...]'", lineno, 1)
    try:
        field = Field(int(m.group(2)) if m.group(2) else 0)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
    names = [v.strip() for v in m.group(3).split(",")]
    for v in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise ParseError(f"bad variable name {v!r}", lineno)
    try:
        return PolyRing(field, names)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


@dataclass
class Document:
    ring: PolyRing
    objects: list = dc_field(default_factory=list)  # SemifreeDG | GradedComplex | ComplexMorphism

    def first(self, kind):
        for obj in self.objects:
            if isinstance(obj, kind):
                return obj
        raise ParseError(f"document contains no {kind.__name__}")

    def named(self, name):
        for obj in self.objects:
            if getattr(obj, "name", None) == name:
                return obj
        raise ParseError(f"no object named {name!r}")


def _split_head(line: str) -> tuple[str, str]:
    parts = line.split(None, 1)
    return parts[0], (parts[1] if len(parts) > 1 else "")


def parse(text: str, convention: str = "even", field: Field | None = None) -> Document:
    """Parse a document; ``field`` overrides the declared coefficient field."""
    lines = []
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            lines.append((k, s))
    if not lines:
        raise ParseError("empty document", 1, 1)
    k0, first = lines[0]
    ring = parse_ring(first, k0)
    if field is not None:
        ring = ring.with_field(field)
    doc = Document(ring)
    blocks = []
    for k, s in lines[1:]:
        head, _ = _split_head(s)
        if head in ("dgmodule", "complex", "morphism"):
            blocks.append([(k, s)])
        elif not blocks:
            raise ParseError(f"expected 'dgmodule', 'complex' or 'morphism', found {head!r}", k, 1)
        else:
            blocks[-1].append((k, s))
    if not blocks:
        raise ParseError("document declares no object", k0)
    for block in blocks:
        head, _ = _split_head(block[0][1])
        if head == "dgmodule":
            doc.objects.append(_parse_dgmodule(block, ring, convention))
        elif head == "complex":
            doc.objects.append(_parse_complex(block, ring))
        else:
            doc.objects.append(_parse_morphism(block, ring, doc))
    return doc


def _parse_dgmodule(block, ring: PolyRing, convention: str) -> SemifreeDG:
    k, s = block[0]
    toks = tokenize(s, k)
    if len(toks) != 2 or toks[1][0] != "name":
        raise ParseError("expected 'dgmodule NAME'", k, 1)
    name = toks[1][1]
    if len(block) < 2 or _split_head(block[1][1])[0] != "basis":
        raise ParseError("expected a 'basis' line", block[1][0] if len(block) > 1 else k, 1)
    k, s = block[1]
    toks = tokenize(s, k)[1:]
    if not toks:
        raise ParseError("empty basis", k, len(s) + 1)
    p = _Parser(toks, ring, line=k)
    basis = []
    while not p.done():
        lab = p.take("name")
        if lab[1] in ring.variables:
            raise ParseError(f"basis label {lab[1]!r} clashes with a variable", k, lab[2])
        p.take("sym", ":")
        basis.append((lab[1], p.integer()))
    labels = [b[0] for b in basis]
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate basis label", k)
    degrees = [b[1] for b in basis]
    n = len(labels)
    D = [[ring.zero] * n for _ in range(n)]
    seen = set()
    for k, s in block[2:]:
        toks = tokenize(s, k)
        if not toks or toks[0][1] != "d":
            raise ParseError("expected 'd LABEL = ELEMENT'", k, 1)
        p = _Parser(toks[1:], ring, labels, line=k)
        lab = p.take("name")
        if lab[1] not in labels:
            raise ParseError(f"unknown basis label {lab[1]!r}", k, lab[2])
        if lab[1] in seen:
            raise ParseError(f"differential of {lab[1]} given twice", k, lab[2])
        seen.add(lab[1])
        p.take("sym", "=")
        vec = p.element()
        if not p.done():
            p.error("unexpected trailing input")
        j = labels.index(lab[1])
        for i, c in enumerate(vec):
            want = degrees[j] - degrees[i] - 1
            if c and not c.is_homogeneous(want):
                got = c.degree() if c.is_homogeneous() else "mixed"
                raise SemanticError(
                    f"coefficient of {labels[i]} in d {lab[1]} has degree {got}, "
                    f"expected {want}", k)
            D[i][j] = c
    return SemifreeDG(ring, labels, degrees, D, convention, name)


def default_labels(position: int, rank: int) -> list[str]:
    tag = f"m{-position}" if position < 0 else str(position)
    return [f"e{tag}_{g}" for g in range(rank)]


def _parse_complex(block, ring: PolyRing) -> GradedComplex:
    k, s = block[0]
    toks = tokenize(s, k)
    if len(toks) != 2 or toks[1][0] != "name":
        raise ParseError("expected 'complex NAME'", k, 1)
    name = toks[1][1]
    modules = {}
    raw_diffs = []
    for k, s in block[1:]:
        toks = tokenize(s, k)
        head = toks[0][1]
        p = _Parser(toks[1:], ring, line=k)
        if head == "module":
            i = p.integer()
            if i in modules:
                raise ParseError(f"module {i} declared twice", k)
            p.take("name", "twists")
            twists = p.int_list()
            labels = None
            if not p.done():
                p.take("name", "labels")
                labels = p.name_list()
                if len(labels) != len(twists):
                    raise ParseError("one label per twist required", k)
            if not p.done():
                p.error("unexpected trailing input")
            modules[i] = TwistedFreeModule(ring, twists, labels or default_labels(i, len(twists)))
        elif head == "d":
            i = p.integer()
            p.take("sym", "=")
            rows = p.matrix()
            if not p.done():
                p.error("unexpected trailing input")
            raw_diffs.append((k, i, rows))
        else:
            raise ParseError(f"expected 'module' or 'd', found {head!r}", k, 1)
    if not modules:
        raise ParseError("complex declares no module", block[0][0])
    empty = TwistedFreeModule(ring, [])
    diffs = {}
    for k, i, rows in raw_diffs:
        src, tgt = modules.get(i, empty), modules.get(i - 1, empty)
        diffs[i] = _graded(rows, src, tgt, k, f"d {i}")
    return GradedComplex(ring, modules, diffs, name)


def _graded(rows, src, tgt, k, what) -> GradedMatrix:
    if rows and (len(rows) != tgt.rank or len(rows[0]) != src.rank):
        raise SemanticError(
            f"{what} has shape {len(rows)}x{len(rows[0])}, expected {tgt.rank}x{src.rank}", k)
    if not rows:
        if src.rank and tgt.rank:
            raise SemanticError(f"{what} is empty but should be {tgt.rank}x{src.rank}", k)
        rows = [[] for _ in range(tgt.rank)]
    for r, row in enumerate(rows):
        for c, p in enumerate(row):
            want = src.twists[c] - tgt.twists[r]
            if p and not p.is_homogeneous(want):
                got = p.degree() if p.is_homogeneous() else "mixed"
                raise SemanticError(f"entry ({r},{c}) of {what} has degree {got}, expected {want}",
                                    k)
    return GradedMatrix(src, tgt, rows, check=False)


_MORPH = re.compile(r"^morphism\s+(\w+)\s+source\s+(\w+)\s+target\s+(\w+)$")


def _parse_morphism(block, ring: PolyRing, doc: Document) -> ComplexMorphism:
    k, s = block[0]
    m = _MORPH.match(s)
    if not m:
        raise ParseError("expected 'morphism NAME source X target Y'", k, 1)
    name, sname, tname = m.groups()
    try:
        X, Y = doc.named(sname), doc.named(tname)
    except ParseError as exc:
        raise ParseError(exc.message, k) from None
    comps = {}
    for k, s in block[1:]:
        toks = tokenize(s, k)
        if toks[0][1] != "map":
            raise ParseError("expected 'map POSITION = MATRIX'", k, 1)
        p = _Parser(toks[1:], ring, line=k)
        i = p.integer()
        p.take("sym", "=")
        rows = p.matrix()
        if not p.done():
            p.error("unexpected trailing input")
        comps[i] = _graded(rows, X.module(i), Y.module(i), k, f"map {i}")
    return ComplexMorphism(X, Y, comps, name)


# ---------------------------------------------------------------------------
# canonical serialization


def serialize_ring(ring: PolyRing) -> str:
    return f"ring {ring.field.name}[{','.join(ring.variables)}]"


def serialize_dg(M: SemifreeDG) -> str:
    lines = [f"dgmodule {M.name or 'M'}",
             "basis " + " ".join(f"{l}:{n}" for l, n in zip(M.labels, M.degrees))]
    for j, lab in enumerate(M.labels):
        col = [M.D[i][j] for i in range(M.rank)]
        if any(col):
            lines.append(f"d {lab} = {format_element(M.ring, M.labels, col)}")
    return "\n".join(lines)


def _matrix_text(m: GradedMatrix) -> str:
    return "[" + "; ".join(", ".join(str(p) for p in row) for row in m.entries) + "]"


def serialize_complex(X: GradedComplex) -> str:
    lines = [f"complex {X.name or 'X'}"]
    for i in X.support:
        F = X.modules[i]
        line = f"module {i} twists [{', '.join(map(str, F.twists))}]"
        if F.labels and list(F.labels) != default_labels(i, F.rank):
            line += f" labels [{', '.join(F.labels)}]"
        lines.append(line)
    for i in sorted(X.diffs):
        lines.append(f"d {i} = {_matrix_text(X.diffs[i])}")
    return "\n".join(lines)


def serialize_morphism(f: ComplexMorphism) -> str:
    lines = [f"morphism {f.name or 'f'} source {f.source.name or 'X'} "
             f"target {f.target.name or 'Y'}"]
    for i in sorted(f.comps):
        if not f.comps[i].is_zero():
            lines.append(f"map {i} = {_matrix_text(f.comps[i])}")
    return "\n".join(lines)


def serialize(doc_or_obj, ring: PolyRing | None = None) -> str:
    if isinstance(doc_or_obj, Document):
        ring, objs = doc_or_obj.ring, doc_or_obj.objects
    else:
        objs = [doc_or_obj]
        ring = ring or doc_or_obj.ring
    parts = [serialize_ring(ring)]
    for obj in objs:
        if isinstance(obj, SemifreeDG):
            parts.append(serialize_dg(obj))
        elif isinstance(obj, GradedComplex):
            parts.append(serialize_complex(obj))
        elif isinstance(obj, ComplexMorphism):
            parts.append(serialize_morphism(obj))
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__}")
    return parts[0] + "\n" + "\n\n".join(parts[1:]) + "\n"
