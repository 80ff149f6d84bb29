"""Seeded randomized suites exercising the structural theorems end to end.

Each suite draws its instances from ``random.Random(f"{name}:{seed}:{k}")``
and returns a :class:`SuiteReport` listing every failing instance.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field

from .algebra import QQ, PolyRing
from .complex import concentrated_replacement, homology_concentration
from .crossing import conjugation_holds, detot, eliminate_crossing, has_crossing
from .dg import present_subquotient, validate_dg
from .obstruction import minimal_free_resolution, tot_image_obstruction
from .randomgen import random_complex, random_presentation, random_semifree
from .totaling import (
    tensor_compat_check,
    tor_decomposition_check,
    tot,
    tot_quasiiso_realized,
)
from .univariate import embed, graded_diagonalize

DEFAULT_COUNTS = {"embed": 100, "corollary": 100, "functorial": 50, "oracle": 50,
                  "soundness": 100}


@dataclass
class SuiteReport:
    name: str
    seed: int
    count: int
    failures: list = dc_field(default_factory=list)
    seconds: list = dc_field(default_factory=list)
    stats: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self):
        return {"suite": self.name, "seed": self.seed, "count": self.count,
                "passed": self.passed, "failures": self.failures,
                "stats": dict(sorted(self.stats.items()))}


def _rng(name: str, seed: int, k: int) -> random.Random:
    return random.Random(f"{name}:{seed}:{k}")


def _run(name, seed, count, body) -> SuiteReport:
    report = SuiteReport(name, seed, count)
    for k in range(count):
        t0 = time.perf_counter()
        problem = body(_rng(name, seed, k), report.stats)
        report.seconds.append(time.perf_counter() - t0)
        if problem:
            report.failures.append({"instance": k, **problem})
    return report


def _bump(stats, key):
    stats[key] = stats.get(key, 0) + 1


def univariate_module(rng):
    return random_semifree(PolyRing(QQ, ["x"]), rng, max_rank=5, max_degree=10, max_entry=8)


def small_module(rng):
    return random_semifree(PolyRing(QQ, ["x", "y"]), rng, max_rank=3, max_degree=6,
                           max_entry=4)


def small_complex(rng):
    nvars = rng.randint(1, 2)
    return random_complex(PolyRing(QQ, ["x", "y"][:nvars]), rng)


def embed_suite(seed: int = 0, count: int = 100) -> SuiteReport:
    def body(rng, stats):
        M = univariate_module(rng)
        w = embed(M)
        _bump(stats, f"summands_{len(w.resolution.summands)}")
        if not w.ok:
            return {"degrees": list(M.degrees), "certificate": w.certificate.as_dict()}
    return _run("embed", seed, count, body)


def corollary_suite(seed: int = 0, count: int = 100) -> SuiteReport:
    def body(rng, stats):
        M = small_module(rng)
        _bump(stats, "crossing" if has_crossing(M) else "no_crossing")
        res = eliminate_crossing(M)
        if not res.success or has_crossing(res.module):
            return {"degrees": list(M.degrees), "unsolved": res.unsolved}
        if not conjugation_holds(M, res.module, res.change):
            return {"degrees": list(M.degrees), "message": "conjugation identity fails"}
    return _run("corollary", seed, count, body)


def functorial_suite(seed: int = 0, count: int = 50) -> SuiteReport:
    def body(rng, stats):
        X = small_complex(rng)
        Y = small_complex(rng)
        if X.ring != Y.ring:
            Y = random_complex(X.ring, rng)
        for conv in ("even", "koszul"):
            T = tot(X, conv)
            if not validate_dg(T).ok:
                return {"check": "tot_semifree", "convention": conv}
            cert = tensor_compat_check(X, Y, convention=conv)
            if not cert.ok:
                return {"check": "tensor_compat", "convention": conv, **cert.as_dict()}
        tables = tor_decomposition_check(X, Y)
        if not tables.ok:
            return {"check": "tor_tables", **tables.as_dict()}
        window = X.auto_window()
        conc = homology_concentration(X, window)
        if len(conc) == 1:
            _bump(stats, "concentrated")
            rep = concentrated_replacement(X, conc[0], window)
            if not rep.certified:
                return {"check": "replacement"}
            a = tot_quasiiso_realized(rep.intermediate, rep.source, rep.iota)
            b = tot_quasiiso_realized(rep.intermediate, rep.homology, rep.pi)
            if not (a.ok and b.ok):
                return {"check": "tot_replacement"}
    return _run("functorial", seed, count, body)


def oracle_betti(P):
    """(degreewise Betti twists, diagonalization Betti twists) for a univariate P."""
    F0 = P.target
    field = P.ring.field
    lo = min(F0.twists)
    hi = 2 * max(list(P.source.twists) + list(F0.twists)) + 4
    sq = present_subquotient(F0, lambda d: [{k: field.one} for k in range(F0.dim(d))],
                             lambda d: P.realize(d).image(), (lo, hi))
    res = minimal_free_resolution(sq, method="degreewise")
    snf = graded_diagonalize(P)
    via_snf = [sorted([r for r, _ in snf.pairs] + list(snf.free_twists)),
               sorted(c for _, c in snf.pairs)]
    via_res = [sorted(t) for t in res.twists] + [[], []]
    return via_res[:2], via_snf, res.certified


def oracle_suite(seed: int = 0, count: int = 50) -> SuiteReport:
    ring = PolyRing(QQ, ["x"])

    def body(rng, stats):
        P = random_presentation(ring, rng)
        a, b, ok = oracle_betti(P)
        if a != b or not ok:
            return {"degreewise": a, "diagonalize": b, "certified": ok}
    return _run("oracle", seed, count, body)


def soundness_suite(seed: int = 0, count: int = 100) -> SuiteReport:
    """Modules known to lie in the image of Tot never get NOT_IN_TOT_IMAGE."""
    def body(rng, stats):
        kind = rng.randrange(3)
        if kind == 0:
            M = univariate_module(rng)
            if not embed(M).ok:
                return None
            _bump(stats, "embedded")
        elif kind == 1:
            # Tot X lies in the image by construction, whether or not detot applies
            M = tot(small_complex(rng))
            if has_crossing(M):
                _bump(stats, "tot_with_crossing")
            else:
                detot(M)
                _bump(stats, "detotaled")
        else:
            res = eliminate_crossing(small_module(rng))
            if not res.success:
                return None
            M = res.module
            detot(M)
            _bump(stats, "rebased")
        v = tot_image_obstruction(M)
        _bump(stats, v.verdict)
        if v.verdict == "NOT_IN_TOT_IMAGE":
            return {"degrees": list(M.degrees), "verdict": v.verdict}
    return _run("soundness", seed, count, body)


SUITES = {"embed": embed_suite, "corollary": corollary_suite, "functorial": functorial_suite,
          "oracle": oracle_suite, "soundness": soundness_suite}


def run_suite(name: str, seed: int = 0, count: int | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    return SUITES[name](seed, DEFAULT_COUNTS[name] if count is None else count)
