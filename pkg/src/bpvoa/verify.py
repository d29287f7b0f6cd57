"""Aggregated consistency checks over the bracket algebra, weights and modules."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import ope, weights
from .linalg import axpy
from .modules import (
    HighestWeightModule,
    InconclusiveError,
    Kind,
    Truncation,
    iterate_quotient,
    null_vector_check,
    top_dimension,
    twist_module,
)
from .ope import ENGINE, GENERATORS, BracketEngine, FieldId, Mode, OpeEntry
from .scalars import K

__all__ = [
    "Check",
    "check_module_brackets",
    "check_weight_identities",
    "corrupted_engine",
    "verify_all",
]


@dataclass
class Check:
    name: str
    ok: bool | None  # None means inconclusive
    detail: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return {True: "verified", False: "mismatch", None: "inconclusive"}[self.ok]

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "detail": self.detail}


def corrupted_engine(factor=2) -> BracketEngine:
    """Engine whose G+G- third-order pole is scaled by ``factor`` (fault injection)."""
    entries = []
    for e in ope.load_paper_opes():
        if e.lhs == (FieldId.GPLUS, FieldId.GMINUS):
            poles = dict(e.poles)
            poles[3] = {t: c * factor for t, c in poles[3].items()}
            e = OpeEntry(e.lhs, poles)
        entries.append(e)
    return BracketEngine(entries)


def random_vector(module: HighestWeightModule, block, rng: random.Random, size: int = 6) -> dict:
    monos = list(module.block(*block))
    rng.shuffle(monos)
    vec = {}
    for m in monos[:size]:
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if c:
            vec[m] = c
    return vec


def check_module_brackets(module: HighestWeightModule, vectors: list[dict], grid=range(-2, 3)) -> list:
    """Cases where X Y v - Y X v != [X, Y] v, with [X, Y] from the bracket engine."""
    bad = []
    for a in GENERATORS:
        for b in GENERATORS:
            for m in grid:
                for n in grid:
                    x, y = Mode(a, m), Mode(b, n)
                    br = module.bracket(x, y)
                    for t, v in enumerate(vectors):
                        diff = module.act(x, module.act(y, v))
                        axpy(diff, -1, module.act(y, module.act(x, v)))
                        axpy(diff, -1, module.act_expr(br, v))
                        if diff:
                            bad.append({"modes": [str(x), str(y)], "vector": t})
    return bad


JACOBI_BLOCKS = ((0, 1), (1, 2), (-1, 2), (0, 3), (-1, 3), (2, 3))


def jacobi_suite(grid=range(-2, 3), k_values=None, seed: int = 0, engine: BracketEngine | None = None) -> dict:
    """Bracket soundness on Verma and vacuum modules at symbolic k and at rational k.

    Every derived bracket contains at most (J^2) as a composite and the module
    action expands it exactly, so the symbolic run covers it as well; the
    rational runs repeat the check at sample levels.
    """
    rng = random.Random(seed)
    if k_values is None:
        k_values = []
        while len(k_values) < 3:
            q = Fraction(rng.randint(-20, 20), rng.randint(1, 7))
            if q != -3 and q not in k_values:
                k_values.append(q)
    runs = []
    for k in [K, *k_values]:
        xi = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        chi = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        for module in (
            HighestWeightModule(Kind.VERMA, k, xi, chi, engine=engine),
            HighestWeightModule(Kind.VACUUM, k, engine=engine),
        ):
            vecs = [random_vector(module, b, rng) for b in JACOBI_BLOCKS]
            vecs = [v for v in vecs if v]
            bad = check_module_brackets(module, vecs, grid)
            runs.append({
                "k": "k" if k is K else str(k),
                "kind": module.kind.value,
                "xi": str(module.xi),
                "chi": str(module.chi),
                "vectors": len(vecs),
                "failures": bad[:20],
                "failure_count": len(bad),
            })
    return {"grid": [grid[0], grid[-1]], "runs": runs, "ok": all(r["failure_count"] == 0 for r in runs)}


def check_weight_identities(ps=(3, 5, 7, 9)) -> list:
    """Weight-module identities; returns a list of failure descriptions."""
    bad = []
    grid = [Fraction(a, b) for a in (-2, 1, 3) for b in (1, 2, 3)]
    for i in range(1, 9):
        for xi in grid[:3]:
            for chi in grid[3:6]:
                if weights.h_fun_averaged(i, xi, chi) != weights.h_fun_expanded(i, xi, chi):
                    bad.append(f"h_{i} forms differ at ({xi}, {chi})")
    for p in ps:
        k = weights.Level(p).k
        seen = set()
        for rec in weights.enumerate_simples(p):
            hw, i, j = rec.hw, rec.i, rec.j
            if weights.h_fun(i, hw.xi, hw.chi, k):
                bad.append(f"h_i(xi_ij, chi_ij) != 0 at p={p}, ({i},{j})")
            flowed = weights.flow_weight(hw, i, k)
            if weights.h_fun(j, flowed.xi, flowed.chi, k):
                bad.append(f"h_j(flowed) != 0 at p={p}, ({i},{j})")
            if flowed.xi != Fraction(i - j, 3):
                bad.append(f"flowed xi != (i-j)/3 at p={p}, ({i},{j})")
            if weights.weight_from_sl3(rec.lam, k) != hw:
                bad.append(f"sl3 weight formula disagrees at p={p}, ({i},{j})")
            if hw in seen:
                bad.append(f"repeated highest weight at p={p}")
            seen.add(hw)
        if len(seen) != (p - 1) * (p - 2) // 2:
            bad.append(f"wrong record count at p={p}")
        if weights.xi_chi(1, p - 2, k) != weights.HighestWeight(0, 0):
            bad.append(f"(1, p-2) is not the vacuum weight at p={p}")
        weights.central_charge(k, p)
    return bad


def _collapse_p3(engine) -> dict:
    state = iterate_quotient(Kind.VACUUM, None, Truncation(4, 4), Fraction(-3, 2), engine=engine)
    dims = state.dimensions()
    nonzero = {f"{a},{d}": n for (a, d), n in dims.items() if n and (a, d) != (0, 0)}
    return {"ok": dims[(0, 0)] == 1 and not nonzero, "nonzero_blocks": nonzero}


def _top_dims(p: int, engine) -> dict:
    k = weights.Level(p).k
    out = {}
    ok = True
    for rec in weights.enumerate_simples(p):
        try:
            t = top_dimension(rec.hw, k, engine=engine)
        except InconclusiveError:
            out[f"{rec.i},{rec.j}"] = "inconclusive"
            if ok:
                ok = None
            continue
        out[f"{rec.i},{rec.j}"] = t
        if t != rec.i:
            ok = False
    return {"ok": ok, "dims": out}


def verify_all(profile: str = "quick", engine: BracketEngine | None = None) -> list[Check]:
    engine = engine or ENGINE
    full = profile == "full"
    grid = range(-3, 4)
    checks = []

    rep = ope.verify_bracket_table(grid, engine)
    checks.append(Check("bracket-table", rep.ok, {"checked": rep.checked, "mismatches": len(rep.mismatches)}))
    bad = ope.check_virasoro(grid, engine)
    checks.append(Check("virasoro", not bad, {"mismatches": len(bad)}))
    bad = ope.check_antisymmetry(grid, engine)
    checks.append(Check("antisymmetry", not bad, {"mismatches": len(bad)}))
    bad = ope.check_grading(grid, engine)
    checks.append(Check("grading", not bad, {"mismatches": len(bad)}))
    bad = ope.check_flow_automorphism(grid, engine)
    checks.append(Check("spectral-flow-automorphism", not bad, {"mismatches": len(bad)}))

    bad = check_weight_identities()
    checks.append(Check("weight-identities", not bad, {"failures": bad[:20]}))

    r = _collapse_p3(engine)
    checks.append(Check("p3-vacuum-collapse", r["ok"], {"nonzero_blocks": r["nonzero_blocks"]}))

    for p in (5, 7) if full else (5,):
        r = null_vector_check(p, engine=engine)
        checks.append(Check(f"p{p}-null-vector", r["in_maximal_submodule"], {"certificate_depth": r["certificate_depth"]}))
    if full:
        r = null_vector_check(5, "G-", engine=engine)
        checks.append(Check("p5-null-vector-G-", r["in_maximal_submodule"], {}))

    r = _top_dims(5, engine)
    checks.append(Check("p5-top-dimensions", r["ok"], {"dims": r["dims"]}))
    if full:
        r = _top_dims(7, engine)
        checks.append(Check("p7-top-dimensions", r["ok"], {"dims": r["dims"]}))

    k = Fraction(-1, 2)
    hw = weights.HighestWeight(Fraction(2, 3), Fraction(0))
    try:
        state = iterate_quotient(Kind.VERMA, hw, Truncation(2, 5), k, engine=engine)
        got, _ = twist_module(state)
        checks.append(Check("p5-twist", got == weights.flow_weight(hw, 1, k), {"twisted": got.to_json()}))
    except InconclusiveError as exc:
        checks.append(Check("p5-twist", None, {"reason": str(exc)}))

    if full:
        r = jacobi_suite(engine=engine)
        checks.append(Check("module-jacobi", r["ok"], {"runs": len(r["runs"])}))
    return checks

