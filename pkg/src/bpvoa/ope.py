"""OPE data of the Bershadsky-Polyakov algebra and the mode brackets it implies.

Internally every field uses the mathematical expansion
``A(z) = sum_n A_(n) z^(-n-1)``.  Public mode symbols use the weight-shifted
("display") convention ``A(z) = sum_n A_n z^(-n-Delta)`` with Delta the
weight under the conformal vector L = T + dJ/2, so that
``A_n = A_(n + shift)`` with shift 0 for J, G+ and 1 for G-, T, L, :JJ:.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import NamedTuple

from .scalars import K, format_scalar

__all__ = [
    "BracketEngine",
    "BracketReport",
    "FieldId",
    "Mode",
    "ModeExpression",
    "OpeEntry",
    "OpeTable",
    "ENGINE",
    "bracket",
    "central_charge_expr",
    "commutator",
    "load_paper_opes",
    "closed_form_bracket",
    "spectral_flow_mode",
    "to_L_basis",
    "verify_bracket_table",
]


class FieldId(str, Enum):
    IDENTITY = "1"
    J = "J"
    GPLUS = "G+"
    GMINUS = "G-"
    T = "T"
    L = "L"
    DJ = "dJ"
    JJ = "JJ"


# weight under L, and J_0 charge
WEIGHT = {
    FieldId.IDENTITY: 0,
    FieldId.J: 1,
    FieldId.GPLUS: 1,
    FieldId.GMINUS: 2,
    FieldId.T: 2,
    FieldId.L: 2,
    FieldId.DJ: 2,
    FieldId.JJ: 2,
}
CHARGE = {f: 0 for f in FieldId}
CHARGE[FieldId.GPLUS] = 1
CHARGE[FieldId.GMINUS] = -1

GENERATORS = ("J", "G+", "G-", "L")


def shift(family: str) -> int:
    """Offset between the display index and the internal index."""
    return WEIGHT[FieldId(family)] - 1


class Mode(NamedTuple):
    """A generator mode in display convention, e.g. ``Mode("G-", -2)``."""

    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}_{{{self.index}}}"

    @property
    def charge(self) -> int:
        return CHARGE[FieldId(self.family)]

    @property
    def depth(self) -> int:
        return -self.index


# A field expression maps (field, number of derivatives) to a coefficient.
Term = tuple  # (FieldId, int)


def _canon(f: FieldId, r: int = 0) -> Term:
    if f is FieldId.DJ:
        return (FieldId.J, r + 1)
    return (f, r)


def _fe(*pairs) -> dict:
    """Build a field expression from ``(coefficient, field[, derivatives])`` tuples."""
    out: dict = {}
    for p in pairs:
        coeff, f = p[0], p[1]
        r = p[2] if len(p) > 2 else 0
        key = _canon(f, r)
        out[key] = out.get(key, 0) + coeff
    return {t: c for t, c in out.items() if c}


@dataclass(frozen=True)
class OpeEntry:
    """Singular part of ``A(z)B(w)``: pole order -> field expression at w."""

    lhs: tuple
    poles: dict = field(default_factory=dict)


def load_paper_opes() -> list[OpeEntry]:
    k = K
    I, J, Gp, Gm, T, JJ = (
        FieldId.IDENTITY,
        FieldId.J,
        FieldId.GPLUS,
        FieldId.GMINUS,
        FieldId.T,
        FieldId.JJ,
    )
    c_T = -(2 * k + 3) * (3 * k + 1) / (2 * (k + 3))
    return [
        OpeEntry((J, J), {2: _fe(((2 * k + 3) / 3, I))}),
        OpeEntry((Gp, Gp), {}),
        OpeEntry((Gm, Gm), {}),
        OpeEntry((J, Gp), {1: _fe((1, Gp))}),
        OpeEntry((J, Gm), {1: _fe((-1, Gm))}),
        OpeEntry((T, T), {4: _fe((c_T, I)), 2: _fe((2, T)), 1: _fe((1, T, 1))}),
        OpeEntry((T, Gp), {2: _fe((Fraction(3, 2), Gp)), 1: _fe((1, Gp, 1))}),
        OpeEntry((T, Gm), {2: _fe((Fraction(3, 2), Gm)), 1: _fe((1, Gm, 1))}),
        OpeEntry((T, J), {2: _fe((1, J)), 1: _fe((1, J, 1))}),
        OpeEntry(
            (Gp, Gm),
            {
                3: _fe(((k + 1) * (2 * k + 3), I)),
                2: _fe((3 * (k + 1), J)),
                1: _fe((3, JJ), (3 * (k + 1) / 2, FieldId.DJ), (-(k + 3), T)),
            },
        ),
    ]


def _derivative(expr: dict, times: int = 1) -> dict:
    out = {}
    for (f, r), c in expr.items():
        if f is FieldId.IDENTITY:
            continue
        out[(f, r + times)] = c
    return out


class OpeTable:
    """Lookup of the n-th products ``A_(n)B`` with locality swap for reversed pairs."""

    def __init__(self, entries: list[OpeEntry]):
        self.entries = {e.lhs: e for e in entries}
        self._products: dict = {}

    def entry(self, a: FieldId, b: FieldId) -> OpeEntry:
        """The OPE of ``a(z)b(w)``, derived by skew-symmetry when only ``b a`` is tabulated."""
        a, b = FieldId(a), FieldId(b)
        if (a, b) in self.entries:
            return self.entries[(a, b)]
        if (b, a) not in self.entries:
            raise KeyError(f"no OPE for {a.value}(z){b.value}(w)")
        return OpeEntry((a, b), self._swapped(self.entries[(b, a)]))

    @staticmethod
    def _swapped(e: OpeEntry) -> dict:
        # B_(n)A = sum_i (-1)^(n+i+1) / i! d^i (A_(n+i)B); all fields are even
        prods = {pole - 1: expr for pole, expr in e.poles.items()}
        top = max(prods, default=-1)
        poles = {}
        for n in range(top + 1):
            acc: dict = {}
            for n_i in range(n, top + 1):
                i = n_i - n
                if n_i not in prods:
                    continue
                sign = -1 if (n + i + 1) % 2 else 1
                for t, c in _derivative(prods[n_i], i).items() if i else prods[n_i].items():
                    acc[t] = acc.get(t, 0) + Fraction(sign, factorial(i)) * c
            acc = {t: c for t, c in acc.items() if c}
            if acc:
                poles[n + 1] = acc
        return poles

    def products(self, a, b) -> dict:
        """Map ``j -> A_(j)B`` as field expressions."""
        key = (FieldId(a), FieldId(b))
        if key not in self._products:
            e = self.entry(*key)
            self._products[key] = {pole - 1: expr for pole, expr in e.poles.items()}
        return self._products[key]


# -- mode expressions ------------------------------------------------------------


class ModeExpression:
    """Finite combination of modes, modes ``(J^2)_l`` of :J(z)^2: and a central term.

    ``(J^2)_l`` is the coefficient of ``z^(-l-2)`` in :J(z)^2:, i.e.
    ``sum_{a<=-1} J_a J_(l-a) + sum_{a>=0} J_(l-a) J_a``.
    """

    __slots__ = ("linear", "jj", "central")

    def __init__(self, linear=None, jj=None, central=0):
        self.linear = {m: c for m, c in (linear or {}).items() if c}
        self.jj = {l: c for l, c in (jj or {}).items() if c}
        self.central = central if central else 0

    @classmethod
    def mode(cls, family: str, index: int, coeff=1) -> ModeExpression:
        return cls({Mode(family, index): coeff})

    @classmethod
    def constant(cls, c) -> ModeExpression:
        return cls(central=c)

    def __bool__(self) -> bool:
        return bool(self.linear or self.jj or self.central)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModeExpression):
            return NotImplemented
        return (
            self.linear == other.linear
            and self.jj == other.jj
            and self.central == other.central
        )

    def __add__(self, other: ModeExpression) -> ModeExpression:
        lin = dict(self.linear)
        for m, c in other.linear.items():
            lin[m] = lin.get(m, 0) + c
        jj = dict(self.jj)
        for l, c in other.jj.items():
            jj[l] = jj.get(l, 0) + c
        return ModeExpression(lin, jj, self.central + other.central)

    def __neg__(self) -> ModeExpression:
        return self * -1

    def __sub__(self, other: ModeExpression) -> ModeExpression:
        return self + (-other)

    def __mul__(self, c) -> ModeExpression:
        return ModeExpression(
            {m: c * v for m, v in self.linear.items()},
            {l: c * v for l, v in self.jj.items()},
            c * self.central,
        )

    __rmul__ = __mul__

    def map(self, f) -> ModeExpression:
        """Apply ``f`` to every coefficient (used to specialize k)."""
        return ModeExpression(
            {m: f(c) for m, c in self.linear.items()},
            {l: f(c) for l, c in self.jj.items()},
            f(self.central),
        )

    def families(self) -> set:
        fams = {m.family for m in self.linear}
        if self.jj:
            fams.add("JJ")
        return fams

    def to_json(self) -> dict:
        terms = [
            {"family": m.family, "index": m.index, "coeff": format_scalar(c)}
            for m, c in sorted(self.linear.items())
        ]
        terms += [
            {"family": "JJ", "index": l, "coeff": format_scalar(c)}
            for l, c in sorted(self.jj.items())
        ]
        return {"rhs_terms": terms, "central": format_scalar(self.central)}

    def __repr__(self) -> str:
        parts = [f"({format_scalar(c)})*{m}" for m, c in sorted(self.linear.items())]
        parts += [f"({format_scalar(c)})*(J^2)_{{{l}}}" for l, c in sorted(self.jj.items())]
        if self.central:
            parts.append(f"({format_scalar(self.central)})")
        return " + ".join(parts) if parts else "0"


def _falling(n: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= n - i
    return out


def _binom(n: int, j: int) -> Fraction:
    return Fraction(_falling(n, j), factorial(j))


def _modes_of(expr: dict, idx: int) -> ModeExpression:
    """Internal-index mode ``(expr)_(idx)`` as a ModeExpression in display convention."""
    lin, jj, central = {}, {}, 0
    for (f, r), c in expr.items():
        # (d^r X)_(n) = (-1)^r n(n-1)...(n-r+1) X_(n-r)
        c = c * ((-1) ** r * _falling(idx, r))
        if not c:
            continue
        base = idx - r
        if f is FieldId.IDENTITY:
            if base == -1:
                central = central + c
        elif f is FieldId.JJ:
            jj[base - 1] = jj.get(base - 1, 0) + c
        else:
            m = Mode(f.value, base - shift(f.value))
            lin[m] = lin.get(m, 0) + c
    return ModeExpression(lin, jj, central)


def to_L_basis(expr: ModeExpression) -> ModeExpression:
    """Replace every T_n by L_n + (n+1)/2 J_n, from L = T + dJ/2."""
    lin = {}
    for m, c in expr.linear.items():
        if m.family == "T":
            lm, jm = Mode("L", m.index), Mode("J", m.index)
            lin[lm] = lin.get(lm, 0) + c
            lin[jm] = lin.get(jm, 0) + c * Fraction(m.index + 1, 2)
        else:
            lin[m] = lin.get(m, 0) + c
    return ModeExpression(lin, expr.jj, expr.central)


def _T_basis(family: str, index: int) -> dict:
    """A generator mode as a combination of modes of J, G+, G-, T."""
    if family == "L":
        return {Mode("T", index): 1, Mode("J", index): Fraction(-(index + 1), 2)}
    return {Mode(family, index): 1}


def central_charge_expr(k=K):
    return -4 * (k + 1) * (2 * k + 3) / (k + 3)


@dataclass
class BracketReport:
    grid: tuple
    checked: int = 0
    mismatches: list = field(default_factory=list)
    conventions: list = field(default_factory=list)
    corrections: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "grid": list(self.grid),
            "checked": self.checked,
            "mismatches": self.mismatches,
            "conventions": self.conventions,
            "corrections": self.corrections,
        }


class BracketEngine:
    """Derives mode brackets from an OPE table; results are cached per engine."""

    def __init__(self, opes: list[OpeEntry] | None = None):
        self.table = OpeTable(load_paper_opes() if opes is None else opes)
        self.commutator = lru_cache(maxsize=None)(self._commutator)
        self.bracket = lru_cache(maxsize=None)(self._bracket)
        self.flow_constant = lru_cache(maxsize=None)(self._flow_constant)

    def _commutator(self, a: str, m: int, b: str, n: int) -> ModeExpression:
        """``[A_m, B_n]`` for A, B in {J, G+, G-, T} via the Borcherds formula; may contain T."""
        prods = self.table.products(a, b)
        mm, nn = m + shift(a), n + shift(b)
        out = ModeExpression()
        for j, expr in prods.items():
            c = _binom(mm, j)
            if c:
                out = out + _modes_of(expr, mm + nn - j) * c
        return out

    def _bracket(self, a: str, m: int, b: str, n: int) -> ModeExpression:
        """``[A_m, B_n]`` for A, B in {J, G+, G-, T, L}, written in the L basis."""
        out = ModeExpression()
        for x, cx in _T_basis(a, m).items():
            for y, cy in _T_basis(b, n).items():
                out = out + self.commutator(x.family, x.index, y.family, y.index) * (cx * cy)
        return to_L_basis(out)

    def bracket_modes(self, x: Mode, y: Mode) -> ModeExpression:
        return self.bracket(x.family, x.index, y.family, y.index)

    def bracket_expr(self, e1: ModeExpression, e2: ModeExpression) -> ModeExpression:
        """Bilinear bracket of two expressions without (J^2) terms."""
        if e1.jj or e2.jj:
            raise ValueError("bracket_expr needs expressions free of (J^2) terms")
        out = ModeExpression()
        for x, cx in e1.linear.items():
            for y, cy in e2.linear.items():
                out = out + self.bracket_modes(x, y) * (cx * cy)
        return out

    # -- spectral flow --------------------------------------------------------

    def _psi(self, expr: ModeExpression, t_of) -> ModeExpression:
        kappa = (2 * K + 3) / 3
        out = ModeExpression(central=expr.central)
        for m, c in expr.linear.items():
            f, n = m
            if f == "J":
                piece = ModeExpression({m: 1}, central=-kappa if n == 0 else 0)
            elif f == "G+":
                piece = ModeExpression.mode("G+", n - 1)
            elif f == "G-":
                piece = ModeExpression.mode("G-", n + 1)
            elif f == "L":
                piece = ModeExpression({m: 1, Mode("J", n): -1}, central=t_of(n))
            else:
                raise ValueError(f"spectral flow is defined on the L basis, got {m}")
            out = out + piece * c
        for l, c in expr.jj.items():
            # :(J - kappa/z)^2: = :J^2: - 2 kappa J(z)/z + kappa^2/z^2
            piece = ModeExpression(
                {Mode("J", l): -2 * kappa}, {l: 1}, kappa * kappa if l == 0 else 0
            )
            out = out + piece * c
        return out

    def _flow_constant(self, n: int):
        """Constant t_n in psi(L_n) = L_n - J_n + t_n, fixed by psi preserving [L, L]."""
        m, m2 = (0, -2) if n == -2 else (n + 1, -1)
        zero = lambda _n: 0  # noqa: E731
        lhs = self.bracket_expr(
            self._psi(ModeExpression.mode("L", m), zero),
            self._psi(ModeExpression.mode("L", m2), zero),
        )
        rhs = self._psi(self.bracket("L", m, "L", m2), zero)
        return (lhs.central - rhs.central) * Fraction(1, m - m2)

    def spectral_flow(self, expr: ModeExpression, times: int = 1) -> ModeExpression:
        """Apply psi ``times`` times (times >= 0) to an L-basis expression."""
        for _ in range(times):
            expr = self._psi(expr, self.flow_constant)
        return expr

    def spectral_flow_mode(self, s: Mode, times: int = 1) -> ModeExpression:
        return self.spectral_flow(ModeExpression.mode(*s), times)


ENGINE = BracketEngine()


def commutator(a: str, m: int, b: str, n: int) -> ModeExpression:
    return ENGINE.commutator(a, m, b, n)


def bracket(a: str, m: int, b: str, n: int) -> ModeExpression:
    return ENGINE.bracket(a, m, b, n)


def spectral_flow_mode(s: Mode, times: int = 1) -> ModeExpression:
    return ENGINE.spectral_flow_mode(s, times)


# -- closed-form bracket list ----------------------------------------------------


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def closed_form_bracket(a: str, m: int, b: str, n: int, *, literal: bool = False) -> ModeExpression | None:
    """Bracket ``[A_m, B_n]`` as listed in closed form, or None if not listed.

    With ``literal=True`` the central term of [G+_m, G-_n] uses the variant
    ``m(m+1)/2``; by default it is ``m(m-1)/2``, the value the OPE implies.
    """
    k = K
    E = ModeExpression
    d = _delta(m + n, 0)
    if (a, b) == ("J", "J"):
        return E(central=(2 * k + 3) / 3 * m * d)
    if (a, b) == ("J", "G+"):
        return E.mode("G+", m + n)
    if (a, b) == ("J", "G-"):
        return E.mode("G-", m + n, -1)
    if (a, b) == ("L", "J"):
        return E({Mode("J", m + n): -n}, central=-(2 * k + 3) * (m + 1) * m / 6 * d)
    if (a, b) == ("L", "G+"):
        return E.mode("G+", m + n, -n)
    if (a, b) == ("L", "G-"):
        return E.mode("G-", m + n, m - n)
    if (a, b) == ("L", "L"):
        c = central_charge_expr(k)
        return E({Mode("L", m + n): m - n}, central=c / 12 * (m**3 - m) * d)
    if (a, b) in (("G+", "G+"), ("G-", "G-")):
        return E()
    if (a, b) == ("G+", "G-"):
        quad = m * (m + 1) if literal else m * (m - 1)
        return E(
            {
                Mode("J", m + n): 3 * (k + 1) * m - (2 * k + 3) * (m + n + 1),
                Mode("L", m + n): -(k + 3),
            },
            {m + n: 3},
            (k + 1) * (2 * k + 3) * quad / 2 * d,
        )
    return None


CLOSED_FORM_PAIRS = (
    ("J", "J"),
    ("J", "G+"),
    ("J", "G-"),
    ("L", "J"),
    ("L", "G+"),
    ("L", "G-"),
    ("G+", "G-"),
    ("G+", "G+"),
    ("G-", "G-"),
)

BRACKET_CONVENTIONS = [
    "(J^2)_l is the coefficient of z^(-l-2) in :J(z)^2:, "
    "(J^2)_l = sum_{a<=-1} J_a J_(l-a) + sum_{a>=0} J_(l-a) J_a; "
    "it matches the derived composite with no index shift and no extra zero-mode term",
    "[J_m, G+_n] = G+_(m+n) and [J_m, G-_n] = -G-_(m+n)",
    "L = T + dJ/2, so T_n = L_n + (n+1)/2 J_n (in particular T_0 = L_0 + J_0/2)",
]

BRACKET_CORRECTIONS = [
    "[G+_m, G-_n] central term is (k+1)(2k+3)m(m-1)/2; the variant "
    "(k+1)(2k+3)m(m+1)/2 contradicts both the OPE and the Jacobi identity",
]


def verify_bracket_table(
    grid=range(-3, 4), engine: BracketEngine | None = None, *, literal: bool = False
) -> BracketReport:
    """Compare OPE-derived brackets with the closed-form list on ``grid x grid``."""
    engine = engine or ENGINE
    grid = tuple(grid)
    report = BracketReport(grid=(grid[0], grid[-1]))
    report.conventions = list(BRACKET_CONVENTIONS)
    if not literal:
        report.corrections = list(BRACKET_CORRECTIONS)
    for a, b in CLOSED_FORM_PAIRS:
        for m in grid:
            for n in grid:
                expected = closed_form_bracket(a, m, b, n, literal=literal)
                got = engine.bracket(a, m, b, n)
                report.checked += 1
                if got != expected:
                    report.mismatches.append(
                        {"bracket": f"[{a}_{m}, {b}_{n}]", "derived": repr(got), "expected": repr(expected)}
                    )
    return report


def check_virasoro(grid=range(-3, 4), engine: BracketEngine | None = None) -> list:
    engine = engine or ENGINE
    bad = []
    for m in grid:
        for n in grid:
            if engine.bracket("L", m, "L", n) != closed_form_bracket("L", m, "L", n):
                bad.append((m, n))
    return bad


def check_antisymmetry(grid=range(-3, 4), engine: BracketEngine | None = None) -> list:
    """Pairs where [A_m, B_n] + [B_n, A_m] != 0, each side derived from its own OPE."""
    engine = engine or ENGINE
    fams = ("J", "G+", "G-", "T")
    bad = []
    for a in fams:
        for b in fams:
            for m in grid:
                for n in grid:
                    if engine.commutator(a, m, b, n) + engine.commutator(b, n, a, m):
                        bad.append((a, m, b, n))
    return bad


def check_grading(grid=range(-3, 4), engine: BracketEngine | None = None) -> list:
    """Generator modes where [J_0, A_n] != charge * A_n or [L_0, A_n] != -n A_n."""
    engine = engine or ENGINE
    bad = []
    for f in GENERATORS:
        for n in grid:
            a = ModeExpression.mode(f, n)
            if engine.bracket("J", 0, f, n) != a * CHARGE[FieldId(f)]:
                bad.append(("J0", f, n))
            if engine.bracket("L", 0, f, n) != a * (-n):
                bad.append(("L0", f, n))
    return bad


def check_flow_automorphism(grid=range(-3, 4), engine: BracketEngine | None = None, times: int = 1) -> list:
    """Pairs where psi([A_m, B_n]) != [psi A_m, psi B_n]."""
    engine = engine or ENGINE
    bad = []
    for a in GENERATORS:
        for b in GENERATORS:
            for m in grid:
                for n in grid:
                    lhs = engine.spectral_flow(engine.bracket(a, m, b, n), times)
                    rhs = engine.bracket_expr(
                        engine.spectral_flow_mode(Mode(a, m), times),
                        engine.spectral_flow_mode(Mode(b, n), times),
                    )
                    if lhs != rhs:
                        bad.append((a, m, b, n))
    return bad


def export_brackets(grid=range(-3, 4), engine: BracketEngine | None = None) -> list[dict]:
    """Bracket table as JSON-ready records, sorted by (A, m, B, n)."""
    engine = engine or ENGINE
    out = []
    for a in GENERATORS:
        for b in GENERATORS:
            for m in grid:
                for n in grid:
                    rec = {"lhs": [[a, m], [b, n]]}
                    rec.update(engine.bracket(a, m, b, n).to_json())
                    out.append(rec)
    return out


def bracket_from_json(rec: dict) -> ModeExpression:
    from .scalars import parse_scalar

    lin, jj = {}, {}
    for t in rec["rhs_terms"]:
        c = parse_scalar(t["coeff"])
        if t["family"] == "JJ":
            jj[t["index"]] = c
        else:
            lin[Mode(t["family"], t["index"])] = c
    return ModeExpression(lin, jj, parse_scalar(rec["central"]))
