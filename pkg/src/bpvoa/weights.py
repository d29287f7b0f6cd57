"""Closed-form weight arithmetic for highest-weight modules L(xi, chi).

Every function takes the level as an argument ``k`` which may be the
symbolic generator :data:`~bpvoa.scalars.K` or a rational number, so the
same code serves identities in Q(k) and evaluations at exceptional levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from .scalars import K, Scalar, format_rational, format_scalar

__all__ = [
    "HighestWeight",
    "Level",
    "SimpleModuleRecord",
    "Sl3Weight",
    "admissible_weight",
    "central_charge",
    "enumerate_simples",
    "flow_weight",
    "g_fun",
    "gram_matrix",
    "h_fun",
    "h_fun_averaged",
    "h_fun_expanded",
    "xi_chi",
]


@dataclass(frozen=True)
class Level:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 3 or self.p % 2 == 0:
            raise ValueError(f"p must be an odd integer >= 3, got {self.p!r}")

    @property
    def k(self) -> Fraction:
        return Fraction(self.p, 2) - 3


@dataclass(frozen=True)
class HighestWeight:
    xi: object
    chi: object

    def to_json(self) -> dict:
        return {"xi": _fmt(self.xi), "chi": _fmt(self.chi)}


def _fmt(x) -> str:
    return format_scalar(x) if isinstance(x, Scalar) else format_rational(x)


def _lvl(k):
    return k if isinstance(k, Scalar) else Fraction(k)


def kappa(k=K):
    """Level of the Heisenberg field J: [J_m, J_n] = kappa m delta."""
    return (2 * _lvl(k) + 3) * Fraction(1, 3)


def g_fun(xi, chi, k=K):
    return -(3 * xi * xi - (2 * k + 3) * xi - (k + 3) * chi)


def h_fun_averaged(i: int, xi, chi, k=K):
    if i <= 0:
        raise ValueError("h_i is defined for i >= 1")
    total = 0
    for r in range(i):
        total = total + g_fun(xi + r, chi, k)
    return total * Fraction(1, i)


def h_fun_expanded(i: int, xi, chi, k=K):
    if i <= 0:
        raise ValueError("h_i is defined for i >= 1")
    return (
        -(i * i) + k * i - 3 * xi * i + 3 * i - 3 * xi * xi
        - k + 2 * k * xi + 6 * xi + k * chi + 3 * chi - 2
    )


def h_fun(i: int, xi, chi, k=K):
    """G-_0 (G+_0)^i v = i h_i (G+_0)^(i-1) v; both forms are computed and compared."""
    avg = h_fun_averaged(i, xi, chi, k)
    exp = h_fun_expanded(i, xi, chi, k)
    if avg != exp:
        raise ArithmeticError(f"h_{i} forms disagree: {avg} != {exp}")
    return avg


def xi_chi(i: int, j: int, k=K) -> HighestWeight:
    """Weight whose top space has dimension i and whose spectral flow has top dimension j."""
    if i < 1 or j < 1:
        raise ValueError("i, j must be positive")
    k = _lvl(k)
    xi = (-2 * i - j + 2 * k + 6) * Fraction(1, 3)
    chi = (i * i + j * i - k * i - 3 * i + j * j - 6 * j - 2 * j * k + 3 * k + 6) / (3 * (k + 3))
    return HighestWeight(xi, chi)


def flow_weight(hw: HighestWeight, top_dim: int, k=K) -> HighestWeight:
    """Highest weight of psi(L(xi, chi)) when L(xi, chi) has top dimension ``top_dim``.

    The new highest-weight vector is (G+_0)^(top_dim-1) v, of J_0-weight
    xi + top_dim - 1, so L_0 - J_0 + kappa gives chi - (xi + top_dim - 1) + kappa.
    """
    if top_dim < 1:
        raise ValueError("top_dim must be >= 1")
    kap = kappa(k)
    shifted = hw.xi + top_dim - 1
    return HighestWeight(shifted - kap, hw.chi - shifted + kap)


def central_charge(k=K, p: int | None = None):
    """c(k) = -4(k+1)(2k+3)/(k+3); when p is given also checks -4(p-4)(p-3)/p."""
    k = _lvl(k)
    if k == -3:
        raise ZeroDivisionError("critical level k = -3")
    c = -4 * (k + 1) * (2 * k + 3) / (k + 3)
    if p is not None:
        alt = Fraction(-4 * (p - 4) * (p - 3), p)
        if c != alt:
            raise ArithmeticError(f"central charge forms disagree at p={p}: {c} != {alt}")
    return c


# -- sl3 weights -------------------------------------------------------------------


def _mat_mul(a, b):
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)] for i in range(n)]


def _trace_form(x, y) -> Fraction:
    p = _mat_mul(x, y)
    return sum(p[i][i] for i in range(len(p)))


def _elementary(i: int, j: int):
    m = [[Fraction(0)] * 3 for _ in range(3)]
    m[i][j] = Fraction(1)
    return m


def _lin(*terms):
    out = [[Fraction(0)] * 3 for _ in range(3)]
    for c, m in terms:
        for r in range(3):
            for s in range(3):
                out[r][s] += c * m[r][s]
    return out


@cache
def gram_matrix() -> tuple:
    """Trace-form Gram matrix of the fundamental weights (identified with h via tr)."""
    h1 = _lin((1, _elementary(0, 0)), (-1, _elementary(1, 1)))
    h2 = _lin((1, _elementary(1, 1)), (-1, _elementary(2, 2)))
    lam1 = _lin((Fraction(2, 3), h1), (Fraction(1, 3), h2))
    lam2 = _lin((Fraction(1, 3), h1), (Fraction(2, 3), h2))
    for lam, h, expect in ((lam1, h1, 1), (lam1, h2, 0), (lam2, h1, 0), (lam2, h2, 1)):
        assert _trace_form(lam, h) == expect
    basis = (lam1, lam2)
    return tuple(tuple(_trace_form(a, b) for b in basis) for a in basis)


@dataclass(frozen=True)
class Sl3Weight:
    a1: Fraction
    a2: Fraction
    level_coeff: Fraction = Fraction(0)

    def inner(self, other: Sl3Weight) -> Fraction:
        g = gram_matrix()
        u, v = (self.a1, self.a2), (other.a1, other.a2)
        return sum(u[r] * g[r][s] * v[s] for r in range(2) for s in range(2))

    def __add__(self, other: Sl3Weight) -> Sl3Weight:
        return Sl3Weight(self.a1 + other.a1, self.a2 + other.a2, self.level_coeff + other.level_coeff)

    def __mul__(self, c) -> Sl3Weight:
        return Sl3Weight(self.a1 * c, self.a2 * c, self.level_coeff * c)

    __rmul__ = __mul__

    def to_json(self) -> list[str]:
        return [format_rational(self.a1), format_rational(self.a2), format_rational(self.level_coeff)]


LAMBDA1 = Sl3Weight(Fraction(1), Fraction(0))
LAMBDA2 = Sl3Weight(Fraction(0), Fraction(1))
RHO = LAMBDA1 + LAMBDA2


def admissible_weight(i: int, j: int, p: int) -> Sl3Weight:
    _check_label(i, j, p)
    k = Level(p).k
    return Sl3Weight(Fraction(i - 1), Fraction(p - i - j - 1), k)


def weight_from_sl3(lam: Sl3Weight, k) -> HighestWeight:
    """(xi, chi) = ((lam|-L1+L2), (lam|lam+2rho)/(2(k+3)) - (lam|L2))."""
    xi = lam.inner(LAMBDA2 + LAMBDA1 * -1)
    chi = lam.inner(lam + 2 * RHO) / (2 * (k + 3)) - lam.inner(LAMBDA2)
    return HighestWeight(xi, chi)


def _check_label(i: int, j: int, p: int) -> None:
    Level(p)
    if not (1 <= i <= p - 2 and 1 <= j <= p - i - 1):
        raise ValueError(f"(i, j) = ({i}, {j}) outside 1 <= i <= p-2, 1 <= j <= p-i-1 for p = {p}")


@dataclass(frozen=True)
class SimpleModuleRecord:
    p: int
    i: int
    j: int
    hw: HighestWeight
    lam: Sl3Weight

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "i": self.i,
            "j": self.j,
            "xi": format_rational(self.hw.xi),
            "chi": format_rational(self.hw.chi),
            "lambda": self.lam.to_json(),
        }


def labels(p: int) -> list[tuple[int, int]]:
    Level(p)
    return [(i, j) for i in range(1, p - 1) for j in range(1, p - i)]


def enumerate_simples(p: int) -> list[SimpleModuleRecord]:
    """All labels (i, j) of simple modules at k = p/2 - 3, sorted by (i, j)."""
    k = Level(p).k
    return [
        SimpleModuleRecord(p, i, j, xi_chi(i, j, k), admissible_weight(i, j, p))
        for i, j in labels(p)
    ]
