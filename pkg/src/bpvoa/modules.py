"""Graded highest-weight modules, singular vectors and simple quotients.

A module vector is a dict mapping PBW monomials to coefficients.  A monomial
is a tuple of :class:`~bpvoa.ope.Mode` written left to right as they act,
so ``(Mode("G-", -1), Mode("G+", 0))`` stands for ``G-_{-1} G+_0 |v>``.
Factors are sorted so that the key ``(family rank, -index)`` is
non-increasing from left to right, with family rank J < L < G+ < G-.

Two kinds of cyclic module are supported:

* ``verma``: generated by |xi, chi> with J_n, L_n (n > 0), G+_n (n >= 1) and
  G-_n (n >= 0) acting by zero; G+_0 is a free lowering operator.
* ``vacuum``: the universal vertex algebra itself, where in addition
  G+_0, L_{-1} and G-_{-1} kill the vacuum.

Simple quotients are reached by repeatedly quotienting by submodules
generated by singular vectors (see :class:`QuotientState`).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cache

from .linalg import RowSpace, axpy, nullspace
from .ope import ENGINE, BracketEngine, Mode, ModeExpression
from .scalars import Scalar, format_rational, format_scalar, specialize
from .weights import HighestWeight

__all__ = [
    "HighestWeightModule",
    "InconclusiveError",
    "Kind",
    "QuotientState",
    "Truncation",
    "TruncationError",
    "enumerate_block",
    "iterate_quotient",
    "monomial_str",
    "null_vector_check",
    "singular_vectors",
    "top_dimension",
    "twist_module",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class Kind(str, Enum):
    VERMA = "verma"
    VACUUM = "vacuum"


class TruncationError(ValueError):
    """A result falls outside the requested truncation window."""


class InconclusiveError(RuntimeError):
    """The truncation window is too small to certify an answer."""


_RANK = {"J": 0, "L": 1, "G+": 2, "G-": 3}
_CHARGE = {"J": 0, "L": 0, "G+": 1, "G-": -1}
# lowest depth of a creation mode in the vacuum module
_VACUUM_MIN_DEPTH = {"J": 1, "L": 2, "G+": 1, "G-": 2}


def mode_key(m: Mode) -> tuple[int, int]:
    return (_RANK[m.family], -m.index)


def is_creation(kind: Kind, m: Mode) -> bool:
    if kind is Kind.VERMA:
        return m.index < 0 or (m.family == "G+" and m.index == 0)
    return -m.index >= _VACUUM_MIN_DEPTH[m.family]


def weight_of(mono) -> tuple[int, int]:
    """(charge, depth) of a monomial relative to the cyclic vector."""
    a = d = 0
    for f, n in mono:
        a += _CHARGE[f]
        d -= n
    return a, d


def monomial_str(mono) -> str:
    if not mono:
        return "|v>"
    out = []
    i = 0
    while i < len(mono):
        j = i
        while j < len(mono) and mono[j] == mono[i]:
            j += 1
        s = f"{mono[i].family}_{{{mono[i].index}}}"
        out.append(s if j - i == 1 else f"({s})^{j - i}")
        i = j
    return "".join(out)


@cache
def enumerate_block(kind: Kind, charge: int, depth: int) -> tuple:
    """All PBW monomials of the given (charge, depth) block, in a fixed order."""
    kind = Kind(kind)
    if depth < 0:
        return ()
    modes = [
        Mode(f, -n)
        for f in ("G-", "G+", "L", "J")
        for n in range(depth, 0, -1)
        if is_creation(kind, Mode(f, -n))
    ]
    modes.sort(key=mode_key, reverse=True)
    free_zero = kind is Kind.VERMA
    out = []

    def rec(start: int, left: int, acc: list, ch: int):
        if left == 0:
            if free_zero and ch <= charge:
                mono = acc + [Mode("G+", 0)] * (charge - ch)
                out.append(tuple(sorted(mono, key=mode_key, reverse=True)))
            elif ch == charge:
                out.append(tuple(acc))
            return
        for t in range(start, len(modes)):
            m = modes[t]
            if -m.index <= left:
                acc.append(m)
                rec(t, left + m.index, acc, ch + _CHARGE[m.family])
                acc.pop()

    rec(0, depth, [], 0)
    out.sort(key=lambda mono: [mode_key(m) for m in mono])
    return tuple(out)


class HighestWeightModule:
    """Verma-type or vacuum module over W^k with exact PBW-normal-form actions.

    ``k`` is either a rational level or the symbolic :data:`~bpvoa.scalars.K`;
    in the symbolic case coefficients are elements of Q(k).
    """

    def __init__(self, kind, k, xi=0, chi=0, engine: BracketEngine | None = None):
        self.kind = Kind(kind)
        self.symbolic = isinstance(k, Scalar)
        self.k = k if self.symbolic else Fraction(k)
        if self.kind is Kind.VACUUM and (xi or chi):
            raise ValueError("the vacuum module has highest weight (0, 0)")
        self.xi = xi
        self.chi = chi
        self.engine = engine or ENGINE
        self._act: dict = {}
        self._jj: dict = {}
        self._br: dict = {}
        if self.symbolic:
            self._spec = lambda c: c
        else:
            self._spec = lambda c: specialize(c, self.k)

    @property
    def hw(self) -> HighestWeight:
        return HighestWeight(self.xi, self.chi)

    def cyclic(self) -> dict:
        return {(): 1}

    def block(self, charge: int, depth: int) -> tuple:
        return enumerate_block(self.kind, charge, depth)

    def is_creation(self, m: Mode) -> bool:
        return is_creation(self.kind, m)

    def bracket(self, x: Mode, y: Mode) -> ModeExpression:
        key = (x, y)
        r = self._br.get(key)
        if r is None:
            r = self.engine.bracket_modes(x, y).map(self._spec)
            self._br[key] = r
        return r

    def specialize(self, c):
        return self._spec(c)

    # -- actions --------------------------------------------------------------

    def act_mono(self, x: Mode, mono: tuple) -> dict:
        """``x`` applied to a monomial, in PBW normal form (cached; do not mutate)."""
        key = (x, mono)
        r = self._act.get(key)
        if r is not None:
            return r
        a, d = weight_of(mono)
        ta, td = a + _CHARGE[x.family], d - x.index
        if td < 0 or not self.block(ta, td):
            r = {}
        elif not mono:
            r = self._on_cyclic(x)
        else:
            f = mono[0]
            if self.is_creation(x) and mode_key(x) >= mode_key(f):
                r = {(x,) + mono: 1}
            else:
                # x f rest = f (x rest) + [x, f] rest
                rest = mono[1:]
                r = {}
                for m2, c in self.act_mono(x, rest).items():
                    axpy(r, c, self.act_mono(f, m2))
                br = self.bracket(x, f)
                if br:
                    axpy(r, 1, self.act_expr(br, {rest: 1}))
        self._act[key] = r
        return r

    def _on_cyclic(self, x: Mode) -> dict:
        if self.is_creation(x):
            return {(x,): 1}
        if x == ("J", 0):
            return {(): self.xi} if self.xi else {}
        if x == ("L", 0):
            return {(): self.chi} if self.chi else {}
        return {}

    def act(self, x: Mode, vec: dict, trunc: Truncation | None = None) -> dict:
        out: dict = {}
        for mono, c in vec.items():
            axpy(out, c, self.act_mono(x, mono))
        if trunc is not None:
            for mono in out:
                if not trunc.contains(weight_of(mono)):
                    raise TruncationError(f"{x} leaves the window {trunc}")
        return out

    def act_jj(self, l: int, vec: dict) -> dict:
        """(J^2)_l = sum_{a<=-1} J_a J_(l-a) + sum_{a>=0} J_(l-a) J_a, finitely many terms."""
        out: dict = {}
        for mono, c in vec.items():
            key = (l, mono)
            r = self._jj.get(key)
            if r is None:
                r = {}
                d = weight_of(mono)[1]
                single = {mono: 1}
                for a in range(l - d, 0):
                    axpy(r, 1, self.act(Mode("J", a), self.act(Mode("J", l - a), single)))
                for a in range(0, d + 1):
                    axpy(r, 1, self.act(Mode("J", l - a), self.act(Mode("J", a), single)))
                self._jj[key] = r
            axpy(out, c, r)
        return out

    def act_expr(self, expr: ModeExpression, vec: dict) -> dict:
        out: dict = {}
        for m, c in expr.linear.items():
            for mono, v in vec.items():
                axpy(out, c * v, self.act_mono(m, mono))
        for l, c in expr.jj.items():
            axpy(out, c, self.act_jj(l, vec))
        if expr.central:
            axpy(out, expr.central, vec)
        return out

    def apply_word(self, word, vec: dict) -> dict:
        """Apply the modes of ``word`` right to left."""
        for m in reversed(word):
            vec = self.act(m, vec)
        return vec


# -- quotients -------------------------------------------------------------------


@dataclass(frozen=True)
class Truncation:
    """Blocks with depth <= max_depth and |charge| <= charge_window."""

    max_depth: int
    charge_window: int

    def contains(self, block) -> bool:
        a, d = block
        return 0 <= d <= self.max_depth and abs(a) <= self.charge_window

    def __str__(self) -> str:
        return f"(D={self.max_depth}, C={self.charge_window})"


def raising_modes(depth: int) -> list[Mode]:
    out = [Mode("G-", 0)]
    for n in range(1, depth + 1):
        out += [Mode("J", n), Mode("L", n), Mode("G+", n), Mode("G-", n)]
    return out


def _expr_weight(expr: ModeExpression) -> tuple[int, int]:
    for m in expr.linear:
        return _CHARGE[m.family], -m.index
    for l in expr.jj:
        return 0, -l
    return 0, 0


class QuotientState:
    """The current quotient M/N of a cyclic module M within a truncation.

    N is stored implicitly as the span of U(-) u over the accumulated
    generators u (each singular modulo the N at the time it was added);
    its intersection with a block is computed on demand and cached.

    Singular vectors are searched in all blocks of depth <= D and charge
    <= C + D + 1, which is enough for the quotient to agree with the simple
    quotient on every block of the window and on every block reached from it
    by one raising mode.
    """

    def __init__(self, module: HighestWeightModule, trunc: Truncation):
        self.module = module
        self.trunc = trunc
        self.generators: list[tuple[tuple, dict]] = []
        self._words: list[dict] = []
        self._sub: dict = {}
        self.iterations = 0

    # blocks

    def search_blocks(self) -> list[tuple[int, int]]:
        D, C = self.trunc.max_depth, self.trunc.charge_window
        return [
            (a, d)
            for d in range(D + 1)
            for a in range(-d, C + D + 2)
            if self.module.block(a, d)
        ]

    def window_blocks(self) -> list[tuple[int, int]]:
        return [b for b in self.search_blocks() if self.trunc.contains(b)]

    # the submodule N

    def _word_image(self, g: int, word: tuple) -> dict:
        cache = self._words[g]
        r = cache.get(word)
        if r is None:
            if not word:
                r = self.generators[g][1]
            else:
                r = self.module.act(word[0], self._word_image(g, word[1:]))
            cache[word] = r
        return r

    def _contribution(self, g: int, block) -> list[dict]:
        (a0, d0), _ = self.generators[g]
        da, dd = block[0] - a0, block[1] - d0
        if dd < 0:
            return []
        out = []
        for word in enumerate_block(Kind.VERMA, da, dd):
            v = self._word_image(g, word)
            if v:
                out.append(v)
        return out

    def submodule(self, block) -> RowSpace:
        space = self._sub.get(block)
        if space is None:
            space = RowSpace()
            for g in range(len(self.generators)):
                for v in self._contribution(g, block):
                    space.add(v)
            self._sub[block] = space
        return space

    def add_generator(self, block, vec: dict) -> bool:
        """Add the submodule generated by ``vec``; False if already contained."""
        if not self.submodule(block).reduce(vec):
            return False
        self.generators.append((block, dict(vec)))
        self._words.append({})
        g = len(self.generators) - 1
        for b, space in self._sub.items():
            for v in self._contribution(g, b):
                space.add(v)
        return True

    def reduce(self, block, vec: dict) -> dict:
        return self.submodule(block).reduce(vec)

    def dim(self, block) -> int:
        return len(self.module.block(*block)) - len(self.submodule(block))

    def quotient_basis(self, block) -> list:
        piv = self.submodule(block).pivots
        return [m for m in self.module.block(*block) if m not in piv]

    # singular vectors

    def kernel(self, block, operators: list[ModeExpression]) -> list[dict]:
        """Vectors of the quotient block killed (mod N) by every operator."""
        comp = self.quotient_basis(block)
        if not comp:
            return []
        a, d = block
        ops = []
        for op in operators:
            da, dd = _expr_weight(op)
            tgt = (a + da, d + dd)
            if tgt[1] >= 0 and self.module.block(*tgt):
                ops.append((op, tgt))
        images = []
        for e in comp:
            img = {}
            for t, (op, tgt) in enumerate(ops):
                v = self.module.act_expr(op, {e: 1})
                if v:
                    for mono, c in self.reduce(tgt, v).items():
                        img[(t, mono)] = c
            images.append(img)
        return [{comp[s]: c for s, c in sorted(combo.items())} for combo in nullspace(images)]

    def singular_vectors(self, block) -> list[dict]:
        ops = [ModeExpression({m: 1}) for m in raising_modes(block[1])]
        return self.kernel(block, ops)

    def run(self, reverse: bool = False) -> QuotientState:
        """Quotient by singular-vector submodules until none remain."""
        blocks = [b for b in self.search_blocks() if b != (0, 0)]
        if reverse:
            blocks.reverse()
        while True:
            self.iterations += 1
            found = False
            for b in blocks:
                for v in self.singular_vectors(b):
                    if self.add_generator(b, v):
                        found = True
            if not found:
                return self

    def dimensions(self) -> dict:
        return {b: self.dim(b) for b in self.window_blocks()}

    def contains(self, vec: dict) -> bool:
        """Whether a homogeneous vector lies in the accumulated submodule."""
        if not vec:
            return True
        block = weight_of(next(iter(vec)))
        return not self.reduce(block, vec)


def iterate_quotient(kind, hw: HighestWeight | None, trunc: Truncation, k, *, reverse: bool = False,
                     engine: BracketEngine | None = None) -> QuotientState:
    hw = hw or HighestWeight(0, 0)
    module = HighestWeightModule(kind, k, hw.xi, hw.chi, engine=engine)
    return QuotientState(module, trunc).run(reverse=reverse)


def singular_vectors(state: QuotientState, block) -> list[dict]:
    return state.singular_vectors(block)


def top_dimension(hw: HighestWeight, k, trunc: Truncation | None = None, *,
                  engine: BracketEngine | None = None) -> int:
    """Dimension of the depth-0 space of L(xi, chi), certified inside the window."""
    if trunc is None:
        p = int(2 * (Fraction(k) + 3))
        trunc = Truncation(max_depth=1, charge_window=max(p, 1))
    state = iterate_quotient(Kind.VERMA, hw, trunc, k, engine=engine)
    dims = [state.dim((a, 0)) for a in range(trunc.charge_window + 1)]
    if dims[-1]:
        raise InconclusiveError(f"top space reaches the charge window edge {trunc}")
    top = dims.index(0)
    if any(dims[top:]) or any(x != 1 for x in dims[:top]):
        raise InconclusiveError(f"unexpected top-space profile {dims}")
    return top


def _flow_raising(engine: BracketEngine, depth: int, times: int) -> list[ModeExpression]:
    ops = []
    for n in range(0, depth + times + 1):
        cands = [Mode("G-", n)]
        if n >= 1:
            cands += [Mode("J", n), Mode("L", n), Mode("G+", n)]
        for m in cands:
            e = engine.spectral_flow_mode(m, times)
            if _expr_weight(e)[1] >= -depth:
                ops.append(e)
    return ops


def twist_module(state: QuotientState, times: int = 1) -> tuple[HighestWeight, dict]:
    """Highest weight of the module obtained by precomposing the action with psi^times.

    Searches every window block for vectors killed by the twisted raising
    modes and returns the twisted (J_0, L_0) eigenvalues of the unique one.
    """
    module = state.module
    eng = module.engine
    spec = module.specialize
    found = []
    # psi^times(G+_1) = G+_(1-times) can raise depth by times-1, so only
    # blocks whose twisted raising images stay inside the certified depths count
    reach = state.trunc.max_depth - max(times - 1, 0)
    for block in state.window_blocks():
        if block[1] > reach:
            continue
        ops = [e.map(spec) for e in _flow_raising(eng, block[1], times)]
        for v in state.kernel(block, ops):
            found.append((block, v))
    if len(found) != 1:
        raise InconclusiveError(f"{len(found)} twisted highest-weight candidates in window {state.trunc}")
    block, v = found[0]
    weights = []
    for zero_mode in (Mode("J", 0), Mode("L", 0)):
        e = eng.spectral_flow_mode(zero_mode, times).map(spec)
        image = state.reduce(block, module.act_expr(e, v))
        key = next(iter(v))
        lam = image.get(key, Fraction(0)) / v[key]
        diff = dict(image)
        axpy(diff, -lam, v)
        if state.reduce(block, diff):
            raise ArithmeticError("twisted highest-weight vector is not an eigenvector")
        weights.append(lam)
    report = {
        "block": {"charge": block[0], "depth": block[1]},
        "vector": {monomial_str(m): _fmt(c) for m, c in sorted(v.items())},
        "times": times,
    }
    return HighestWeight(*weights), report


def _fmt(c) -> str:
    return format_scalar(c) if isinstance(c, Scalar) else format_rational(c)


def null_vector_check(p: int, family: str = "G+", trunc: Truncation | None = None, *,
                      engine: BracketEngine | None = None) -> dict:
    """Whether (G+_{-1})^(p-2)|0> (or (G-_{-2})^(p-2)|0>) vanishes in the simple quotient."""
    k = Fraction(p, 2) - 3
    n = p - 2
    if family == "G+":
        word = (Mode("G+", -1),) * n
    elif family == "G-":
        word = (Mode("G-", -2),) * n
    else:
        raise ValueError("family must be 'G+' or 'G-'")
    block = weight_of(word)
    if trunc is None:
        trunc = Truncation(max_depth=block[1], charge_window=max(p, abs(block[0])))
    if not trunc.contains(block):
        raise TruncationError(f"block {block} is outside {trunc}")
    state = iterate_quotient(Kind.VACUUM, None, trunc, k, engine=engine)
    vec = state.module.apply_word(word, state.module.cyclic())
    inside = state.contains(vec)
    certificate = None
    if inside:
        for d0 in sorted({b[1] for b, _ in state.generators}):
            partial = RowSpace()
            for g, (b, _) in enumerate(state.generators):
                if b[1] <= d0:
                    for v in state._contribution(g, block):
                        partial.add(v)
            if not partial.reduce(vec):
                certificate = d0
                break
    return {
        "monomial": f"({family}_{{{word[0].index}}})^{{{n}}}",
        "block": {"charge": block[0], "depth": block[1]},
        "in_maximal_submodule": inside,
        "certificate_depth": certificate,
        "generators": [
            {"charge": b[0], "depth": b[1], "vector": {monomial_str(m): _fmt(c) for m, c in sorted(v.items())}}
            for b, v in state.generators
        ],
        "fixpoint_iterations": state.iterations,
        "truncation": {"max_depth": trunc.max_depth, "charge_window": trunc.charge_window},
    }
