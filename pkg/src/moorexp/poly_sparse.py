"""Sparse multivariate polynomials over F_q with graded-lex term order.

Coefficients are F_q codes (the same integers that denote F_q inside any
F_{q^n} context), so a polynomial built here can be evaluated in every
extension without conversion.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .gf_tower import BaseField, FieldCtx, least_irreducible, prime_field, split_prime_power

DEFAULT_TERM_BUDGET = 10**7
MAX_EXPONENT = (1 << 63) - 1

Monomial = tuple[int, ...]


class InexactDivision(ArithmeticError):
    pass


class TermBudgetExceeded(RuntimeError):
    pass


@lru_cache(maxsize=None)
def base_field(q: int) -> BaseField:
    p, e = split_prime_power(q)
    return BaseField(p, e, least_irreducible(prime_field(p), e))


def grlex_key(m: Monomial) -> tuple:
    return (sum(m), m)


@dataclass(frozen=True, eq=False)
class SparsePoly:
    field: BaseField
    nvars: int
    terms: Mapping[Monomial, int]

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            m = tuple(int(a) for a in m)
            if len(m) != self.nvars:
                raise ValueError(f"monomial {m} has wrong arity for {self.nvars} variables")
            if any(a < 0 or a > MAX_EXPONENT for a in m):
                raise OverflowError(f"exponent out of range in {m}")
            if c:
                clean[m] = int(c)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, F: BaseField, nvars: int) -> "SparsePoly":
        return cls(F, nvars, {})

    @classmethod
    def constant(cls, F: BaseField, nvars: int, c: int = 1) -> "SparsePoly":
        return cls(F, nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, F: BaseField, nvars: int, i: int) -> "SparsePoly":
        m = [0] * nvars
        m[i] = 1
        return cls(F, nvars, {tuple(m): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading(self) -> tuple[Monomial, int]:
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return (self.field.q == other.field.q and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.field.q, self.nvars, frozenset(self.terms.items())))

    def _check(self, other: "SparsePoly"):
        if self.field.q != other.field.q or self.nvars != other.nvars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        self._check(other)
        F = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = F.add(out.get(m, 0), c)
        return SparsePoly(F, self.nvars, out)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.field, self.nvars, {m: self.field.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        self._check(other)
        F = self.field
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            row = F.mul_t[c1]
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = F.add_t[out.get(m, 0)][row[c2]]
        return SparsePoly(F, self.nvars, out)

    def __str__(self) -> str:
        return format_poly(self)


def sym_moore_poly(q: int, k: int, exps: Sequence[int],
                   budget: int = DEFAULT_TERM_BUDGET) -> SparsePoly:
    """det(X_r^(q^e_c)) as a polynomial in X_1..X_k with F_q coefficients."""
    if k < 1 or len(exps) != k:
        raise ValueError(f"need k >= 1 exponents, got k={k}, exps={list(exps)}")
    if any(e < 0 for e in exps):
        raise ValueError("exponents must be >= 0")
    F = base_field(q)
    powers = [q**e for e in exps]
    if max(powers) > MAX_EXPONENT:
        raise OverflowError("exponent q^e does not fit in a machine word")
    nterms = 1
    for i in range(2, k + 1):
        nterms *= i
    if nterms > budget:
        raise TermBudgetExceeded(f"{nterms} terms exceed the budget of {budget}")
    minus_one = F.neg(1)
    out: dict[Monomial, int] = {}
    for perm in itertools.permutations(range(k)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        m = tuple(powers[perm[r]] for r in range(k))
        c = minus_one if inversions % 2 else 1
        out[m] = F.add(out.get(m, 0), c)
    return SparsePoly(F, k, out)


def moore_G(q: int, k: int) -> SparsePoly:
    """The classical Moore determinant, vanishing on F_q-dependent tuples."""
    return sym_moore_poly(q, k, list(range(k)))


def divexact(f: SparsePoly, g: SparsePoly, budget: int = DEFAULT_TERM_BUDGET) -> SparsePoly:
    """Exact quotient f / g, checked by multiplying back."""
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    F = f.field
    lm, lc = g.leading()
    lc_inv = F.inv(lc)
    rest = [(m, c) for m, c in g.terms.items() if m != lm]
    rem = dict(f.terms)
    heap = [(-sum(m), tuple(-a for a in m)) for m in rem]
    heapq.heapify(heap)
    quot: dict[Monomial, int] = {}
    while heap:
        _, neg = heapq.heappop(heap)
        m = tuple(-a for a in neg)
        c = rem.pop(m, 0)
        if not c:
            continue
        shift = tuple(a - b for a, b in zip(m, lm))
        if any(s < 0 for s in shift):
            raise InexactDivision(f"leading term {m} is not divisible by {lm}")
        qc = F.mul(c, lc_inv)
        quot[shift] = qc
        if len(quot) > budget:
            raise TermBudgetExceeded(f"quotient exceeds {budget} terms")
        nq = F.neg(qc)
        for gm, gc in rest:
            t = tuple(a + b for a, b in zip(shift, gm))
            old = rem.get(t)
            v = F.add(old or 0, F.mul(nq, gc))
            if v:
                rem[t] = v
                if old is None:
                    heapq.heappush(heap, (-sum(t), tuple(-a for a in t)))
            elif old is not None:
                del rem[t]
    h = SparsePoly(F, f.nvars, quot)
    if h * g != f:
        raise InexactDivision("multiply-back check failed")
    return h


def partial_derivative(f: SparsePoly, var_index: int) -> SparsePoly:
    if not 0 <= var_index < f.nvars:
        raise ValueError(f"variable index {var_index} out of range")
    F = f.field
    out: dict[Monomial, int] = {}
    for m, c in f.terms.items():
        a = m[var_index]
        coef = F.mul(F.from_int(a), c)
        if coef:
            d = list(m)
            d[var_index] -= 1
            d = tuple(d)
            out[d] = F.add(out.get(d, 0), coef)
    return SparsePoly(F, f.nvars, out)


def gradient(f: SparsePoly) -> list[SparsePoly]:
    return [partial_derivative(f, i) for i in range(f.nvars)]


def eval_poly(ctx: FieldCtx, f: SparsePoly, point: Sequence[int]) -> int:
    if len(point) != f.nvars:
        raise ValueError(f"expected {f.nvars} coordinates, got {len(point)}")
    if ctx.q != f.field.q:
        raise ValueError("polynomial and context have different base fields")
    cache: dict[tuple[int, int], int] = {}

    def power(i: int, a: int) -> int:
        key = (i, a)
        if key not in cache:
            cache[key] = ctx.pow(point[i], a)
        return cache[key]

    acc = 0
    for m, c in f.terms.items():
        t = c
        for i, a in enumerate(m):
            if a:
                t = ctx.mul(t, power(i, a))
                if not t:
                    break
        acc = ctx.add(acc, t)
    return acc


# -- text format ------------------------------------------------------------------


def format_poly(f: SparsePoly) -> str:
    """Terms ``c*X1^a1*...`` in decreasing graded-lex order joined by ``+``."""
    if f.is_zero():
        return "0"
    parts = []
    for m, c in f.sorted_terms():
        factors = [str(c)] + [f"X{i + 1}^{a}" for i, a in enumerate(m) if a]
        parts.append("*".join(factors))
    return "+".join(parts)


_FACTOR = re.compile(r"^X(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, q: int, nvars: int) -> SparsePoly:
    F = base_field(q)
    out: dict[Monomial, int] = {}
    text = text.replace(" ", "")
    if text in ("", "0"):
        return SparsePoly(F, nvars, {})
    for term in text.split("+"):
        if not term:
            raise ValueError(f"empty term in {text!r}")
        c = 1
        m = [0] * nvars
        for factor in term.split("*"):
            if factor.isdigit():
                if int(factor) >= q:
                    raise ValueError(f"coefficient {factor} is not an F_{q} code")
                c = F.mul(c, int(factor))
                continue
            hit = _FACTOR.match(factor)
            if not hit:
                raise ValueError(f"cannot parse factor {factor!r}")
            i = int(hit.group(1)) - 1
            if not 0 <= i < nvars:
                raise ValueError(f"variable X{i + 1} out of range")
            m[i] += int(hit.group(2) or 1)
        mt = tuple(m)
        out[mt] = F.add(out.get(mt, 0), c)
    return SparsePoly(F, nvars, out)
