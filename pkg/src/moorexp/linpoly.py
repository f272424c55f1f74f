"""Linearized polynomials sum_j c_j X^(q^j) over F_{q^n}.

A :class:`LinPoly` maps exponent indices j to coefficients.  As a function on
F_{q^n} it only depends on j mod n; the divisibility test instead works on the
expanded ordinary polynomial, where X^(q^j) is taken literally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .fq_linalg import det_ffelem, matrix_rank, nullspace
from .gf_tower import FieldCtx


@dataclass(frozen=True)
class LinPoly:
    coeffs: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(j): int(c) for j, c in self.coeffs.items() if c}
        if any(j < 0 for j in clean):
            raise ValueError("exponent indices must be >= 0")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, j: int, c: int = 1) -> "LinPoly":
        return cls({j: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def q_degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def to_json(self) -> dict[str, int]:
        return {str(j): c for j, c in self.coeffs.items()}


def lin_add(ctx: FieldCtx, f: LinPoly, g: LinPoly) -> LinPoly:
    out = dict(f.coeffs)
    for j, c in g.coeffs.items():
        out[j] = ctx.add(out.get(j, 0), c)
    return LinPoly(out)


def lin_eval(ctx: FieldCtx, f: LinPoly, x: int) -> int:
    acc = 0
    for j, c in f.coeffs.items():
        acc = ctx.add(acc, ctx.mul(c, ctx.frobenius(x, j)))
    return acc


def lin_matrix(ctx: FieldCtx, f: LinPoly) -> list[list[int]]:
    """Rows of the n x n F_q matrix M with coords(f(x)) = M coords(x)."""
    cols = [ctx.coeffs(lin_eval(ctx, f, ctx.q**t)) for t in range(ctx.n)]
    return [[cols[t][r] for t in range(ctx.n)] for r in range(ctx.n)]


def lin_rank(ctx: FieldCtx, f: LinPoly) -> int:
    return matrix_rank(ctx.base, lin_matrix(ctx, f))


def lin_kernel(ctx: FieldCtx, f: LinPoly) -> tuple[int, list[int]]:
    """Root space of f inside F_{q^n}: (dimension, basis codes)."""
    basis = nullspace(ctx.base, lin_matrix(ctx, f), ctx.n)
    return len(basis), [ctx.from_coeffs(v) for v in basis]


def lin_compose(ctx: FieldCtx, g: LinPoly, f: LinPoly) -> LinPoly:
    """g o f reduced modulo X^(q^n) - X."""
    n = ctx.n
    out: dict[int, int] = {}
    for i, gi in g.coeffs.items():
        for j, fj in f.coeffs.items():
            t = (i + j) % n
            out[t] = ctx.add(out.get(t, 0), ctx.mul(gi, ctx.frobenius(fj, i)))
    return LinPoly(out)


# -- ordinary divisibility ------------------------------------------------------


def expanded(ctx: FieldCtx, f: LinPoly) -> dict[int, int]:
    """Ordinary sparse form {degree: coefficient}, degree = q^j."""
    return {ctx.q**j: c for j, c in f.coeffs.items()}


def sparse_divmod(ctx: FieldCtx, num: Mapping[int, int],
                  den: Mapping[int, int]) -> tuple[dict[int, int], dict[int, int]]:
    """Long division of sparse univariate polynomials over F_{q^n}."""
    den = {d: c for d, c in den.items() if c}
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    rem = {d: c for d, c in num.items() if c}
    dd = max(den)
    lead_inv = ctx.inv(den[dd])
    quot: dict[int, int] = {}
    lower = [(d, c) for d, c in den.items() if d != dd]
    while rem:
        top = max(rem)
        if top < dd:
            break
        c = ctx.mul(rem.pop(top), lead_inv)
        shift = top - dd
        quot[shift] = c
        for d, dc in lower:
            key = d + shift
            v = ctx.sub(rem.get(key, 0), ctx.mul(c, dc))
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
    return quot, rem


def lin_divides(ctx: FieldCtx, f: LinPoly, g: LinPoly) -> bool:
    """True iff f divides g as ordinary polynomials over F_{q^n}."""
    if f.is_zero():
        raise ValueError("divisor must be nonzero")
    _, rem = sparse_divmod(ctx, expanded(ctx, g), expanded(ctx, f))
    return not rem


def lin_right_divmod(ctx: FieldCtx, g: LinPoly, f: LinPoly) -> tuple[LinPoly, LinPoly]:
    """Symbolic right division g = h o f + r with q-degree(r) < q-degree(f).

    Composition here is literal (no reduction mod X^(q^n) - X).
    """
    if f.is_zero():
        raise ValueError("divisor must be nonzero")
    df = f.q_degree
    lead_f = f.coeffs[df]
    rem = dict(g.coeffs)
    h: dict[int, int] = {}
    while rem and max(rem) >= df:
        top = max(rem)
        s = top - df
        # h_s * lead_f^(q^s) must cancel rem[top]
        c = ctx.div(rem[top], ctx.frobenius(lead_f, s))
        h[s] = c
        for j, fj in f.coeffs.items():
            key = j + s
            v = ctx.sub(rem.get(key, 0), ctx.mul(c, ctx.frobenius(fj, s)))
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
    return LinPoly(h), LinPoly(rem)


# -- the L, M, N, R determinants -------------------------------------------------


def _minor_row_expansion(ctx: FieldCtx, lower: Sequence[Sequence[int]],
                         exps: Sequence[int]) -> LinPoly:
    """Expand det([U^(q^e) for e in exps] over ``lower``) along the U row."""
    m = len(exps)
    coeffs: dict[int, int] = {}
    for c in range(m):
        sub = [[row[j] for j in range(m) if j != c] for row in lower]
        minor = det_ffelem(ctx, sub) if sub else 1
        if c % 2:
            minor = ctx.neg(minor)
        coeffs[exps[c]] = ctx.add(coeffs.get(exps[c], 0), minor)
    return LinPoly(coeffs)


def _power_rows(ctx: FieldCtx, zs: Sequence[int], exps: Sequence[int]) -> list[list[int]]:
    rows = [[ctx.frobenius(z, e) for e in exps] for z in zs]
    rows.append([1] * len(exps))
    return rows


@dataclass(frozen=True)
class LMNR:
    L: LinPoly
    M: LinPoly
    N: int
    R: int


def build_LMNR(ctx: FieldCtx, I, z: Sequence[int]) -> LMNR:
    """L(U), M(U) as linearized polynomials in U and the scalars N, R at z.

    For k = 4 the R determinant is the 1 x 1 all-ones matrix, i.e. 1.
    """
    exps = list(getattr(I, "exps", I))
    k = len(exps)
    if k < 4:
        raise ValueError("L, M, N, R need at least 4 exponents")
    if len(z) != k - 3:
        raise ValueError(f"expected {k - 3} z values, got {len(z)}")
    i1 = exps[1]
    l_exps = [0] + exps[2:]
    m_exps = [0] + [e - i1 for e in exps[2:]]
    L = _minor_row_expansion(ctx, _power_rows(ctx, z, l_exps), l_exps)
    M = _minor_row_expansion(ctx, _power_rows(ctx, z, m_exps), m_exps)
    N = det_ffelem(ctx, _power_rows(ctx, z, m_exps[1:]))
    R = det_ffelem(ctx, _power_rows(ctx, z[1:], [e - i1 for e in exps[3:]]))
    return LMNR(L, M, N, R)


def _is_integer_ap(exps: Sequence[int]) -> bool:
    d = exps[1] - exps[0] if len(exps) > 1 else 1
    return all(b - a == d for a, b in zip(exps, exps[1:]))


def verify_case2(ctx: FieldCtx, I, z: Sequence[int]) -> bool:
    """Re-check a z-certificate without the long-division path.

    N is recomputed as an explicit determinant, and non-divisibility as a
    nonzero remainder of symbolic right division (M is separable once N != 0,
    so ordinary and symbolic divisibility coincide).
    """
    exps = list(getattr(I, "exps", I))
    i1 = exps[1]
    tail = [e - i1 for e in exps[2:]]
    rows = [[ctx.pow(zr, ctx.q**e) for e in tail] for zr in z] + [[1] * len(tail)]
    if det_ffelem(ctx, rows) == 0:
        return False
    parts = build_LMNR(ctx, exps, z)
    if parts.M.is_zero():
        return False
    _, r = lin_right_divmod(ctx, parts.L, parts.M)
    return not r.is_zero()


def case2_z_search(ctx: FieldCtx, I, budget: int, seed: int = 0,
                   randomize: bool = False) -> tuple[int, ...] | None:
    """Find z with N(z) != 0 and M(U, z) not dividing L(U, z).

    The first trial uses powers of the primitive element; the rest are
    uniform draws from a seeded generator.
    """
    exps = list(getattr(I, "exps", I))
    k = len(exps)
    if k < 4:
        raise ValueError("case-2 search needs k >= 4")
    if exps[0] != 0 or exps[2] != 2 * exps[1]:
        raise ValueError("case-2 search needs a normalized I with i_2 = 2 i_1")
    if _is_integer_ap(exps):
        raise ValueError("case-2 search needs I that is not an arithmetic progression")
    rng = np.random.default_rng(None if randomize else seed)
    g = getattr(ctx, "generator", None) or (ctx.q if ctx.n > 1 else 1)
    for trial in range(budget):
        if trial == 0:
            z = tuple(ctx.pow(g, r + 1) for r in range(k - 3))
        else:
            z = tuple(ctx.random_element(rng) for _ in range(k - 3))
        parts = build_LMNR(ctx, exps, z)
        if parts.N == 0 or parts.M.is_zero():
            continue
        if not lin_divides(ctx, parts.M, parts.L):
            return z
    return None
