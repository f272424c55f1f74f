"""Rank-metric codes spanned by X^(q^i), i in I, over F_{q^n}."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fq_linalg import count_projective, matrix_rank, projective_points
from .gf_tower import FieldCtx
from .linpoly import LinPoly, lin_compose, lin_kernel
from .moore import BudgetExceeded, ExponentSet, _exps

DEFAULT_CODEWORD_BUDGET = 10**6


@dataclass(frozen=True)
class CodeSpec:
    ctx: FieldCtx
    I: ExponentSet

    @property
    def k(self) -> int:
        return self.I.k

    def codeword(self, a: Sequence[int]) -> LinPoly:
        if len(a) != self.k:
            raise ValueError(f"need {self.k} coefficients")
        out: dict[int, int] = {}
        for e, c in zip(self.I.exps, a):
            j = e % self.ctx.n
            out[j] = self.ctx.add(out.get(j, 0), c)
        return LinPoly(out)


@dataclass
class CodeReport:
    n: int
    k: int
    min_rank_distance: int | None
    singleton: int
    is_mrd: bool | None
    left_ideal_dim: int | None = None
    right_ideal_dim: int | None = None
    min_weight_codeword: tuple[int, ...] | None = None
    codewords_examined: int = 0

    def to_json(self, ctx: FieldCtx | None = None) -> dict:
        cw = self.min_weight_codeword
        if cw is not None and ctx is not None:
            cw = [ctx.nested(a) for a in cw]
        return {
            "n": self.n, "k": self.k,
            "min_rank_distance": self.min_rank_distance,
            "singleton": self.singleton,
            "is_mrd": self.is_mrd,
            "left_ideal_dim": self.left_ideal_dim,
            "right_ideal_dim": self.right_ideal_dim,
            "min_weight_codeword": list(cw) if cw is not None else None,
            "codewords_examined": self.codewords_examined,
        }


def codeword_rank(ctx: FieldCtx, a: Sequence[int], I) -> int:
    exps = _exps(I)
    f = CodeSpec(ctx, ExponentSet(exps, ctx.n)).codeword(a)
    return ctx.n - lin_kernel(ctx, f)[0]


def min_rank_distance(spec: CodeSpec, budget: int = DEFAULT_CODEWORD_BUDGET) -> CodeReport:
    """Minimum rank over projective representatives of nonzero coefficient tuples.

    Scaling a codeword by a nonzero constant does not change its rank, so one
    representative per line suffices.
    """
    ctx, k, n = spec.ctx, spec.k, spec.ctx.n
    total = count_projective(ctx.order, k)
    if total > budget:
        raise BudgetExceeded(f"{total} projective codewords exceed the budget of {budget}")
    best, arg = n + 1, None
    seen = 0
    for a in projective_points(ctx, k):
        seen += 1
        r = codeword_rank(ctx, a, spec.I)
        if r < best:
            best, arg = r, a
    singleton = n - k + 1
    return CodeReport(n, k, best, singleton, best == singleton, min_weight_codeword=arg,
                      codewords_examined=seen)


def _idealiser_dim(ctx: FieldCtx, exps: Sequence[int], side: str) -> int:
    n = ctx.n
    support = {e % n for e in exps}
    outside = [s for s in range(n) if s not in support]
    if side == "left":
        # phi o (a X^(q^i)) for a running over an F_q-basis of F_{q^n}
        probes = [LinPoly.monomial(e % n, ctx.q**r) for e in exps for r in range(n)]
    else:
        # C is closed under left multiplication by F_{q^n}, so generators suffice
        probes = [LinPoly.monomial(e % n) for e in exps]
    # column u of the constraint matrix: image of the u-th F_q-basis vector of
    # phi = sum_t phi_t X^(q^t), with phi_t = q^r (u = t*n + r)
    columns = []
    for t in range(n):
        for r in range(n):
            phi = LinPoly.monomial(t, ctx.q**r)
            col = []
            for g in probes:
                h = lin_compose(ctx, phi, g) if side == "left" else lin_compose(ctx, g, phi)
                for s in outside:
                    col.extend(ctx.coeffs(h.coeffs.get(s, 0)))
            columns.append(col)
    if not columns[0]:
        return n * n
    rows = [list(r) for r in zip(*columns)]
    return n * n - matrix_rank(ctx.base, rows)


def idealiser_dims(spec: CodeSpec, max_n: int = 8, max_q: int = 4) -> tuple[int, int]:
    ctx = spec.ctx
    if ctx.n > max_n or ctx.q > max_q:
        raise BudgetExceeded(f"idealiser solve limited to n <= {max_n}, q <= {max_q}")
    exps = spec.I.exps
    return _idealiser_dim(ctx, exps, "left"), _idealiser_dim(ctx, exps, "right")


def code_report(spec: CodeSpec, budget: int = DEFAULT_CODEWORD_BUDGET,
                idealisers: bool = True) -> CodeReport:
    rep = min_rank_distance(spec, budget)
    if idealisers:
        rep.left_ideal_dim, rep.right_ideal_dim = idealiser_dims(spec)
    return rep
