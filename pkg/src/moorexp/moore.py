"""Moore matrices and the two decision procedures for Moore exponent sets.

I is a Moore exponent set for (q, n) when det(alpha_i^(q^(i_j))) vanishes
exactly for F_q-dependent tuples.  Both engines walk canonical subspaces
rather than tuples: replacing A by CA with C in GL(k, q) multiplies the
determinant by det(C), so only the F_q-span of A matters.

* kernel engine: for each (k-1)-dimensional span B, expand the determinant
  along a free last row Y.  The result g_B(Y) is linearized and vanishes on
  span(B); I is Moore iff every root space has dimension exactly k-1.
* determinant engine: evaluate the k x k determinant on every k-dimensional
  span.  Slower, and kept as the independent oracle.
"""

from __future__ import annotations

import itertools
import logging
import multiprocessing as mp
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Sequence

import numpy as np

from . import fq_linalg as fl
from .gf_tower import FieldCtx
from .linpoly import LinPoly, lin_eval, lin_kernel, lin_rank

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExponentSet:
    """Strictly increasing exponents, reduced mod n when n is known."""

    exps: tuple[int, ...]
    n: int | None = None

    @property
    def k(self) -> int:
        return len(self.exps)

    def shifts(self) -> list["ExponentSet"]:
        """All n shifts mod n, each renormalized to start at 0."""
        if self.n is None:
            return [self]
        out = []
        for s in range(self.n):
            vals = sorted((e + s) % self.n for e in self.exps)
            out.append(ExponentSet(tuple(v - vals[0] for v in vals), self.n))
        return out

    def canonical(self) -> "ExponentSet":
        """Lexicographically least member of the shift class."""
        return min(self.shifts(), key=lambda s: s.exps)

    def scaled(self, d: int) -> "ExponentSet":
        return normalize([d * e for e in self.exps], self.n)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.exps)) + "}"


def normalize(raw: Iterable[int], n: int | None = None) -> ExponentSet:
    vals = [int(v) for v in raw]
    if not vals:
        raise ValueError("exponent set must be nonempty")
    if any(v < 0 for v in vals):
        raise ValueError("exponents must be >= 0")
    if n is not None:
        if n < 1:
            raise ValueError("n must be >= 1")
        reduced = [v % n for v in vals]
    else:
        reduced = vals
    if len(set(reduced)) != len(reduced):
        raise ValueError(f"duplicate exponents in {vals}" + (f" mod {n}" if n else ""))
    if n is not None and len(reduced) > n:
        raise ValueError(f"k = {len(reduced)} exceeds n = {n}")
    reduced.sort()
    return ExponentSet(tuple(v - reduced[0] for v in reduced), n)


def _exps(I) -> tuple[int, ...]:
    return tuple(I.exps) if isinstance(I, ExponentSet) else tuple(I)


# -- matrices and determinants --------------------------------------------------


def moore_matrix(ctx: FieldCtx, A: Sequence[int], I) -> list[list[int]]:
    exps = _exps(I)
    if len(A) != len(exps):
        raise ValueError(f"need {len(exps)} elements, got {len(A)}")
    return [[ctx.frobenius(a, j) for j in exps] for a in A]


def moore_det(ctx: FieldCtx, A: Sequence[int], I) -> int:
    return fl.det_ffelem(ctx, moore_matrix(ctx, A, I))


def projective_vectors(q: int, k: int) -> Iterable[tuple[int, ...]]:
    """PG(k-1, q) as vectors over F_q codes with last nonzero entry 1.

    This normalization makes the product equal the Moore determinant exactly;
    "first nonzero entry 1" differs from it by a sign when q is odd.
    """
    for last in range(k):
        for head in itertools.product(range(q), repeat=last):
            yield head + (1,) + (0,) * (k - last - 1)


def moore_det_product(ctx: FieldCtx, A: Sequence[int]) -> int:
    """prod over directions c of c . A; equals the classical Moore determinant."""
    acc = 1
    for c in projective_vectors(ctx.q, len(A)):
        s = 0
        for ci, a in zip(c, A):
            if ci:
                s = ctx.add(s, ctx.mul(ci, a))
        acc = ctx.mul(acc, s)
    return acc


def pencil_poly(ctx: FieldCtx, I, basis: Sequence[int]) -> LinPoly:
    """Expand det M_{(basis..., Y), I} along the Y row."""
    exps = _exps(I)
    k = len(exps)
    if len(basis) != k - 1:
        raise ValueError(f"pencil needs {k - 1} vectors")
    rows = [[ctx.frobenius(b, e) for e in exps] for b in basis]
    coeffs: dict[int, int] = {}
    for c, e in enumerate(exps):
        sub = [[r[j] for j in range(k) if j != c] for r in rows]
        m = fl.det_ffelem(ctx, sub) if sub else 1
        if (k - 1 + c) % 2:
            m = ctx.neg(m)
        coeffs[e] = ctx.add(coeffs.get(e, 0), m)
    return LinPoly(coeffs)


# -- verdicts -------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """F_q-independent tuple whose Moore determinant vanishes."""

    exps: tuple[int, ...]
    tuple: tuple[int, ...]
    index: int          # position of the witness subspace in the engine's order
    engine: str

    def verify(self, ctx: FieldCtx) -> bool:
        """Rank and explicit determinant."""
        return (fl.fq_rank(ctx, self.tuple) == len(self.exps)
                and moore_det(ctx, self.tuple, self.exps) == 0)

    def verify_pencil(self, ctx: FieldCtx) -> bool:
        """Leading k-1 entries independent, last entry outside their span and a
        root of their pencil polynomial."""
        head, last = self.tuple[:-1], self.tuple[-1]
        if fl.fq_rank(ctx, head) != len(head) or fl.in_span(ctx, last, head):
            return False
        return lin_eval(ctx, pencil_poly(ctx, self.exps, head), last) == 0

    def to_json(self, ctx: FieldCtx) -> dict:
        return {
            "tuple": [ctx.nested(a) for a in self.tuple],
            "codes": list(self.tuple),
            "subspace_index": self.index,
            "engine": self.engine,
            "certificate": {
                "fq_rank": fl.fq_rank(ctx, self.tuple),
                "moore_det": moore_det(ctx, self.tuple, self.exps),
            },
        }


@dataclass
class MooreVerdict:
    is_moore: bool
    witness: Witness | None
    method: str
    work: int
    work_by_engine: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.is_moore == (self.witness is not None):
            raise ValueError("a verdict carries a witness exactly when it is negative")

    def to_json(self, ctx: FieldCtx) -> dict:
        return {
            "is_moore": self.is_moore,
            "method": self.method,
            "work": self.work,
            "work_by_engine": dict(sorted(self.work_by_engine.items())),
            "witness": self.witness.to_json(ctx) if self.witness else None,
        }


class BudgetExceeded(RuntimeError):
    pass


# -- scanning machinery -----------------------------------------------------------
#
# A scan function takes (ctx, exps, start, count) and returns the index of the
# first hit in [start, start + count) or None.  Chunks are consumed in order, so
# the reported hit is the lowest index whatever the worker count.

_WORKER: dict = {}


def _worker_init(ctx, exps, scan):
    _WORKER["args"] = (ctx, exps, scan)


def _worker_run(span):
    ctx, exps, scan = _WORKER["args"]
    return scan(ctx, exps, span[0], span[1])


def _run_scan(ctx: FieldCtx, exps, scan: Callable, total: int, jobs: int,
              chunk: int) -> int | None:
    spans = [(s, min(chunk, total - s)) for s in range(0, total, chunk)]
    if jobs <= 1 or len(spans) <= 1:
        for s, c in spans:
            hit = scan(ctx, exps, s, c)
            if hit is not None:
                return hit
        return None
    mpctx = mp.get_context("fork")
    with mpctx.Pool(jobs, initializer=_worker_init, initargs=(ctx, exps, scan)) as pool:
        for hit in pool.imap(_worker_run, spans):
            if hit is not None:
                pool.terminate()
                return hit
    return None


def _pencil_scan_python(ctx: FieldCtx, exps, start: int, count: int) -> int | None:
    k = len(exps)
    for sb in fl.iter_subspaces(ctx.q, ctx.n, k - 1, start, count):
        g = pencil_poly(ctx, exps, sb.vectors)
        if g.is_zero() or lin_rank(ctx, g) < ctx.n - (k - 1):
            return sb.index
    return None


def _pencil_scan_compiled(ctx: FieldCtx, exps, start: int, count: int) -> int | None:
    from ._kernels import scan_pencils

    q, n, k = ctx.q, ctx.n, len(exps)
    T = ctx.np_tables()
    key = ("frob", exps)
    if key not in ctx._np:
        frob = np.array([ctx.frob_table(e) for e in exps], dtype=np.int64)
        logb = np.array([[ctx.log[frob[c, q**t]] for t in range(n)] for c in range(k)],
                        dtype=np.int64)
        ctx._np[key] = (frob, logb)
    frob, logb = ctx._np[key]
    stop = start + count
    for block in fl.pivot_blocks(q, n, k - 1):
        lo, hi = max(start, block.offset), min(stop, block.offset + block.size)
        if lo >= hi:
            continue
        free_cols = np.array([c for f in block.free for c in f], dtype=np.int64)
        free_rows = np.array([r for r, f in enumerate(block.free) for _ in f], dtype=np.int64)
        digits = np.zeros(len(free_cols), dtype=np.int64)
        rem = lo - block.offset
        for s in range(len(free_cols) - 1, -1, -1):
            rem, digits[s] = divmod(rem, q)
        off = scan_pencils(q, n, k, ctx.p == 2, ctx.order - 1, (ctx.order - 1) // 2,
                           T["log"], T["exp"], T["zech"], T["fq_add"], T["fq_mul"],
                           T["fq_neg"], T["fq_inv"], frob, logb,
                           np.array(block.pivots, dtype=np.int64), free_cols, free_rows,
                           digits, hi - lo)
        if off >= 0:
            return lo + int(off)
    return None


def _det_scan(ctx: FieldCtx, exps, start: int, count: int) -> int | None:
    for sb in fl.iter_subspaces(ctx.q, ctx.n, len(exps), start, count):
        if moore_det(ctx, sb.vectors, exps) == 0:
            return sb.index
    return None


def _compiled_available(ctx: FieldCtx) -> bool:
    if not ctx.has_tables or ctx.n > 62:
        return False
    try:
        from . import _kernels  # noqa: F401
    except ImportError:  # pragma: no cover
        return False
    return True


def _chunk_size(total: int, jobs: int) -> int:
    return max(1, min(1 << 16, -(-total // max(1, 4 * jobs))))


def pencil_witness(ctx: FieldCtx, I, basis: Sequence[int], index: int) -> Witness:
    """Extend a failing pencil to a witness with the least code outside span(basis)."""
    exps = _exps(I)
    g = pencil_poly(ctx, exps, basis)
    dim, kb = lin_kernel(ctx, g)
    if dim < len(exps):
        raise RuntimeError(f"pencil {index} does not fail: root space has dimension {dim}")
    cands = sorted(set(fl.span_elements(ctx, kb)))
    y = next(c for c in cands if not fl.in_span(ctx, c, basis))
    return Witness(exps, tuple(basis) + (y,), index, "kernel")


def moore_check_kernel(ctx: FieldCtx, I, jobs: int = 1, compiled: bool | None = None,
                       budget: int | None = None, chunk: int | None = None) -> MooreVerdict:
    exps = _exps(I)
    k = len(exps)
    if k > ctx.n:
        raise ValueError(f"k = {k} exceeds n = {ctx.n}")
    if k == 1:
        return MooreVerdict(True, None, "kernel", 0, {"kernel": 0})
    total = fl.gaussian_binomial(ctx.q, ctx.n, k - 1)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} pencils exceed the budget of {budget}")
    if compiled is None:
        compiled = _compiled_available(ctx)
    scan = _pencil_scan_compiled if compiled else _pencil_scan_python
    hit = _run_scan(ctx, exps, scan, total, jobs, chunk or _chunk_size(total, jobs))
    if hit is None:
        return MooreVerdict(True, None, "kernel", total, {"kernel": total})
    basis = fl.subspace_at(ctx.q, ctx.n, k - 1, hit).vectors
    w = pencil_witness(ctx, exps, basis, hit)
    return MooreVerdict(False, w, "kernel", hit + 1, {"kernel": hit + 1})


def moore_check_det(ctx: FieldCtx, I, jobs: int = 1, budget: int | None = None,
                    chunk: int | None = None) -> MooreVerdict:
    exps = _exps(I)
    k = len(exps)
    if k > ctx.n:
        raise ValueError(f"k = {k} exceeds n = {ctx.n}")
    total = fl.gaussian_binomial(ctx.q, ctx.n, k)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} subspaces exceed the budget of {budget}")
    hit = _run_scan(ctx, exps, _det_scan, total, jobs, chunk or _chunk_size(total, jobs))
    if hit is None:
        return MooreVerdict(True, None, "det", total, {"det": total})
    basis = fl.subspace_at(ctx.q, ctx.n, k, hit).vectors
    return MooreVerdict(False, Witness(exps, basis, hit, "det"), "det", hit + 1, {"det": hit + 1})


class EngineDisagreement(RuntimeError):
    pass


def moore_check(ctx: FieldCtx, I, method: str = "kernel", jobs: int = 1,
                budget: int | None = None) -> MooreVerdict:
    """Decide I with one engine or with both (``method="both"``)."""
    if method == "kernel":
        return moore_check_kernel(ctx, I, jobs=jobs, budget=budget)
    if method == "det":
        return moore_check_det(ctx, I, jobs=jobs, budget=budget)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    kv = moore_check_kernel(ctx, I, jobs=jobs, budget=budget)
    dv = moore_check_det(ctx, I, jobs=jobs, budget=budget)
    if kv.is_moore != dv.is_moore:
        raise EngineDisagreement(f"kernel says {kv.is_moore}, det says {dv.is_moore} for {I}")
    if kv.witness and not (kv.witness.verify(ctx) and dv.witness.verify_pencil(ctx)):
        raise EngineDisagreement("witnesses fail cross-certification")
    work = {"kernel": kv.work, "det": dv.work}
    return MooreVerdict(kv.is_moore, kv.witness, "both", kv.work, work)


# -- search over all exponent sets -----------------------------------------------


@dataclass
class ClassResult:
    representative: ExponentSet
    members: list[ExponentSet]
    verdict: MooreVerdict
    scaled_to: list[tuple[int, ExponentSet]]   # (d, class of d*I) for gcd(d, n) = 1


def shift_classes(n: int, k: int) -> list[tuple[ExponentSet, list[ExponentSet]]]:
    """Size-k subsets of [0, n-1] containing 0, grouped by shift class mod n."""
    classes: dict[tuple[int, ...], list[ExponentSet]] = {}
    for rest in itertools.combinations(range(1, n), k - 1):
        I = ExponentSet((0,) + rest, n)
        classes.setdefault(I.canonical().exps, []).append(I)
    return [(ExponentSet(rep, n), members) for rep, members in sorted(classes.items())]


def search_moore_sets(ctx: FieldCtx, k: int, method: str = "kernel", jobs: int = 1,
                      budget: int | None = None) -> list[ClassResult]:
    n = ctx.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    out = []
    for rep, members in shift_classes(n, k):
        v = moore_check(ctx, rep, method=method, jobs=jobs, budget=budget)
        scaled = []
        for d in range(2, n):
            if gcd(d, n) == 1:
                other = rep.scaled(d).canonical()
                if other != rep:
                    scaled.append((d, other))
        out.append(ClassResult(rep, members, v, scaled))
    return out


def multiplier_observations(results: Sequence[ClassResult]) -> list[dict]:
    """Report, without assuming anything, whether d*I classes share verdicts."""
    by_rep = {r.representative.exps: r.verdict.is_moore for r in results}
    obs = []
    for r in results:
        for d, other in r.scaled_to:
            if other.exps in by_rep:
                obs.append({"class": list(r.representative.exps), "d": d,
                            "image": list(other.exps),
                            "same_verdict": by_rep[other.exps] == r.verdict.is_moore})
    return obs
