"""Linear algebra over F_q and F_{q^n}, and canonical subspace enumeration.

Subspaces of F_{q^n} (as an n-dimensional F_q-space) are enumerated through
their reduced row echelon generator matrices.  Pivot sets come in
lexicographic order; within a pivot set the free entries, read row by row with
columns ascending, form a base-q odometer whose last entry turns fastest.
Each row of an RREF matrix is itself the code of an F_{q^n} element, because
codes are base-q coordinate vectors.
"""

from __future__ import annotations

import itertools
from typing import Iterator, NamedTuple, Sequence

from .gf_tower import BaseField, FieldCtx


def gaussian_binomial(q: int, n: int, k: int) -> int:
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def expand(ctx: FieldCtx, x: int) -> list[int]:
    return ctx.coeffs(ctx.check(x))


# -- plain F_q matrices (lists of rows of F_q codes) --------------------------


def rref(F: BaseField, rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(inv, v) for v in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = F.neg(m[i][c])
                mf = F.mul_t[f]
                m[i] = [F.add_t[a][mf[b]] for a, b in zip(m[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def matrix_rank(F: BaseField, rows: Sequence[Sequence[int]]) -> int:
    return len(rref(F, rows)[1])


def nullspace(F: BaseField, rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of {x : M x = 0} for M given by rows (each of length ncols)."""
    red, pivots = rref(F, rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(red, pivots):
            if row[fc]:
                v[pc] = F.neg(row[fc])
        basis.append(v)
    return basis


def fq_det(F: BaseField, m: Sequence[Sequence[int]]) -> int:
    """Determinant over F_q by elimination."""
    a = [list(r) for r in m]
    k = len(a)
    det = 1
    for c in range(k):
        piv = next((i for i in range(c, k) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = F.neg(det)
        det = F.mul(det, a[c][c])
        inv = F.inv(a[c][c])
        for i in range(c + 1, k):
            if a[i][c]:
                f = F.neg(F.mul(a[i][c], inv))
                a[i] = [F.add(x, F.mul(f, y)) for x, y in zip(a[i], a[c])]
    return det


# -- F_q-structure of F_{q^n} -------------------------------------------------


def fq_rank(ctx: FieldCtx, elems: Sequence[int]) -> int:
    """F_q-rank of a list of F_{q^n} elements."""
    if ctx.q == 2:
        piv: dict[int, int] = {}
        for v in elems:
            while v:
                h = v.bit_length() - 1
                if h in piv:
                    v ^= piv[h]
                else:
                    piv[h] = v
                    break
        return len(piv)
    return matrix_rank(ctx.base, [ctx.coeffs(x) for x in elems])


def in_span(ctx: FieldCtx, x: int, span: Sequence[int]) -> bool:
    return fq_rank(ctx, list(span) + [x]) == fq_rank(ctx, span)


def span_elements(ctx: FieldCtx, basis: Sequence[int]) -> list[int]:
    """All F_q-combinations of basis (q^len(basis) values, with repeats if dependent)."""
    out = [0]
    for b in basis:
        multiples = [ctx.mul(c, b) for c in range(ctx.q)]
        out = [ctx.add(x, m) for x in out for m in multiples]
    return out


def det_ffelem(ctx: FieldCtx, m: Sequence[Sequence[int]]) -> int:
    """Determinant of a square matrix over F_{q^n} by Gaussian elimination."""
    k = len(m)
    if any(len(row) != k for row in m):
        raise ValueError("det_ffelem needs a square matrix")
    a = [list(r) for r in m]
    det = 1
    for c in range(k):
        piv = next((i for i in range(c, k) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = ctx.neg(det)
        det = ctx.mul(det, a[c][c])
        inv = ctx.inv(a[c][c])
        for i in range(c + 1, k):
            if a[i][c]:
                f = ctx.neg(ctx.mul(a[i][c], inv))
                row_c = a[c]
                a[i] = [ctx.add(x, ctx.mul(f, y)) for x, y in zip(a[i], row_c)]
    return det


# -- subspace enumeration -----------------------------------------------------


class SubspaceBasis(NamedTuple):
    index: int
    vectors: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.vectors)


class PivotBlock(NamedTuple):
    """One pivot set: ``size`` consecutive subspaces starting at ``offset``."""

    pivots: tuple[int, ...]
    free: tuple[tuple[int, ...], ...]   # free columns per row, ascending
    offset: int
    size: int


def pivot_blocks(q: int, n: int, k: int) -> list[PivotBlock]:
    if not 0 <= k <= n:
        raise ValueError(f"subspace dimension {k} out of range for n={n}")
    blocks = []
    offset = 0
    for piv in itertools.combinations(range(n), k):
        pset = set(piv)
        free = tuple(tuple(c for c in range(p + 1, n) if c not in pset) for p in piv)
        size = q ** sum(len(f) for f in free)
        blocks.append(PivotBlock(piv, free, offset, size))
        offset += size
    return blocks


def _row_values(q: int, pivot: int, free: Sequence[int]) -> list[int]:
    """Codes of all rows with this pivot, in odometer order (last column fastest)."""
    base = q**pivot
    vals = [base]
    for c in free:
        step = q**c
        vals = [v + d * step for v in vals for d in range(q)]
    return vals


def _mixed_digits(index: int, radices: Sequence[int]) -> list[int]:
    out = []
    for r in reversed(radices):
        index, d = divmod(index, r)
        out.append(d)
    return out[::-1]


def _odometer_from(value_lists: Sequence[list[int]], start: Sequence[int]) -> Iterator[tuple[int, ...]]:
    k = len(value_lists)
    for level in range(k - 1, -1, -1):
        lo = start[level] + (0 if level == k - 1 else 1)
        if lo >= len(value_lists[level]):
            continue
        parts = [[value_lists[r][start[r]]] for r in range(level)]
        parts.append(value_lists[level][lo:])
        parts.extend(value_lists[r] for r in range(level + 1, k))
        yield from itertools.product(*parts)


def iter_subspaces(q: int, n: int, k: int, start: int = 0,
                   count: int | None = None) -> Iterator[SubspaceBasis]:
    """Yield k-dimensional F_q-subspaces of F_q^n as canonical RREF bases.

    ``start``/``count`` select a contiguous slice of the canonical order, so
    disjoint slices can be handed to independent workers.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    total = gaussian_binomial(q, n, k)
    stop = total if count is None else min(total, start + count)
    if start >= stop:
        return
    idx = start
    for block in pivot_blocks(q, n, k):
        if block.offset + block.size <= idx:
            continue
        if block.offset >= stop:
            break
        vals = [_row_values(q, p, f) for p, f in zip(block.pivots, block.free)]
        digits = _mixed_digits(idx - block.offset, [len(v) for v in vals])
        for vecs in _odometer_from(vals, digits):
            yield SubspaceBasis(idx, vecs)
            idx += 1
            if idx >= stop:
                return


def enumerate_subspaces(ctx: FieldCtx, k: int, start: int = 0,
                        count: int | None = None) -> Iterator[SubspaceBasis]:
    return iter_subspaces(ctx.q, ctx.n, k, start, count)


def subspace_at(q: int, n: int, k: int, index: int) -> SubspaceBasis:
    return next(iter_subspaces(q, n, k, index, 1))


def subspace_index(q: int, n: int, vectors: Sequence[int]) -> int:
    """Position of an RREF basis (as produced by the enumerator) in canonical order."""
    k = len(vectors)
    digit_rows = [[(v // q**t) % q for t in range(n)] for v in vectors]
    pivots = tuple(next(t for t in range(n) if row[t]) for row in digit_rows)
    for block in pivot_blocks(q, n, k):
        if block.pivots == pivots:
            idx = 0
            for row, free in zip(digit_rows, block.free):
                for c in free:
                    idx = idx * q + row[c]
            return block.offset + idx
    raise ValueError("vectors are not a canonical RREF basis")


def canonical_basis(ctx: FieldCtx, elems: Sequence[int]) -> tuple[int, ...]:
    """RREF basis, in the enumerator's convention, of the F_q-span of elems."""
    red, _ = rref(ctx.base, [ctx.coeffs(x) for x in elems])
    return tuple(ctx.from_coeffs(r) for r in red)


def count_projective(size: int, k: int) -> int:
    """|PG(k-1, size)|."""
    return (size**k - 1) // (size - 1) if size > 1 else 0


def projective_points(ctx: FieldCtx, k: int) -> Iterator[tuple[int, ...]]:
    """Canonical representatives of PG(k-1, q^n): first nonzero coordinate 1,
    remaining coordinates in odometer order."""
    Q = ctx.order
    for lead in range(k):
        zeros = (0,) * lead
        for rest in itertools.product(range(Q), repeat=k - lead - 1):
            yield zeros + (1,) + rest
