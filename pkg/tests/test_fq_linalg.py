import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moorexp import fq_linalg as fl
from moorexp.gf_tower import field_for

OMEGA, OMEGA2 = 2, 3


def test_expand(f16, rng):
    assert fl.expand(f16, 0) == [0, 0, 0, 0]
    assert fl.expand(f16, 1) == [1, 0, 0, 0]
    ctx = field_for(3, 4)
    for _ in range(100):
        x, y = ctx.random_element(rng), ctx.random_element(rng)
        lhs = fl.expand(ctx, ctx.add(x, y))
        rhs = [ctx.base.add(a, b) for a, b in zip(fl.expand(ctx, x), fl.expand(ctx, y))]
        assert lhs == rhs


def test_fq_rank_examples(f4):
    assert fl.fq_rank(f4, [1, OMEGA]) == 2
    assert fl.fq_rank(f4, [OMEGA, OMEGA]) == 1
    assert fl.fq_rank(f4, [1, OMEGA, OMEGA2]) == 2


def test_bit_path_matches_generic(rng):
    ctx = field_for(2, 9)
    for _ in range(200):
        elems = [ctx.random_element(rng) for _ in range(int(rng.integers(1, 6)))]
        generic = fl.matrix_rank(ctx.base, [ctx.coeffs(x) for x in elems])
        assert fl.fq_rank(ctx, elems) == generic


def test_det_examples(f4):
    assert fl.det_ffelem(f4, [[1, 0], [0, 1]]) == 1
    assert fl.det_ffelem(f4, [[OMEGA, 1], [OMEGA, 1]]) == 0
    assert fl.det_ffelem(f4, [[1, OMEGA], [OMEGA, 1]]) == OMEGA
    with pytest.raises(ValueError):
        fl.det_ffelem(f4, [[1, 0]])


def test_det_multilinear_alternating(rng):
    ctx = field_for(3, 3)
    for _ in range(50):
        m = [[ctx.random_element(rng) for _ in range(3)] for _ in range(3)]
        d = fl.det_ffelem(ctx, m)
        swapped = [m[1], m[0], m[2]]
        assert fl.det_ffelem(ctx, swapped) == ctx.neg(d)
        c = ctx.random_element(rng)
        scaled = [[ctx.mul(c, v) for v in m[0]], m[1], m[2]]
        assert fl.det_ffelem(ctx, scaled) == ctx.mul(c, d)
        added = [m[0], [ctx.add(a, ctx.mul(c, b)) for a, b in zip(m[1], m[0])], m[2]]
        assert fl.det_ffelem(ctx, added) == d


def test_gaussian_binomial_values():
    assert fl.gaussian_binomial(2, 4, 2) == (2**4 - 1) * (2**3 - 1) // ((2**2 - 1) * (2 - 1))
    assert fl.gaussian_binomial(2, 5, 2) == 155
    assert fl.gaussian_binomial(3, 7, 2) == 99463
    assert fl.gaussian_binomial(3, 7, 3) == 925771
    assert fl.gaussian_binomial(5, 4, 0) == 1


@pytest.mark.parametrize("q,n,k", [(2, 4, 2), (2, 5, 3), (3, 3, 2), (4, 3, 1), (2, 6, 6), (3, 4, 2)])
def test_enumeration_is_canonical_and_complete(q, n, k):
    ctx = field_for(q, n)
    bases = list(fl.enumerate_subspaces(ctx, k))
    assert len(bases) == fl.gaussian_binomial(q, n, k)
    assert [b.index for b in bases] == list(range(len(bases)))
    assert len({b.vectors for b in bases}) == len(bases)
    spans = set()
    for b in bases:
        assert fl.fq_rank(ctx, b.vectors) == k
        assert fl.canonical_basis(ctx, b.vectors) == b.vectors
        assert fl.subspace_index(q, n, b.vectors) == b.index
        spans.add(frozenset(fl.span_elements(ctx, b.vectors)))
    assert len(spans) == len(bases)


def test_enumeration_slices_concatenate():
    whole = [b.vectors for b in fl.iter_subspaces(3, 4, 2)]
    pieces = []
    for start in range(0, len(whole), 7):
        pieces.extend(b.vectors for b in fl.iter_subspaces(3, 4, 2, start, 7))
    assert pieces == whole
    assert fl.subspace_at(3, 4, 2, 61).vectors == whole[61]


def test_q3_n7_k2_count():
    assert sum(1 for _ in fl.iter_subspaces(3, 7, 2)) == 99463


def test_full_space_single_basis():
    ctx = field_for(2, 5)
    assert [b.vectors for b in fl.enumerate_subspaces(ctx, 5)] == [(1, 2, 4, 8, 16)]


def test_enumeration_range_errors():
    ctx = field_for(2, 3)
    with pytest.raises(ValueError):
        list(fl.enumerate_subspaces(ctx, 0))
    with pytest.raises(ValueError):
        list(fl.enumerate_subspaces(ctx, 4))


def test_rref_idempotent_and_nullspace(rng):
    ctx = field_for(3, 1)
    F = ctx.base
    for _ in range(50):
        m = [[int(v) for v in rng.integers(0, 3, 5)] for _ in range(4)]
        red, piv = fl.rref(F, m)
        assert fl.rref(F, red) == (red, piv)
        for v in fl.nullspace(F, m, 5):
            for row in m:
                acc = 0
                for a, b in zip(row, v):
                    acc = F.add(acc, F.mul(a, b))
                assert acc == 0
        assert len(fl.nullspace(F, m, 5)) == 5 - len(piv)


def test_projective_points_count():
    ctx = field_for(2, 2)
    pts = list(fl.projective_points(ctx, 3))
    assert len(pts) == fl.count_projective(4, 3) == 21
    assert pts[0] == (1, 0, 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 80), min_size=1, max_size=5))
def test_rank_bounded(elems):
    ctx = field_for(3, 4)
    r = fl.fq_rank(ctx, elems)
    assert r <= min(len(elems), 4)
    assert fl.in_span(ctx, elems[0], elems)
