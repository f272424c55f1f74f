import pytest

from moorexp.gf_tower import field_for
from moorexp.moore import moore_det
from moorexp.poly_sparse import (InexactDivision, SparsePoly, TermBudgetExceeded, base_field,
                                 divexact, eval_poly, format_poly, gradient, moore_G,
                                 parse_poly, partial_derivative, sym_moore_poly)


def P(text, q=2, nvars=2):
    return parse_poly(text, q, nvars)


def test_sym_moore_examples():
    assert sym_moore_poly(2, 2, [0, 1]) == P("X1*X2^2+X1^2*X2")
    assert sym_moore_poly(2, 2, [0, 2]) == P("X1*X2^4+X1^4*X2")
    assert sym_moore_poly(3, 3, [0, 1, 1]).is_zero()
    f = sym_moore_poly(3, 3, [0, 1, 3])
    assert f.is_homogeneous() and f.degree == 1 + 3 + 27 and len(f) == 6
    with pytest.raises(TermBudgetExceeded):
        sym_moore_poly(2, 4, [0, 1, 2, 3], budget=10)


def test_divexact_examples():
    F, G = sym_moore_poly(2, 2, [0, 2]), moore_G(2, 2)
    assert divexact(F, G) == P("X1^2+X1*X2+X2^2")
    assert divexact(G, G) == SparsePoly.constant(base_field(2), 2)
    G3 = moore_G(2, 3)
    x1 = SparsePoly.var(base_field(2), 3, 0)
    x2 = SparsePoly.var(base_field(2), 3, 1)
    with pytest.raises(InexactDivision):
        divexact(G3 * (x1 + x2) + x1, G3)
    with pytest.raises(ZeroDivisionError):
        divexact(G3, SparsePoly.zero(base_field(2), 3))


@pytest.mark.parametrize("q", [2, 3])
def test_moore_g_divides_everything(q):
    import itertools
    for k in (2, 3):
        G = moore_G(q, k)
        for rest in itertools.combinations(range(1, 5 if q == 3 else 7), k - 1):
            F = sym_moore_poly(q, k, (0,) + rest)
            assert divexact(F, G) * G == F


def test_factorization_chain():
    # G_3 | H_2 | F_{0,2,4}
    F = sym_moore_poly(2, 3, [0, 2, 4])
    H = sym_moore_poly(2, 3, [0, 2, 4])
    H2 = sym_moore_poly(2, 3, [0, 2, 4])
    assert divexact(F, H) == SparsePoly.constant(base_field(2), 3)
    F = sym_moore_poly(2, 3, [0, 2, 6])
    Hd = sym_moore_poly(2, 3, [0, 2, 4])
    G = moore_G(2, 3)
    assert divexact(F, Hd) * divexact(Hd, G) * G == F
    assert H2 == H


def test_derivatives():
    assert partial_derivative(P("X1^2+X1*X2+X2^2"), 0) == P("X2")
    assert partial_derivative(P("X1^3", q=3, nvars=1), 0).is_zero()
    assert partial_derivative(P("X1^4", nvars=1), 0).is_zero()
    assert partial_derivative(sym_moore_poly(2, 2, [0, 1]), 1) == P("X1^2")
    assert partial_derivative(P("2*X1^2", q=3, nvars=1), 0) == P("X1", q=3, nvars=1)
    assert len(gradient(moore_G(2, 3))) == 3
    with pytest.raises(ValueError):
        partial_derivative(P("X1"), 2)


def test_eval(rng):
    ctx = field_for(3, 4)
    F = sym_moore_poly(3, 3, [0, 1, 3])
    G = moore_G(3, 3)
    H = divexact(F, G)
    assert eval_poly(ctx, F, (0, 0, 0)) == 0
    for _ in range(100):
        A = tuple(ctx.random_element(rng) for _ in range(3))
        assert eval_poly(ctx, F, A) == moore_det(ctx, A, (0, 1, 3))
        g = eval_poly(ctx, G, A)
        if g:
            assert ctx.mul(eval_poly(ctx, H, A), g) == eval_poly(ctx, F, A)
    with pytest.raises(ValueError):
        eval_poly(ctx, F, (1, 2))


def test_text_round_trip():
    f = divexact(sym_moore_poly(3, 3, [0, 1, 3]), moore_G(3, 3))
    assert parse_poly(format_poly(f), 3, 3) == f
    assert format_poly(P("X2^2+X1^2+X1*X2")) == "1*X1^2+1*X1^1*X2^1+1*X2^2"
    assert format_poly(SparsePoly.zero(base_field(2), 2)) == "0"
    with pytest.raises(ValueError):
        parse_poly("3*X1", 3, 1)
    with pytest.raises(ValueError):
        parse_poly("X3", 2, 2)
    with pytest.raises(ValueError):
        parse_poly("Y1", 2, 2)


def test_ring_mismatch():
    with pytest.raises(ValueError):
        moore_G(2, 2) + moore_G(3, 2)
    with pytest.raises(ValueError):
        SparsePoly(base_field(2), 2, {(1,): 1})
