import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hochcheck.coeff import Coefficient
from hochcheck.expr import (
    CONTRACT,
    Expr,
    RuleSet,
    StructuralError,
    E,
    Einv,
    F,
    counit,
    delta,
    evaluate_scalar_network,
    make_term,
    multiply,
    normalize,
    parse,
    reduce_term,
    render,
    u,
    v,
)

from helpers import random_expr, random_term

SUBST = RuleSet(subst=True)
ALL_RULES = [
    CONTRACT,
    SUBST,
    RuleSet(subst=True, sym=True),
    RuleSet(subst=True, sym=True, epsilon=-1),
    RuleSet(colin=True),
    RuleSet(colin=True, sym=True, epsilon=1),
]


def ex(*terms):
    return Expr.from_terms(terms)


def one_letter(k, i, j):
    return ex(make_term(1, (), [[(k, i, j)]]))


# --- normalize -------------------------------------------------------------


def test_delta_contraction():
    x = ex(make_term(1, [delta("i", "j")], [[v("j", "k")]], summed="j"))
    assert normalize(x) == one_letter("v", "i", "k")


def test_antipode_contraction_both_orders():
    for word in ([u("i", "k"), v("k", "j")], [v("i", "k"), u("k", "j")]):
        x = ex(make_term(1, (), [word], summed="k"))
        assert normalize(x) == ex(make_term(1, [delta("i", "j")]))


def test_antipode_needs_adjacency():
    x = ex(make_term(1, (), [[u("i", "k"), v("a", "b"), v("k", "j")]], summed="k"))
    assert normalize(x) == x


def test_antipode_not_across_factors():
    x = Expr.from_terms([make_term(1, (), [[u("i", "k")], [v("k", "j")]], summed="k")])
    assert normalize(x) == x


def test_substitution_rule():
    got = normalize(one_letter("u", "i", "j"), SUBST)
    want = ex(make_term(1, [Einv("i", "k"), E("l", "j")], [[v("l", "k")]], summed="kl"))
    assert got == want


def test_form_contraction():
    x = ex(make_term(1, [E("i", "k"), Einv("k", "j")], summed="k"))
    assert normalize(x) == ex(make_term(1, [delta("i", "j")]))
    y = ex(make_term(1, [Einv("i", "k"), E("k", "j")], summed="k"))
    assert normalize(y) == ex(make_term(1, [delta("i", "j")]))


def test_form_contraction_with_symmetry_flips_sign():
    x = ex(make_term(1, [E("k", "i"), Einv("k", "j")], summed="k"))
    assert normalize(x) == x  # no contraction without SYM
    got = normalize(x, RuleSet(sym=True, epsilon=-1))
    assert got == ex(make_term(-1, [delta("i", "j")]))
    generic = normalize(x, RuleSet(subst=True, sym=True))
    assert generic == ex(make_term(Coefficient.eps(), [delta("i", "j")]))


def test_closed_loop_is_N():
    x = ex(make_term(1, [delta("i", "j"), delta("j", "i")], summed="ij"))
    assert normalize(x) == Expr.one(Coefficient.N())


def test_concrete_deltas():
    assert normalize(ex(make_term(1, [delta("1", "2")]))).is_zero()
    assert normalize(ex(make_term(5, [delta("2", "2")]))) == Expr.one(5)


def test_colinearity_rule():
    x = ex(make_term(1, [E("i", "r")], [[v("i", "j"), v("r", "s")]], summed="ir"))
    assert normalize(x, RuleSet(colin=True)) == ex(make_term(1, [E("j", "s")]))
    assert normalize(x) == x


def test_malformed_indices_rejected():
    with pytest.raises(StructuralError):
        normalize(ex(make_term(1, (), [[v(0, 0), v(0, 1)]])))
    with pytest.raises(StructuralError):
        Expr.from_terms([make_term(1, [delta("i", "j")], summed="ijk")])


def test_sym_needs_subst_or_binding():
    with pytest.raises(ValueError):
        RuleSet(sym=True)


def test_canonical_dummy_naming_independent_of_input_names():
    a = make_term(1, [F(1, "x", "y"), F(2, "y", "z"), F(3, "z", "x")], summed="xyz")
    b = make_term(1, [F(3, "q", "p"), F(1, "p", "r"), F(2, "r", "q")], summed="pqr")
    assert ex(a) == ex(b)
    assert ex(a) - ex(b) == Expr.zero()


def test_idempotence_1000_random_terms():
    rng = random.Random(1234)
    for n in range(1000):
        x = Expr.from_terms([random_term(rng, degree=rng.randint(0, 2))])
        rules = ALL_RULES[n % len(ALL_RULES)]
        once = normalize(x, rules)
        assert normalize(once, rules) == once


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_termination_step_bound(seed):
    rng = random.Random(seed)
    t = random_term(rng, degree=rng.randint(0, 3), max_motifs=6)
    size = len(t.scalars) + sum(len(w) for w in t.factors)
    for rules in ALL_RULES:
        _, steps = reduce_term(t, rules)
        assert steps <= 4 * size + 1


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_ring_compatibility(seed):
    rng = random.Random(seed)
    x = random_expr(rng, max_motifs=3)
    y = random_expr(rng, max_motifs=3)
    assert normalize(multiply(x, y)) == normalize(multiply(normalize(x), normalize(y)))


# --- multiply / counit -----------------------------------------------------


def test_multiply_unit_law():
    rng = random.Random(7)
    for _ in range(50):
        x = random_expr(rng)
        assert multiply(Expr.one(), x) == normalize(x)
        assert multiply(x, Expr.one()) == normalize(x)


def test_multiply_with_declared_contraction():
    x = one_letter("v", "i", "k")
    y = one_letter("u", "k", "j")
    assert multiply(x, y, summed="k") == ex(make_term(1, [delta("i", "j")]))


def test_multiply_free_product():
    got = multiply(one_letter("v", "i", "j"), one_letter("v", "k", "l"))
    assert got == ex(make_term(1, (), [[v("i", "j"), v("k", "l")]]))


def test_multiply_renames_dummies_apart():
    x = ex(make_term(1, [F(1, "p", "p")], summed="p"))
    got = multiply(x, x)
    assert got == ex(make_term(1, [F(1, "p", "p"), F(1, "q", "q")], summed="pq"))


def test_counit_letters():
    assert counit(one_letter("v", "i", "j")) == ex(make_term(1, [delta("i", "j")]))
    assert counit(one_letter("u", "i", "j")) == ex(make_term(1, [delta("i", "j")]))
    x = ex(make_term(1, (), [[v("i", "k"), u("k", "j")]], summed="k"))
    assert counit(x) == counit(normalize(x)) == ex(make_term(1, [delta("i", "j")]))


def test_counit_of_antipode_oracle():
    # counit(u) solves counit(sum_k u_ik v_kj) = delta_ij; at N=2 the only
    # solution matrix X with X @ I = I is I itself
    for N in (2, 3):
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                val = evaluate_scalar_network(counit(one_letter("u", str(i), str(j))), {}, N)
                assert val == (1 if i == j else 0)


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_counit_multiplicative_on_ground_values(seed):
    rng = random.Random(seed)
    N = 3
    x = random_expr(rng, closed=True, letters_only=False, scalar_kinds=("d", "F1", "F2"))
    y = random_expr(rng, closed=True, letters_only=False, scalar_kinds=("d", "F1", "F2"))
    binds = {
        "F1": [[Fraction(rng.randint(-3, 3)) for _ in range(N)] for _ in range(N)],
        "F2": [[Fraction(rng.randint(-3, 3)) for _ in range(N)] for _ in range(N)],
        "E": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        "Einv": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    }
    ev = lambda z: evaluate_scalar_network(counit(z), binds, N)
    assert ev(multiply(x, y)) == ev(x) * ev(y)


# --- evaluation --------------------------------------------------------------


def test_trace_of_identity():
    x = ex(make_term(1, [delta("i", "j"), delta("j", "i")], summed="ij"))
    assert evaluate_scalar_network(x, {}, 3) == 3


def test_trace_of_so3_triple_product():
    Lx = [[0, 0, 0], [0, 0, -1], [0, 1, 0]]
    Ly = [[0, 0, 1], [0, 0, 0], [-1, 0, 0]]
    Lz = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
    x = ex(make_term(1, [F(1, "j", "k"), F(2, "k", "n"), F(3, "n", "j")], summed="jkn"))
    # oracle: plain matrix product
    direct = np.trace(np.array(Lx) @ np.array(Ly) @ np.array(Lz))
    assert direct == -1
    assert evaluate_scalar_network(x, {"F1": Lx, "F2": Ly, "F3": Lz}, 3) == -1


def test_trace_E_Einv():
    x = ex(make_term(1, [E("i", "j"), Einv("j", "i")], summed="ij"))
    Em = [[2, 1], [1, 1]]
    Ei = [[1, -1], [-1, 2]]
    assert evaluate_scalar_network(x, {"E": Em, "Einv": Ei}, 2) == 2
    assert normalize(x) == Expr.one(Coefficient.N())


def test_evaluation_errors():
    x = ex(make_term(1, [F(1, "i", "i")], summed="i"))
    with pytest.raises(ValueError, match="no binding"):
        evaluate_scalar_network(x, {}, 2)
    with pytest.raises(ValueError, match="free index"):
        evaluate_scalar_network(ex(make_term(1, [F(1, "i", "j")])), {"F1": [[1, 0], [0, 1]]}, 2)
    with pytest.raises(ValueError, match="shape"):
        evaluate_scalar_network(x, {"F1": [[1, 0], [0, 1]]}, 3)
    with pytest.raises(ValueError, match="inverse"):
        evaluate_scalar_network(x, {"F1": [[1, 0], [0, 1]], "E": [[2, 0], [0, 1]],
                                    "Einv": [[1, 0], [0, 1]]}, 2)
    with pytest.raises(StructuralError):
        evaluate_scalar_network(one_letter("v", "1", "1"), {}, 2)


def test_loop_substitution_matches_direct_sum():
    # sum_i d_ii F1_jj evaluated symbolically (N * tr F1) and by einsum
    x = ex(make_term(1, [delta("i", "i"), F(1, "j", "j")], summed="ij"))
    Fm = [[1, 2, 0], [0, 3, 0], [5, 0, -1]]
    assert evaluate_scalar_network(x, {"F1": Fm}, 3) == 9
    assert evaluate_scalar_network(normalize(x), {"F1": Fm}, 3) == 9


# --- text format -------------------------------------------------------------


def test_render_grammar():
    x = Expr.from_terms([make_term(-2, [E("i", "r"), Einv("s", "j")],
                                   [[], [v("i", "j")], [v("r", "s")]], summed="ijrs")])
    assert render(x) == "sum{_0,_1,_2,_3} (-2) * E[_0,_2] * Einv[_3,_1] * 1 | v[_0,_1] | v[_2,_3]"
    assert render(Expr.zero()) == "0"


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_parse_render_round_trip(seed):
    rng = random.Random(seed)
    deg = rng.randint(0, 3)
    x = random_expr(rng, degree=deg)
    assert parse(render(x), degree=deg) == x


def test_parse_coefficients_with_symbols():
    x = parse("(2*N - eps) * d[a,b] * 1")
    assert x == ex(make_term(2 * Coefficient.N() - Coefficient.eps(), [delta("a", "b")]))
