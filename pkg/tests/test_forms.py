"""Forms and total forms: shuffles, wedge, the hat action, graded trace."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from gradweil.errors import MismatchError
from gradweil.forms import (
    Form,
    GradedBundle,
    TotalForm,
    extend_form,
    extend_total_form,
    graded_commutator,
    gtr,
    hat_roundtrip,
    ideal_membership,
    merge_indices,
    render_form,
    restrict_form,
    restrict_total_form,
    shuffles,
    sort_with_sign,
    tr,
)
from gradweil.randgen import random_form, random_total_form
from gradweil.ring import Poly

VS = ("x",)


def permutation_sign(perm):
    sign = 1
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            sign = -sign
    return sign


def test_sort_with_sign_against_brute_parity():
    rng = random.Random(2)
    for _ in range(50):
        n = rng.randint(0, 5)
        perm = list(range(n))
        rng.shuffle(perm)
        sign, sorted_tuple = sort_with_sign(tuple(perm))
        assert sorted_tuple == tuple(range(n))
        assert sign == permutation_sign(perm)
    assert sort_with_sign((1, 1)) == (0, None)
    assert sort_with_sign(()) == (1, ())


def test_merge_indices_oracle():
    assert merge_indices((0, 2), (1,)) == (-1, (0, 1, 2))
    assert merge_indices((0,), (0,)) == (0, None)
    rng = random.Random(6)
    for _ in range(50):
        pool = rng.sample(range(8), rng.randint(0, 6))
        cut = rng.randint(0, len(pool))
        left = tuple(sorted(pool[:cut]))
        right = tuple(sorted(pool[cut:]))
        sign, merged = merge_indices(left, right)
        expected_sign, expected_sorted = sort_with_sign(left + right)
        assert merged == expected_sorted and sign == expected_sign


def test_shuffles_count_and_signs():
    for l, s in [(0, 0), (1, 2), (2, 2), (3, 1)]:
        out = list(shuffles(l, s))
        assert len(out) == math.comb(l + s, l)
        for (left, right), sign in out:
            assert len(left) == l and len(right) == s
            assert sorted(left + right) == list(range(l + s))
            assert sign == permutation_sign(list(left + right))


def brute_wedge(alpha, beta):
    """Independent wedge: sum over shuffles of evaluations, no index merging."""
    if alpha.fiber_dim != 1:
        raise AssertionError("oracle only handles scalar left factor")
    p, q = alpha.degree, beta.degree
    out = Form.zero(alpha.variables, alpha.frame_rank, p + q, beta.fiber_dim)
    coeffs = {}
    for mi in itertools.combinations(range(alpha.frame_rank), p + q):
        for (left, right), sign in shuffles(p, q):
            a = alpha.get(tuple(mi[i] for i in left))
            for fib in range(beta.fiber_dim):
                b = beta.get(tuple(mi[i] for i in right), fib)
                term = a * b
                if term.is_zero():
                    continue
                key = (mi, fib)
                acc = coeffs.get(key, Poly.zero(alpha.variables)) + (
                    -term if sign == -1 else term
                )
                coeffs[key] = acc
    return Form(alpha.variables, alpha.frame_rank, p + q, beta.fiber_dim, coeffs) + out


def test_wedge_matches_shuffle_sum():
    rng = random.Random(13)
    for _ in range(40):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        fib = rng.randint(1, 2)
        alpha = random_form(rng, VS, 4, p)
        beta = random_form(rng, VS, 4, q, fiber_dim=fib)
        assert alpha.wedge(beta) == brute_wedge(alpha, beta)


def test_scalar_wedge_graded_commutative_and_associative():
    rng = random.Random(21)
    for _ in range(30):
        p, q, r = rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2)
        a = random_form(rng, VS, 4, p)
        b = random_form(rng, VS, 4, q)
        c = random_form(rng, VS, 4, r)
        sign = -1 if (p * q) % 2 else 1
        assert a.wedge(b) == b.wedge(a).scale(sign)
        assert a.wedge(b.wedge(c)) == a.wedge(b).wedge(c)


def test_wedge_with_duplicate_index_dies():
    eps1 = Form.coframe(VS, 2, 0)
    assert eps1.wedge(eps1).is_zero()


# --- the hat action -------------------------------------------------------

UNGRADED = GradedBundle([(0, 1)])
TWO_TERM = GradedBundle([(0, 1), (1, 1)])


def test_hat_worked_example():
    # K = eps1 (x) id on a trivial line bundle, omega = eps2 (x) e:
    # hat(K)(omega) = (eps1 ^ eps2) (x) e, no extra sign on an End-block
    one = Poly.one(VS)
    K = TotalForm.single_block(VS, 2, UNGRADED, UNGRADED, (1, 0, 0),
                               {(0,): [[one]]})
    omega = Form(VS, 2, 1, 1, {((1,), 0): one})
    out = K.apply_part(omega, 0)
    assert out.parts == {(2, 0): Form(VS, 2, 2, 1, {((0, 1), 0): one})}


def test_hat_koszul_sign_on_shifting_block():
    # a 0-form block E_0 -> E_1 anticommutes past odd-degree forms:
    # hat picks up (-1)^{(j-l) t} with j - l = 1
    one = Poly.one(VS)
    K = TotalForm.single_block(VS, 2, TWO_TERM, TWO_TERM, (0, 0, 1),
                               {(): [[one]]})
    omega1 = Form(VS, 2, 1, 1, {((0,), 0): one})
    out = K.apply_part(omega1, 0)
    assert out.parts == {(1, 1): omega1.scale(-1)}
    omega2 = Form(VS, 2, 2, 1, {((0, 1), 0): one})
    assert K.apply_part(omega2, 0).parts == {(2, 1): omega2}


def test_wedge_is_operator_composition():
    rng = random.Random(5)
    E = GradedBundle([(0, 2), (1, 1), (2, 1)])
    for _ in range(40):
        K1 = random_total_form(rng, VS, 3, E, rng.choice([-1, 0, 1, 2]))
        K2 = random_total_form(rng, VS, 3, E, rng.choice([-1, 0, 1, 2]))
        W = K1.wedge(K2)
        l = rng.choice(E.degrees())
        omega = random_form(rng, VS, 3, rng.randint(0, 2),
                            fiber_dim=E.rank(l))
        lhs = W.apply_part(omega, l)
        rhs = K1.apply(K2.apply_part(omega, l))
        assert (lhs + rhs.scale(-1)).is_zero()


def test_hat_roundtrip_random():
    rng = random.Random(17)
    E = GradedBundle([(0, 2), (1, 1)])
    for _ in range(20):
        K = random_total_form(rng, VS, 3, E, rng.choice([-1, 0, 1, 2]))
        assert hat_roundtrip(K)


def test_total_wedge_associative():
    rng = random.Random(23)
    E = GradedBundle([(0, 1), (1, 1)])
    for _ in range(20):
        K1 = random_total_form(rng, VS, 2, E, rng.choice([0, 1]))
        K2 = random_total_form(rng, VS, 2, E, rng.choice([-1, 0, 1]))
        K3 = random_total_form(rng, VS, 2, E, rng.choice([0, 1]))
        lhs = K1.wedge(K2.wedge(K3))
        rhs = K1.wedge(K2).wedge(K3)
        assert (lhs + rhs.scale(-1)).is_zero()


# --- graded trace ---------------------------------------------------------


def test_gtr_sign_per_summand():
    one = Poly.one(())
    for l in range(3):
        E = GradedBundle([(l, 2)])
        K = TotalForm.identity((), 2, E)
        value = gtr(K)
        expected = Fraction(2) if l % 2 == 0 else Fraction(-2)
        assert value.get(()).constant_value() == expected
        assert tr(K).get(()).constant_value() == 2


def test_graded_commutator_two_term():
    one = Poly.one(())
    K1 = TotalForm.single_block((), 2, TWO_TERM, TWO_TERM, (0, 0, 1),
                                {(): [[one]]})
    K2 = TotalForm.single_block((), 2, TWO_TERM, TWO_TERM, (0, 1, 0),
                                {(): [[one]]})
    # degrees +1 and -1, so [K1, K2] = K1 K2 + K2 K1 = id_E1 + id_E0
    comm = graded_commutator(K1, K2)
    assert comm.blocks == TotalForm.identity((), 2, TWO_TERM).blocks
    assert gtr(comm).is_zero()
    assert tr(comm).get(()).constant_value() == 2


def test_gtr_kills_graded_commutators():
    rng = random.Random(31)
    E = GradedBundle([(0, 2), (1, 1), (2, 2)])
    for _ in range(25):
        K1 = random_total_form(rng, VS, 3, E, rng.choice([-1, 0, 1, 2]))
        K2 = random_total_form(rng, VS, 3, E, rng.choice([-1, 0, 1, 2]))
        assert gtr(graded_commutator(K1, K2)).is_zero()


# --- ideals, restriction, extension ---------------------------------------


def test_ideal_membership():
    one = Poly.one(())
    w = Form((), 3, 2, 1, {((0, 1), 0): one})
    # annihilator of span(e1): eps2 and eps3 generate; eps1^eps2 has one
    # factor outside the subframe
    assert ideal_membership(w, (0,), 1)
    assert not ideal_membership(w, (0,), 2)
    assert ideal_membership(w, (), 2)
    assert not ideal_membership(w, (0, 1), 1)
    assert ideal_membership(Form.zero((), 3, 2), (0,), 5)


def test_restrict_extend_form_roundtrip():
    rng = random.Random(41)
    for _ in range(20):
        inner = random_form(rng, VS, 2, rng.randint(0, 2), fiber_dim=2)
        ext = extend_form(inner, (0, 2), 4)
        back = restrict_form(ext, (0, 2))
        assert back == inner
        # extension never uses complement indices
        assert ideal_membership(ext, (1, 3), 0)
        assert all(set(mi) <= {0, 2} for mi in ext.multi_indices())


def test_restrict_extend_total_form_roundtrip():
    rng = random.Random(43)
    E = GradedBundle([(0, 1), (1, 2)])
    for _ in range(20):
        K = random_total_form(rng, VS, 2, E, rng.choice([0, 1]))
        ext = extend_total_form(K, (1, 2), 4)
        back = restrict_total_form(ext, (1, 2))
        assert (back + K.scale(-1)).is_zero()


def test_form_json_roundtrip():
    rng = random.Random(47)
    for _ in range(15):
        f = random_form(rng, VS, 3, rng.randint(0, 3), fiber_dim=2)
        g = Form.from_json(f.to_json(), VS, 3, fiber_dim=2)
        assert g == f


def test_total_form_json_roundtrip():
    rng = random.Random(53)
    E = GradedBundle([(0, 2), (1, 1)])
    for _ in range(15):
        K = random_total_form(rng, VS, 3, E, rng.choice([-1, 0, 1, 2]))
        L = TotalForm.from_json(K.to_json(), VS, 3, E, E)
        assert (L + K.scale(-1)).is_zero()
        assert L.to_json() == K.to_json()


def test_render_form_one_based():
    one = Poly.one(VS)
    x = Poly.variable(VS, 0)
    f = Form(VS, 3, 2, 1, {((0, 2), 0): x})
    assert render_form(f) == "x*eps1^eps3"
    assert render_form(Form.zero(VS, 3, 1)) == "0"
    vec = Form(VS, 3, 1, 2, {((1,), 1): one})
    assert render_form(vec) == "1*eps2(x)f2"


def test_degree_mismatch_rejected():
    one = Poly.one(VS)
    with pytest.raises(MismatchError):
        TotalForm(VS, 2, TWO_TERM, TWO_TERM, 1, {(0, 0, 0): {(): [[one]]}})
    with pytest.raises(MismatchError):
        Form(VS, 2, 1, 1, {((0, 1), 0): one})
