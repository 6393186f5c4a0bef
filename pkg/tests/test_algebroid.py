"""Algebroid presentations: axioms, the differential, subframes."""

import random

import pytest

from gradweil import catalog
from gradweil.algebroid import Algebroid, Chart, Subframe, tangent_algebroid
from gradweil.errors import MismatchError
from gradweil.forms import Form
from gradweil.randgen import random_form, random_structure_perturbation
from gradweil.ring import Poly

POINT = Chart(())
LINE = Chart(("x",))


@pytest.mark.parametrize(
    "name",
    [
        "sl2",
        "aff1",
        "heisenberg3",
        "aff1_plus_center",
        "two_aff1_plus_center",
        "solvable5",
        "aff1_action_line",
        "tangent_plane",
        "tangent_line",
    ],
)
def test_catalog_axioms(name):
    a = getattr(catalog, name)()
    report = a.check_axioms()
    assert report.antisymmetry_ok and report.anchor_ok and report.jacobi_ok
    assert report.failures == ()
    ok, fails = a.d_squared_check()
    assert ok and fails == ()


def test_broken_jacobi_detected():
    a = catalog.broken_jacobi()
    report = a.check_axioms()
    assert report.antisymmetry_ok and report.anchor_ok
    assert not report.jacobi_ok
    assert any(f.startswith("jacobi fails on triple") for f in report.failures)
    ok, fails = a.d_squared_check()
    assert not ok and fails


def test_broken_anchor_detected():
    # rho(e1) = d/dx, rho(e2) = 0, but [e1, e2] = e1 has nonzero anchor
    a = Algebroid.from_brackets(LINE, 2, [["1"], ["0"]], {(0, 1): ["1", "0"]})
    report = a.check_axioms()
    assert report.antisymmetry_ok and report.jacobi_ok
    assert not report.anchor_ok
    assert report.failures == ("anchor condition fails on pair (0,1)",)


def test_broken_antisymmetry_detected():
    # bypass from_brackets, which antisymmetrizes by construction
    zero = Poly.zero(())
    one = Poly.one(())
    c = [[[zero, zero], [one, zero]], [[one, zero], [zero, zero]]]
    a = Algebroid(POINT, 2, [[], []], c)
    report = a.check_axioms()
    assert not report.antisymmetry_ok
    assert any("antisymmetry fails" in f for f in report.failures)


def test_koszul_on_aff1():
    # [e1, e2] = e2, so d eps1 = 0 and d eps2 = -eps1 ^ eps2
    a = catalog.aff1()
    eps1 = Form.coframe((), 2, 0)
    eps2 = Form.coframe((), 2, 1)
    assert a.d(eps1).is_zero()
    assert a.d(eps2) == -eps1.wedge(eps2)


def test_anchor_pullback_of_coordinate():
    # action algebroid on the line: rho(e1) = d/dx, rho(e2) = x d/dx,
    # hence d(x) = eps1 + x eps2
    a = catalog.aff1_action_line()
    x = Poly.variable(("x",), 0)
    dx = a.d(Form.function(("x",), 2, x))
    expected = Form.coframe(("x",), 2, 0) + Form.coframe(("x",), 2, 1).scale(x)
    assert dx == expected


def test_d_squared_iff_axioms():
    rng = random.Random(4)
    seen_broken = 0
    for _ in range(40):
        base = catalog.sl2() if rng.random() < 0.5 else catalog.aff1()
        a = random_structure_perturbation(rng, base)
        axioms_ok = a.check_axioms().jacobi_ok and a.check_axioms().antisymmetry_ok
        d2_ok, _ = a.d_squared_check()
        assert axioms_ok == d2_ok
        if not axioms_ok:
            seen_broken += 1
    assert seen_broken > 0  # perturbations must actually exercise the failing side


def test_d_is_an_antiderivation():
    rng = random.Random(9)
    a = catalog.aff1_action_line()
    for _ in range(25):
        p = rng.randint(0, 2)
        q = rng.randint(0, 2)
        alpha = random_form(rng, a.variables, a.rank, p)
        beta = random_form(rng, a.variables, a.rank, q)
        lhs = a.d(alpha.wedge(beta))
        sign = -1 if p % 2 else 1
        rhs = a.d(alpha).wedge(beta) + alpha.wedge(a.d(beta)).scale(sign)
        assert lhs == rhs


def test_section_bracket_leibniz():
    a = catalog.aff1_action_line()
    vs = a.variables
    x = Poly.variable(vs, 0)
    one, zero = Poly.one(vs), Poly.zero(vs)
    u = [one, x]
    v = [x * x, one]
    f = x + Poly.constant(vs, 2)
    fv = [f * c for c in v]
    lhs = a.section_bracket(u, fv)
    base = a.section_bracket(u, v)
    rho_u_f = sum((u[i] * a.anchor_apply(i, f) for i in range(a.rank)),
                  zero)
    rhs = [f * base[k] + rho_u_f * v[k] for k in range(a.rank)]
    assert lhs == rhs


def test_section_bracket_antisymmetric():
    a = catalog.sl2()
    one, zero = Poly.one(()), Poly.zero(())
    u = [one, zero, one]
    v = [zero, one, one]
    assert a.section_bracket(u, v) == [-c for c in a.section_bracket(v, u)]


def test_subframe_validation():
    sub = Subframe(3, [1, 0, 1])
    assert sub.indices == (0, 1)
    assert sub.rank == 2 and sub.codim == 1
    assert sub.complement() == (2,)
    with pytest.raises(MismatchError):
        Subframe(3, [3])
    with pytest.raises(MismatchError):
        Subframe(3, [-1])


def test_subalgebroid_and_restrict():
    sl2 = catalog.sl2()
    borel = Subframe(3, [0, 1])
    assert sl2.subalgebroid_failures(borel) == []
    b = sl2.restrict(borel)
    assert b.rank == 2
    # restricted bracket keeps [h, e] = 2e
    assert [str(c) for c in b.section_bracket(
        [Poly.one(()), Poly.zero(())], [Poly.zero(()), Poly.one(())])] == ["0", "2"]
    # (e, f) spans no subalgebra: [e, f] = h sticks out
    leaks = sl2.subalgebroid_failures(Subframe(3, [1, 2]))
    assert (1, 2, 0) in leaks


def test_tangent_algebroid():
    t = tangent_algebroid(Chart(("x", "y")))
    assert t.rank == 2
    assert t.check_axioms().failures == ()
    f = Poly.parse("x^2*y", ("x", "y"))
    df = t.d(Form.function(("x", "y"), 2, f))
    expected = (Form.coframe(("x", "y"), 2, 0).scale(f.partial(0))
                + Form.coframe(("x", "y"), 2, 1).scale(f.partial(1)))
    assert df == expected
    with pytest.raises(MismatchError):
        tangent_algebroid(POINT)


def test_json_roundtrip():
    for a in (catalog.sl2(), catalog.aff1_action_line(), catalog.solvable5()):
        b = Algebroid.from_json(a.to_json())
        assert b.to_json() == a.to_json()
        assert b.structure == a.structure
        assert b.anchor == a.anchor
