"""Anchored frame presentations of Lie algebroids over polynomial charts.

An algebroid is presented by a chart (ordered variable list; empty list is
a point base), a frame rank r, an anchor matrix (row i = the coefficients
of the vector field rho(e_i) in the coordinate frame), and structure
functions: structure[i][j][k] is the e_k-coefficient of [e_i, e_j].

The axiom checker reports antisymmetry, the anchor/bracket compatibility
rho([e_i,e_j]) = [rho(e_i), rho(e_j)], and the Jacobi identity with its
anchor-derivative terms; the differential d_A is the Koszul formula

    (d_A w)(a_0..a_k) = sum_t (-1)^t rho(a_t) w(.. a_t ..)
                      + sum_{s<t} (-1)^{s+t} w([a_s,a_t], .. a_s .. a_t ..)

evaluated on ascending frame multi-indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MismatchError
from .forms import Form, sort_with_sign
from .ring import Poly


@dataclass(frozen=True)
class Chart:
    """An ordered list of distinct variable names; empty means a point."""

    variables: tuple

    def __init__(self, variables):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise MismatchError(f"repeated chart variables: {variables}")
        object.__setattr__(self, "variables", variables)

    @property
    def dim(self):
        return len(self.variables)

    def poly(self, text):
        return Poly.parse(text, self.variables)

    def zero(self):
        return Poly.zero(self.variables)

    def one(self):
        return Poly.one(self.variables)

    def var(self, index):
        return Poly.variable(self.variables, index)


@dataclass(frozen=True)
class Subframe:
    """A sorted subset of frame indices spanning a subbundle in adapted frames."""

    frame_rank: int
    indices: tuple

    def __init__(self, frame_rank, indices):
        indices = tuple(sorted(set(int(i) for i in indices)))
        if indices and (indices[0] < 0 or indices[-1] >= frame_rank):
            raise MismatchError(f"subframe indices {indices} out of range")
        object.__setattr__(self, "frame_rank", int(frame_rank))
        object.__setattr__(self, "indices", indices)

    @property
    def rank(self):
        return len(self.indices)

    @property
    def codim(self):
        return self.frame_rank - len(self.indices)

    def complement(self):
        inside = set(self.indices)
        return tuple(i for i in range(self.frame_rank) if i not in inside)


@dataclass
class AxiomReport:
    antisymmetry_ok: bool
    anchor_ok: bool
    jacobi_ok: bool
    failures: tuple = field(default_factory=tuple)

    @property
    def all_ok(self):
        return self.antisymmetry_ok and self.anchor_ok and self.jacobi_ok


class Algebroid:
    """A frame presentation; construction validates shapes, not axioms."""

    __slots__ = ("chart", "rank", "anchor", "structure", "_axiom_report")

    def __init__(self, chart, rank, anchor, structure):
        if not isinstance(chart, Chart):
            chart = Chart(chart)
        self.chart = chart
        self.rank = int(rank)
        if self.rank < 1:
            raise MismatchError("frame rank must be positive")
        variables = chart.variables
        anchor = tuple(tuple(self._as_poly(p, variables) for p in row) for row in anchor)
        if len(anchor) != self.rank or any(len(row) != chart.dim for row in anchor):
            raise MismatchError(
                f"anchor must be {self.rank} x {chart.dim}, got "
                f"{len(anchor)} x {[len(r) for r in anchor]}")
        self.anchor = anchor
        structure = tuple(
            tuple(tuple(self._as_poly(p, variables) for p in vec) for vec in row)
            for row in structure)
        if (len(structure) != self.rank
                or any(len(row) != self.rank for row in structure)
                or any(len(vec) != self.rank for row in structure for vec in row)):
            raise MismatchError("structure functions must form an r x r x r array")
        self.structure = structure
        self._axiom_report = None

    @staticmethod
    def _as_poly(p, variables):
        if isinstance(p, Poly):
            if p.variables != variables:
                raise MismatchError("polynomial variables differ from the chart")
            return p
        if isinstance(p, str):
            return Poly.parse(p, variables)
        return Poly.constant(variables, p)

    @classmethod
    def from_brackets(cls, chart, rank, anchor, brackets):
        """Build from bracket data {(i, j): coefficient list} for i < j.

        Unlisted pairs are zero; the (j, i) entries are filled by
        antisymmetry, so presentations built this way always pass the
        antisymmetry check.
        """
        if not isinstance(chart, Chart):
            chart = Chart(chart)
        zero = chart.zero()
        structure = [[[zero for _ in range(rank)] for _ in range(rank)]
                     for _ in range(rank)]
        for (i, j), coeffs in brackets.items():
            if i == j:
                raise MismatchError(f"diagonal bracket ({i},{i}) must be omitted")
            if not 0 <= i < rank or not 0 <= j < rank:
                raise MismatchError(f"bracket pair ({i},{j}) out of range")
            vec = [cls._as_poly(c, chart.variables) for c in coeffs]
            if len(vec) != rank:
                raise MismatchError(f"bracket ({i},{j}) needs {rank} coefficients")
            structure[i][j] = [structure[i][j][k] + vec[k] for k in range(rank)]
            structure[j][i] = [structure[j][i][k] - vec[k] for k in range(rank)]
        return cls(chart, rank, anchor, structure)

    # -- basic calculus -----------------------------------------------------

    @property
    def variables(self):
        return self.chart.variables

    def bracket_vector(self, i, j):
        """Coefficients of [e_i, e_j] over the frame."""
        return list(self.structure[i][j])

    def anchor_apply(self, i, poly):
        """The derivation rho(e_i) applied to a chart function."""
        out = Poly.zero(self.variables)
        for m, coeff in enumerate(self.anchor[i]):
            if not coeff.is_zero():
                out = out + coeff * poly.partial(m)
        return out

    def vector_apply(self, components, poly):
        """Derivation along a coordinate vector field given by components."""
        out = Poly.zero(self.variables)
        for m, coeff in enumerate(components):
            if not coeff.is_zero():
                out = out + coeff * poly.partial(m)
        return out

    def section_anchor_apply(self, section, poly):
        """rho(u) f for a section u given by frame components."""
        out = Poly.zero(self.variables)
        for i, u_i in enumerate(section):
            if not u_i.is_zero():
                out = out + u_i * self.anchor_apply(i, poly)
        return out

    def vector_field_bracket(self, x, y):
        """Coordinate bracket of two vector fields given by component lists."""
        n = self.chart.dim
        out = []
        for m in range(n):
            acc = Poly.zero(self.variables)
            for p in range(n):
                acc = acc + x[p] * y[m].partial(p) - y[p] * x[m].partial(p)
            out.append(acc)
        return out

    def section_bracket(self, u, v):
        """Full Leibniz bracket of sections given by frame component lists."""
        zero = Poly.zero(self.variables)
        out = [zero for _ in range(self.rank)]
        for i, u_i in enumerate(u):
            if u_i.is_zero():
                continue
            for j, v_j in enumerate(v):
                if v_j.is_zero():
                    continue
                coeff = u_i * v_j
                for k, c in enumerate(self.structure[i][j]):
                    if not c.is_zero():
                        out[k] = out[k] + coeff * c
        for k in range(self.rank):
            out[k] = out[k] + self.section_anchor_apply(u, v[k]) \
                            - self.section_anchor_apply(v, u[k])
        return out

    # -- axioms ---------------------------------------------------------------

    def check_axioms(self):
        """Antisymmetry, anchor compatibility, Jacobi; returns an AxiomReport."""
        failures = []
        anti_ok = True
        for i in range(self.rank):
            for j in range(i, self.rank):
                for k in range(self.rank):
                    lhs = self.structure[i][j][k]
                    rhs = -self.structure[j][i][k]
                    if lhs != rhs:
                        anti_ok = False
                        failures.append(f"antisymmetry fails at c[{k}][{i}][{j}]")
        anchor_ok = True
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                lhs = [Poly.zero(self.variables) for _ in range(self.chart.dim)]
                for k, c in enumerate(self.structure[i][j]):
                    if not c.is_zero():
                        for m in range(self.chart.dim):
                            lhs[m] = lhs[m] + c * self.anchor[k][m]
                rhs = self.vector_field_bracket(self.anchor[i], self.anchor[j])
                if lhs != rhs:
                    anchor_ok = False
                    failures.append(f"anchor condition fails on pair ({i},{j})")
        jacobi_ok = True
        basis = [[Poly.constant(self.variables, 1 if a == b else 0)
                  for b in range(self.rank)] for a in range(self.rank)]
        for i, j, k in itertools.combinations(range(self.rank), 3):
            jacobiator = [Poly.zero(self.variables) for _ in range(self.rank)]
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                inner = self.section_bracket(basis[b], basis[c])
                term = self.section_bracket(basis[a], inner)
                jacobiator = [x + y for x, y in zip(jacobiator, term)]
            if any(not p.is_zero() for p in jacobiator):
                jacobi_ok = False
                failures.append(f"jacobi fails on triple ({i},{j},{k})")
        report = AxiomReport(anti_ok, anchor_ok, jacobi_ok, tuple(failures))
        self._axiom_report = report
        return report

    @property
    def is_validated(self):
        return self._axiom_report is not None and self._axiom_report.all_ok

    # -- differential -----------------------------------------------------------

    def d(self, form):
        """Koszul differential on scalar forms over this frame."""
        if form.frame_rank != self.rank or form.variables != self.variables:
            raise MismatchError("form does not live over this algebroid's frame")
        if form.fiber_dim != 1:
            raise MismatchError("d_A acts on scalar forms; use a connection "
                                "differential for bundle-valued forms")
        k = form.degree
        coeffs = {}
        for out_idx in itertools.combinations(range(self.rank), k + 1):
            acc = Poly.zero(self.variables)
            for t in range(k + 1):
                rest = out_idx[:t] + out_idx[t + 1:]
                val = form.get(rest)
                if not val.is_zero():
                    term = self.anchor_apply(out_idx[t], val)
                    acc = acc + (term if t % 2 == 0 else -term)
            for s in range(k + 1):
                for t in range(s + 1, k + 1):
                    rest = tuple(x for idx, x in enumerate(out_idx)
                                 if idx != s and idx != t)
                    sign_st = -1 if (s + t) % 2 else 1
                    for m, c in enumerate(self.structure[out_idx[s]][out_idx[t]]):
                        if c.is_zero():
                            continue
                        sgn, mi = sort_with_sign((m,) + rest)
                        if sgn == 0:
                            continue
                        val = form.get(mi)
                        if val.is_zero():
                            continue
                        term = c * val
                        if sign_st * sgn == -1:
                            term = -term
                        acc = acc + term
            if not acc.is_zero():
                coeffs[(out_idx, 0)] = acc
        return Form(self.variables, self.rank, k + 1, 1, coeffs)

    def coframe(self, index):
        return Form.coframe(self.variables, self.rank, index)

    def function_form(self, poly):
        return Form.function(self.variables, self.rank, poly)

    def d_squared_check(self):
        """d_A^2 on every chart coordinate and coframe generator.

        Returns (ok, failures); over a valid algebroid this is a theorem,
        so a failure here flags broken structure data.
        """
        failures = []
        for m in range(self.chart.dim):
            w = self.function_form(self.chart.var(m))
            if not self.d(self.d(w)).is_zero():
                failures.append(f"d^2 x_{m} != 0")
        for i in range(self.rank):
            if not self.d(self.d(self.coframe(i))).is_zero():
                failures.append(f"d^2 eps_{i} != 0")
        return not failures, tuple(failures)

    # -- anchor pullback -----------------------------------------------------------

    def rho_pullback(self, form):
        """Pull a coordinate-frame form back through the anchor.

        (rho^* w)(e_{i_1}..e_{i_s}) = w(rho e_{i_1}.. rho e_{i_s}); on
        ascending indices the coefficient is a sum of anchor minors times
        the coordinate coefficients.
        """
        if form.frame_rank != self.chart.dim or form.variables != self.variables:
            raise MismatchError("pullback input must be a coordinate-frame form")
        if form.fiber_dim != 1:
            raise MismatchError("pullback acts on scalar forms")
        s = form.degree
        coeffs = {}
        for out_idx in itertools.combinations(range(self.rank), s):
            acc = Poly.zero(self.variables)
            for (mi, _), val in form.coeffs.items():
                minor = self._anchor_minor(out_idx, mi)
                if not minor.is_zero():
                    acc = acc + minor * val
            if not acc.is_zero():
                coeffs[(out_idx, 0)] = acc
        return Form(self.variables, self.rank, s, 1, coeffs)

    def _anchor_minor(self, rows, cols):
        """det of the anchor submatrix anchor[rows][cols], exact expansion."""
        size = len(rows)
        acc = Poly.zero(self.variables)
        for perm in itertools.permutations(range(size)):
            sgn, _ = sort_with_sign(perm)
            prod = Poly.one(self.variables)
            for a in range(size):
                prod = prod * self.anchor[rows[a]][cols[perm[a]]]
                if prod.is_zero():
                    break
            acc = acc + (prod if sgn == 1 else -prod)
        return acc

    # -- subframes --------------------------------------------------------------

    def subalgebroid_failures(self, subframe):
        """Bracket-closure violations of a subframe: list of (i, j, k) triples."""
        inside = set(subframe.indices)
        bad = []
        for i in subframe.indices:
            for j in subframe.indices:
                for k in range(self.rank):
                    if k not in inside and not self.structure[i][j][k].is_zero():
                        bad.append((i, j, k))
        return bad

    def restrict(self, subframe):
        """The algebroid structure induced on a bracket-closed subframe."""
        bad = self.subalgebroid_failures(subframe)
        if bad:
            i, j, k = bad[0]
            raise MismatchError(
                f"subframe is not bracket closed: [e_{i}, e_{j}] has an "
                f"e_{k} component outside the subframe")
        idx = subframe.indices
        anchor = tuple(self.anchor[i] for i in idx)
        structure = tuple(
            tuple(tuple(self.structure[i][j][k] for k in idx) for j in idx)
            for i in idx)
        return Algebroid(self.chart, len(idx), anchor, structure)

    # -- io -----------------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Algebroid)
                and self.chart == other.chart
                and self.rank == other.rank
                and self.anchor == other.anchor
                and self.structure == other.structure)

    def __repr__(self):
        return f"Algebroid(rank={self.rank}, chart={list(self.variables)})"

    def to_json(self):
        brackets = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                vec = self.structure[i][j]
                if any(not p.is_zero() for p in vec):
                    brackets.append({"i": i, "j": j,
                                     "coeffs": [str(p) for p in vec]})
        return {
            "chart": {"vars": list(self.variables)},
            "rank": self.rank,
            "anchor": [[str(p) for p in row] for row in self.anchor],
            "brackets": brackets,
        }

    @classmethod
    def from_json(cls, data):
        chart = Chart(data["chart"]["vars"])
        rank = data["rank"]
        anchor = [[Poly.parse(p, chart.variables) for p in row]
                  for row in data["anchor"]]
        brackets = {}
        for entry in data.get("brackets", []):
            key = (entry["i"], entry["j"])
            if key in brackets or (key[1], key[0]) in brackets:
                raise MismatchError(f"duplicate bracket pair {key}")
            brackets[key] = [Poly.parse(c, chart.variables)
                             for c in entry["coeffs"]]
        return cls.from_brackets(chart, rank, anchor, brackets)


def tangent_algebroid(chart):
    """TM of a chart: identity anchor, vanishing brackets on coordinate fields."""
    if not isinstance(chart, Chart):
        chart = Chart(chart)
    n = chart.dim
    if n == 0:
        raise MismatchError("the tangent algebroid of a point is empty; "
                            "use a positive-dimensional chart")
    anchor = tuple(
        tuple(chart.one() if i == m else chart.zero() for m in range(n))
        for i in range(n))
    zero = chart.zero()
    structure = tuple(tuple(tuple(zero for _ in range(n)) for _ in range(n))
                      for _ in range(n))
    return Algebroid(chart, n, anchor, structure)
