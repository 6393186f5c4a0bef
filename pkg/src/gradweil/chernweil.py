"""Characteristic forms and classes, exact cohomology, transgression, Massey.

Characters are graded traces of curvature powers; classes over a point base
are decided by exact rank computations on the frame cochain complex, and
over a chart base by a bounded linear solve for polynomial primitives
(status "undecided" when the bound is exhausted).

Scaled classes keep the normalization symbolic: the representative is the
unnormalized invariant polynomial of the curvature, the rational prefactor
(-1)^i comes from the (imaginary unit / 2 pi)^(2i) rescaling, and the
transcendental part stays a formal (2 pi)^(-2i) exponent so that all stored
data remains rational.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .connections import ConnectionUpToHomotopy, cuth_difference
from .errors import InternalCheckError, MismatchError, NotClosedError
from .forms import Form, TotalForm, gtr, tr
from .linalg import independent_columns, nullspace, solve
from .ring import Poly


# ----------------------------------------------------------------------
# characters


@dataclass
class CharacterForm:
    """gtr(R^i): a closed scalar form of degree 2i."""

    index: int
    form: Form
    closed: bool


def sigma_character(conn, index):
    """The degree-2i character of a connection (up to homotopy)."""
    if not isinstance(conn, ConnectionUpToHomotopy):
        conn = ConnectionUpToHomotopy.from_linear(conn)
    power = conn.curvature_power(index)
    form = gtr(power)
    closed = conn.algebroid.d(form).is_zero()
    if not closed:
        # closedness is a theorem here; failing it means broken input data
        # (an algebroid that does not satisfy its axioms) or an engine bug
        raise InternalCheckError(
            f"character gtr(R^{index}) is not closed; check the algebroid axioms")
    return CharacterForm(index, form, closed)


# ----------------------------------------------------------------------
# invariant polynomials and scaled classes


def _power_traces(curvature, up_to):
    """tr(R^j) for j = 1..up_to as scalar forms (plain trace)."""
    traces = []
    power = curvature
    for j in range(1, up_to + 1):
        traces.append(tr(power))
        if j < up_to:
            power = power.wedge(curvature)
    return traces


def invariant_polys(curvature, up_to):
    """Elementary invariant forms f_0..f_up_to of an ungraded curvature.

    Defined by det(lambda I + X) = sum_i f_i(X) lambda^(k-i) and computed
    through Newton's identities from the power traces; all arithmetic is
    exact, so f_i for i beyond the fiber rank vanishes identically.
    """
    if len(curvature.src.summands) != 1 or curvature.src != curvature.dst:
        raise MismatchError("invariant polynomials need an ungraded End-valued form")
    variables = curvature.variables
    frame_rank = curvature.frame_rank
    ones = Form.function(variables, frame_rank, Poly.one(variables))
    out = [ones]
    traces = _power_traces(curvature, up_to)
    for i in range(1, up_to + 1):
        acc = Form.zero(variables, frame_rank, 2 * i)
        for j in range(1, i + 1):
            term = out[i - j].wedge(traces[j - 1])
            if j % 2 == 0:
                term = -term
            acc = acc + term
        out.append(acc.scale(Fraction(1, i)))
    return out


def invariant_poly_f(curvature, index):
    return invariant_polys(curvature, index)[index]


@dataclass
class ScaledClass:
    """A Pontryagin class with its normalization kept symbolic.

    The honest representative is prefactor * (2 pi)^(two_pi_exponent) times
    `representative`; two classes agree iff the prefactors match and the
    representatives are cohomologous.
    """

    index: int
    representative: Form
    prefactor: Fraction
    two_pi_exponent: int


def pontryagin_class(nabla, index):
    """p^i of an ordinary connection: [f_(2i)] with the (-1)^i (2 pi)^(-2i) scale."""
    curvature = nabla.curvature()
    rep = invariant_poly_f(curvature, 2 * index)
    return ScaledClass(index, rep, Fraction(-1) ** index, -2 * index)


def total_pontryagin(nabla):
    """All p^i with a possibly nonzero representative: 4i <= frame rank."""
    out = []
    for index in range(1, nabla.algebroid.rank // 4 + 1):
        out.append(pontryagin_class(nabla, index))
    return out


def anchor_pullback_character(algebroid, base_connection, index):
    """rho^* of a coordinate-frame character: the induced-connection route.

    `base_connection` is a connection over the tangent algebroid of the
    chart; its character pulls back through the anchor to a character
    representative of the induced A-connection.
    """
    char = sigma_character(base_connection, index)
    return algebroid.rho_pullback(char.form)


# ----------------------------------------------------------------------
# cohomology over a point base


class CohomologyBasis:
    """Exact Chevalley-Eilenberg cohomology of a point-base algebroid.

    Stores, per degree, the coboundary matrices, chosen representative
    cocycles, and enough data to decompose any closed form into class
    coefficients plus an explicit primitive.
    """

    def __init__(self, algebroid):
        if algebroid.chart.dim != 0:
            raise MismatchError("exact cohomology requires a point base; "
                                "use the bounded exactness solver over charts")
        self.algebroid = algebroid
        r = algebroid.rank
        self.bases = {k: list(itertools.combinations(range(r), k))
                      for k in range(r + 2)}
        self.d_mats = {}
        for k in range(r + 1):
            rows = {mi: idx for idx, mi in enumerate(self.bases[k + 1])}
            # keep one explicit zero row at the top degree so the kernel
            # computation still sees the right number of columns
            mat = ([[Fraction(0)] * len(self.bases[k]) for _ in rows] if rows
                   else [[Fraction(0)] * len(self.bases[k])])
            for col, mi in enumerate(self.bases[k]):
                image = algebroid.d(self._basis_form(k, col))
                for (out_mi, _), poly in image.coeffs.items():
                    mat[rows[out_mi]][col] = poly.constant_value()
            self.d_mats[k] = mat
        self.rep_vectors = {}
        self.representatives = {}
        for k in range(r + 1):
            self._pick_representatives(k)

    def _basis_form(self, k, col):
        mi = self.bases[k][col]
        return Form(self.algebroid.variables, self.algebroid.rank, k, 1,
                    {(mi, 0): Poly.one(self.algebroid.variables)})

    def form_to_vector(self, form):
        return [form.get(mi).constant_value() for mi in self.bases[form.degree]]

    def vector_to_form(self, k, vec):
        coeffs = {}
        for mi, val in zip(self.bases[k], vec):
            if val:
                coeffs[(mi, 0)] = Poly.constant(self.algebroid.variables, val)
        return Form(self.algebroid.variables, self.algebroid.rank, k, 1, coeffs)

    def _pick_representatives(self, k):
        cocycles = nullspace(self.d_mats[k]) if self.bases[k] else []
        boundary_cols = []
        if k > 0 and self.bases[k - 1]:
            mat = self.d_mats[k - 1]
            boundary_cols = [[row[c] for row in mat]
                             for c in range(len(self.bases[k - 1]))]
        columns = boundary_cols + cocycles
        if not columns:
            self.rep_vectors[k] = []
            self.representatives[k] = []
            return
        stacked = [[col[r] for col in columns] for r in range(len(self.bases[k]))]
        pivots = independent_columns(stacked)
        reps = [columns[p] for p in pivots if p >= len(boundary_cols)]
        self.rep_vectors[k] = reps
        self.representatives[k] = [self.vector_to_form(k, v) for v in reps]

    def dim(self, k):
        return len(self.rep_vectors.get(k, []))

    def is_closed(self, form):
        return self.algebroid.d(form).is_zero()

    def decompose(self, form):
        """Write a closed form as sum(c_i rep_i) + d(primitive).

        Returns (coefficients, primitive Form).  Raises NotClosedError on a
        non-cocycle.
        """
        if not self.is_closed(form):
            raise NotClosedError("cannot decompose a non-closed form")
        k = form.degree
        if k > self.algebroid.rank:
            return [], Form.zero(self.algebroid.variables, self.algebroid.rank,
                                 max(k - 1, 0))
        reps = self.rep_vectors[k]
        n_prim = len(self.bases[k - 1]) if k > 0 else 0
        columns = list(reps)
        if k > 0:
            mat = self.d_mats[k - 1]
            columns += [[row[c] for row in mat] for c in range(n_prim)]
        vec = self.form_to_vector(form)
        if not columns:
            if any(vec):
                raise InternalCheckError("closed form outside the cocycle space")
            return [], Form.zero(self.algebroid.variables, self.algebroid.rank,
                                 max(k - 1, 0))
        stacked = [[col[r] for col in columns] for r in range(len(vec))]
        sol = solve(stacked, vec)
        if sol is None:
            raise InternalCheckError("closed form failed to decompose")
        coeffs = sol[:len(reps)]
        prim_vec = sol[len(reps):]
        primitive = (self.vector_to_form(k - 1, prim_vec) if k > 0
                     else Form.zero(self.algebroid.variables,
                                    self.algebroid.rank, 0))
        return coeffs, primitive

    def class_vector(self, form):
        return self.decompose(form)[0]

    def class_is_zero(self, form):
        return all(c == 0 for c in self.class_vector(form))


def ce_cohomology(algebroid):
    return CohomologyBasis(algebroid)


# ----------------------------------------------------------------------
# exactness


@dataclass
class ExactnessResult:
    status: str  # "exact" | "not_exact" | "undecided"
    primitive: Form | None

    @property
    def is_exact(self):
        return self.status == "exact"


def default_bound(algebroid, forms=()):
    """2 * (max total degree over the input data) + 2."""
    degrees = [0]
    for row in algebroid.anchor:
        degrees.extend(p.total_degree() for p in row)
    for row in algebroid.structure:
        for vec in row:
            degrees.extend(p.total_degree() for p in vec)
    for form in forms:
        if form is not None:
            degrees.extend(p.total_degree() for p in form.coeffs.values())
    return 2 * max(degrees) + 2


def _monomials(nvars, bound):
    if nvars == 0:
        yield ()
        return
    for expo in itertools.product(range(bound + 1), repeat=nvars):
        if sum(expo) <= bound:
            yield expo


def is_exact(algebroid, form, bound=None):
    """Decide exactness of a closed scalar form.

    Over a point base the answer is decisive.  Over a chart base the solver
    looks for a primitive with polynomial coefficients of total degree at
    most `bound`; failure within the bound reports "undecided" since a
    higher-degree primitive is not ruled out.
    """
    if form.fiber_dim != 1:
        raise MismatchError("exactness applies to scalar forms")
    if not algebroid.d(form).is_zero():
        raise NotClosedError("is_exact requires a closed form")
    point = algebroid.chart.dim == 0
    k = form.degree
    if k == 0:
        if form.is_zero():
            return ExactnessResult("exact", Form.zero(algebroid.variables,
                                                      algebroid.rank, 0))
        return ExactnessResult("not_exact" if point else "not_exact", None)
    if bound is None:
        bound = default_bound(algebroid, [form])
    if point:
        bound = 0
    variables = algebroid.variables
    unknowns = []
    columns = []
    row_index = {}

    def vectorize(g):
        entries = {}
        for (mi, _), poly in g.coeffs.items():
            for expo, val in poly.terms.items():
                entries[(mi, expo)] = val
        return entries

    for j_idx in itertools.combinations(range(algebroid.rank), k - 1):
        for expo in _monomials(len(variables), bound):
            candidate = Form(variables, algebroid.rank, k - 1, 1,
                             {(j_idx, 0): Poly(variables, {expo: Fraction(1)})})
            image = algebroid.d(candidate)
            if image.is_zero():
                continue
            unknowns.append((j_idx, expo))
            vec = vectorize(image)
            columns.append(vec)
            for key in vec:
                row_index.setdefault(key, len(row_index))
    rhs_entries = vectorize(form)
    for key in rhs_entries:
        row_index.setdefault(key, len(row_index))
    nrows = len(row_index)
    matrix = [[Fraction(0)] * len(unknowns) for _ in range(nrows)]
    for c, vec in enumerate(columns):
        for key, val in vec.items():
            matrix[row_index[key]][c] = val
    rhs = [Fraction(0)] * nrows
    for key, val in rhs_entries.items():
        rhs[row_index[key]] = val
    sol = solve(matrix, rhs) if nrows else [Fraction(0)] * len(unknowns)
    if sol is None:
        return ExactnessResult("not_exact" if point else "undecided", None)
    coeffs = {}
    for (j_idx, expo), val in zip(unknowns, sol):
        if val:
            key = (j_idx, 0)
            poly = Poly(variables, {expo: val})
            coeffs[key] = coeffs.get(key, Poly.zero(variables)) + poly
    primitive = Form(variables, algebroid.rank, k - 1, 1, coeffs)
    if algebroid.d(primitive) != form:
        raise InternalCheckError("exactness solver returned a bad primitive")
    return ExactnessResult("exact", primitive)


def class_status(algebroid, form, bound=None):
    """"zero" / "nonzero" / "undecided" for the class of a closed form."""
    result = is_exact(algebroid, form, bound=bound)
    if result.status == "exact":
        return "zero", result.primitive
    if result.status == "not_exact":
        return "nonzero", None
    return "undecided", None


# ----------------------------------------------------------------------
# transgression


def transgression(old, new, index):
    """A primitive T with d_A T = gtr(R_new^index) - gtr(R_old^index).

    Interpolates cal_D_t = cal_D + t hat(D) with D = cal_D' - cal_D, expands
    R_t = R + t (d_End D) + t^2 (D wedge D) as a polynomial in t with total
    form coefficients, and integrates the graded trace exactly.
    """
    if not isinstance(old, ConnectionUpToHomotopy):
        old = ConnectionUpToHomotopy.from_linear(old)
    if not isinstance(new, ConnectionUpToHomotopy):
        new = ConnectionUpToHomotopy.from_linear(new)
    if old.bundle != new.bundle or old.algebroid != new.algebroid:
        raise MismatchError("transgression needs two cuths on the same bundle")
    diff = cuth_difference(new, old)
    r_t = [old.curvature(), old.d_end(diff), diff.wedge(diff)]

    def poly_mul(a, b):
        out = [None] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                term = x.wedge(y)
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        return out

    power = [TotalForm.identity(old.variables, old.algebroid.rank, old.bundle)]
    for _ in range(index - 1):
        power = poly_mul(power, r_t)
    integrand = poly_mul(power, [diff])
    variables = old.variables
    total = Form.zero(variables, old.algebroid.rank, 2 * index - 1)
    for j, coeff in enumerate(integrand):
        piece = gtr(coeff)
        if piece.is_zero():
            continue
        total = total + piece.scale(Fraction(index, j + 1))
    return total


# ----------------------------------------------------------------------
# Massey triple products


@dataclass
class MasseyReport:
    defined: bool
    reason: str
    representative: Form | None
    primitive_ab: Form | None
    primitive_bc: Form | None
    class_vector: list | None
    indeterminacy_basis: list | None
    nonzero_mod_indeterminacy: bool | None


def massey_triple(algebroid, alpha, beta, gamma, bound=None):
    """<[alpha], [beta], [gamma]> with its indeterminacy over a point base.

    Needs alpha^beta and (-1)^|alpha| beta^gamma exact; the representative
    is w ^ gamma - alpha ^ eta for chosen primitives w, eta.  Over a point
    the class is decomposed against the cohomology basis and compared with
    the ideal ([alpha], [gamma]) in the target degree; over a chart base
    only the representative and primitives are reported.
    """
    for name, form in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not algebroid.d(form).is_zero():
            raise NotClosedError(f"{name} is not closed")
    ab = alpha.wedge(beta)
    res_ab = is_exact(algebroid, ab, bound=bound)
    if not res_ab.is_exact:
        return MasseyReport(False, f"alpha^beta is not exact ({res_ab.status})",
                            None, None, None, None, None, None)
    bc = beta.wedge(gamma)
    if alpha.degree % 2:
        bc = -bc
    res_bc = is_exact(algebroid, bc, bound=bound)
    if not res_bc.is_exact:
        return MasseyReport(False,
                            f"(-1)^|alpha| beta^gamma is not exact ({res_bc.status})",
                            None, None, None, None, None, None)
    w, eta = res_ab.primitive, res_bc.primitive
    representative = w.wedge(gamma) - alpha.wedge(eta)
    if not algebroid.d(representative).is_zero():
        raise InternalCheckError("massey representative failed its closedness check")
    if algebroid.chart.dim != 0:
        return MasseyReport(True, "chart base: representative only",
                            representative, w, eta, None, None, None)
    cohomology = CohomologyBasis(algebroid)
    target = representative.degree
    ideal_vectors = []
    for h in cohomology.representatives.get(target - alpha.degree, []):
        ideal_vectors.append(cohomology.class_vector(alpha.wedge(h)))
    for h in cohomology.representatives.get(target - gamma.degree, []):
        ideal_vectors.append(cohomology.class_vector(h.wedge(gamma)))
    dim_target = cohomology.dim(target)
    basis = []
    if ideal_vectors and dim_target:
        stacked = [[vec[r] for vec in ideal_vectors] for r in range(dim_target)]
        basis = [ideal_vectors[p] for p in independent_columns(stacked)]
    cls = cohomology.class_vector(representative)
    if basis:
        stacked = [[vec[r] for vec in basis] for r in range(dim_target)]
        in_ideal = solve(stacked, cls) is not None
    else:
        in_ideal = all(c == 0 for c in cls)
    return MasseyReport(True, "ok", representative, w, eta, cls, basis,
                        not in_ideal)
