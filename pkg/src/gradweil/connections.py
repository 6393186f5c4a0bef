"""Linear connections and connections up to homotopy over an algebroid frame.

A `LinearConnection` stores Christoffel data: nabla_{e_i} f_alpha =
sum_beta Gamma[i][alpha][beta] f_beta.  Internally the per-frame matrices
are kept target-major (G_i[beta][alpha] = that coefficient) so that a
covariant derivative acts on coefficient vectors as rho_i + G_i.

A `ConnectionUpToHomotopy` is a family of grading-preserving connections
(one per summand) plus a total-degree-1 TotalForm D; the operator is
cal_D = d_nabla + hat(D).  Its curvature is the unique total form R with
hat(R) = cal_D^2; the engine computes R both by squaring the operator on
basis sections and by the blockwise formula R_nabla + d_nabla^End D +
D wedge D, and raises InternalCheckError if the two routes ever disagree.
"""

from __future__ import annotations

import itertools

from .errors import InternalCheckError, MismatchError
from .forms import (
    Form,
    GradedBundle,
    GradedElement,
    TotalForm,
    mat_add,
    mat_is_zero,
    mat_mul,
    mat_neg,
    mat_zero,
    sort_with_sign,
)
from .ring import Poly


class LinearConnection:
    """An A-connection on a trivialized bundle, given by Christoffel matrices."""

    __slots__ = ("algebroid", "rank", "mats")

    def __init__(self, algebroid, rank, mats):
        self.algebroid = algebroid
        self.rank = int(rank)
        if self.rank < 1:
            raise MismatchError("bundle rank must be positive")
        mats = tuple(tuple(tuple(self._as_poly(p) for p in row) for row in m)
                     for m in mats)
        if len(mats) != algebroid.rank:
            raise MismatchError("one Christoffel matrix per frame element required")
        for m in mats:
            if len(m) != self.rank or any(len(row) != self.rank for row in m):
                raise MismatchError("Christoffel matrices must be rank x rank")
        self.mats = mats

    def _as_poly(self, p):
        if isinstance(p, Poly):
            if p.variables != self.algebroid.variables:
                raise MismatchError("Christoffel entries live on the wrong chart")
            return p
        if isinstance(p, str):
            return Poly.parse(p, self.algebroid.variables)
        return Poly.constant(self.algebroid.variables, p)

    @classmethod
    def from_christoffel(cls, algebroid, gamma):
        """Build from source-major data: gamma[i][alpha][beta].

        nabla_{e_i} f_alpha = sum_beta gamma[i][alpha][beta] f_beta, which is
        the transpose of the internal target-major storage.
        """
        mats = [list(map(list, zip(*m))) for m in gamma]
        rank = len(gamma[0]) if gamma else 0
        return cls(algebroid, rank, mats)

    @classmethod
    def zero(cls, algebroid, rank):
        z = Poly.zero(algebroid.variables)
        mats = [[[z for _ in range(rank)] for _ in range(rank)]
                for _ in range(algebroid.rank)]
        return cls(algebroid, rank, mats)

    def christoffel(self):
        """Source-major Christoffel data (the serialization orientation)."""
        return [list(map(list, zip(*m))) for m in self.mats]

    @property
    def variables(self):
        return self.algebroid.variables

    # -- covariant derivative ---------------------------------------------

    def apply(self, i, components):
        """nabla_{e_i} of a section given by its coefficient vector."""
        if len(components) != self.rank:
            raise MismatchError("section has the wrong number of components")
        g = self.mats[i]
        out = []
        for beta in range(self.rank):
            acc = self.algebroid.anchor_apply(i, components[beta])
            for alpha in range(self.rank):
                acc = acc + g[beta][alpha] * components[alpha]
            out.append(acc)
        return out

    def apply_section(self, direction, components):
        """nabla_u for a section direction u given by frame components."""
        out = [Poly.zero(self.variables) for _ in range(self.rank)]
        for i, u_i in enumerate(direction):
            if u_i.is_zero():
                continue
            step = self.apply(i, components)
            out = [acc + u_i * v for acc, v in zip(out, step)]
        return out

    # -- connection differential -------------------------------------------

    def d(self, form):
        """Koszul differential twisted by this connection."""
        if form.frame_rank != self.algebroid.rank or form.variables != self.variables:
            raise MismatchError("form does not live over this algebroid's frame")
        if form.fiber_dim != self.rank:
            raise MismatchError("form fiber does not match the bundle rank")
        A = self.algebroid
        k = form.degree
        coeffs = {}
        for out_idx in itertools.combinations(range(A.rank), k + 1):
            acc = [Poly.zero(self.variables) for _ in range(self.rank)]
            for t in range(k + 1):
                rest = out_idx[:t] + out_idx[t + 1:]
                vec = form.fiber_vector(rest)
                if all(p.is_zero() for p in vec):
                    continue
                step = self.apply(out_idx[t], vec)
                if t % 2:
                    step = [-p for p in step]
                acc = [a + s for a, s in zip(acc, step)]
            for s in range(k + 1):
                for t in range(s + 1, k + 1):
                    rest = tuple(x for idx, x in enumerate(out_idx)
                                 if idx != s and idx != t)
                    sign_st = -1 if (s + t) % 2 else 1
                    for m, c in enumerate(A.structure[out_idx[s]][out_idx[t]]):
                        if c.is_zero():
                            continue
                        sgn, mi = sort_with_sign((m,) + rest)
                        if sgn == 0:
                            continue
                        vec = form.fiber_vector(mi)
                        if all(p.is_zero() for p in vec):
                            continue
                        factor = c if sign_st * sgn == 1 else -c
                        acc = [a + factor * v for a, v in zip(acc, vec)]
            for beta, p in enumerate(acc):
                if not p.is_zero():
                    coeffs[(out_idx, beta)] = p
        return Form(self.variables, A.rank, k + 1, self.rank, coeffs)

    def basis_section(self, alpha):
        comps = [Poly.one(self.variables) if a == alpha else Poly.zero(self.variables)
                 for a in range(self.rank)]
        return Form.section(self.variables, self.algebroid.rank, comps)

    # -- curvature -----------------------------------------------------------

    def curvature_matrix(self, i, j):
        """R(e_i, e_j) as a target-major matrix, by the direct frame formula."""
        A = self.algebroid
        gi, gj = self.mats[i], self.mats[j]
        out = [[Poly.zero(self.variables) for _ in range(self.rank)]
               for _ in range(self.rank)]
        for b in range(self.rank):
            for a in range(self.rank):
                acc = A.anchor_apply(i, gj[b][a]) - A.anchor_apply(j, gi[b][a])
                for m in range(self.rank):
                    acc = acc + gi[b][m] * gj[m][a] - gj[b][m] * gi[m][a]
                for m, c in enumerate(A.structure[i][j]):
                    if not c.is_zero():
                        acc = acc - c * self.mats[m][b][a]
                out[b][a] = acc
        return tuple(tuple(row) for row in out)

    def curvature(self, degree_label=0):
        """R_nabla as a TotalForm with the single block (2, z, z).

        Computed by the direct frame formula and cross-checked against the
        squared connection differential on every basis section; any
        disagreement is an engine bug and raises InternalCheckError.
        """
        A = self.algebroid
        bundle = GradedBundle([(degree_label, self.rank)])
        entries = {}
        for i, j in itertools.combinations(range(A.rank), 2):
            mat = self.curvature_matrix(i, j)
            if not mat_is_zero(mat):
                entries[(i, j)] = mat
        blocks = {(2, degree_label, degree_label): entries} if entries else {}
        direct = TotalForm(self.variables, A.rank, bundle, bundle, 2, blocks)
        # independent route: d_nabla twice on basis sections
        for alpha in range(self.rank):
            image = self.d(self.d(self.basis_section(alpha)))
            for i, j in itertools.combinations(range(A.rank), 2):
                expected = direct.block_matrix((2, degree_label, degree_label),
                                               (i, j))
                got = image.fiber_vector((i, j))
                for beta in range(self.rank):
                    if got[beta] != expected[beta][alpha]:
                        raise InternalCheckError(
                            "curvature routes disagree: operator square vs "
                            f"frame formula at (e_{i}, e_{j}), fiber ({beta},{alpha})")
        return direct

    def is_flat(self):
        return self.curvature().is_zero()

    # -- algebra on connections ------------------------------------------------

    def shift(self, one_form_block):
        """nabla + B for an End-valued 1-form block {(i,): matrix}."""
        mats = []
        for i in range(self.algebroid.rank):
            delta = one_form_block.get((i,))
            mats.append(self.mats[i] if delta is None
                        else mat_add(self.mats[i], delta))
        return LinearConnection(self.algebroid, self.rank, mats)

    def __eq__(self, other):
        return (isinstance(other, LinearConnection)
                and self.algebroid == other.algebroid
                and self.rank == other.rank
                and self.mats == other.mats)

    def to_json(self, degree_label=0):
        gamma = self.christoffel()
        return {
            "bundle_degree": degree_label,
            "christoffel": [
                {"frame": i, "matrix": [[str(p) for p in row] for row in gamma[i]]}
                for i in range(self.algebroid.rank)
                if any(not p.is_zero() for row in gamma[i] for p in row)
            ],
            "rank": self.rank,
        }

    @classmethod
    def from_json(cls, data, algebroid, rank=None):
        rank = rank if rank is not None else data.get("rank")
        if rank is None:
            raise MismatchError("connection payload needs a bundle rank")
        zero = Poly.zero(algebroid.variables)
        gamma = [[[zero for _ in range(rank)] for _ in range(rank)]
                 for _ in range(algebroid.rank)]
        for entry in data.get("christoffel", []):
            i = entry["frame"]
            matrix = entry["matrix"]
            if len(matrix) != rank or any(len(row) != rank for row in matrix):
                raise MismatchError(f"christoffel matrix at frame {i} has wrong shape")
            gamma[i] = [[Poly.parse(p, algebroid.variables) for p in row]
                        for row in matrix]
        return cls.from_christoffel(algebroid, gamma)


def induced_hom_connection(src, dst):
    """The Hom(E, E') connection of a pair of connections on one algebroid.

    Hom fibers are flattened row-major: phi_{mu alpha} sits at index
    mu * rank(E) + alpha.  (nabla^Hom phi)(e) = nabla'(phi e) - phi(nabla e),
    i.e. G^Hom acts as M -> G' M - M G on matrices.
    """
    if src.algebroid is not dst.algebroid and src.algebroid != dst.algebroid:
        raise MismatchError("hom connection needs both factors over one algebroid")
    A = src.algebroid
    r_s, r_d = src.rank, dst.rank
    hom_rank = r_s * r_d
    zero = Poly.zero(A.variables)
    mats = []
    for i in range(A.rank):
        g = [[zero for _ in range(hom_rank)] for _ in range(hom_rank)]
        gs, gd = src.mats[i], dst.mats[i]
        for mu in range(r_d):
            for alpha in range(r_s):
                row = mu * r_s + alpha
                for beta in range(r_d):
                    g[row][beta * r_s + alpha] = g[row][beta * r_s + alpha] + gd[mu][beta]
                for delta in range(r_s):
                    g[row][mu * r_s + delta] = g[row][mu * r_s + delta] - gs[delta][alpha]
        mats.append(g)
    return LinearConnection(A, hom_rank, mats)


def hom_flatten(matrix, variables):
    return [p for row in matrix for p in row]


def hom_unflatten(vector, rows, cols):
    return tuple(tuple(vector[mu * cols + alpha] for alpha in range(cols))
                 for mu in range(rows))


def d_hom_blockwise(total_form, nablas):
    """Blockwise Hom-connection differential of a TotalForm.

    `nablas` maps each summand degree to its LinearConnection.  Block
    (i, l, j) is differentiated with the Hom connection of the pair
    (nabla^l source, nabla^j target); no Koszul factor appears here (the
    graded hat signs cancel against the commutator convention).
    """
    A = nablas[next(iter(nablas))].algebroid
    variables = A.variables
    blocks: dict = {}
    for (i, l, j), entries in total_form.blocks.items():
        g_src = nablas[l].mats
        g_dst = nablas[j].mats
        rows = total_form.dst.rank(j)
        cols = total_form.src.rank(l)

        def block_matrix(mi, _entries=entries, _rows=rows, _cols=cols):
            mat = _entries.get(mi)
            return mat if mat is not None else mat_zero(_rows, _cols, variables)

        out_entries = blocks.setdefault((i + 1, l, j), {})
        for out_idx in itertools.combinations(range(A.rank), i + 1):
            acc = [[Poly.zero(variables) for _ in range(cols)] for _ in range(rows)]
            nonzero = False
            for t in range(i + 1):
                rest = out_idx[:t] + out_idx[t + 1:]
                mat = block_matrix(rest)
                if mat_is_zero(mat):
                    continue
                nonzero = True
                frame = out_idx[t]
                step = [[A.anchor_apply(frame, mat[b][a]) for a in range(cols)]
                        for b in range(rows)]
                gm = mat_mul(g_dst[frame], mat)
                mg = mat_mul(mat, g_src[frame])
                for b in range(rows):
                    for a in range(cols):
                        val = step[b][a] + gm[b][a] - mg[b][a]
                        if t % 2:
                            val = -val
                        acc[b][a] = acc[b][a] + val
            for s in range(i + 1):
                for t in range(s + 1, i + 1):
                    rest = tuple(x for idx, x in enumerate(out_idx)
                                 if idx != s and idx != t)
                    sign_st = -1 if (s + t) % 2 else 1
                    for m, c in enumerate(A.structure[out_idx[s]][out_idx[t]]):
                        if c.is_zero():
                            continue
                        sgn, mi = sort_with_sign((m,) + rest)
                        if sgn == 0:
                            continue
                        mat = block_matrix(mi)
                        if mat_is_zero(mat):
                            continue
                        nonzero = True
                        factor = c if sign_st * sgn == 1 else -c
                        for b in range(rows):
                            for a in range(cols):
                                acc[b][a] = acc[b][a] + factor * mat[b][a]
            if nonzero and not mat_is_zero(acc):
                out_entries[out_idx] = tuple(tuple(row) for row in acc)
        if not out_entries:
            blocks.pop((i + 1, l, j), None)
    return TotalForm(variables, total_form.frame_rank, total_form.src,
                     total_form.dst, total_form.total_degree + 1, blocks)


class ConnectionUpToHomotopy:
    """cal_D = d_nabla + hat(D) on forms valued in a graded bundle."""

    __slots__ = ("algebroid", "bundle", "nablas", "D")

    def __init__(self, algebroid, bundle, nablas, D=None):
        self.algebroid = algebroid
        self.bundle = bundle
        self.nablas = dict(nablas)
        for z, r in bundle.summands:
            conn = self.nablas.get(z)
            if conn is None:
                raise MismatchError(f"missing connection for summand degree {z}")
            if conn.rank != r:
                raise MismatchError(f"connection rank mismatch on summand {z}")
            if conn.algebroid != algebroid:
                raise MismatchError("summand connection over a different algebroid")
        if set(self.nablas) != set(bundle.degrees()):
            raise MismatchError("connections must match the bundle degrees exactly")
        if D is None:
            D = TotalForm.zero(algebroid.variables, algebroid.rank,
                               bundle, bundle, 1)
        if D.total_degree != 1 or D.src != bundle or D.dst != bundle:
            raise MismatchError("D must be an End-valued total form of degree 1")
        if D.variables != algebroid.variables or D.frame_rank != algebroid.rank:
            raise MismatchError("D lives over the wrong frame")
        self.D = D

    @classmethod
    def from_linear(cls, nabla, degree_label=0):
        bundle = GradedBundle([(degree_label, nabla.rank)])
        return cls(nabla.algebroid, bundle, {degree_label: nabla})

    @property
    def variables(self):
        return self.algebroid.variables

    def is_normalized(self):
        return all(i != 1 or l != j for (i, l, j) in self.D.blocks)

    def normalize(self):
        """Absorb the grading-preserving 1-form part of D into the connections.

        The operator cal_D is unchanged; only the (nabla, D) splitting moves.
        """
        nablas = dict(self.nablas)
        blocks = {}
        for (i, l, j), entries in self.D.blocks.items():
            if i == 1 and l == j:
                nablas[l] = nablas[l].shift(entries)
            else:
                blocks[(i, l, j)] = entries
        D = TotalForm(self.variables, self.algebroid.rank, self.bundle,
                      self.bundle, 1, blocks)
        return ConnectionUpToHomotopy(self.algebroid, self.bundle, nablas, D)

    # -- operator ------------------------------------------------------------

    def apply(self, element):
        if element.bundle != self.bundle:
            raise MismatchError("element lives in a different bundle")
        out = GradedElement(self.variables, self.algebroid.rank, self.bundle)
        for (t, z), form in element.parts.items():
            out = out + GradedElement.single(self.bundle, self.nablas[z].d(form), z)
        return out + self.D.apply(element)

    def apply_form(self, form, summand):
        return self.apply(GradedElement.single(self.bundle, form, summand))

    def basis_element(self, summand, alpha):
        return GradedElement.basis_section(self.variables, self.algebroid.rank,
                                           self.bundle, summand, alpha)

    # -- curvature ------------------------------------------------------------

    def curvature_blockwise(self):
        """R = R_nabla + d_nabla^End D + D ^ D (one route)."""
        A = self.algebroid
        acc = TotalForm.zero(self.variables, A.rank, self.bundle, self.bundle, 2)
        for z, _ in self.bundle.summands:
            r_z = self.nablas[z].curvature(degree_label=z)
            acc = acc + TotalForm(self.variables, A.rank, self.bundle,
                                  self.bundle, 2, r_z.blocks)
        acc = acc + d_hom_blockwise(self.D, self.nablas)
        return acc + self.D.wedge(self.D)

    def curvature(self):
        """The unique total form R with hat(R) = cal_D squared.

        Computed by unhatting the squared operator on basis sections and
        cross-checked against the blockwise route; disagreement raises
        InternalCheckError.
        """
        from .forms import unhat_from_sections

        operator_route = unhat_from_sections(
            lambda z, alpha: self.apply(self.apply(self.basis_element(z, alpha))),
            self.variables, self.algebroid.rank, self.bundle, self.bundle, 2)
        blockwise = self.curvature_blockwise()
        if operator_route != blockwise:
            raise InternalCheckError(
                "curvature routes disagree: operator squaring vs blockwise formula")
        return operator_route

    def curvature_power(self, power):
        """R^i as an iterated composition wedge; hat of it equals cal_D^(2i)."""
        if power < 0:
            raise MismatchError("curvature powers must be nonnegative")
        if power == 0:
            return TotalForm.identity(self.variables, self.algebroid.rank,
                                      self.bundle)
        r = self.curvature()
        out = r
        for _ in range(power - 1):
            out = out.wedge(r)
        return out

    # -- induced End differential ------------------------------------------------

    def d_end(self, total_form):
        """Unhat of [cal_D, hat(K)]: the degree-1 derivation on End-valued forms."""
        if total_form.src != self.bundle or total_form.dst != self.bundle:
            raise MismatchError("d_end expects an End-valued total form")
        from .forms import unhat_from_sections

        sign = -1 if total_form.total_degree % 2 else 1

        def action(z, alpha):
            e = self.basis_element(z, alpha)
            first = self.apply(total_form.apply(e))
            second = total_form.apply(self.apply(e))
            return first - second if sign == 1 else first + second

        return unhat_from_sections(action, self.variables, self.algebroid.rank,
                                   self.bundle, self.bundle,
                                   total_form.total_degree + 1)

    def d_end_blockwise(self, total_form):
        """d_nabla^End K + [D, K]; equal to d_end by the decomposition identity."""
        from .forms import graded_commutator

        return d_hom_blockwise(total_form, self.nablas) + graded_commutator(
            self.D, total_form)

    def __eq__(self, other):
        return (isinstance(other, ConnectionUpToHomotopy)
                and self.algebroid == other.algebroid
                and self.bundle == other.bundle
                and self.nablas == other.nablas
                and self.D == other.D)

    def to_json(self):
        return {
            "bundle": self.bundle.to_json(),
            "connections": [
                dict(self.nablas[z].to_json(degree_label=z))
                for z, _ in self.bundle.summands
            ],
            "D": self.D.to_json(),
        }


def cuth_difference(new, old):
    """The degree-1 total form cal_D' - cal_D of two cuths on one bundle.

    The difference of two connections is tensorial, so this is an honest
    TotalForm: per-summand Christoffel differences in the (1, z, z) blocks
    plus the difference of the D parts.
    """
    if new.bundle != old.bundle or new.algebroid != old.algebroid:
        raise MismatchError("cuth difference needs matching bundles")
    blocks: dict = {}
    for z, r in new.bundle.summands:
        entries = {}
        for i in range(new.algebroid.rank):
            delta = mat_add(new.nablas[z].mats[i], mat_neg(old.nablas[z].mats[i]))
            if not mat_is_zero(delta):
                entries[(i,)] = delta
        if entries:
            blocks[(1, z, z)] = entries
    shift = TotalForm(new.variables, new.algebroid.rank, new.bundle,
                      new.bundle, 1, blocks)
    return shift + (new.D - old.D)


def extend_connection(algebroid, subframe, nabla_sub, complement=None):
    """Extend a connection over a subframe to the whole frame.

    `nabla_sub` lives over algebroid.restrict(subframe); Christoffel
    matrices for complement frame directions come from `complement`
    (a map global index -> target-major matrix) and default to zero.
    """
    if nabla_sub.algebroid.rank != subframe.rank:
        raise MismatchError("subframe connection has the wrong frame rank")
    complement = dict(complement or {})
    zero_mat = mat_zero(nabla_sub.rank, nabla_sub.rank, algebroid.variables)
    mats = []
    local = {g: i for i, g in enumerate(subframe.indices)}
    for i in range(algebroid.rank):
        if i in local:
            mats.append(nabla_sub.mats[local[i]])
        else:
            mats.append(complement.get(i, zero_mat))
    return LinearConnection(algebroid, nabla_sub.rank, mats)


def restrict_connection(nabla, subframe):
    """Restrict a connection to the frame directions of a bracket-closed subframe."""
    sub_algebroid = nabla.algebroid.restrict(subframe)
    mats = [nabla.mats[i] for i in subframe.indices]
    return LinearConnection(sub_algebroid, nabla.rank, mats)


def two_term_connection(algebroid, nabla0, nabla1, partial_map, omega_block):
    """Assemble the 2-term cuth with D = hat(partial) + hat(omega).

    partial_map: matrix (rank E1 x rank E0) for the degree-1 bundle map
    E_0 -> E_1 (block (0, 0, 1)); omega_block: {multi-index: matrix} data
    of a 2-form valued in Hom(E_1, E_0) (block (2, 1, 0)).  Either may be
    None.
    """
    bundle = GradedBundle([(0, nabla0.rank), (1, nabla1.rank)])
    blocks = {}
    if partial_map is not None and not mat_is_zero(partial_map):
        blocks[(0, 0, 1)] = {(): tuple(tuple(row) for row in partial_map)}
    if omega_block:
        entries = {mi: tuple(tuple(row) for row in mat)
                   for mi, mat in omega_block.items() if not mat_is_zero(mat)}
        if entries:
            blocks[(2, 1, 0)] = entries
    D = TotalForm(algebroid.variables, algebroid.rank, bundle, bundle, 1, blocks)
    return ConnectionUpToHomotopy(algebroid, bundle,
                                  {0: nabla0, 1: nabla1}, D)
