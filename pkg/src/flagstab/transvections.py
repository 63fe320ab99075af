"""Transvection families, commutators, and their exact identities.

For a subspace U the maps v -> v + (v+U)phi, phi a linear map V/U -> U,
form the abelian stability group of {0, U, V}.  The identities here are
checked on concrete matrices and raise IdentityError if they ever fail.
"""

from .errors import (
    HypothesisError,
    IdentityError,
    SingularMatrixError,
    TransvectionError,
)
from .linalg import Mat, QuotientMap, Subspace, Vec, image
from .series import Series, in_stabilizer
from .unipotent import unipotent_exponent

__all__ = [
    "TransvectionSpec",
    "make_transvection",
    "commutator",
    "iterated_commutator",
    "transvection_commutator_check",
    "fixed_line_engel_witness",
    "one_plus_eta_commutator",
]


class TransvectionSpec:
    """A linear map V/U -> U in fixed coset coordinates.

    `quotient_basis` lists the coset representatives (the deterministic
    complement of U by default) and `phi` is a (dim V/U) x (dim V)
    matrix whose rows are the images, which must lie in U.
    """

    __slots__ = ("u", "qmap", "phi")

    def __init__(self, u, phi, quotient_basis=None):
        full = Subspace.full(u.field, u.ambient_dim)
        if quotient_basis is None:
            qmap = QuotientMap(u, full)
        else:
            qmap = QuotientMap(u, full, reps=quotient_basis)
        if phi.nrows != qmap.dim or phi.ncols != u.ambient_dim:
            raise TransvectionError("phi has the wrong shape for V/U -> U")
        for row in phi.rows:
            if not u.contains_vec(row):
                raise TransvectionError("image of phi escapes U")
        self.u = u
        self.qmap = qmap
        self.phi = phi

    @property
    def field(self):
        return self.u.field

    @property
    def quotient_basis(self):
        return self.qmap.reps

    @classmethod
    def zero(cls, u):
        full_dim = u.ambient_dim
        q = full_dim - u.dim
        return cls(u, Mat.zero(u.field, q, full_dim))

    def displacement(self):
        """The square-zero matrix eta with x_phi = 1 + eta."""
        return self.qmap.projection_matrix() @ self.phi

    def add(self, other):
        if self.u != other.u or self.qmap.reps != other.qmap.reps:
            raise TransvectionError("specs live over different data")
        return TransvectionSpec(
            self.u, self.phi + other.phi, quotient_basis=self.qmap.reps
        )


def make_transvection(spec):
    """Matrix of v -> v + (v+U)phi; always in the stabilizer of {0,U,V}."""
    n = spec.u.ambient_dim
    eta = spec.displacement()
    x = Mat.identity(spec.field, n) + eta
    assert (eta @ eta).is_zero()
    full = Subspace.full(spec.field, n)
    zero = Subspace.zero(spec.field, n)
    members = [full]
    if 0 < spec.u.dim < n:
        members.append(spec.u)
    members.append(zero)
    mini = Series(spec.field, n, members)
    assert in_stabilizer(x, mini)
    return x


def commutator(x, g):
    """Group commutator x^-1 g^-1 x g."""
    try:
        return x.inverse() @ g.inverse() @ x @ g
    except SingularMatrixError:
        raise SingularMatrixError("commutator of a singular matrix") from None


def iterated_commutator(x, g, n):
    """[x, g, g, ..., g] with n copies of g; n = 0 returns x."""
    if n < 0:
        raise ValueError("negative commutator depth")
    out = x
    for _ in range(n):
        out = commutator(out, g)
    return out


def _check_commutator_hypothesis(spec, t):
    """t must be unipotent, normalize U, and phi must kill [V,t] + U / U."""
    if not t.is_square() or t.nrows != spec.u.ambient_dim:
        raise TransvectionError("shape mismatch between t and the transvection data")
    if unipotent_exponent(t) is None:
        raise HypothesisError("t is not unipotent")
    if spec.u.apply(t) != spec.u:
        raise HypothesisError("t does not normalize U")
    nil = t - Mat.identity(t.field, t.nrows)
    for row in image(nil).basis:
        coords = spec.qmap.project(row)
        if not (coords @ spec.phi).is_zero():
            raise HypothesisError("phi does not kill [V,t] + U / U")


def transvection_commutator_check(spec, t, k):
    """Verify v [x_phi, j t] = v + (v+U) phi (t-1)^j for 1 <= j <= k.

    Returns None when every exponent checks out; otherwise the first
    failing (basis vector index, exponent), which the hypothesis rules
    out.  Hypothesis violations raise HypothesisError instead.
    """
    _check_commutator_hypothesis(spec, t)
    x = make_transvection(spec)
    eta = spec.displacement()
    n = spec.u.ambient_dim
    ident = Mat.identity(spec.field, n)
    nil = t - ident
    z = x
    power = ident
    for j in range(1, k + 1):
        z = commutator(z, t)
        power = power @ nil
        expected = ident + eta @ power
        if z != expected:
            for i in range(n):
                if z.rows[i] != expected.rows[i]:
                    return (i, j)
    return None


def fixed_line_engel_witness(g, u_line, spec, n):
    """Iterated commutator z_n = [x_phi, n g] over a g-fixed line U.

    Requires U = u_line one-dimensional and fixed pointwise by g; then
    z_n = 1 + (g^-1 - 1)^n eta exactly, which is asserted.
    """
    if u_line.dim != 1:
        raise TransvectionError("the bottom member must be a line")
    if spec.u != u_line:
        raise TransvectionError("transvection data is not built over the given line")
    if not g.is_invertible():
        raise SingularMatrixError("g must be invertible")
    dim = u_line.ambient_dim
    ident = Mat.identity(g.field, dim)
    gm1 = g - ident
    for row in u_line.basis:
        if not (Vec(g.field, row) @ gm1).is_zero():
            raise HypothesisError("g does not fix the line pointwise")
    z = iterated_commutator(make_transvection(spec), g, n)
    eta = spec.displacement()
    expected = ident + (g.inverse() - ident).pow(n) @ eta
    if z != expected:
        raise IdentityError("iterated commutator drifted from 1 + (g^-1-1)^n eta")
    return z


def one_plus_eta_commutator(eta, g, n):
    """[1 + eta, n g] computed by group arithmetic; equals 1 + eta (g-1)^n.

    Checked preconditions: eta^2 = 0, (g-1) eta = 0, and the vanishing
    of every square (eta (g-1)^j)^2 for j < n.  Without (g-1) eta = 0
    the identity genuinely fails, so it is part of the contract.
    """
    if not g.is_square() or g.nrows != eta.nrows or not eta.is_square():
        raise TransvectionError("shape mismatch")
    ident = Mat.identity(g.field, g.nrows)
    if not (eta @ eta).is_zero():
        raise HypothesisError("eta^2 != 0")
    gm1 = g - ident
    if not (gm1 @ eta).is_zero():
        raise HypothesisError("(g-1) eta != 0")
    power = ident
    for _ in range(n):
        staged = eta @ power
        if not (staged @ staged).is_zero():
            raise HypothesisError("(eta (g-1)^j)^2 != 0")
        power = power @ gm1
    if not g.is_invertible():
        raise SingularMatrixError("g must be invertible")
    z = iterated_commutator(ident + eta, g, n)
    expected = ident + eta @ gm1.pow(n)
    if z != expected:
        raise IdentityError("[1+eta, n g] drifted from 1 + eta (g-1)^n")
    return z
