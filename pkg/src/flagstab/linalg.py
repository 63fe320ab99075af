"""Exact scalars, vectors, matrices and canonical subspaces.

Scalars are plain ints reduced mod p for prime fields and
`fractions.Fraction` for the rationals; no floating point anywhere.
Vectors are rows and act on the right of matrices (v @ g), so kernels
are left null spaces and images are row spaces.
"""

from fractions import Fraction

from .errors import (
    ContainmentError,
    FieldMismatchError,
    ShapeError,
    SingularMatrixError,
)

__all__ = [
    "Field",
    "GF",
    "QQ",
    "Vec",
    "Mat",
    "Subspace",
    "LinearSolver",
    "QuotientMap",
    "echelonize",
    "kernel",
    "image",
    "complement_in",
    "complement_basis",
]


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """GF(p) for prime p, or the rationals when p is None."""

    __slots__ = ("p",)

    def __init__(self, p=None):
        if p is not None and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @property
    def is_prime_field(self):
        return self.p is not None

    @property
    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def coerce(self, x):
        if self.p is not None:
            return int(x) % self.p
        return Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is not None:
            return pow(a, self.p - 2, self.p)
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def parse(self, text):
        """Parse 'a' or 'a/b' into a canonical scalar."""
        if self.p is not None:
            return int(text) % self.p
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))

    def format(self, x):
        if self.p is not None:
            return str(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"GF({self.p})" if self.p is not None else "QQ"


def GF(p):
    return Field(p)


QQ = Field(None)


def _check_same_field(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")


class Vec:
    """Immutable row vector with exact entries."""

    __slots__ = ("field", "entries")

    def __init__(self, field, entries):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", tuple(field.coerce(x) for x in entries))

    def __setattr__(self, name, value):
        raise AttributeError("Vec is immutable")

    @property
    def dim(self):
        return len(self.entries)

    def is_zero(self):
        return all(x == 0 for x in self.entries)

    def __add__(self, other):
        _check_same_field(self, other)
        if self.dim != other.dim:
            raise ShapeError("vector dims differ")
        add = self.field.add
        return Vec(self.field, [add(x, y) for x, y in zip(self.entries, other.entries)])

    def __sub__(self, other):
        _check_same_field(self, other)
        if self.dim != other.dim:
            raise ShapeError("vector dims differ")
        sub = self.field.sub
        return Vec(self.field, [sub(x, y) for x, y in zip(self.entries, other.entries)])

    def __neg__(self):
        neg = self.field.neg
        return Vec(self.field, [neg(x) for x in self.entries])

    def scale(self, c):
        c = self.field.coerce(c)
        mul = self.field.mul
        return Vec(self.field, [mul(c, x) for x in self.entries])

    def __matmul__(self, m):
        """Row action v @ g."""
        if not isinstance(m, Mat):
            return NotImplemented
        _check_same_field(self, m)
        if self.dim != m.nrows:
            raise ShapeError("vector/matrix shapes differ")
        return Vec(self.field, _row_times(self.field, self.entries, m.rows, m.ncols))

    def __eq__(self, other):
        return (
            isinstance(other, Vec)
            and self.field == other.field
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.field, self.entries))

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __repr__(self):
        fmt = self.field.format
        return "Vec(" + " ".join(fmt(x) for x in self.entries) + ")"

    @classmethod
    def unit(cls, field, dim, i):
        return cls(field, [field.one if j == i else field.zero for j in range(dim)])

    @classmethod
    def zero(cls, field, dim):
        return cls(field, [field.zero] * dim)


def _row_times(field, row, rows, ncols):
    p = field.p
    out = [field.zero] * ncols
    for x, mrow in zip(row, rows):
        if x == 0:
            continue
        for j, y in enumerate(mrow):
            if y != 0:
                out[j] += x * y
    if p is not None:
        out = [x % p for x in out]
    return out


class Mat:
    """Immutable dense matrix, row major."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, rows, ncols=None):
        rows = tuple(tuple(field.coerce(x) for x in r) for r in rows)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ShapeError("ragged rows")
        elif ncols is None:
            raise ShapeError("empty matrix needs explicit ncols")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def identity(cls, field, n):
        one, zero = field.one, field.zero
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, field, nrows, ncols):
        z = field.zero
        return cls(field, [[z] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def from_vecs(cls, field, vecs, ncols=None):
        return cls(field, [v.entries for v in vecs], ncols=ncols)

    def row(self, i):
        return Vec(self.field, self.rows[i])

    def vec_rows(self):
        return [Vec(self.field, r) for r in self.rows]

    def is_square(self):
        return self.nrows == self.ncols

    def is_zero(self):
        return all(x == 0 for r in self.rows for x in r)

    def is_identity(self):
        if not self.is_square():
            return False
        one = self.field.one
        return all(
            x == (one if i == j else 0)
            for i, r in enumerate(self.rows)
            for j, x in enumerate(r)
        )

    def __add__(self, other):
        self._match(other)
        add = self.field.add
        return Mat(
            self.field,
            [[add(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            ncols=self.ncols,
        )

    def __sub__(self, other):
        self._match(other)
        sub = self.field.sub
        return Mat(
            self.field,
            [[sub(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            ncols=self.ncols,
        )

    def _match(self, other):
        _check_same_field(self, other)
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ShapeError("matrix shapes differ")

    def __neg__(self):
        neg = self.field.neg
        return Mat(self.field, [[neg(x) for x in r] for r in self.rows], ncols=self.ncols)

    def scale(self, c):
        c = self.field.coerce(c)
        mul = self.field.mul
        return Mat(self.field, [[mul(c, x) for x in r] for r in self.rows], ncols=self.ncols)

    def __matmul__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        _check_same_field(self, other)
        if self.ncols != other.nrows:
            raise ShapeError("inner dimensions differ")
        field = self.field
        orows = other.rows
        out = [_row_times(field, r, orows, other.ncols) for r in self.rows]
        return Mat(field, out, ncols=other.ncols)

    def pow(self, e):
        if not self.is_square():
            raise ShapeError("power of a non-square matrix")
        if e < 0:
            return self.inverse().pow(-e)
        acc = Mat.identity(self.field, self.nrows)
        base = self
        while e:
            if e & 1:
                acc = acc @ base
            base = base @ base if e > 1 else base
            e >>= 1
        return acc

    def transpose(self):
        return Mat(
            self.field,
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows,
        )

    def inverse(self):
        if not self.is_square():
            raise SingularMatrixError("non-square matrix")
        n = self.nrows
        field = self.field
        aug = [list(r) + [field.one if i == j else field.zero for j in range(n)]
               for i, r in enumerate(self.rows)]
        reduced, pivots = _rref(field, aug)
        if pivots != list(range(n)):
            raise SingularMatrixError("matrix is singular")
        return Mat(field, [r[n:] for r in reduced], ncols=n)

    def is_invertible(self):
        try:
            self.inverse()
            return True
        except SingularMatrixError:
            return False

    def rank(self):
        _, pivots = _rref(self.field, [list(r) for r in self.rows])
        return len(pivots)

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field, self.ncols, self.rows))

    def __repr__(self):
        fmt = self.field.format
        body = "; ".join(" ".join(fmt(x) for x in r) for r in self.rows)
        return f"Mat[{body}]"


def _rref(field, rows):
    """In-place reduced row echelon form; returns (nonzero rows, pivot cols)."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    p = field.p
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pivot = rows[r][c]
        if pivot != field.one:
            ipiv = field.inv(pivot)
            row = rows[r]
            if p is not None:
                rows[r] = [(x * ipiv) % p for x in row]
            else:
                rows[r] = [x * ipiv for x in row]
        prow = rows[r]
        for i in range(m):
            if i == r:
                continue
            f = rows[i][c]
            if f == 0:
                continue
            row = rows[i]
            if p is not None:
                rows[i] = [(x - f * y) % p for x, y in zip(row, prow)]
            else:
                rows[i] = [x - f * y for x, y in zip(row, prow)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows[:r], pivots


class Subspace:
    """Row space in canonical reduced echelon form; equality is syntactic."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field, ambient_dim, basis, pivots):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", tuple(tuple(r) for r in basis))
        object.__setattr__(self, "pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def span(cls, field, ambient_dim, rows):
        """Canonical subspace spanned by the given rows."""
        rows = [list(r.entries if isinstance(r, Vec) else r) for r in rows]
        for r in rows:
            if len(r) != ambient_dim:
                raise ShapeError("row width differs from ambient dimension")
        rows = [[field.coerce(x) for x in r] for r in rows]
        reduced, pivots = _rref(field, rows) if rows else ([], [])
        return cls(field, ambient_dim, reduced, pivots)

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim, [], [])

    @classmethod
    def full(cls, field, ambient_dim):
        one, z = field.one, field.zero
        basis = [[one if i == j else z for j in range(ambient_dim)] for i in range(ambient_dim)]
        return cls(field, ambient_dim, basis, list(range(ambient_dim)))

    @property
    def dim(self):
        return len(self.basis)

    def is_zero(self):
        return not self.basis

    def is_full(self):
        return len(self.basis) == self.ambient_dim

    def basis_vecs(self):
        return [Vec(self.field, r) for r in self.basis]

    def _reduce(self, v):
        """Residue of v after elimination against the basis."""
        v = list(v)
        field = self.field
        p = field.p
        for row, piv in zip(self.basis, self.pivots):
            f = v[piv]
            if f == 0:
                continue
            if p is not None:
                v = [(x - f * y) % p for x, y in zip(v, row)]
            else:
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains_vec(self, v):
        entries = v.entries if isinstance(v, Vec) else tuple(v)
        if len(entries) != self.ambient_dim:
            raise ShapeError("vector dim differs from ambient dimension")
        return all(x == 0 for x in self._reduce(entries))

    def contains(self, other):
        self._match(other)
        if other.dim > self.dim:
            return False
        return all(self.contains_vec(r) for r in other.basis)

    def _match(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("ambient dimensions differ")

    def sum(self, other):
        self._match(other)
        return Subspace.span(self.field, self.ambient_dim, self.basis + other.basis)

    def intersect(self, other):
        """Zassenhaus double-block elimination."""
        self._match(other)
        n = self.ambient_dim
        z = self.field.zero
        rows = [list(r) + list(r) for r in self.basis]
        rows += [list(r) + [z] * n for r in other.basis]
        if not rows:
            return Subspace.zero(self.field, n)
        reduced, _ = _rref(self.field, rows)
        out = [r[n:] for r in reduced if all(x == 0 for x in r[:n])]
        return Subspace.span(self.field, n, out)

    def __add__(self, other):
        return self.sum(other)

    def __and__(self, other):
        return self.intersect(other)

    def __le__(self, other):
        return other.contains(self)

    def __lt__(self, other):
        return other.contains(self) and self.dim < other.dim

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.field, self.ambient_dim, self.basis))

    def apply(self, m):
        """Image of this subspace under the row action of m."""
        if m.nrows != self.ambient_dim:
            raise ShapeError("matrix height differs from ambient dimension")
        field = self.field
        rows = [_row_times(field, r, m.rows, m.ncols) for r in self.basis]
        return Subspace.span(field, m.ncols, rows)

    def __repr__(self):
        fmt = self.field.format
        body = "; ".join(" ".join(fmt(x) for x in r) for r in self.basis)
        return f"Subspace<{self.dim} of {self.ambient_dim}: {body}>"


def echelonize(m):
    """Canonical subspace spanned by the rows of m."""
    return Subspace.span(m.field, m.ncols, m.rows)


def image(m):
    """Row space of m; pass g-1 to get the commutator space [V,g]."""
    return echelonize(m)


def kernel(m):
    """Left null space {v : v @ m = 0} of a square matrix."""
    if not m.is_square():
        raise ShapeError("kernel of a non-square matrix")
    n = m.nrows
    field = m.field
    one, z = field.one, field.zero
    rows = [list(r) + [one if i == j else z for j in range(n)]
            for i, r in enumerate(m.rows)]
    reduced, _ = _rref(field, rows)
    out = [r[n:] for r in reduced if all(x == 0 for x in r[:n])]
    return Subspace.span(field, n, out)


def left_kernel_rows(field, rows, ncols):
    """Coefficient rows c with c @ M = 0 for the stack M; may be rectangular."""
    rows = [list(r.entries if isinstance(r, Vec) else r) for r in rows]
    m = len(rows)
    if m == 0:
        return []
    one, z = field.one, field.zero
    aug = [list(r) + [one if i == j else z for j in range(m)]
           for i, r in enumerate(rows)]
    reduced, _ = _rref(field, aug)
    return [tuple(r[ncols:]) for r in reduced if all(x == 0 for x in r[:ncols])]


def complement_basis(u, w):
    """Rows of w's canonical basis extending u to w, in pivot order.

    The returned vectors are coset representatives: they project to a
    basis of w/u.
    """
    u._match(w)
    if not w.contains(u):
        raise ContainmentError("first subspace is not contained in the second")
    field = u.field
    state = Subspace.span(field, u.ambient_dim, u.basis)
    chosen = []
    for row in w.basis:
        if not state.contains_vec(row):
            chosen.append(Vec(field, row))
            state = state.sum(Subspace.span(field, u.ambient_dim, [row]))
    assert len(chosen) == w.dim - u.dim
    return chosen


def complement_in(u, w):
    """Deterministic complement c with u + c = w and u & c = 0."""
    vecs = complement_basis(u, w)
    return Subspace.span(u.field, u.ambient_dim, [v.entries for v in vecs])


class QuotientMap:
    """Coordinates on w/u through the deterministic complement basis.

    Representatives are the rows of `complement_basis(u, w)`, so the map
    is canonical for a given pair (u, w).
    """

    __slots__ = ("u", "w", "reps", "field", "dim", "_solver")

    def __init__(self, u, w, reps=None):
        u._match(w)
        if not w.contains(u):
            raise ContainmentError("first subspace is not contained in the second")
        if reps is None:
            reps = complement_basis(u, w)
        self.u = u
        self.w = w
        self.reps = tuple(reps)
        self.field = u.field
        self.dim = len(self.reps)
        rows = [r.entries for r in self.reps] + [r for r in u.basis]
        self._solver = LinearSolver(self.field, rows, u.ambient_dim)

    def project(self, v):
        """Coordinates of v + u in the representative basis."""
        y = self._solver.solve(v)
        if y is None:
            raise ContainmentError("vector lies outside the section")
        return Vec(self.field, y[: self.dim])

    def lift(self, c):
        """Representative vector of the coordinate row c."""
        entries = c.entries if isinstance(c, Vec) else tuple(c)
        if len(entries) != self.dim:
            raise ShapeError("coordinate width differs from section dimension")
        out = Vec.zero(self.field, self.u.ambient_dim)
        for x, rep in zip(entries, self.reps):
            if x != 0:
                out = out + rep.scale(x)
        return out

    def project_subspace(self, x):
        """Image of the subspace x (contained in w) in quotient coordinates."""
        rows = [self.project(Vec(self.field, r)).entries for r in x.basis]
        return Subspace.span(self.field, self.dim, rows)

    def lift_subspace(self, q):
        """Preimage in w of a subspace of the quotient."""
        rows = [self.lift(Vec(self.field, r)).entries for r in q.basis]
        rows = list(rows) + [list(r) for r in self.u.basis]
        return Subspace.span(self.field, self.u.ambient_dim, rows)

    def induced_matrix(self, g):
        """Matrix of the action induced by g on w/u (g must normalize both)."""
        rows = [self.project(rep @ g).entries for rep in self.reps]
        return Mat(self.field, rows, ncols=self.dim)

    def projection_matrix(self):
        """Ambient-to-quotient coordinate matrix (only when w is everything)."""
        if not self.w.is_full():
            raise ShapeError("projection matrix needs the full space on top")
        n = self.u.ambient_dim
        rows = [self.project(Vec.unit(self.field, n, i)).entries for i in range(n)]
        return Mat(self.field, rows, ncols=self.dim)


class LinearSolver:
    """Solves y @ M = target for a fixed stack of rows M.

    Row reduces the transpose of M once, with an identity tag block, so
    each solve costs one small matrix-vector product.  Free coefficients
    are set to zero, which makes the answer deterministic when the rows
    of M are dependent.
    """

    def __init__(self, field, rows, ncols):
        rows = [list(r.entries if isinstance(r, Vec) else r) for r in rows]
        for r in rows:
            if len(r) != ncols:
                raise ShapeError("row width differs")
        self.field = field
        self.nrows = len(rows)
        self.ncols = ncols
        one, z = field.one, field.zero
        m = self.nrows
        aug = [[field.coerce(rows[i][j]) for i in range(m)]
               + [one if j == k else z for k in range(ncols)]
               for j in range(ncols)]
        reduced, pivots = _rref(field, aug) if aug else ([], [])
        self._reduced = reduced
        self._pivots = pivots

    def solve(self, target):
        """Coefficient row y with y @ M = target, or None."""
        entries = target.entries if isinstance(target, Vec) else tuple(target)
        if len(entries) != self.ncols:
            raise ShapeError("target width differs")
        field = self.field
        m = self.nrows
        y = [field.zero] * m
        for row, piv in zip(self._reduced, self._pivots):
            val = field.zero
            for k, t in enumerate(entries):
                if t != 0:
                    c = row[m + k]
                    if c != 0:
                        val = field.add(val, field.mul(c, t))
            if piv < m:
                y[piv] = val
            elif val != 0:
                return None
        return y

    def contains(self, target):
        return self.solve(target) is not None
