"""Exact linear algebra over the rationals.

Everything in the package that touches a linear map goes through this
module: matrices are dense grids of ``fractions.Fraction`` entries, and all
rank-type computations reduce to the integer Gauss-Jordan kernel selected in
:mod:`fimlab.backend`.  No floating point anywhere.

A :class:`Subspace` is always stored through the reduced row echelon form of
a spanning set, so subspace equality is plain matrix equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .backend import rref_int

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class RationalMatrix:
    """Immutable dense matrix with exact rational entries."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, nrows=None, ncols=None):
        rows = tuple(tuple(_as_fraction(x) for x in row) for row in rows)
        if rows:
            width = len(rows[0])
            if any(len(row) != width for row in rows):
                raise ValueError("ragged rows")
        else:
            width = 0
        self.rows = rows
        self.nrows = len(rows) if nrows is None else nrows
        self.ncols = width if ncols is None else ncols
        if self.nrows != len(rows) or (rows and self.ncols != width):
            raise ValueError("row grid does not match declared shape")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "RationalMatrix":
        return RationalMatrix([[_ZERO] * ncols for _ in range(nrows)], nrows, ncols)

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        return RationalMatrix(
            [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)], n, n
        )

    @staticmethod
    def from_entries(entries) -> "RationalMatrix":
        return RationalMatrix(entries)

    @staticmethod
    def column(vec) -> "RationalMatrix":
        return RationalMatrix([[_as_fraction(x)] for x in vec])

    # -- basics --------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        return (
            isinstance(other, RationalMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        if self.nrows * self.ncols > 36:
            return f"RationalMatrix({self.nrows}x{self.ncols})"
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"RationalMatrix[{body}]"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(row[j] for row in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            [self.col(j) for j in range(self.ncols)], self.ncols, self.nrows
        )

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch in +")
        return RationalMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            self.nrows,
            self.ncols,
        )

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch in -")
        return RationalMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            self.nrows,
            self.ncols,
        )

    def __neg__(self):
        return RationalMatrix(
            [[-a for a in row] for row in self.rows], self.nrows, self.ncols
        )

    def scale(self, c) -> "RationalMatrix":
        c = _as_fraction(c)
        return RationalMatrix(
            [[c * a for a in row] for row in self.rows], self.nrows, self.ncols
        )

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError(
                f"shape mismatch in *: {self.shape} by {other.shape}"
            )
        orows = other.rows
        out = []
        for arow in self.rows:
            acc = [_ZERO] * other.ncols
            for k, a in enumerate(arow):
                if a:
                    brow = orows[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return RationalMatrix(out, self.nrows, other.ncols)

    def apply(self, vec):
        """Matrix times column vector (a tuple of Fractions)."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(
            sum((a * v for a, v in zip(row, vec) if a and v), _ZERO)
            for row in self.rows
        )

    def trace(self):
        if self.nrows != self.ncols:
            raise ValueError("trace of non-square matrix")
        return sum((self.rows[i][i] for i in range(self.nrows)), _ZERO)

    # -- stacking ------------------------------------------------------

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch in hstack")
        return RationalMatrix(
            [ra + rb for ra, rb in zip(self.rows, other.rows)],
            self.nrows,
            self.ncols + other.ncols,
        )

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch in vstack")
        return RationalMatrix(self.rows + other.rows, self.nrows + other.nrows, self.ncols)


def block_diag(blocks) -> RationalMatrix:
    blocks = list(blocks)
    nr = sum(b.nrows for b in blocks)
    nc = sum(b.ncols for b in blocks)
    out = [[_ZERO] * nc for _ in range(nr)]
    ro = co = 0
    for b in blocks:
        for i, row in enumerate(b.rows):
            orow = out[ro + i]
            for j, x in enumerate(row):
                orow[co + j] = x
        ro += b.nrows
        co += b.ncols
    return RationalMatrix(out, nr, nc)


def kron(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Kronecker product; realizes objectwise tensor of linear maps."""
    out = []
    for arow in a.rows:
        for brow in b.rows:
            row = []
            for x in arow:
                if x:
                    row.extend(x * y for y in brow)
                else:
                    row.extend([_ZERO] * b.ncols)
            out.append(row)
    return RationalMatrix(out, a.nrows * b.nrows, a.ncols * b.ncols)


# -- echelon form and friends -----------------------------------------


def _clear_denominators(row):
    den = 1
    for x in row:
        den = den * x.denominator // gcd(den, x.denominator)
    return [int(x * den) for x in row]


def rref(mat: RationalMatrix) -> RationalMatrix:
    """Reduced row echelon form (canonical; zero rows kept at the bottom)."""
    if mat.nrows == 0 or mat.ncols == 0:
        return mat
    int_rows = [_clear_denominators(row) for row in mat.rows]
    _, out_rows, denoms = rref_int(int_rows, mat.ncols)
    return RationalMatrix(
        [[Fraction(x, d) for x in row] for row, d in zip(out_rows, denoms)],
        mat.nrows,
        mat.ncols,
    )


def rank(mat: RationalMatrix) -> int:
    if mat.nrows == 0 or mat.ncols == 0:
        return 0
    int_rows = [_clear_denominators(row) for row in mat.rows]
    pivots, _, _ = rref_int(int_rows, mat.ncols)
    return len(pivots)


class Subspace:
    """A subspace of Q^d, stored as an RREF basis (rows) of the span."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: RationalMatrix):
        if basis.ncols != ambient_dim and basis.nrows > 0:
            raise ValueError("basis width must equal ambient dimension")
        self.ambient_dim = ambient_dim
        self.basis = basis

    @staticmethod
    def from_spanning(ambient_dim: int, vectors) -> "Subspace":
        vecs = [tuple(_as_fraction(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError("spanning vector has wrong length")
        if not vecs:
            return Subspace(ambient_dim, RationalMatrix([], 0, ambient_dim))
        red = rref(RationalMatrix(vecs))
        keep = [row for row in red.rows if any(x != 0 for x in row)]
        return Subspace(
            ambient_dim, RationalMatrix(keep, len(keep), ambient_dim)
        )

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, RationalMatrix([], 0, ambient_dim))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, RationalMatrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"

    def contains(self, vec) -> bool:
        vec = tuple(_as_fraction(x) for x in vec)
        if all(x == 0 for x in vec):
            return True
        stacked = self.basis.vstack(RationalMatrix([vec]))
        return rank(stacked) == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        stacked = self.basis.vstack(other.basis)
        return rank(stacked) == self.dim

    def add(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return Subspace.from_spanning(
            self.ambient_dim, self.basis.rows + other.basis.rows
        )

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus-free intersection via a kernel computation."""
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        # x in both spans: x = a^T u = b^T v; solve [A^T | -B^T] null space.
        at = self.basis.transpose()
        bt = other.basis.transpose()
        nul = kernel_basis(at.hstack(bt.scale(-1)))
        vecs = []
        for coeffs in nul.basis.rows:
            u = coeffs[: self.dim]
            vecs.append(
                tuple(
                    sum((c * row[j] for c, row in zip(u, self.basis.rows)), _ZERO)
                    for j in range(self.ambient_dim)
                )
            )
        return Subspace.from_spanning(self.ambient_dim, vecs)


def kernel_basis(mat: RationalMatrix) -> Subspace:
    """Canonical basis of the null space {x : M x = 0}."""
    n = mat.ncols
    if n == 0:
        return Subspace.zero(0)
    if mat.nrows == 0:
        return Subspace.full(n)
    int_rows = [_clear_denominators(row) for row in mat.rows]
    pivots, out_rows, denoms = rref_int(int_rows, n)
    pivot_set = set(pivots)
    free_cols = [j for j in range(n) if j not in pivot_set]
    vecs = []
    for f in free_cols:
        vec = [_ZERO] * n
        vec[f] = _ONE
        for r, c in enumerate(pivots):
            entry = Fraction(out_rows[r][f], denoms[r])
            if entry:
                vec[c] = -entry
        vecs.append(vec)
    return Subspace.from_spanning(n, vecs)


def image_basis(mat: RationalMatrix) -> Subspace:
    """Canonical basis of the column space."""
    return Subspace.from_spanning(mat.nrows, mat.transpose().rows)


def row_space(mat: RationalMatrix) -> Subspace:
    return Subspace.from_spanning(mat.ncols, mat.rows)


def solve(mat: RationalMatrix, b) -> tuple | None:
    """One solution of M x = b, or None when the system is inconsistent."""
    b = tuple(_as_fraction(x) for x in b)
    if len(b) != mat.nrows:
        raise ValueError("right-hand side length mismatch")
    n = mat.ncols
    aug = RationalMatrix(
        [row + (bi,) for row, bi in zip(mat.rows, b)], mat.nrows, n + 1
    )
    int_rows = [_clear_denominators(row) for row in aug.rows]
    pivots, out_rows, denoms = rref_int(int_rows, n + 1)
    if n in pivots:
        return None
    x = [_ZERO] * n
    for r, c in enumerate(pivots):
        x[c] = Fraction(out_rows[r][n], denoms[r])
    return tuple(x)


def solve_matrix(mat: RationalMatrix, rhs: RationalMatrix) -> RationalMatrix | None:
    """Solve M X = B column by column; None if any column is inconsistent."""
    cols = []
    for j in range(rhs.ncols):
        x = solve(mat, rhs.col(j))
        if x is None:
            return None
        cols.append(x)
    return RationalMatrix(
        [[cols[j][i] for j in range(rhs.ncols)] for i in range(mat.ncols)],
        mat.ncols,
        rhs.ncols,
    )


def inverse(mat: RationalMatrix) -> RationalMatrix | None:
    if mat.nrows != mat.ncols:
        return None
    sol = solve_matrix(mat, RationalMatrix.identity(mat.nrows))
    if sol is None or not (mat * sol == RationalMatrix.identity(mat.nrows)):
        return None
    return sol


def quotient_map(ambient_dim: int, sub: Subspace) -> RationalMatrix:
    """A surjection Q: Q^d -> Q^(d-dim sub) with Q b = 0 for b in sub.

    The complement is spanned by the unit vectors at the non-pivot columns
    of the subspace basis, which makes the construction canonical.
    """
    if sub.ambient_dim != ambient_dim:
        raise ValueError("subspace has wrong ambient dimension")
    r = sub.dim
    d = ambient_dim
    if r == 0:
        return RationalMatrix.identity(d)
    pivot_cols = []
    for row in sub.basis.rows:
        for j, x in enumerate(row):
            if x != 0:
                pivot_cols.append(j)
                break
    pivot_set = set(pivot_cols)
    free_cols = [j for j in range(d) if j not in pivot_set]
    comp = RationalMatrix(
        [[_ONE if j == f else _ZERO for j in range(d)] for f in free_cols],
        len(free_cols),
        d,
    )
    # A = [basis; comp] is invertible; Q reads off the comp-coordinates:
    # Q = [0 | I] * (A^T)^{-1}, so that Q v = coefficients of v along comp.
    a_t = sub.basis.vstack(comp).transpose()
    inv = inverse(a_t)
    assert inv is not None, "basis + complement failed to be invertible"
    return RationalMatrix(inv.rows[r:], d - r, d)
