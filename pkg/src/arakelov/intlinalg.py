"""Exact linear algebra over Z, Q and quadratic rings of integers.

Everything here is exact: integer matrices use Python ints, rational ones
use fractions.Fraction, and quadratic integers use QuadElement coordinates.
The workhorse is row Hermite reduction with a tracked unimodular transform;
kernels and saturations fall out of it (a transform-tracked echelon yields a
saturated kernel basis, and saturation is the kernel of the kernel).

Over quadratic rings the same echelon runs with Euclidean division steps,
which restricts those entry points to norm-Euclidean fields.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DependentGeneratorsError, UnsupportedFieldError
from .numberfield import NumberField, QuadElement

__all__ = [
    "NORM_EUCLIDEAN_D",
    "complete_to_unimodular",
    "hnf",
    "hnf_with_transform",
    "is_primitive_vector",
    "kernel_rows",
    "ok_divmod",
    "ok_gcd",
    "ok_is_primitive_vector",
    "ok_kernel_rows",
    "ok_saturation_rows",
    "rat_det",
    "rat_inverse",
    "right_kernel_rows",
    "saturation_rows",
    "transpose",
    "unimodular_inverse",
]

# Quadratic fields whose ring of integers is norm-Euclidean; Euclidean-division
# based routines refuse anything else.
NORM_EUCLIDEAN_D = (-11, -7, -3, -2, -1,
                    2, 3, 5, 6, 7, 11, 13, 17, 19, 21, 29, 33, 37, 41)

Matrix = list[list[int]]


def transpose(rows: list[list], ncols: int) -> list[list]:
    return [[row[j] for row in rows] for j in range(ncols)]


def _identity(m: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(m)] for i in range(m)]


def _as_int_matrix(rows) -> Matrix:
    out = []
    for row in rows:
        new = []
        for x in row:
            xi = int(x)
            if xi != x:
                raise ValueError(f"non-integer matrix entry {x!r}")
            new.append(xi)
        out.append(new)
    return out


def hnf_with_transform(rows, ncols: int | None = None) -> tuple[Matrix, Matrix]:
    """Row Hermite form H = U A with U unimodular.

    H is in row echelon form with positive pivots and entries above each
    pivot reduced into [0, pivot).  Zero rows sink to the bottom, so the
    rows of U opposite them form a basis of the left kernel of A.
    """
    A = _as_int_matrix(rows)
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = _identity(m)
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        U[r], U[piv] = U[piv], U[r]
        for i in range(r + 1, m):
            while A[i][c] != 0:
                q = A[r][c] // A[i][c]
                A[r] = [a - q * b for a, b in zip(A[r], A[i])]
                U[r] = [a - q * b for a, b in zip(U[r], U[i])]
                A[r], A[i] = A[i], A[r]
                U[r], U[i] = U[i], U[r]
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
            U[r] = [-a for a in U[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
        r += 1
        if r == m:
            break
    return A, U


def hnf(rows, ncols: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Canonical Hermite form with zero rows dropped; usable as a dict key."""
    H, _ = hnf_with_transform(rows, ncols)
    return tuple(tuple(row) for row in H if any(row))


def kernel_rows(rows, ncols: int | None = None) -> Matrix:
    """Basis of the left kernel {u : u A = 0}; always a saturated subgroup."""
    H, U = hnf_with_transform(rows, ncols)
    return [U[i] for i in range(len(H)) if not any(H[i])]


def right_kernel_rows(rows, ncols: int) -> Matrix:
    """Basis of {x : A x = 0}, each solution returned as a row."""
    return kernel_rows(transpose(rows, ncols), len(rows))


def saturation_rows(rows, ncols: int) -> Matrix:
    """Basis of the saturation (Q-span intersected with Z^n) of the row span,
    returned in canonical Hermite form."""
    comp = right_kernel_rows(rows, ncols)
    if not comp:
        return _identity(ncols)
    sat = right_kernel_rows(comp, ncols)
    return [list(row) for row in hnf(sat, ncols)]


def is_primitive_vector(v) -> bool:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g == 1


def unimodular_inverse(U: list[list[int]]) -> Matrix:
    """Exact inverse of an integer matrix with det +-1."""
    inv = rat_inverse([[Fraction(x) for x in row] for row in U])
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def complete_to_unimodular(rows, ncols: int) -> Matrix:
    """Extend a basis of a saturated subgroup to a basis of Z^n.

    Returns an n x n unimodular matrix whose first k rows are the input.
    Raises DependentGeneratorsError when the rows are dependent or span a
    non-saturated subgroup.
    """
    k = len(rows)
    B = _as_int_matrix(rows)
    H, U = hnf_with_transform(transpose(B, ncols), k)
    ok = all(H[i][j] == (1 if i == j else 0)
             for i in range(len(H)) for j in range(k))
    if not ok:
        raise DependentGeneratorsError(
            "rows do not form a basis of a saturated subgroup")
    V = transpose(unimodular_inverse(U), ncols)
    if V[:k] != B:
        raise DependentGeneratorsError(
            "rows do not form a basis of a saturated subgroup")
    return V


# ----------------------------------------------------------------------
# exact rational matrices
# ----------------------------------------------------------------------

def rat_det(rows) -> Fraction:
    M = [[Fraction(x) for x in row] for row in rows]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] * inv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det


def rat_inverse(rows) -> list[list[Fraction]]:
    M = [[Fraction(x) for x in row] for row in rows]
    n = len(M)
    aug = [M[i] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


# ----------------------------------------------------------------------
# quadratic rings of integers (norm-Euclidean only)
# ----------------------------------------------------------------------

def _require_norm_euclidean(field: NumberField):
    if field.is_rational():
        return
    if field.D not in NORM_EUCLIDEAN_D:
        raise UnsupportedFieldError(
            f"{field.descriptor} is not norm-Euclidean; "
            "exact module reduction is unavailable")


def ok_divmod(field: NumberField, x: QuadElement, y: QuadElement):
    """Euclidean step: q, r with x = q y + r and |N(r)| < |N(y)|."""
    _require_norm_euclidean(field)
    ny = abs(field.norm(y))
    if ny == 0:
        raise ZeroDivisionError("division by zero")
    z = field.divide(x, y)
    a0, b0 = math.floor(z.a), math.floor(z.b)
    best = None
    for da in range(-1, 3):
        for db in range(-1, 3):
            q = field.element(a0 + da, b0 + db)
            r = field.sub(x, field.mul(q, y))
            nr = abs(field.norm(r))
            if best is None or nr < best[0]:
                best = (nr, q, r)
    if best[0] >= ny:
        raise UnsupportedFieldError(
            f"Euclidean division failed in {field.descriptor}")
    return best[1], best[2]


def ok_gcd(field: NumberField, x: QuadElement, y: QuadElement) -> QuadElement:
    while not field.is_zero(y):
        _, r = ok_divmod(field, x, y)
        x, y = y, r
    return x


def ok_is_primitive_vector(field: NumberField, v) -> bool:
    """True when the coordinates generate the unit ideal."""
    g = field.element(0)
    for x in v:
        g = ok_gcd(field, g, field.coerce(x))
        if abs(field.norm(g)) == 1:
            return True
    return abs(field.norm(g)) == 1


def _ok_echelon_with_transform(field: NumberField, rows, ncols: int):
    """Row echelon over the ring of integers with a tracked GL transform."""
    _require_norm_euclidean(field)
    A = [[field.coerce(x) for x in row] for row in rows]
    m = len(A)
    one, zero = field.element(1), field.element(0)
    U = [[one if i == j else zero for j in range(m)] for i in range(m)]

    def combine(dst, src, q):
        A[dst] = [field.sub(a, field.mul(q, b)) for a, b in zip(A[dst], A[src])]
        U[dst] = [field.sub(a, field.mul(q, b)) for a, b in zip(U[dst], U[src])]

    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if not field.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        U[r], U[piv] = U[piv], U[r]
        for i in range(r + 1, m):
            while not field.is_zero(A[i][c]):
                q, _ = ok_divmod(field, A[r][c], A[i][c])
                combine(r, i, q)
                A[r], A[i] = A[i], A[r]
                U[r], U[i] = U[i], U[r]
        r += 1
        if r == m:
            break
    return A, U


def ok_kernel_rows(field: NumberField, rows, ncols: int):
    """Basis of the left kernel of a matrix over the ring of integers."""
    A, U = _ok_echelon_with_transform(field, rows, ncols)
    return [U[i] for i in range(len(A))
            if all(field.is_zero(x) for x in A[i])]


def ok_saturation_rows(field: NumberField, rows, ncols: int):
    """Saturation of the row span inside O_K^n (kernel of the kernel)."""
    if field.is_rational():
        sat = saturation_rows(rows, ncols)
        return [[Fraction(x) for x in row] for row in sat]
    coerced = [[field.coerce(x) for x in row] for row in rows]
    comp = ok_kernel_rows(field, transpose(coerced, ncols), len(coerced))
    if not comp:
        one, zero = field.element(1), field.element(0)
        return [[one if i == j else zero for j in range(ncols)]
                for i in range(ncols)]
    return ok_kernel_rows(field, transpose(comp, ncols), len(comp))
