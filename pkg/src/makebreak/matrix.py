"""Dense k-by-k matrices over GF(p), plus the left-kernel routine the attack
uses to solve its homogeneous linear system.

Entries are canonical residues (plain ints) stored row-major. Arithmetic is
exact, so Gaussian elimination pivots on the first nonzero entry in a column;
there is no magnitude pivoting to worry about. Products are schoolbook
O(k^3): k stays small enough that anything fancier would be noise.
"""

from __future__ import annotations

import random

from .field import FieldSpec, MismatchedField, mod_inverse


class ShapeMismatch(ValueError):
    """Matrix operands have incompatible dimensions."""


class SingularMatrix(ArithmeticError):
    """Inverse requested for a matrix without one."""


class MatrixFp:
    """Square matrix over GF(p); immutable by convention after construction."""

    __slots__ = ("field", "k", "entries")

    def __init__(self, field: FieldSpec, k: int, entries: list[int]):
        if k < 1:
            raise ShapeMismatch(f"dimension must be at least 1, got {k}")
        if len(entries) != k * k:
            raise ShapeMismatch(f"expected {k * k} entries, got {len(entries)}")
        self.field = field
        self.k = k
        self.entries = entries

    @classmethod
    def from_rows(cls, field: FieldSpec, rows) -> "MatrixFp":
        k = len(rows)
        if any(len(r) != k for r in rows):
            raise ShapeMismatch("matrix must be square")
        p = field.p
        return cls(field, k, [int(x) % p for row in rows for x in row])

    @classmethod
    def zero(cls, field: FieldSpec, k: int) -> "MatrixFp":
        return cls(field, k, [0] * (k * k))

    @classmethod
    def identity(cls, field: FieldSpec, k: int) -> "MatrixFp":
        entries = [0] * (k * k)
        for i in range(k):
            entries[i * k + i] = 1 % field.p
        return cls(field, k, entries)

    @classmethod
    def random(cls, field: FieldSpec, k: int, rng: random.Random) -> "MatrixFp":
        p = field.p
        return cls(field, k, [rng.randrange(p) for _ in range(k * k)])

    @classmethod
    def random_invertible(cls, field: FieldSpec, k: int, rng: random.Random) -> "MatrixFp":
        """Rejection-sample uniform matrices until one inverts."""
        while True:
            cand = cls.random(field, k, rng)
            try:
                cand.inv()
            except SingularMatrix:
                continue
            return cand

    def rows(self) -> list[list[int]]:
        k = self.k
        return [self.entries[i * k : (i + 1) * k] for i in range(k)]

    def flatten(self) -> list[int]:
        """Row-major flattening; inverse of from_flat."""
        return list(self.entries)

    @classmethod
    def from_flat(cls, field: FieldSpec, k: int, flat) -> "MatrixFp":
        p = field.p
        return cls(field, k, [int(x) % p for x in flat])

    def _check(self, other: "MatrixFp"):
        if self.field.p != other.field.p:
            raise MismatchedField(
                f"cannot mix GF({self.field.p}) and GF({other.field.p})"
            )
        if self.k != other.k:
            raise ShapeMismatch(f"dimension mismatch: {self.k} vs {other.k}")

    def __add__(self, other: "MatrixFp") -> "MatrixFp":
        self._check(other)
        p = self.field.p
        return MatrixFp(
            self.field, self.k,
            [(x + y) % p for x, y in zip(self.entries, other.entries)],
        )

    def __sub__(self, other: "MatrixFp") -> "MatrixFp":
        self._check(other)
        p = self.field.p
        return MatrixFp(
            self.field, self.k,
            [(x - y) % p for x, y in zip(self.entries, other.entries)],
        )

    def scale(self, c: int) -> "MatrixFp":
        p = self.field.p
        c %= p
        return MatrixFp(self.field, self.k, [c * x % p for x in self.entries])

    def __mul__(self, other: "MatrixFp") -> "MatrixFp":
        self._check(other)
        k = self.k
        p = self.field.p
        a = self.entries
        cols = [other.entries[j::k] for j in range(k)]
        out = []
        for i in range(0, k * k, k):
            row = a[i : i + k]
            out.extend(sum(x * y for x, y in zip(row, col)) % p for col in cols)
        return MatrixFp(self.field, k, out)

    def __pow__(self, e: int) -> "MatrixFp":
        """Binary square-and-multiply; e may be thousands of bits."""
        e = int(e)
        if e < 0:
            raise ValueError("negative exponent; invert explicitly instead")
        result = MatrixFp.identity(self.field, self.k)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inv(self) -> "MatrixFp":
        """Gauss-Jordan inverse, first-nonzero pivoting."""
        k = self.k
        p = self.field.p
        aug = []
        for i in range(k):
            row = list(self.entries[i * k : (i + 1) * k])
            row.extend(1 if j == i else 0 for j in range(k))
            aug.append(row)
        for col in range(k):
            piv = None
            for r in range(col, k):
                if aug[r][col]:
                    piv = r
                    break
            if piv is None:
                raise SingularMatrix(f"no pivot in column {col}")
            aug[col], aug[piv] = aug[piv], aug[col]
            scale = mod_inverse(aug[col][col], p)
            prow = [x * scale % p for x in aug[col]]
            aug[col] = prow
            for r in range(k):
                f = aug[r][col]
                if r != col and f:
                    aug[r] = [(x - f * y) % p for x, y in zip(aug[r], prow)]
        entries = []
        for i in range(k):
            entries.extend(aug[i][k:])
        return MatrixFp(self.field, k, entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, MatrixFp)
            and self.field.p == other.field.p
            and self.k == other.k
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.field.p, self.k, tuple(self.entries)))

    def __repr__(self):
        return f"MatrixFp(p={self.field.p}, rows={self.rows()})"

    def to_strings(self) -> list[list[str]]:
        """Row-major nested lists of decimal strings (the wire format)."""
        k = self.k
        return [[str(x) for x in self.entries[i * k : (i + 1) * k]] for i in range(k)]

    @classmethod
    def from_strings(cls, field: FieldSpec, rows) -> "MatrixFp":
        parsed = []
        for row in rows:
            cur = []
            for s in row:
                if not isinstance(s, str) or not s.isdigit():
                    raise ValueError(f"matrix entry must be a decimal string, got {s!r}")
                cur.append(int(s))
            parsed.append(cur)
        return cls.from_rows(field, parsed)


def poly_eval(coeffs, H: MatrixFp) -> MatrixFp:
    """Evaluate c0*I + c1*H + ... + c_{d}*H^d by Horner's rule.

    The result is a polynomial in H and therefore commutes with H.
    """
    coeffs = [int(c) for c in coeffs]
    if not coeffs:
        raise ValueError("need at least one coefficient")
    k = H.k
    p = H.field.p
    acc = MatrixFp.zero(H.field, k)
    for c in reversed(coeffs):
        acc = acc * H
        if c % p:
            e = list(acc.entries)
            for i in range(k):
                e[i * k + i] = (e[i * k + i] + c) % p
            acc = MatrixFp(H.field, k, e)
    return acc


def _rref(mat: list[list[int]], p: int) -> list[int]:
    """Reduce mat to reduced row-echelon form in place; return pivot columns."""
    nrows = len(mat)
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        scale = mod_inverse(mat[r][c], p)
        prow = [x * scale % p for x in mat[r]]
        mat[r] = prow
        for i in range(nrows):
            f = mat[i][c]
            if i != r and f:
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


def left_kernel(rows, field: FieldSpec) -> list[list[int]]:
    """Basis of all v with sum_i v[i] * rows[i] = 0, over GF(p).

    Augments the input rows with an identity block, row-reduces the combined
    matrix, and reads the kernel off the identity side of every row whose
    input side reduced to zero. The returned vectors are nonzero and linearly
    independent; an empty list means the rows are independent.
    """
    if not rows:
        raise ValueError("need at least one row")
    p = field.p
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ShapeMismatch("rows must share one length")
    m = len(rows)
    work = []
    for i, row in enumerate(rows):
        r = [int(x) % p for x in row]
        r.extend(1 if j == i else 0 for j in range(m))
        work.append(r)
    _rref(work, p)
    return [r[width:] for r in work if not any(r[:width])]
