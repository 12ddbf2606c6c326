"""Exact max-plus (tropical) scalars and dense matrices.

Finite values are Python ints or ``fractions.Fraction``; the bottom element
(-infinity) is the singleton ``BOTTOM``.  Floats are rejected at every entry
point, so all downstream checks can compare results bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence, Union


class TropError(Exception):
    """Base error for this package."""


class ShapeError(TropError, ValueError):
    """Incompatible or illegal matrix dimensions."""


class CapExceeded(TropError, ValueError):
    """Input exceeds the size cap of the selected strategy."""


class _Bottom:
    """-infinity: identity of tropical addition (max), absorbing under +."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "-inf"

    def __add__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __le__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __gt__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __ge__(self, other):
        if other is self:
            return True
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented


BOTTOM = _Bottom()

TropScalar = Union[int, Fraction, _Bottom]


def is_bottom(x: TropScalar) -> bool:
    return x is BOTTOM


def check_scalar(x) -> TropScalar:
    """Validate a scalar, rejecting floats and other inexact types."""
    if x is BOTTOM:
        return x
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise TypeError(f"tropical scalar must be int, Fraction or BOTTOM, got {x!r}")
    return x


def scalar_to_str(x: TropScalar) -> str:
    if x is BOTTOM:
        return "-inf"
    return str(x)


def scalar_from_str(s) -> TropScalar:
    """Parse "-inf", an integer string, or "p/q"."""
    if isinstance(s, int) and not isinstance(s, bool):
        return s
    if not isinstance(s, str):
        raise TypeError(f"expected entry string, got {s!r}")
    text = s.strip()
    if text == "-inf":
        return BOTTOM
    if "/" in text:
        num, den = text.split("/")
        frac = Fraction(int(num), int(den))
        return frac.numerator if frac.denominator == 1 else frac
    return int(text)


class TropMatrix:
    """Dense rectangular matrix over the max-plus semiring, immutable."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[TropScalar]]):
        rows = tuple(tuple(check_scalar(x) for x in row) for row in entries)
        if not rows or not rows[0]:
            raise ShapeError("matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged rows")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("TropMatrix is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "TropMatrix":
        return cls([[0 if i == j else BOTTOM for j in range(n)] for i in range(n)])

    @classmethod
    def bottom(cls, rows: int, cols: int) -> "TropMatrix":
        return cls([[BOTTOM] * cols for _ in range(rows)])

    @classmethod
    def fill(cls, rows: int, cols: int, value: TropScalar) -> "TropMatrix":
        return cls([[value] * cols for _ in range(rows)])

    # -- basic access --------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx) -> TropScalar:
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int):
        return self.entries[i]

    def col(self, j: int):
        return tuple(r[j] for r in self.entries)

    def row_matrix(self, i: int) -> "TropMatrix":
        return TropMatrix([self.entries[i]])

    def col_matrix(self, j: int) -> "TropMatrix":
        return TropMatrix([[r[j]] for r in self.entries])

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "TropMatrix":
        return TropMatrix([[self.entries[i][j] for j in col_idx] for i in row_idx])

    def shift(self, alpha: TropScalar) -> "TropMatrix":
        """Add alpha to every finite entry (tropical scalar multiple)."""
        check_scalar(alpha)
        if alpha is BOTTOM:
            return TropMatrix.bottom(self.rows, self.cols)
        return TropMatrix([[x if x is BOTTOM else x + alpha for x in row] for row in self.entries])

    def transpose(self) -> "TropMatrix":
        return TropMatrix(list(zip(*self.entries)))

    def finite_positions(self):
        return [(i, j) for i, row in enumerate(self.entries) for j, x in enumerate(row) if x is not BOTTOM]

    def __eq__(self, other):
        return (
            isinstance(other, TropMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash(self.entries)

    def __matmul__(self, other: "TropMatrix") -> "TropMatrix":
        return mat_mul(self, other)

    def __repr__(self):
        body = "; ".join(" ".join(scalar_to_str(x) for x in row) for row in self.entries)
        return f"TropMatrix[{body}]"

    # -- serialization -------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[scalar_to_str(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "TropMatrix":
        mat = cls([[scalar_from_str(x) for x in row] for row in obj["entries"]])
        if mat.rows != obj["rows"] or mat.cols != obj["cols"]:
            raise ShapeError("declared shape does not match entries")
        return mat


def load_matrix(path) -> TropMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return TropMatrix.from_obj(json.load(fh))


def save_matrix(mat: TropMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mat.to_obj(), fh, indent=2)
        fh.write("\n")


# -- arithmetic ---------------------------------------------------------


def mat_mul(a: TropMatrix, b: TropMatrix) -> TropMatrix:
    """Max-plus product: (ab)_ij = max_k (a_ik + b_kj)."""
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    bcols = list(zip(*b.entries))
    out = []
    for arow in a.entries:
        orow = []
        for bcol in bcols:
            best = BOTTOM
            for x, y in zip(arow, bcol):
                if x is BOTTOM or y is BOTTOM:
                    continue
                s = x + y
                if best is BOTTOM or s > best:
                    best = s
            orow.append(best)
        out.append(orow)
    return TropMatrix(out)


def mat_max(a: TropMatrix, b: TropMatrix) -> TropMatrix:
    """Entrywise maximum (tropical sum)."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return TropMatrix(
        [[x if y is BOTTOM else (y if x is BOTTOM else max(x, y)) for x, y in zip(ra, rb)]
         for ra, rb in zip(a.entries, b.entries)]
    )


def mat_max_all(mats: Iterable[TropMatrix]) -> TropMatrix:
    mats = list(mats)
    if not mats:
        raise ValueError("empty tropical sum has no shape")
    acc = mats[0]
    for m in mats[1:]:
        acc = mat_max(acc, m)
    return acc


def mat_pow(a: TropMatrix, t: int) -> TropMatrix:
    """t-fold product by iterated multiplication; a^0 is the identity."""
    if not a.is_square():
        raise ShapeError("powers need a square matrix")
    if t < 0:
        raise ValueError("negative power")
    acc = TropMatrix.identity(a.rows)
    for _ in range(t):
        acc = mat_mul(acc, a)
    return acc


def power_table(a: TropMatrix, tmax: int) -> list:
    """[a^0, a^1, ..., a^tmax] built by iterated products."""
    if not a.is_square():
        raise ShapeError("powers need a square matrix")
    table = [TropMatrix.identity(a.rows)]
    for _ in range(tmax):
        table.append(mat_mul(table[-1], a))
    return table


def trace(a: TropMatrix) -> TropScalar:
    """Ordinary sum of diagonal entries; BOTTOM absorbs."""
    if not a.is_square():
        raise ShapeError("trace needs a square matrix")
    total = 0
    for i in range(a.rows):
        x = a.entries[i][i]
        if x is BOTTOM:
            return BOTTOM
        total = total + x
    return total


def lcm_upto(n: int) -> int:
    """lcm(1, ..., n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.lcm(*range(1, n + 1))


# -- permanent ----------------------------------------------------------

EXHAUSTIVE_PERMANENT_LIMIT = 8
PERMUTATION_CAP = 16


@dataclass(frozen=True)
class PermanentReport:
    """Value of the tropical permanent plus attainment data.

    ``optimal_permutations`` lists permutations of finite weight equal to the
    value, sorted lexicographically and truncated to the cap; it is empty when
    the value is BOTTOM.  ``unique`` is True iff exactly one permutation
    attains a finite value.
    """

    value: TropScalar
    optimal_permutations: tuple
    truncated: bool
    unique: bool
    strategy: str


def permutation_weight(a: TropMatrix, perm: Sequence[int]) -> TropScalar:
    total = 0
    for i, j in enumerate(perm):
        x = a.entries[i][j]
        if x is BOTTOM:
            return BOTTOM
        total = total + x
    return total


def permanent(a: TropMatrix, strategy: str = "auto", perm_cap: int = PERMUTATION_CAP) -> PermanentReport:
    """Max over permutations of the sum of selected entries.

    strategy "exhaustive" enumerates all n! permutations (n <= 8); strategy
    "assignment" solves the optimal-assignment problem by exact dynamic
    programming over column subsets and tests uniqueness on the same table.
    "auto" picks by size.
    """
    if not a.is_square():
        raise ShapeError("permanent needs a square matrix")
    n = a.rows
    if strategy == "auto":
        strategy = "exhaustive" if n <= EXHAUSTIVE_PERMANENT_LIMIT else "assignment"
    if strategy == "exhaustive":
        if n > EXHAUSTIVE_PERMANENT_LIMIT:
            raise CapExceeded(f"exhaustive permanent is capped at n={EXHAUSTIVE_PERMANENT_LIMIT}")
        return _permanent_exhaustive(a, perm_cap)
    if strategy == "assignment":
        return _permanent_assignment(a, perm_cap)
    raise ValueError(f"unknown permanent strategy {strategy!r}")


def _permanent_exhaustive(a: TropMatrix, perm_cap: int) -> PermanentReport:
    n = a.rows
    best = BOTTOM
    attain = []
    for perm in permutations(range(n)):
        w = permutation_weight(a, perm)
        if w is BOTTOM:
            continue
        if best is BOTTOM or w > best:
            best = w
            attain = [perm]
        elif w == best:
            attain.append(perm)
    truncated = len(attain) > perm_cap
    return PermanentReport(
        value=best,
        optimal_permutations=tuple(attain[:perm_cap]),
        truncated=truncated,
        unique=(best is not BOTTOM and len(attain) == 1),
        strategy="exhaustive",
    )


def _permanent_assignment(a: TropMatrix, perm_cap: int) -> PermanentReport:
    # layer[size][mask] = (best filling of the last `size` rows with the free
    # columns in mask, uniqueness flag); rows are assigned back to front so a
    # forward walk can list optimal permutations in lexicographic order.
    n = a.rows
    layer = [{0: (0, True)}]
    for size in range(1, n + 1):
        arow = a.entries[n - size]
        ng = {}
        for mask, (val, uniq) in layer[size - 1].items():
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    continue
                x = arow[j]
                if x is BOTTOM:
                    continue
                cand = val + x
                cur = ng.get(mask | bit)
                if cur is None or cand > cur[0]:
                    ng[mask | bit] = (cand, uniq)
                elif cand == cur[0]:
                    ng[mask | bit] = (cand, False)
        layer.append(ng)
    full = (1 << n) - 1
    if full not in layer[n]:
        return PermanentReport(BOTTOM, (), False, False, "assignment")
    value, unique = layer[n][full]

    attain = []
    overflow = False

    def walk(row, mask, prefix):
        nonlocal overflow
        if overflow:
            return
        if row == n:
            if len(attain) < perm_cap:
                attain.append(tuple(prefix))
            else:
                overflow = True
            return
        arow = a.entries[row]
        need = layer[n - row][mask][0]
        for j in range(n):
            bit = 1 << j
            if not (mask & bit):
                continue
            x = arow[j]
            if x is BOTTOM:
                continue
            rest = layer[n - row - 1].get(mask ^ bit)
            if rest is not None and rest[0] + x == need:
                prefix.append(j)
                walk(row + 1, mask ^ bit, prefix)
                prefix.pop()
                if overflow:
                    return

    walk(0, full, [])
    return PermanentReport(
        value=value,
        optimal_permutations=tuple(attain),
        truncated=overflow,
        unique=unique,
        strategy="assignment",
    )


def is_nonsingular(a: TropMatrix) -> bool:
    """True iff the permanent is finite and attained by a single permutation."""
    return permanent(a).unique
