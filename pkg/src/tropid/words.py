"""Two-letter words, substitution, and matrix-pair evaluation.

Words over {a, b} are stored run-length compressed so the constructed
identities (tens of thousands of letters) stay cheap to build and evaluate.
Evaluation is the left-to-right product of the letter matrices; an
independent dynamic program over the labeled-weighted digraph of the pair
serves as cross-check oracle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Sequence

from .core import (
    BOTTOM,
    CapExceeded,
    ShapeError,
    TropMatrix,
    TropScalar,
    lcm_upto,
    mat_max,
    mat_mul,
    mat_pow,
    permanent,
    trace,
)
from .ranks import tropical_rank

ONE_CYCLIC_NODE_CAP = 8

_WORD_TOKEN = re.compile(r"([ab])(?:\^(\d+))?")


class Word:
    """Nonempty word over {a, b}, run-length compressed."""

    __slots__ = ("runs", "_length")

    def __init__(self, runs):
        merged = []
        for letter, count in runs:
            if letter not in ("a", "b"):
                raise ValueError(f"letter must be 'a' or 'b', got {letter!r}")
            if count < 0:
                raise ValueError("negative run count")
            if count == 0:
                continue
            if merged and merged[-1][0] == letter:
                merged[-1] = (letter, merged[-1][1] + count)
            else:
                merged.append((letter, count))
        if not merged:
            raise ValueError("the empty word is excluded")
        object.__setattr__(self, "runs", tuple(merged))
        object.__setattr__(self, "_length", sum(c for _, c in merged))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse plain ("abba") or run-length ("a^2 b^2 a") notation."""
        stripped = text.replace(" ", "").replace("\n", "").replace("\t", "")
        runs = []
        pos = 0
        for match in _WORD_TOKEN.finditer(stripped):
            if match.start() != pos:
                raise ValueError(f"cannot parse word at {stripped[pos:pos+10]!r}")
            pos = match.end()
            runs.append((match.group(1), int(match.group(2) or 1)))
        if pos != len(stripped):
            raise ValueError(f"cannot parse word at {stripped[pos:pos+10]!r}")
        return cls(runs)

    def __len__(self):
        return self._length

    def __iter__(self):
        for letter, count in self.runs:
            for _ in range(count):
                yield letter

    def __eq__(self, other):
        return isinstance(other, Word) and self.runs == other.runs

    def __hash__(self):
        return hash(self.runs)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.runs + other.runs)

    def __mul__(self, k: int) -> "Word":
        if k < 1:
            raise ValueError("word powers need k >= 1")
        return Word(self.runs * k)

    __rmul__ = __mul__

    def count(self, letter: str) -> int:
        return sum(c for l, c in self.runs if l == letter)

    def to_plain(self) -> str:
        return "".join(l * c for l, c in self.runs)

    def to_rle(self) -> str:
        return " ".join(l if c == 1 else f"{l}^{c}" for l, c in self.runs)

    def to_text(self, rle_threshold: int = 120) -> str:
        return self.to_rle() if len(self) > rle_threshold else self.to_plain()

    def __repr__(self):
        body = self.to_rle() if len(self) > 40 else self.to_plain()
        return f"Word({body!r})"


def W(text: str) -> Word:
    return Word.parse(text)


def occurrences(w: Word, letter: str) -> int:
    """Number of occurrences of a letter."""
    if letter not in ("a", "b"):
        raise ValueError("letter must be 'a' or 'b'")
    return w.count(letter)


def substitute(w: Word, u: Word, v: Word) -> Word:
    """Replace each a by u and each b by v."""
    runs = []
    for letter, count in w.runs:
        block = u if letter == "a" else v
        if len(block.runs) == 1:
            bl, bc = block.runs[0]
            runs.append((bl, bc * count))
        else:
            runs.extend(block.runs * count)
    return Word(runs)


# -- evaluation ------------------------------------------------------------


def evaluate(w: Word, a: TropMatrix, b: TropMatrix) -> TropMatrix:
    """Product of the letter matrices along w (a -> `a`, b -> `b`).

    Letter powers inside runs are computed once per distinct run length by
    repeated squaring; the per-run partial products multiply left to right.
    """
    if not a.is_square() or not b.is_square() or a.rows != b.rows:
        raise ShapeError("evaluation needs square matrices of equal size")
    cache = {}

    def letter_power(letter, count):
        key = (letter, count)
        got = cache.get(key)
        if got is not None:
            return got
        base = a if letter == "a" else b
        if count == 1:
            out = base
        elif count % 2:
            out = mat_mul(letter_power(letter, count - 1), base)
        else:
            half = letter_power(letter, count // 2)
            out = mat_mul(half, half)
        cache[key] = out
        return out

    acc = None
    for letter, count in w.runs:
        block = letter_power(letter, count)
        acc = block if acc is None else mat_mul(acc, block)
    return acc


@dataclass(frozen=True)
class LWDigraph:
    """Labeled-weighted digraph of a matrix pair: a-arcs from the first
    matrix, b-arcs from the second; parallel arcs carry distinct labels."""

    node_count: int
    arcs: frozenset  # of (from, to, label, weight)

    @classmethod
    def from_pair(cls, a: TropMatrix, b: TropMatrix) -> "LWDigraph":
        if not a.is_square() or a.shape != b.shape:
            raise ShapeError("pair digraph needs equal square matrices")
        arcs = set()
        for label, mat in (("a", a), ("b", b)):
            for i, row in enumerate(mat.entries):
                for j, x in enumerate(row):
                    if x is not BOTTOM:
                        arcs.add((i, j, label, x))
        return cls(a.rows, frozenset(arcs))


def evaluate_walk_dp(w: Word, a: TropMatrix, b: TropMatrix) -> TropMatrix:
    """Evaluation via best w-labeled walks on the pair digraph.

    Independent of the matrix-product route; used as its oracle.
    """
    if not a.is_square() or not b.is_square() or a.rows != b.rows:
        raise ShapeError("evaluation needs square matrices of equal size")
    n = a.rows
    rows = []
    for i in range(n):
        best = [BOTTOM] * n
        best[i] = 0
        for letter in w:
            mat = a if letter == "a" else b
            nxt = [BOTTOM] * n
            for u in range(n):
                bu = best[u]
                if bu is BOTTOM:
                    continue
                row = mat.entries[u]
                for v in range(n):
                    x = row[v]
                    if x is BOTTOM:
                        continue
                    cand = bu + x
                    if nxt[v] is BOTTOM or cand > nxt[v]:
                        nxt[v] = cand
            best = nxt
        rows.append(best)
    return TropMatrix(rows)


# -- evaluation plans --------------------------------------------------------


class WordExpr:
    """Composition tree for a word; evaluation maps the tree through the
    product homomorphism so shared subtrees are computed once per matrix
    pair."""

    def word(self) -> Word:
        raise NotImplementedError

    def evaluate(self, a: TropMatrix, b: TropMatrix, memo: Optional[dict] = None) -> TropMatrix:
        if memo is None:
            memo = {}
        return self._eval(a, b, memo)

    def _eval(self, a, b, memo):
        got = memo.get(id(self))
        if got is None:
            got = self._compute(a, b, memo)
            memo[id(self)] = got
        return got

    def _compute(self, a, b, memo):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Leaf(WordExpr):
    payload: Word

    def word(self):
        return self.payload

    def _compute(self, a, b, memo):
        return evaluate(self.payload, a, b)


@dataclass(frozen=True, eq=False)
class Concat(WordExpr):
    parts: tuple

    def word(self):
        acc = self.parts[0].word()
        for part in self.parts[1:]:
            acc = acc + part.word()
        return acc

    def _compute(self, a, b, memo):
        acc = self.parts[0]._eval(a, b, memo)
        for part in self.parts[1:]:
            acc = mat_mul(acc, part._eval(a, b, memo))
        return acc


@dataclass(frozen=True, eq=False)
class Repeat(WordExpr):
    base: WordExpr
    times: int

    def __post_init__(self):
        if self.times < 1:
            raise ValueError("word powers need at least one repetition")

    def word(self):
        return self.base.word() * self.times

    def _compute(self, a, b, memo):
        return mat_pow(self.base._eval(a, b, memo), self.times)


@dataclass(frozen=True, eq=False)
class Subst(WordExpr):
    outer: Word
    on_a: WordExpr
    on_b: WordExpr

    def word(self):
        return substitute(self.outer, self.on_a.word(), self.on_b.word())

    def _compute(self, a, b, memo):
        ma = self.on_a._eval(a, b, memo)
        mb = self.on_b._eval(a, b, memo)
        return evaluate(self.outer, ma, mb)


# -- structure checks ----------------------------------------------------------


@dataclass(frozen=True)
class PrDiagnostics:
    holds: bool
    per_a_equals_trace: bool
    per_b_equals_trace: bool
    full_rank: bool
    rank: int


def pr_condition(a: TropMatrix, b: TropMatrix, w: Word) -> PrDiagnostics:
    """per(A) = tr(A), per(B) = tr(B), and the evaluation of w has full
    tropical rank."""
    if not a.is_square() or a.shape != b.shape:
        raise ShapeError("condition needs equal square matrices")
    pa = permanent(a).value == trace(a)
    pb = permanent(b).value == trace(b)
    rank = tropical_rank(evaluate(w, a, b)).value
    full = rank == a.rows
    return PrDiagnostics(pa and pb and full, pa, pb, full, rank)


def diagonal_formula_check(a: TropMatrix, b: TropMatrix, w: Word) -> bool:
    """Diagonal of the evaluation equals |w|_a A_ii + |w|_b B_ii for all i.

    Only meaningful when pr_condition holds; raises otherwise.
    """
    diag = pr_condition(a, b, w)
    if not diag.holds:
        raise ValueError("diagonal formula requires the permanent/rank condition")
    mat = evaluate(w, a, b)
    ka, kb = occurrences(w, "a"), occurrences(w, "b")
    for i in range(a.rows):
        x, y = a.entries[i][i], b.entries[i][i]
        expected = BOTTOM if (x is BOTTOM and ka) or (y is BOTTOM and kb) else (
            (0 if not ka else ka * x) + (0 if not kb else kb * y)
        )
        if mat.entries[i][i] != expected:
            return False
    return True


def one_cyclic_optimum(w: Word, a: TropMatrix, b: TropMatrix, i: int, j: int) -> TropScalar:
    """Best weight of a w-labeled walk i -> j that never returns to a node it
    has departed: maximize, over node orders, the evaluation with all
    backward entries dropped."""
    return one_cyclic_matrix(w, a, b).entries[i][j]


def one_cyclic_matrix(w: Word, a: TropMatrix, b: TropMatrix) -> TropMatrix:
    if not a.is_square() or a.shape != b.shape:
        raise ShapeError("walk optimum needs equal square matrices")
    n = a.rows
    if n > ONE_CYCLIC_NODE_CAP:
        raise CapExceeded(f"order enumeration capped at n={ONE_CYCLIC_NODE_CAP}")
    best = TropMatrix.bottom(n, n)
    for order in permutations(range(n)):
        pos = [0] * n
        for rank_, v in enumerate(order):
            pos[v] = rank_
        ta = TropMatrix([[a.entries[x][y] if pos[x] <= pos[y] else BOTTOM for y in range(n)] for x in range(n)])
        tb = TropMatrix([[b.entries[x][y] if pos[x] <= pos[y] else BOTTOM for y in range(n)] for x in range(n)])
        best = mat_max(best, evaluate(w, ta, tb))
    return best


def perm_trace_power_check(a: TropMatrix) -> bool:
    """If a^lcm(1..n) has full tropical rank, its permanent equals its trace.

    Returns True also in the vacuous branch (rank below n).
    """
    if not a.is_square():
        raise ShapeError("check needs a square matrix")
    n = a.rows
    power = mat_pow(a, lcm_upto(n))
    if tropical_rank(power).value < n:
        return True
    return permanent(power).value == trace(power)


def random_pr_pair(rng, n: int, w: Word, low: int = -10, high: int = 10, attempts: int = 500):
    """Sample a strictly diagonally dominant matrix pair until the rank
    conjunct of the permanent/rank condition holds for w.

    Diagonal dominance (diagonal exceeding every entry in its row and column
    by at least 1) forces per = tr; acceptance of the pair is decided by the
    full condition.
    """
    for _ in range(attempts):
        mats = []
        for _ in range(2):
            rows = [[rng.randint(low, high) for _ in range(n)] for _ in range(n)]
            for idx in range(n):
                bound = max(
                    max(rows[idx][k] for k in range(n) if k != idx) if n > 1 else low,
                    max(rows[k][idx] for k in range(n) if k != idx) if n > 1 else low,
                )
                rows[idx][idx] = max(rows[idx][idx], bound + 1)
            mats.append(TropMatrix(rows))
        a, b = mats
        if pr_condition(a, b, w).holds:
            return a, b
    raise RuntimeError(f"no matrix pair satisfying the condition after {attempts} attempts")
