"""Semigroup identities for tropical matrix monoids.

Covers the identity objects and base library, the inductive construction
(both variants), closed-form length accounting, randomized falsification,
exact verification by monomial hull membership, and the word-separation
demo.

The exact verifier rests on the walk picture: each entry of an evaluation
is the maximum of linear forms (one per labeled walk) in the 2n^2 entry
variables, with nonnegative integer coefficients and no constant term.  Two
words evaluate equally on all matrices with finite entries iff, per entry,
each walk's coefficient vector lies in the convex hull of the other word's
vectors.  Equality extends to matrices with -infinity entries by sending
those entries to -infinity: the limit kills exactly the monomials using
them.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .core import BOTTOM, TropMatrix, TropScalar, lcm_upto, mat_mul
from .exactlp import hull_membership, scale_to_integers
from .words import Concat, Leaf, Repeat, Subst, Word, WordExpr, evaluate, occurrences, substitute


class AdmissionError(ValueError):
    """A base identity failed falsification on its intended monoid."""


@dataclass(frozen=True)
class Identity:
    """An ordered pair of distinct words with the monoid it is meant for."""

    u: Word
    v: Word
    monoid: str = ""
    provenance: str = ""
    u_plan: Optional[WordExpr] = field(default=None, compare=False, repr=False)
    v_plan: Optional[WordExpr] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError("an identity needs two different words")
        if self.u_plan is not None and self.u_plan.word() != self.u:
            raise ValueError("u plan does not flatten to u")
        if self.v_plan is not None and self.v_plan.word() != self.v:
            raise ValueError("v plan does not flatten to v")

    @property
    def length(self) -> int:
        return max(len(self.u), len(self.v))

    def balanced(self) -> bool:
        return occurrences(self.u, "a") == occurrences(self.v, "a") and occurrences(
            self.u, "b"
        ) == occurrences(self.v, "b")

    def to_obj(self) -> dict:
        obj = {"u": self.u.to_text(), "v": self.v.to_text()}
        if self.monoid:
            obj["monoid"] = self.monoid
        if self.provenance:
            obj["provenance"] = self.provenance
        return obj

    @classmethod
    def from_obj(cls, obj: dict) -> "Identity":
        return cls(
            u=Word.parse(obj["u"]),
            v=Word.parse(obj["v"]),
            monoid=obj.get("monoid", ""),
            provenance=obj.get("provenance", ""),
        )


def load_identity(path) -> Identity:
    with open(path, "r", encoding="utf-8") as fh:
        return Identity.from_obj(json.load(fh))


def save_identity(identity: Identity, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(identity.to_obj(), fh, indent=2)
        fh.write("\n")


def monoid_support(monoid: str) -> str:
    return "upper" if monoid.startswith("U") else "full"


def monoid_size(monoid: str) -> int:
    return int(monoid[1:])


def evaluate_identity(identity: Identity, a: TropMatrix, b: TropMatrix):
    """Evaluate both sides on a matrix pair, sharing plan subtrees."""
    memo = {}
    if identity.u_plan is not None and identity.v_plan is not None:
        return identity.u_plan._eval(a, b, memo), identity.v_plan._eval(a, b, memo)
    return evaluate(identity.u, a, b), evaluate(identity.v, a, b)


# -- randomized falsification ---------------------------------------------------


@dataclass(frozen=True)
class EntryDist:
    """Sampling distribution for matrix entries."""

    low: int = -10
    high: int = 10
    bottom_mass: float = 0.0


DEFAULT_DISTS = (EntryDist(), EntryDist(bottom_mass=0.3))


@dataclass(frozen=True)
class Counterexample:
    a: TropMatrix
    b: TropMatrix
    entry: tuple
    u_value: TropScalar
    v_value: TropScalar
    trial: int

    def to_obj(self) -> dict:
        from .core import scalar_to_str

        return {
            "A": self.a.to_obj(),
            "B": self.b.to_obj(),
            "entry": list(self.entry),
            "u_value": scalar_to_str(self.u_value),
            "v_value": scalar_to_str(self.v_value),
            "trial": self.trial,
        }


def sample_matrix(rng, n: int, dist: EntryDist, support: str = "full") -> TropMatrix:
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if support == "upper" and i > j:
                row.append(BOTTOM)
            elif dist.bottom_mass and rng.random() < dist.bottom_mass:
                row.append(BOTTOM)
            else:
                row.append(rng.randint(dist.low, dist.high))
        rows.append(row)
    return TropMatrix(rows)


def falsify(
    identity: Identity,
    n: int,
    trials: int = 10_000,
    seed: int = 0,
    dist: Union[EntryDist, Sequence[EntryDist]] = DEFAULT_DISTS,
    support: str = "full",
) -> Optional[Counterexample]:
    """Sample matrix pairs and evaluate both sides exactly; first mismatch
    wins.  None means the identity survived every trial."""
    if trials < 1:
        raise ValueError("at least one trial")
    dists = [dist] if isinstance(dist, EntryDist) else list(dist)
    rng = random.Random(seed)
    for trial in range(trials):
        d = dists[trial % len(dists)]
        a = sample_matrix(rng, n, d, support)
        b = sample_matrix(rng, n, d, support)
        mu, mv = evaluate_identity(identity, a, b)
        if mu != mv:
            for i in range(n):
                for j in range(n):
                    if mu.entries[i][j] != mv.entries[i][j]:
                        return Counterexample(a, b, (i, j), mu.entries[i][j], mv.entries[i][j], trial)
    return None


# -- exact verification -----------------------------------------------------------


class BudgetExceeded(RuntimeError):
    def __init__(self, entry, count):
        super().__init__(f"walk enumeration for entry {entry} exceeded budget at {count} states")
        self.entry = entry
        self.count = count


def exponent_index(letter: str, i: int, j: int, n: int) -> int:
    return (0 if letter == "a" else 1) * n * n + i * n + j


def walk_exponent_vectors(w: Word, n: int, start: int, support: str, budget: int, counter: list):
    """Deduplicated exponent vectors of w-labeled walks from `start`, per end
    node.  A vector counts, per (letter, arc), how often the walk uses that
    arc; walks agreeing on all counts are the same linear form."""
    dim = 2 * n * n
    states = {(start, (0,) * dim)}
    for letter in w:
        nxt = set()
        for node, vec in states:
            for target in range(n):
                if support == "upper" and node > target:
                    continue
                idx = exponent_index(letter, node, target, n)
                lst = list(vec)
                lst[idx] += 1
                nxt.add((target, tuple(lst)))
                counter[0] += 1
                if counter[0] > budget:
                    raise BudgetExceeded((start,), counter[0])
        states = nxt
    out = {j: set() for j in range(n)}
    for node, vec in states:
        out[node].add(vec)
    return out


@dataclass(frozen=True)
class VerifyResult:
    status: str  # "proved" | "refuted" | "budget_exceeded"
    entry: Optional[tuple] = None
    counterexample: Optional[Counterexample] = None
    separating_direction: Optional[tuple] = None
    monomial_count: int = 0
    hull_checks: int = 0

    @property
    def proved(self) -> bool:
        return self.status == "proved"


def _matrices_from_direction(direction, n: int, support: str):
    coords = scale_to_integers(direction)
    rows_a, rows_b = [], []
    for i in range(n):
        ra, rb = [], []
        for j in range(n):
            if support == "upper" and i > j:
                ra.append(BOTTOM)
                rb.append(BOTTOM)
            else:
                ra.append(coords[exponent_index("a", i, j, n)])
                rb.append(coords[exponent_index("b", i, j, n)])
        rows_a.append(ra)
        rows_b.append(rb)
    return TropMatrix(rows_a), TropMatrix(rows_b)


def _support_filled(n: int, support: str) -> TropMatrix:
    return TropMatrix(
        [[BOTTOM if (support == "upper" and i > j) else 0 for j in range(n)] for i in range(n)]
    )


def _refutation(identity, entry, a, b) -> VerifyResult:
    mu, mv = evaluate(identity.u, a, b), evaluate(identity.v, a, b)
    i, j = entry
    if mu.entries[i][j] == mv.entries[i][j]:
        raise AssertionError("separating assignment failed to refute; verifier bug")
    return VerifyResult(
        status="refuted",
        entry=entry,
        counterexample=Counterexample(a, b, entry, mu.entries[i][j], mv.entries[i][j], -1),
    )


def verify_exact(
    identity: Identity,
    n: int,
    budget: int = 2_000_000,
    support: str = "full",
) -> VerifyResult:
    """Decide whether the identity holds over all n x n matrices (or the
    upper-triangular submonoid) by exact hull-membership checks.

    A refutation converts its separating hyperplane into a concrete integer
    matrix pair, re-checked by direct evaluation before being returned.
    """
    counter = [0]
    dim = 2 * n * n
    total = 0
    checks = 0
    for start in range(n):
        try:
            by_end_u = walk_exponent_vectors(identity.u, n, start, support, budget, counter)
            by_end_v = walk_exponent_vectors(identity.v, n, start, support, budget, counter)
        except BudgetExceeded as exc:
            return VerifyResult(status="budget_exceeded", entry=(start,), monomial_count=exc.count)
        for end in range(n):
            eu, ev = by_end_u[end], by_end_v[end]
            total += len(eu) + len(ev)
            if eu == ev:
                continue
            if not eu or not ev:
                a, b = _support_filled(n, support), _support_filled(n, support)
                return _refutation(identity, (start, end), a, b)
            for vectors, pool in ((eu - ev, ev), (ev - eu, eu)):
                pool_list = sorted(pool)
                for vec in sorted(vectors):
                    checks += 1
                    member, cert = hull_membership(pool_list, vec)
                    if member:
                        continue
                    direction = list(cert)
                    a, b = _matrices_from_direction(direction, n, support)
                    return VerifyResult(
                        status="refuted",
                        entry=(start, end),
                        counterexample=_refutation(identity, (start, end), a, b).counterexample,
                        separating_direction=tuple(direction),
                        monomial_count=total,
                        hull_checks=checks,
                    )
    return VerifyResult(status="proved", monomial_count=total, hull_checks=checks)


# -- two-state triangular oracle ---------------------------------------------------


def _hull2d(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return tuple(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return tuple(sorted(set(lower[:-1] + upper[:-1])))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def u2_prefix_hull_check(u: Word, v: Word) -> bool:
    """Identity test for 2 x 2 upper-triangular pairs, no LP involved.

    The off-diagonal entry of an evaluation maximizes, over the jump
    position m, a linear form determined by the letter at m and the prefix
    letter counts before m; totals fix the remaining coordinates.  So the
    pair is an identity iff letter counts agree and, per jump letter, the
    prefix-count point sets have equal convex hulls.
    """
    if occurrences(u, "a") != occurrences(v, "a") or occurrences(u, "b") != occurrences(v, "b"):
        return False

    def prefix_points(w):
        pts = {"a": [], "b": []}
        ca = cb = 0
        for letter in w:
            pts[letter].append((ca, cb))
            if letter == "a":
                ca += 1
            else:
                cb += 1
        return pts

    pu, pv = prefix_points(u), prefix_points(v)
    return all(_hull2d(pu[x]) == _hull2d(pv[x]) for x in ("a", "b"))


# -- construction ------------------------------------------------------------------


def construction_threshold(n: int) -> int:
    return (n - 1) ** 2 + 1


@dataclass(frozen=True)
class TriangularBase:
    """Identity for the upper-triangular monoid of one size, with the
    sandwich triple (p, qhat, rhat) when the pair has the form
    (p qhat p, p rhat p)."""

    identity: Identity
    triple: Optional[tuple] = None  # (p, qhat, rhat) as Words

    def __post_init__(self):
        if self.triple is not None:
            p, qh, rh = self.triple
            if p + qh + p != self.identity.u or p + rh + p != self.identity.v:
                raise ValueError("triple does not compose to the identity pair")


def construct_identity(
    n: int,
    base_prev: Identity,
    tri: Union[Identity, TriangularBase, tuple],
    variant: str = "ii",
    t: Optional[int] = None,
    nbar: Optional[int] = None,
    allow_short_t: bool = False,
) -> Identity:
    """Build an identity for the n x n matrix monoid from one for size n-1
    and a triangular identity for size n.

    variant "i" uses a pair (q, r); variant "ii" needs the sandwich triple
    (p, qhat, rhat).  Both substitute a -> a^nbar, b -> b^nbar inside and
    then splice the previous identity's words, appended with a final letter,
    over the two long blocks.
    """
    if t is None:
        t = construction_threshold(n)
    if t < construction_threshold(n):
        if not allow_short_t:
            raise ValueError(
                f"t={t} is below the guarantee threshold {construction_threshold(n)}; "
                "pass allow_short_t=True for experiments"
            )
        warnings.warn("t below the guarantee threshold: output may fail to be an identity")
    if nbar is None:
        nbar = lcm_upto(n)
    an = Leaf(Word([("a", nbar)]))
    bn = Leaf(Word([("b", nbar)]))
    if variant == "i":
        if isinstance(tri, TriangularBase):
            tri = tri.identity
        if not isinstance(tri, Identity):
            raise TypeError("variant i needs the triangular identity pair")
        q, r = tri.u, tri.v
        x_expr = Repeat(Subst(q + r, an, bn), t)
        y_expr = Concat((x_expr, Subst(r, an, bn)))
    elif variant == "ii":
        if isinstance(tri, TriangularBase):
            if tri.triple is None:
                raise ValueError("variant ii needs the sandwich triple")
            p, qh, rh = tri.triple
        else:
            p, qh, rh = tri
        core = Subst(p + qh + p + rh + p, an, bn)
        w_expr = Repeat(core, t)
        x_expr = Concat((w_expr, Subst(qh + p, an, bn)))
        y_expr = Concat((w_expr, Subst(rh + p, an, bn)))
    else:
        raise ValueError("variant must be 'i' or 'ii'")
    ua = base_prev.u + Word([("a", 1)])
    va = base_prev.v + Word([("a", 1)])
    u_plan = Subst(ua, x_expr, y_expr)
    v_plan = Subst(va, x_expr, y_expr)
    out = Identity(
        u=u_plan.word(),
        v=v_plan.word(),
        monoid=f"M{n}",
        provenance=f"built from {base_prev.monoid or 'previous'} and triangular base, variant {variant}, t={t}",
        u_plan=u_plan,
        v_plan=v_plan,
    )
    if not out.balanced():
        raise AssertionError("constructed identity is unbalanced; construction bug")
    return out


@dataclass(frozen=True)
class LengthReport:
    len_x: int
    len_y: int
    len_u: int
    len_v: int
    identity_length: int


def construction_length(
    n: int,
    variant: str,
    len_u: int,
    len_v: int,
    a_count_u: int,
    b_count_u: int,
    a_count_v: Optional[int] = None,
    b_count_v: Optional[int] = None,
    t: Optional[int] = None,
    nbar: Optional[int] = None,
    len_q: Optional[int] = None,
    len_r: Optional[int] = None,
    len_p: Optional[int] = None,
    len_qhat: Optional[int] = None,
    len_rhat: Optional[int] = None,
) -> LengthReport:
    """Closed-form length accounting for the construction, checkable against
    explicit substitution whenever the words themselves are available."""
    if t is None:
        t = construction_threshold(n)
    if nbar is None:
        nbar = lcm_upto(n)
    if a_count_v is None:
        a_count_v = a_count_u
    if b_count_v is None:
        b_count_v = b_count_u
    if a_count_u + b_count_u != len_u or a_count_v + b_count_v != len_v:
        raise ValueError("letter counts do not sum to the word lengths")
    if variant == "i":
        if len_q is None or len_r is None:
            raise ValueError("variant i needs len_q and len_r")
        len_x = nbar * t * (len_q + len_r)
        len_y = nbar * (t * (len_q + len_r) + len_r)
    elif variant == "ii":
        if len_p is None or len_qhat is None or len_rhat is None:
            raise ValueError("variant ii needs len_p, len_qhat, len_rhat")
        len_w = t * (3 * len_p + len_qhat + len_rhat)
        len_x = nbar * (len_w + len_qhat + len_p)
        len_y = nbar * (len_w + len_rhat + len_p)
    else:
        raise ValueError("variant must be 'i' or 'ii'")
    big_u = (a_count_u + 1) * len_x + b_count_u * len_y
    big_v = (a_count_v + 1) * len_x + b_count_v * len_y
    return LengthReport(len_x, len_y, big_u, big_v, max(big_u, big_v))


# -- base library -------------------------------------------------------------------


@dataclass
class BaseLibrary:
    """Seed identities for the induction: the smallest matrix case plus one
    triangular base per size, all admitted only after surviving the
    falsifier on their intended monoid."""

    m_small: Identity
    triangular: dict
    matrix_overrides: dict

    @staticmethod
    def admit(identity: Identity, trials: int = 500, seed: int = 20260810) -> Identity:
        monoid = identity.monoid
        if not monoid:
            raise AdmissionError("identity carries no intended monoid")
        counter = falsify(
            identity,
            monoid_size(monoid),
            trials=trials,
            seed=seed,
            support=monoid_support(monoid),
        )
        if counter is not None:
            raise AdmissionError(
                f"identity for {monoid} refuted at trial {counter.trial}, entry {counter.entry}"
            )
        return identity

    def matrix_identity(self, n: int, variant: str = "ii", t: Optional[int] = None) -> Identity:
        """Identity for the n x n matrix monoid, from overrides when present
        and by the inductive construction otherwise."""
        if n in self.matrix_overrides:
            return self.matrix_overrides[n]
        if n == 1:
            return self.m_small
        if n not in self.triangular:
            raise KeyError(f"no triangular base registered for size {n}")
        base = self.matrix_identity(n - 1, variant=variant)
        return construct_identity(n, base, self.triangular[n], variant=variant, t=t)


def _fixture_path(name: str):
    from importlib import resources

    return resources.files("tropid.fixtures").joinpath(name)


def load_fixture_identity(name: str) -> Identity:
    with _fixture_path(name).open("r", encoding="utf-8") as fh:
        return Identity.from_obj(json.load(fh))


def default_library(trials: int = 300, seed: int = 20260810) -> BaseLibrary:
    """The shipped bases: (ab, ba) seeds size one; the sandwich pairs over
    abba and its expansion seed the triangular sizes; a two-letter fixture
    of length 17 overrides the size-two matrix case when present."""
    m1 = BaseLibrary.admit(
        Identity(Word.parse("ab"), Word.parse("ba"), monoid="M1", provenance="scalars commute"),
        trials=trials,
        seed=seed,
    )
    triangular = {}
    for n, name in ((2, "u2_base.json"), (3, "u3_base.json")):
        obj = json.loads(_fixture_path(name).read_text(encoding="utf-8"))
        ident = BaseLibrary.admit(Identity.from_obj(obj), trials=trials, seed=seed)
        p, qh, rh = (Word.parse(obj["p"]), Word.parse(obj["qhat"]), Word.parse(obj["rhat"]))
        triangular[n] = TriangularBase(ident, (p, qh, rh))
    overrides = {}
    try:
        m2 = BaseLibrary.admit(load_fixture_identity("m2_base.json"), trials=trials, seed=seed)
        overrides[2] = m2
    except FileNotFoundError:
        pass
    return BaseLibrary(m_small=m1, triangular=triangular, matrix_overrides=overrides)


# -- word separation ------------------------------------------------------------------


@dataclass(frozen=True)
class Separator:
    """Weighted automaton assigning the two words different weights."""

    initial: TropMatrix  # 1 x n
    a: TropMatrix
    b: TropMatrix
    final: TropMatrix  # n x 1
    u_weight: TropScalar
    v_weight: TropScalar
    trial: int

    def to_obj(self) -> dict:
        from .core import scalar_to_str

        return {
            "initial": self.initial.to_obj(),
            "A": self.a.to_obj(),
            "B": self.b.to_obj(),
            "final": self.final.to_obj(),
            "u_weight": scalar_to_str(self.u_weight),
            "v_weight": scalar_to_str(self.v_weight),
            "trial": self.trial,
        }


def try_separate(
    u: Word,
    v: Word,
    n: int,
    trials: int = 2000,
    seed: int = 0,
    dist: EntryDist = EntryDist(),
) -> Optional[Separator]:
    """Sample n-state weighted automata; a word's weight is
    initial (x) evaluation (x) final.  Returns the first automaton weighing
    u and v differently, or None."""
    if u == v:
        raise ValueError("identical words cannot be separated")
    rng = random.Random(seed)
    for trial in range(trials):
        a = sample_matrix(rng, n, dist)
        b = sample_matrix(rng, n, dist)
        initial = TropMatrix([[rng.randint(dist.low, dist.high) for _ in range(n)]])
        final = TropMatrix([[rng.randint(dist.low, dist.high)] for _ in range(n)])
        wu = mat_mul(mat_mul(initial, evaluate(u, a, b)), final).entries[0][0]
        wv = mat_mul(mat_mul(initial, evaluate(v, a, b)), final).entries[0][0]
        if wu != wv:
            return Separator(initial, a, b, final, wu, wv, trial)
    return None
