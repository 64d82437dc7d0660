"""Horn clauses, Horn formulas, the random ensemble H^k_{n,d}, and the text format.

A :class:`HornFormula` is stored as flat arrays so that formulas with hundreds of
thousands of clauses can be generated and solved without per-clause Python
objects:

``heads[c]``
    positive variable of clause ``c`` (1-based), or 0 if the clause has none.
``body[body_ptr[c]:body_ptr[c + 1]]``
    the strictly increasing variables that appear negated in clause ``c``.

Text format (``hcnf``)::

    c optional comment lines start with "c"
    p hcnf <n> <m>
    <lit> <lit> ... 0        one clause per line, m lines in total

Literals are non-zero integers with ``|lit| <= n``; at most one may be positive.
The canonical (serialized) clause order is the positive literal first, then the
negative literals in increasing variable order, so ``2 -1 0`` is the clause
``(not x1 or x2)``.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DensityTooHigh,
    DuplicateVariable,
    HornError,
    HornViolation,
    NonHornClause,
    NTooSmall,
    OutOfRange,
    ParseError,
)

HEADER_TAG = "hcnf"


@dataclass(frozen=True, order=True)
class HornClause:
    """A clause with at most one positive literal.

    ``positive`` is the positive variable or ``None``; ``negatives`` is the
    strictly increasing tuple of negated variables.  Use :func:`make_clause`
    to build one from unsorted input.
    """

    positive: int | None
    negatives: tuple[int, ...] = ()

    def __post_init__(self):
        negs = self.negatives
        for a, b in zip(negs, negs[1:]):
            if a == b:
                raise DuplicateVariable(f"variable {a} negated twice")
            if a > b:
                raise HornError(f"negatives {negs} must be strictly increasing; use make_clause")
        if self.positive is not None and self.positive in negs:
            raise DuplicateVariable(f"variable {self.positive} appears with both signs")
        for v in negs:
            if v < 1:
                raise OutOfRange(f"variable id {v} < 1")
        if self.positive is not None and self.positive < 1:
            raise OutOfRange(f"variable id {self.positive} < 1")

    @property
    def is_positive_unit(self) -> bool:
        return self.positive is not None and not self.negatives

    @property
    def is_negative_unit(self) -> bool:
        return self.positive is None and len(self.negatives) == 1

    def __len__(self) -> int:
        return len(self.negatives) + (self.positive is not None)

    def literals(self) -> list[int]:
        """Signed literals in canonical order (positive first)."""
        lits = [] if self.positive is None else [self.positive]
        lits.extend(-v for v in self.negatives)
        return lits


def make_clause(
    positive: int | Sequence[int] | None,
    negatives: Iterable[int] = (),
    n: int | None = None,
) -> HornClause:
    """Build a canonical clause, checking the Horn property and variable range.

    ``positive`` may be given as a sequence; more than one entry raises
    :class:`HornViolation`.
    """
    if positive is not None and not isinstance(positive, (int, np.integer)):
        pos_list = list(positive)
        if len(pos_list) > 1:
            raise HornViolation(f"{len(pos_list)} positive literals requested: {pos_list}")
        positive = pos_list[0] if pos_list else None
    negs = [int(v) for v in negatives]
    if len(set(negs)) != len(negs):
        dup = next(v for v, c in Counter(negs).items() if c > 1)
        raise DuplicateVariable(f"variable {dup} negated twice")
    if positive is not None:
        positive = int(positive)
        if positive in negs:
            raise DuplicateVariable(f"variable {positive} appears with both signs")
    for v in negs + ([positive] if positive is not None else []):
        if v < 1 or (n is not None and v > n):
            raise OutOfRange(f"variable id {v} outside 1..{n if n is not None else 'n'}")
    return HornClause(positive, tuple(sorted(negs)))


class HornFormula:
    """Conjunction of Horn clauses over variables ``1..n`` (a clause multiset)."""

    __slots__ = ("n", "heads", "body_ptr", "body")

    def __init__(self, n: int, clauses: Iterable[HornClause] = ()):
        clauses = list(clauses)
        heads = np.fromiter((c.positive or 0 for c in clauses), dtype=np.int32, count=len(clauses))
        lengths = np.fromiter((len(c.negatives) for c in clauses), dtype=np.int64, count=len(clauses))
        body_ptr = np.zeros(len(clauses) + 1, dtype=np.int64)
        np.cumsum(lengths, out=body_ptr[1:])
        body = np.fromiter(
            (v for c in clauses for v in c.negatives), dtype=np.int32, count=int(body_ptr[-1])
        )
        self._set(n, heads, body_ptr, body, validate=True)

    @classmethod
    def from_arrays(cls, n, heads, body_ptr, body, validate: bool = True) -> "HornFormula":
        self = cls.__new__(cls)
        self._set(
            n,
            np.ascontiguousarray(heads, dtype=np.int32),
            np.ascontiguousarray(body_ptr, dtype=np.int64),
            np.ascontiguousarray(body, dtype=np.int32),
            validate=validate,
        )
        return self

    def _set(self, n, heads, body_ptr, body, validate):
        n = int(n)
        if n < 0:
            raise OutOfRange(f"n must be >= 0, got {n}")
        self.n = n
        self.heads = heads
        self.body_ptr = body_ptr
        self.body = body
        for a in (heads, body_ptr, body):
            a.setflags(write=False)
        if validate:
            self._validate()

    def _validate(self):
        n, heads, ptr, body = self.n, self.heads, self.body_ptr, self.body
        if ptr.shape != (heads.size + 1,) or ptr[0] != 0 or ptr[-1] != body.size:
            raise OutOfRange("inconsistent clause pointer array")
        if np.any(np.diff(ptr) < 0):
            raise OutOfRange("clause pointers must be non-decreasing")
        if heads.size and (heads.min() < 0 or heads.max() > n):
            raise OutOfRange(f"positive literal outside 1..{n}")
        if body.size and (body.min() < 1 or body.max() > n):
            raise OutOfRange(f"negative literal outside 1..{n}")
        if body.size > 1:
            step = np.diff(body.astype(np.int64))
            inner = np.ones(body.size - 1, dtype=bool)
            starts = ptr[1:-1]
            starts = starts[(starts > 0) & (starts < body.size)]
            inner[starts - 1] = False
            if np.any(step[inner] <= 0):
                raise DuplicateVariable("clause negatives must be strictly increasing and distinct")
        owner = np.repeat(np.arange(heads.size), np.diff(ptr))
        if np.any(body == heads[owner]):
            raise DuplicateVariable("a clause contains a variable with both signs")

    # -- views ---------------------------------------------------------------------

    @property
    def num_clauses(self) -> int:
        return int(self.heads.size)

    def __len__(self) -> int:
        return self.num_clauses

    @property
    def literal_count(self) -> int:
        return int(self.body.size + np.count_nonzero(self.heads))

    def clause(self, i: int) -> HornClause:
        h = int(self.heads[i])
        negs = tuple(int(v) for v in self.body[self.body_ptr[i] : self.body_ptr[i + 1]])
        return HornClause(h or None, negs)

    @property
    def clauses(self) -> list[HornClause]:
        return [self.clause(i) for i in range(self.num_clauses)]

    def __iter__(self):
        return iter(self.clauses)

    def _keys(self) -> Counter:
        b = self.body.tolist()
        p = self.body_ptr.tolist()
        return Counter(
            (h, tuple(b[p[i] : p[i + 1]])) for i, h in enumerate(self.heads.tolist())
        )

    def __eq__(self, other):
        if not isinstance(other, HornFormula):
            return NotImplemented
        return self.n == other.n and self.num_clauses == other.num_clauses and self._keys() == other._keys()

    __hash__ = None

    def __repr__(self):
        return f"HornFormula(n={self.n}, clauses={self.num_clauses}, literals={self.literal_count})"

    def evaluate(self, assignment) -> bool:
        """True when the 0/1 ``assignment`` (index 0 unused, length n+1) satisfies every clause."""
        a = np.asarray(assignment, dtype=bool)
        if a.shape != (self.n + 1,):
            raise ValueError(f"assignment must have length n+1={self.n + 1}")
        owner = np.repeat(np.arange(self.num_clauses), np.diff(self.body_ptr))
        # clause violated <=> every negated var true and head false (or absent)
        false_negs = np.bincount(owner, weights=~a[self.body], minlength=self.num_clauses)
        head_true = (self.heads > 0) & a[self.heads]
        return bool(np.all(head_true | (false_negs > 0)))


# -- random ensemble ---------------------------------------------------------------


@dataclass(frozen=True)
class DensityVector:
    """Ensemble parameters ``(d1, ..., dk)``: clauses of each length per variable."""

    d: tuple[float, ...]

    def __post_init__(self):
        d = tuple(float(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if len(d) < 1:
            raise ValueError("a density vector needs k >= 1 entries")
        if any(not math.isfinite(x) or x < 0 for x in d):
            raise ValueError(f"densities must be finite and non-negative, got {d}")
        if d[0] >= 1:
            raise ValueError(f"d1 must be < 1, got {d[0]}")

    @classmethod
    def of(cls, *d: float, k: int | None = None) -> "DensityVector":
        """``DensityVector.of(0.1, 0, 3.0)``; pads with zeros up to ``k``."""
        if len(d) == 1 and isinstance(d[0], (list, tuple, np.ndarray)):
            d = tuple(d[0])
        d = tuple(d)
        if k is not None:
            if len(d) > k:
                raise ValueError(f"{len(d)} densities given for k={k}")
            d = d + (0.0,) * (k - len(d))
        return cls(d)

    @property
    def k(self) -> int:
        return len(self.d)

    @property
    def d1(self) -> float:
        return self.d[0]

    def __getitem__(self, j: int) -> float:
        """1-based access: ``dv[j]`` is d_j (0.0 beyond k)."""
        if j < 1:
            raise IndexError(j)
        return self.d[j - 1] if j <= self.k else 0.0

    def counts(self, n: int) -> list[int]:
        """Clause counts per length; ``round`` ties go to even."""
        return [int(round(x * n)) for x in self.d]


@dataclass(frozen=True)
class EnsembleSample:
    formula: HornFormula
    seed: int
    # counts[j-1] = number of length-j clauses drawn (positive units for j=1)
    counts: list[int] = field(default_factory=list)


def _sorted_columns(cols: list[np.ndarray]) -> list[np.ndarray]:
    """Sort across columns row-wise; min/max networks for widths 2 and 3."""
    if len(cols) == 2:
        x, y = cols
        return [np.minimum(x, y), np.maximum(x, y)]
    if len(cols) == 3:
        x, y, z = cols
        lo = np.minimum(np.minimum(x, y), z)
        hi = np.maximum(np.maximum(x, y), z)
        return [lo, x + y + z - lo - hi, hi]
    if len(cols) < 2:
        return cols
    srt = np.sort(np.stack(cols, axis=1), axis=1)
    return [np.ascontiguousarray(srt[:, c]) for c in range(len(cols))]


def _floyd_columns(rng: np.random.Generator, n: int, j: int, m: int) -> list[np.ndarray]:
    cols: list[np.ndarray] = []
    for i in range(n - j, n):
        r = rng.integers(0, i + 1, size=m, dtype=np.int32)
        if cols:
            hit = r == cols[0]
            for c in cols[1:]:
                hit |= r == c
            r[hit] = i
        cols.append(r)
    return _sorted_columns(cols)


def floyd_subsets(rng: np.random.Generator, n: int, j: int, m: int) -> np.ndarray:
    """``m`` independent uniform ``j``-subsets of ``{0..n-1}``, one per row.

    Robert Floyd's algorithm, run column by column across all rows at once.
    Rows are returned sorted.
    """
    cols = _floyd_columns(rng, n, j, m)
    return np.stack(cols, axis=1) if cols else np.empty((m, 0), dtype=np.int64)


def sample_clause_block(rng: np.random.Generator, n: int, j: int, m: int):
    """``m`` Horn clauses of length ``j``, each uniform over the j*C(n,j) choices.

    Returns ``(heads, bodies)`` with 1-based variables; ``bodies`` has shape
    ``(m, j-1)`` and increasing rows.
    """
    cols = _floyd_columns(rng, n, j, m)
    pos = rng.integers(0, j, size=m)
    heads = np.choose(pos, cols) + 1
    bodies = np.empty((m, j - 1), dtype=np.int32)
    for c in range(j - 1):
        bodies[:, c] = np.where(pos > c, cols[c], cols[c + 1])
    bodies += 1
    return heads, bodies


def sample_arrays(n: int, dv: DensityVector, seed):
    """Draw one ensemble member as raw arrays ``(heads, body_ptr, body, counts)``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts (an int or a
    ``SeedSequence``); the bit generator is PCG64.  Draw order is fixed:
    positive units first, then clause lengths 2..k in turn.
    """
    k = dv.k
    if n < k or n < 1:
        raise NTooSmall(f"n={n} must be at least k={k} (and >= 1)")
    counts = dv.counts(n)
    if counts[0] > n - 1:
        raise DensityTooHigh(f"round(d1*n)={counts[0]} positive units exceed the n-1={n - 1} available variables")
    rng = np.random.default_rng(seed)

    heads_parts = [np.zeros(1, dtype=np.int64)]
    body_parts = [np.ones(1, dtype=np.int64)]
    len_parts = [np.ones(1, dtype=np.int64)]

    units = rng.choice(n - 1, size=counts[0], replace=False) + 2
    heads_parts.append(units)
    len_parts.append(np.zeros(counts[0], dtype=np.int64))

    for j in range(2, k + 1):
        m = counts[j - 1]
        if m == 0:
            continue
        h, b = sample_clause_block(rng, n, j, m)
        heads_parts.append(h)
        body_parts.append(b.ravel())
        len_parts.append(np.full(m, j - 1, dtype=np.int64))

    heads = np.concatenate(heads_parts).astype(np.int32)
    body = np.concatenate(body_parts).astype(np.int32)
    lengths = np.concatenate(len_parts)
    body_ptr = np.zeros(heads.size + 1, dtype=np.int64)
    np.cumsum(lengths, out=body_ptr[1:])
    return heads, body_ptr, body, counts


def sample_ensemble(n: int, dv: DensityVector, seed: int) -> EnsembleSample:
    """Sample H^k_{n,d}: the unit ``not x1``, round(d1*n) distinct positive units
    drawn from ``x2..xn`` without replacement, and round(dj*n) length-j clauses
    drawn uniformly with replacement for each j >= 2."""
    heads, ptr, body, counts = sample_arrays(n, dv, seed)
    f = HornFormula.from_arrays(n, heads, ptr, body, validate=False)
    return EnsembleSample(formula=f, seed=int(seed), counts=counts)


# -- text format -------------------------------------------------------------------


def serialize_formula(f: HornFormula) -> str:
    lines = [f"p {HEADER_TAG} {f.n} {f.num_clauses}"]
    heads = f.heads.tolist()
    body = f.body.tolist()
    ptr = f.body_ptr.tolist()
    for i, h in enumerate(heads):
        parts = [str(h)] if h else []
        parts.extend(f"-{v}" for v in body[ptr[i] : ptr[i + 1]])
        parts.append("0")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _tokens(line: str):
    """Yield ``(token, 1-based column)`` for whitespace-separated tokens."""
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        yield tok, col + 1
        col += len(tok)


def parse_formula(text: str | bytes) -> HornFormula:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    n = m = None
    heads: list[int] = []
    lengths: list[int] = []
    body: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = list(_tokens(raw))
        if n is None:
            if toks[0][0] != "p":
                raise ParseError("expected header 'p hcnf <n> <m>'", lineno, toks[0][1])
            if len(toks) != 4 or toks[1][0] != HEADER_TAG:
                raise ParseError("header must be 'p hcnf <n> <m>'", lineno, toks[0][1])
            try:
                n, m = int(toks[2][0]), int(toks[3][0])
            except ValueError:
                raise ParseError("header counts must be integers", lineno, toks[2][1]) from None
            if n < 0 or m < 0:
                raise ParseError("header counts must be non-negative", lineno, toks[2][1])
            continue
        if toks[0][0] == "p":
            raise ParseError("duplicate header", lineno, toks[0][1])
        pos = None
        negs: list[int] = []
        seen: set[int] = set()
        terminated = False
        for tok, col in toks:
            if terminated:
                raise ParseError("text after clause terminator 0", lineno, col)
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"expected an integer literal, got {tok!r}", lineno, col) from None
            if lit == 0:
                terminated = True
                continue
            v = abs(lit)
            if v > n:
                raise ParseError(f"variable {v} exceeds n={n}", lineno, col)
            if v in seen:
                raise ParseError(f"variable {v} repeated in clause", lineno, col)
            seen.add(v)
            if lit > 0:
                if pos is not None:
                    raise NonHornClause(f"second positive literal {lit}", lineno, col)
                pos = lit
            else:
                negs.append(v)
        if not terminated:
            raise ParseError("clause not terminated by 0", lineno, len(raw.rstrip()) + 1)
        negs.sort()
        heads.append(pos or 0)
        lengths.append(len(negs))
        body.extend(negs)
    if n is None:
        raise ParseError("missing header 'p hcnf <n> <m>'", max(1, len(text.splitlines())))
    if len(heads) != m:
        raise ParseError(f"header declares {m} clauses, found {len(heads)}", len(text.splitlines()) or 1)
    ptr = np.zeros(len(heads) + 1, dtype=np.int64)
    np.cumsum(lengths, out=ptr[1:])
    return HornFormula.from_arrays(n, np.array(heads), ptr, np.array(body), validate=True)


__all__ = [
    "DensityVector",
    "EnsembleSample",
    "HornClause",
    "HornFormula",
    "floyd_subsets",
    "make_clause",
    "parse_formula",
    "sample_arrays",
    "sample_clause_block",
    "sample_ensemble",
    "serialize_formula",
]
