"""Bit-packed GF(2) vectors, matrices, and combinatorial generators.

Vectors live in packed machine words: a length-``n`` vector is a Python int
whose bit ``i`` (LSB first) holds coordinate ``i + 1``.  All linear algebra is
word-level — row operations are single int XORs, never per-coordinate loops.

The canonical ordering used everywhere vectors of F_2^n are enumerated is
weight ascending, ties broken lexicographically on the sorted 0-based support
list.  ``hamming_ball(n, n)`` therefore enumerates all of F_2^n in canonical
order, and ``canonical_index`` inverts that enumeration.
"""

from __future__ import annotations

import math
from itertools import combinations
from random import Random
from typing import Iterable, Sequence

from .errors import PreconditionError, RetryExhaustedError

__all__ = [
    "BitVector",
    "BitMatrix",
    "XorBasis",
    "AffineSolver",
    "binom_sum",
    "rank",
    "sample_uniform_matrix",
    "sample_invertible",
    "hamming_ball",
    "weight_slice",
    "canonical_index",
    "enumerate_span",
    "nullspace_basis",
    "span_rank",
]


class BitVector:
    """Immutable vector over GF(2), packed into a single int.

    The textual form is a string of ``'0'``/``'1'`` where string position i
    (0-based) is coordinate i+1, e.g. ``"100"`` is the first standard basis
    vector of F_2^3.
    """

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValueError("vector length must be nonnegative")
        self.n = n
        self.bits = bits & ((1 << n) - 1)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse the '0'/'1' textual form."""
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return cls(len(text), bits)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "BitVector":
        """Build the vector of length n with ones at the given 0-based indices."""
        bits = 0
        for i in support:
            if not 0 <= i < n:
                raise ValueError(f"support index {i} out of range for length {n}")
            bits |= 1 << i
        return cls(n, bits)

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))

    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> tuple[int, ...]:
        """Sorted 0-based indices of the nonzero coordinates."""
        return tuple(i for i in range(self.n) if (self.bits >> i) & 1)

    def canonical_key(self) -> tuple[int, tuple[int, ...]]:
        """Sort key realizing the weight-then-lex canonical order."""
        return (self.bits.bit_count(), self.support())

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError("length mismatch")
        return BitVector(self.n, self.bits ^ other.bits)

    __add__ = __xor__  # addition over GF(2) is XOR

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"BitVector({self.to_string()!r})"


class BitMatrix:
    """Immutable GF(2) matrix stored as one packed int per row.

    Bit ``j`` of ``row_words[i]`` is entry (i, j).  The textual form is the
    row strings joined by newlines.
    """

    __slots__ = ("rows", "cols", "row_words")

    def __init__(self, rows: int, cols: int, row_words: Sequence[int]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(row_words) != rows:
            raise ValueError("row count mismatch")
        mask = (1 << cols) - 1
        self.rows = rows
        self.cols = cols
        self.row_words = tuple(w & mask for w in row_words)

    @classmethod
    def from_rows(cls, vectors: Sequence[BitVector]) -> "BitMatrix":
        if not vectors:
            raise ValueError("cannot infer width of an empty matrix")
        cols = vectors[0].n
        if any(v.n != cols for v in vectors):
            raise ValueError("ragged rows")
        return cls(len(vectors), cols, [v.bits for v in vectors])

    @classmethod
    def from_string(cls, text: str) -> "BitMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln]
        return cls.from_rows([BitVector.from_string(ln) for ln in lines])

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, [0] * rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.row_words[i])

    def column_word(self, j: int) -> int:
        """Column j packed into an int (bit i = entry (i, j))."""
        if not 0 <= j < self.cols:
            raise IndexError(j)
        out = 0
        for i, w in enumerate(self.row_words):
            out |= ((w >> j) & 1) << i
        return out

    def mul_vec(self, v: BitVector) -> BitVector:
        """Matrix-vector product; v has length ``cols``, result length ``rows``."""
        if v.n != self.cols:
            raise ValueError("dimension mismatch")
        return BitVector(self.rows, self.apply_word(v.bits))

    def apply_word(self, bits: int) -> int:
        """Like :meth:`mul_vec` but on raw packed words (hot path)."""
        out = 0
        for i, w in enumerate(self.row_words):
            out |= ((w & bits).bit_count() & 1) << i
        return out

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, [self.column_word(j) for j in range(self.cols)])

    def to_string(self) -> str:
        return "\n".join(self.row(i).to_string() for i in range(self.rows))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.row_words == other.row_words
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.row_words))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


class XorBasis:
    """Incremental row basis for GF(2) spans, keyed by leading bit.

    ``add`` returns True exactly when the word enlarged the span, which is how
    rank certificates track their witness rows.
    """

    __slots__ = ("_pivots",)

    def __init__(self) -> None:
        self._pivots: dict[int, int] = {}

    def reduce(self, word: int) -> int:
        while word:
            lead = word.bit_length() - 1
            pivot = self._pivots.get(lead)
            if pivot is None:
                break
            word ^= pivot
        return word

    def add(self, word: int) -> bool:
        word = self.reduce(word)
        if word == 0:
            return False
        self._pivots[word.bit_length() - 1] = word
        return True

    def contains(self, word: int) -> bool:
        return self.reduce(word) == 0

    def __len__(self) -> int:
        return len(self._pivots)


def binom_sum(n: int, d: int) -> int:
    """Sum of binomial coefficients C(n, 0) + ... + C(n, d), exactly."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if d < 0:
        return 0
    return sum(math.comb(n, i) for i in range(min(n, d) + 1))


def rank(matrix: BitMatrix) -> int:
    """GF(2) rank by word-level XOR elimination; the input is not modified."""
    basis = XorBasis()
    r = 0
    for w in matrix.row_words:
        if basis.add(w):
            r += 1
    return r


def span_rank(words: Iterable[int]) -> int:
    """Rank of a collection of packed row words."""
    basis = XorBasis()
    return sum(1 for w in words if basis.add(w))


def sample_uniform_matrix(rows: int, cols: int, stream: Random) -> BitMatrix:
    """Uniformly random rows x cols matrix over GF(2)."""
    return BitMatrix(rows, cols, [stream.getrandbits(cols) if cols else 0 for _ in range(rows)])


def sample_invertible(m: int, stream: Random, column_retries: int = 10**6) -> BitMatrix:
    """Uniformly random invertible m x m matrix over GF(2).

    Columns are drawn one at a time, each uniform conditioned on being
    linearly independent of the columns already accepted; this yields the
    uniform distribution on GL(m, 2).  Raises :class:`RetryExhaustedError`
    if any single column rejects ``column_retries`` times (astronomically
    unlikely for honest streams).
    """
    if m <= 0:
        raise PreconditionError("matrix dimension must be positive")
    basis = XorBasis()
    columns: list[int] = []
    for i in range(m):
        for _ in range(column_retries):
            cand = stream.getrandbits(m)
            if basis.add(cand):
                columns.append(cand)
                break
        else:
            raise RetryExhaustedError(f"no independent column {i} after {column_retries} tries")
    rows = [0] * m
    for j, col in enumerate(columns):
        for i in range(m):
            rows[i] |= ((col >> i) & 1) << j
    return BitMatrix(m, m, rows)


def hamming_ball(n: int, radius: int) -> list[BitVector]:
    """All vectors of weight <= radius in canonical (weight, lex-support) order."""
    if n < 0 or radius < 0:
        raise ValueError("n and radius must be nonnegative")
    out = []
    for w in range(min(n, radius) + 1):
        for supp in combinations(range(n), w):
            out.append(BitVector.from_support(n, supp))
    return out


def weight_slice(n: int, w: int, lo: int, hi: int) -> list[BitVector]:
    """Weight-w vectors supported inside 1-based coordinate window [lo, hi].

    Enumerated in canonical order.  The window must satisfy
    1 <= lo <= hi <= n and w <= hi - lo + 1.
    """
    if not (1 <= lo <= hi <= n):
        raise PreconditionError(f"bad window [{lo}, {hi}] for length {n}")
    if w < 0 or w > hi - lo + 1:
        raise PreconditionError(f"weight {w} does not fit window [{lo}, {hi}]")
    return [BitVector.from_support(n, supp) for supp in combinations(range(lo - 1, hi), w)]


def _combination_rank(support: Sequence[int], n: int) -> int:
    """Lexicographic rank of a sorted w-subset of range(n) among all w-subsets."""
    r = 0
    prev = -1
    w = len(support)
    for i, s in enumerate(support):
        for j in range(prev + 1, s):
            r += math.comb(n - 1 - j, w - 1 - i)
        prev = s
    return r


def canonical_index(v: BitVector) -> int:
    """Position of v in the canonical enumeration of F_2^n."""
    supp = v.support()
    w = len(supp)
    return sum(math.comb(v.n, j) for j in range(w)) + _combination_rank(supp, v.n)


def enumerate_span(basis_words: Iterable[int]) -> list[int]:
    """All distinct elements of the span of the given words, as packed ints.

    Dependent inputs are tolerated: the words are first reduced to an
    independent basis, so each span element appears exactly once.  Order is
    deterministic (binary-counter over the reduced basis), with 0 first.
    """
    basis = XorBasis()
    independent = [w for w in basis_words if basis.add(w)]
    out = [0]
    for b in independent:
        out.extend(x ^ b for x in list(out))
    return out


def nullspace_basis(row_words: Sequence[int], ncols: int) -> list[int]:
    """Basis (packed words) of {x : row . x = 0 for every row}.

    Standard RREF: pivot columns ascending, one basis vector per free column.
    """
    work = list(row_words)
    pivot_cols: list[tuple[int, int]] = []  # (row index in `work`, column)
    next_row = 0
    for col in range(ncols):
        sel = None
        for i in range(next_row, len(work)):
            if (work[i] >> col) & 1:
                sel = i
                break
        if sel is None:
            continue
        work[next_row], work[sel] = work[sel], work[next_row]
        for i in range(len(work)):
            if i != next_row and (work[i] >> col) & 1:
                work[i] ^= work[next_row]
        pivot_cols.append((next_row, col))
        next_row += 1
    pivot_set = {c for _, c in pivot_cols}
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for ri, c in pivot_cols:
            if (work[ri] >> free) & 1:
                vec |= 1 << c
        basis.append(vec)
    return basis


class AffineSolver:
    """Preprocessed solver for E x = z with uniform sampling over each fiber.

    Rows of E are packed words over ``ncols`` variables.  After one Gaussian
    elimination pass (tracking the row transform), every right-hand side can
    be answered in O(m) word operations: consistency check, then a particular
    solution with uniformly random free coordinates — i.e. a uniform point of
    the solution fiber.
    """

    __slots__ = ("ncols", "_pivots", "_checks", "_free_cols")

    def __init__(self, row_words: Sequence[int], ncols: int):
        m = len(row_words)
        work = list(row_words)
        combo = [1 << i for i in range(m)]  # combo[i] tracks work[i] as a mix of inputs
        pivots: list[tuple[int, int, int]] = []  # (column, reduced row, combo)
        next_row = 0
        for col in range(ncols):
            sel = None
            for i in range(next_row, m):
                if (work[i] >> col) & 1:
                    sel = i
                    break
            if sel is None:
                continue
            work[next_row], work[sel] = work[sel], work[next_row]
            combo[next_row], combo[sel] = combo[sel], combo[next_row]
            for i in range(m):
                if i != next_row and (work[i] >> col) & 1:
                    work[i] ^= work[next_row]
                    combo[i] ^= combo[next_row]
            next_row += 1
        self.ncols = ncols
        # After full RREF each surviving row's pivot is its lowest set bit.
        self._pivots = tuple(
            ((work[i] & -work[i]).bit_length() - 1, work[i], combo[i]) for i in range(next_row)
        )
        # Rows eliminated to zero give the consistency conditions <combo, z> = 0.
        self._checks = tuple(combo[i] for i in range(next_row, m))
        pivot_set = {c for c, _, _ in self._pivots}
        self._free_cols = tuple(c for c in range(ncols) if c not in pivot_set)

    def solvable(self, z_bits: int) -> bool:
        return all((c & z_bits).bit_count() & 1 == 0 for c in self._checks)

    def fiber_size_log2(self) -> int:
        """log2 of the fiber size for any solvable right-hand side."""
        return len(self._free_cols)

    def sample(self, z_bits: int, stream: Random) -> int | None:
        """Uniform solution of E x = z, or None when the fiber is empty."""
        if not self.solvable(z_bits):
            return None
        x = 0
        if self._free_cols:
            r = stream.getrandbits(len(self._free_cols))
            for k, col in enumerate(self._free_cols):
                x |= ((r >> k) & 1) << col
        for col, row, combo in self._pivots:
            bit = ((combo & z_bits).bit_count() & 1) ^ (((row ^ (1 << col)) & x).bit_count() & 1)
            x |= bit << col
        return x
