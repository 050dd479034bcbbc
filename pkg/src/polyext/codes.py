"""Balancedness, exhaustive list sizes, and Johnson-bound checks for small codes.

A code is viewed through its generator matrix (message dimension x block
length T); codewords are XOR combinations of rows.  Balance means every
nonzero codeword has weight within the window [(1-eps)/2 * T, (1+eps)/2 * T];
the delta-almost variant tolerates a delta fraction of nonzero exceptions.

Weight-window and radius comparisons are exact: eps and radii are rationals
compared by cross multiplication.  The Johnson radius (1 - sqrt(eps))/2 uses
an integer square root carried to 80 fractional bits, rounded the one
direction that can only widen the ball — so boundary codewords are counted
rather than silently dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional, Union

import numpy as np

from .errors import BudgetExceededError, PreconditionError
from .gf2 import BitMatrix, BitVector
from .bias import mc_halfwidth

__all__ = [
    "CodeView",
    "BalanceReport",
    "JohnsonVerdict",
    "balancedness_report",
    "measured_imbalance",
    "list_size_exhaustive",
    "johnson_check",
    "code_extractor_params",
]

EXHAUSTIVE_DIM_LIMIT = 24
LIST_SIZE_LIMIT = 16  # both block length and dimension, per the exact enumeration budget

RationalLike = Union[Fraction, int, float]


@dataclass(frozen=True)
class CodeView:
    """A linear code presented by its generator matrix (dim x block length)."""

    generator: BitMatrix

    @property
    def dim(self) -> int:
        return self.generator.rows

    @property
    def block_length(self) -> int:
        return self.generator.cols

    def codeword(self, message_bits: int) -> int:
        word = 0
        for i, row in enumerate(self.generator.row_words):
            if (message_bits >> i) & 1:
                word ^= row
        return word

    def codewords(self) -> list[int]:
        """All 2^dim codewords (with multiplicity one per message) in Gray order cost."""
        if self.dim > EXHAUSTIVE_DIM_LIMIT:
            raise BudgetExceededError(f"2^{self.dim} codewords exceed the enumeration cap")
        words = [0]
        for row in self.generator.row_words:
            words.extend(w ^ row for w in list(words))
        return words

    def distinct_codewords(self) -> set[int]:
        return set(self.codewords())


def _window(eps: Fraction, length: int) -> tuple[Fraction, Fraction]:
    return (1 - eps) * length / 2, (1 + eps) * length / 2


def _balanced(word: int, lo: Fraction, hi: Fraction) -> bool:
    w = word.bit_count()
    return lo <= w <= hi


@dataclass(frozen=True)
class BalanceReport:
    """Unbalanced fraction over nonzero codewords, plus the worst offender."""

    delta: Union[Fraction, float]
    worst_codeword: Optional[BitVector]
    mode: str
    samples: Optional[int] = None
    halfwidth: Optional[float] = None
    fail_prob: Optional[float] = None


def balancedness_report(
    code: CodeView,
    eps: RationalLike,
    mode: str = "exhaustive",
    samples: int = 0,
    fail_prob: float = 1e-6,
    stream: Optional[Random] = None,
) -> BalanceReport:
    """Fraction of nonzero codewords outside the eps-balance window.

    Exhaustive mode enumerates the distinct codewords and returns an exact
    rational; sampled mode draws uniform messages, conditions on a nonzero
    codeword, and attaches the concentration halfwidth for the effective
    sample count.  The zero codeword never enters the statistics.  The worst
    codeword maximizes |2 wt - T|.
    """
    epsf = Fraction(eps)
    t = code.block_length
    lo, hi = _window(epsf, t)

    def deviation(word: int) -> int:
        return abs(2 * word.bit_count() - t)

    if mode == "exhaustive":
        nonzero = [w for w in code.distinct_codewords() if w]
        if not nonzero:
            return BalanceReport(Fraction(0), None, mode)
        bad = sum(1 for w in nonzero if not _balanced(w, lo, hi))
        worst = max(nonzero, key=lambda w: (deviation(w), w))
        return BalanceReport(Fraction(bad, len(nonzero)), BitVector(t, worst), mode)
    if mode != "sampled":
        raise PreconditionError(f"unknown mode {mode!r}")
    if stream is None or samples < 1:
        raise PreconditionError("sampled mode needs a stream and samples >= 1")
    bad = 0
    kept = 0
    worst_word: Optional[int] = None
    for _ in range(samples):
        word = code.codeword(stream.getrandbits(code.dim))
        if word == 0:
            continue
        kept += 1
        if not _balanced(word, lo, hi):
            bad += 1
        if worst_word is None or deviation(word) > deviation(worst_word):
            worst_word = word
    if kept == 0:
        return BalanceReport(0.0, None, mode, samples=0, halfwidth=None, fail_prob=fail_prob)
    # Indicator mean over the kept draws; halfwidth for the effective count.
    return BalanceReport(
        bad / kept,
        BitVector(t, worst_word),
        mode,
        samples=kept,
        halfwidth=mc_halfwidth(kept, fail_prob),
        fail_prob=fail_prob,
    )


def measured_imbalance(code: CodeView) -> Fraction:
    """Smallest eps for which the code is eps-balanced (0 for no nonzero words)."""
    t = code.block_length
    worst = Fraction(0)
    for w in code.distinct_codewords():
        if w:
            worst = max(worst, Fraction(abs(2 * w.bit_count() - t), t))
    return worst


def _wht(values: np.ndarray) -> np.ndarray:
    out = values.astype(np.int64)
    half = 1
    size = out.size
    while half < size:
        v = out.reshape(-1, 2 * half)
        a = v[:, :half].copy()
        v[:, :half] += v[:, half:]
        v[:, half:] = a - v[:, half:]
        half <<= 1
    return out


def list_size_exhaustive(
    code: CodeView, radius: RationalLike
) -> tuple[int, BitVector]:
    """Exact max, over all 2^T centers, of codewords within radius*T Hamming distance.

    Computed as the XOR correlation of the code's indicator with the ball
    indicator via a Walsh-Hadamard transform — integer-exact and linear in
    T * 2^T — then maximized.  Returns the count and the first attaining
    center.
    """
    t = code.block_length
    if t > LIST_SIZE_LIMIT or code.dim > LIST_SIZE_LIMIT:
        raise BudgetExceededError("exact list-size enumeration is capped at 2^16 work")
    rho = Fraction(radius)
    cutoff = rho * t
    size = 1 << t
    indicator = np.zeros(size, dtype=np.int64)
    for w in code.distinct_codewords():
        indicator[w] = 1
    ball = np.array([1 if v.bit_count() <= cutoff else 0 for v in range(size)], dtype=np.int64)
    # counts[x] = #{c in C : wt(c ^ x) <= cutoff}; XOR convolution via WHT.
    spectrum = _wht(indicator) * _wht(ball)
    counts = _wht(spectrum) // size
    center = int(np.argmax(counts))
    return int(counts[center]), BitVector(t, center)


def sqrt_widened(eps: Fraction, frac_bits: int = 80) -> Fraction:
    """sqrt(eps) rounded down at 2^-frac_bits — widening (1-sqrt)/2 upward."""
    if eps < 0:
        raise PreconditionError("cannot take the square root of a negative rational")
    scale = 1 << frac_bits
    return Fraction(math.isqrt(eps.numerator * scale * scale // eps.denominator), scale)


@dataclass(frozen=True)
class JohnsonVerdict:
    """Outcome of the list-size-at-Johnson-radius check."""

    passed: bool
    eps: Fraction
    radius: Fraction
    max_list: int
    center: BitVector
    limit: int


def johnson_check(code: CodeView, eps: RationalLike) -> JohnsonVerdict:
    """Verify the list-size bound 2T at radius (1 - sqrt(eps))/2.

    The code must actually be eps-balanced — that precondition is verified
    exhaustively first and a violation raises rather than passing silently.
    The radius uses the 80-bit square root rounded toward inclusion.
    """
    epsf = Fraction(eps)
    report = balancedness_report(code, epsf, mode="exhaustive")
    if report.delta != 0:
        raise PreconditionError(
            f"code is not {epsf}-balanced (unbalanced fraction {report.delta})"
        )
    radius = (1 - sqrt_widened(epsf)) / 2
    max_list, center = list_size_exhaustive(code, radius)
    limit = 2 * code.block_length
    return JohnsonVerdict(
        passed=max_list <= limit,
        eps=epsf,
        radius=radius,
        max_list=max_list,
        center=center,
        limit=limit,
    )


def code_extractor_params(list_size: int, eps: float) -> float:
    """Min-entropy requirement log2(L) + log2(1/eps) + 1 for the code route."""
    if list_size < 1 or not 0 < eps < 1:
        raise PreconditionError("need L >= 1 and 0 < eps < 1")
    return math.log2(list_size) + math.log2(1.0 / eps) + 1.0
