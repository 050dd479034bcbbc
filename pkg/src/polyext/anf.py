"""Algebraic normal form of GF(2) polynomials with a fixed degree cap.

A degree-<=d polynomial over n variables is a coefficient :class:`BitVector`
against the shared monomial order: monomials sorted by degree ascending, ties
broken lexicographically on the sorted 0-based variable lists, so the constant
monomial (empty set) always comes first and there are ``binom_sum(n, d)``
coordinates in total.

The evaluation map sends a point x to the vector of all its monomial values;
its first coordinate is always 1.  Truth tables are numpy uint8 arrays of
length 2^n indexed by the packed point (coordinate i+1 = bit i of the index),
and convert to/from ANF coefficients via the subset-XOR (Mobius) transform,
which is an involution over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from random import Random
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .gf2 import BitMatrix, BitVector, binom_sum

__all__ = [
    "MonomialOrder",
    "Polynomial",
    "monomial_order",
    "eval_vector",
    "eval_bits",
    "evaluate",
    "sample_poly",
    "truth_table",
    "anf_from_truth_table",
    "mobius_transform",
    "compose_linear",
    "compose_linear_by_table",
]


class MonomialOrder:
    """The degree-then-lex list of all monomials on n variables up to degree d.

    ``monomials[j]`` is a sorted tuple of 0-based variable indices and
    ``masks[j]`` the same set packed into an int.  Instances are interned via
    :func:`monomial_order`, so identity comparison is safe for same (n, d).
    """

    __slots__ = ("n", "d", "monomials", "masks", "size", "_index")

    def __init__(self, n: int, d: int):
        if n < 0 or d < 0:
            raise ValueError("n and d must be nonnegative")
        self.n = n
        self.d = d
        mons: list[tuple[int, ...]] = []
        for w in range(min(n, d) + 1):
            mons.extend(combinations(range(n), w))
        self.monomials = tuple(mons)
        self.masks = tuple(sum(1 << i for i in mon) for mon in mons)
        self.size = len(mons)
        self._index = {mon: j for j, mon in enumerate(mons)}

    def index_of(self, monomial: Sequence[int]) -> int:
        return self._index[tuple(sorted(monomial))]

    def __repr__(self) -> str:
        return f"MonomialOrder(n={self.n}, d={self.d})"


@lru_cache(maxsize=None)
def monomial_order(n: int, d: int) -> MonomialOrder:
    return MonomialOrder(n, d)


class Polynomial:
    """GF(2) polynomial as a coefficient vector against a monomial order."""

    __slots__ = ("order", "coeffs", "_active_masks")

    def __init__(self, order: MonomialOrder, coeffs: BitVector):
        if coeffs.n != order.size:
            raise ValueError("coefficient vector length must match the monomial order")
        self.order = order
        self.coeffs = coeffs
        c = coeffs.bits
        self._active_masks = tuple(
            order.masks[j] for j in range(order.size) if (c >> j) & 1
        )

    @classmethod
    def from_monomials(cls, n: int, d: int, monomials: Sequence[Sequence[int]]) -> "Polynomial":
        order = monomial_order(n, d)
        bits = 0
        for mon in monomials:
            bits |= 1 << order.index_of(mon)
        return cls(order, BitVector(order.size, bits))

    @classmethod
    def zero(cls, n: int, d: int) -> "Polynomial":
        order = monomial_order(n, d)
        return cls(order, BitVector(order.size, 0))

    def active_monomials(self) -> tuple[tuple[int, ...], ...]:
        c = self.coeffs.bits
        return tuple(
            self.order.monomials[j] for j in range(self.order.size) if (c >> j) & 1
        )

    def degree(self) -> int:
        """Largest active monomial size; 0 for the zero polynomial."""
        return max((m.bit_count() for m in self._active_masks), default=0)

    def __xor__(self, other: "Polynomial") -> "Polynomial":
        if self.order is not other.order:
            raise ValueError("polynomials use different monomial orders")
        return Polynomial(self.order, self.coeffs ^ other.coeffs)

    __add__ = __xor__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.order is other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((id(self.order), self.coeffs))

    def __repr__(self) -> str:
        terms = ["*".join(f"x{i + 1}" for i in mon) or "1" for mon in self.active_monomials()]
        body = " + ".join(terms) if terms else "0"
        return f"Polynomial({self.order.n} vars, deg<={self.order.d}: {body})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.order.n,
            "d": self.order.d,
            "monomials": [list(mon) for mon in self.active_monomials()],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Polynomial":
        n, d = int(data["n"]), int(data["d"])
        order = monomial_order(n, d)
        bits = 0
        for raw in data["monomials"]:
            mon = [int(i) for i in raw]
            if any(i < 0 or i >= n for i in mon):
                raise ValueError(f"monomial {mon} has an index out of range for n={n}")
            if len(set(mon)) != len(mon):
                raise ValueError(f"monomial {mon} repeats an index")
            if len(mon) > d:
                raise ValueError(f"monomial {mon} exceeds the degree cap {d}")
            bits |= 1 << order.index_of(mon)
        return cls(order, BitVector(order.size, bits))


def eval_bits(x_bits: int, order: MonomialOrder) -> int:
    """Packed evaluation vector of a point: bit j set iff monomial j divides x."""
    out = 0
    for j, mask in enumerate(order.masks):
        if x_bits & mask == mask:
            out |= 1 << j
    return out


def eval_vector(x: BitVector, order: MonomialOrder) -> BitVector:
    """All monomial values at x, as a vector against the monomial order.

    The first coordinate (the empty monomial) is always 1.
    """
    if x.n != order.n:
        raise ValueError("point length must match the monomial order")
    return BitVector(order.size, eval_bits(x.bits, order))


def evaluate(f: Polynomial, x: BitVector) -> int:
    """f(x) over GF(2)."""
    if x.n != f.order.n:
        raise ValueError("point length must match the polynomial")
    xb = x.bits
    acc = 0
    for mask in f._active_masks:
        if xb & mask == mask:
            acc ^= 1
    return acc


def sample_poly(n: int, d: int, stream: Random) -> Polynomial:
    """Uniformly random degree-<=d polynomial (all coefficients fair bits)."""
    order = monomial_order(n, d)
    return Polynomial(order, BitVector(order.size, stream.getrandbits(order.size)))


def mobius_transform(table: np.ndarray) -> np.ndarray:
    """Subset-XOR transform t'[x] = XOR over s subset of x of t[s].

    Maps ANF coefficient arrays (indexed by packed monomial mask) to truth
    tables and back — it is its own inverse over GF(2).
    """
    size = table.size
    if size & (size - 1):
        raise ValueError("table length must be a power of two")
    t = table.copy()
    half = 1
    while half < size:
        v = t.reshape(-1, 2 * half)
        v[:, half:] ^= v[:, :half]
        half <<= 1
    return t


def truth_table(f: Polynomial) -> np.ndarray:
    """Dense truth table of f over all 2^n packed points."""
    n = f.order.n
    dense = np.zeros(1 << n, dtype=np.uint8)
    for mask in f._active_masks:
        dense[mask] = 1
    return mobius_transform(dense)


def anf_from_truth_table(table: np.ndarray | Sequence[int]) -> Polynomial:
    """Interpolate the unique polynomial (degree cap n) with the given table."""
    arr = np.asarray(table, dtype=np.uint8)
    size = int(arr.size)
    if size == 0 or size & (size - 1):
        raise ValueError("table length must be a nonzero power of two")
    n = size.bit_length() - 1
    dense = mobius_transform(arr)
    order = monomial_order(n, n)
    bits = 0
    for j, mask in enumerate(order.masks):
        if dense[mask]:
            bits |= 1 << j
    return Polynomial(order, BitVector(order.size, bits))


def compose_linear(q: Polynomial, matrix: BitMatrix) -> Polynomial:
    """The polynomial x -> q(Lx) for a matrix L with one row per variable of q.

    Computed symbolically: each variable of q is substituted by its row's
    linear form and the product expanded with x_i^2 = x_i, cancelling GF(2)
    pairs as they appear.  The result lives on ``matrix.cols`` variables with
    the same degree cap as q (composition with a linear map cannot raise the
    degree).
    """
    if matrix.rows != q.order.n:
        raise ValueError("matrix must have one row per polynomial variable")
    n_out = matrix.cols
    row_supports = [
        [j for j in range(n_out) if (w >> j) & 1] for w in matrix.row_words
    ]
    acc: set[int] = set()
    for mon_mask in q._active_masks:
        terms = {0}
        dead = False
        var = 0
        mm = mon_mask
        while mm:
            if mm & 1:
                supp = row_supports[var]
                if not supp:
                    dead = True  # a variable replaced by the zero form kills the term
                    break
                nxt: set[int] = set()
                for t in terms:
                    for j in supp:
                        nxt ^= {t | (1 << j)}
                terms = nxt
            mm >>= 1
            var += 1
        if dead:
            continue
        acc ^= terms
    out_order = monomial_order(n_out, q.order.d)
    bits = 0
    for mask in acc:
        idx = out_order.index_of(
            tuple(j for j in range(n_out) if (mask >> j) & 1)
        )
        bits |= 1 << idx
    return Polynomial(out_order, BitVector(out_order.size, bits))


def compose_linear_by_table(q: Polynomial, matrix: BitMatrix) -> Polynomial:
    """Truth-table route to the same composition, for cross-checking.

    Evaluates q on L x for every x, interpolates, and re-expresses the result
    under q's degree cap.  Only sensible for small widths (<= ~20 variables).
    """
    if matrix.rows != q.order.n:
        raise ValueError("matrix must have one row per polynomial variable")
    n_out = matrix.cols
    if n_out > 20:
        raise PreconditionError("truth-table composition is capped at 20 variables")
    tq = truth_table(q)
    table = np.empty(1 << n_out, dtype=np.uint8)
    for xb in range(1 << n_out):
        table[xb] = tq[matrix.apply_word(xb)]
    full = anf_from_truth_table(table)
    out_order = monomial_order(n_out, q.order.d)
    bits = 0
    for mon in full.active_monomials():
        if len(mon) > q.order.d:
            raise AssertionError("linear composition raised the degree; this is a bug")
        bits |= 1 << out_order.index_of(mon)
    return Polynomial(out_order, BitVector(out_order.size, bits))
