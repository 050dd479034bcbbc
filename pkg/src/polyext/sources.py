"""Weak-source models over F_2^n with exact support enumeration.

Six source kinds share one tagged-union interface: explicit flat sets, affine
subspaces, sumsets of two flats, r-local functions of uniform bits, images of
bounded-degree polynomial maps, and varieties (common zero sets).  Exact
enumeration with :class:`fractions.Fraction` probabilities is the ground truth
everything else (sampling, bias estimates, audits) is judged against, so
:func:`support_of` refuses to run past an explicit budget rather than degrade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Sequence, Union

import numpy as np

from . import anf
from .anf import Polynomial
from .errors import BudgetExceededError, PreconditionError, RetryExhaustedError
from .gf2 import BitVector, binom_sum, span_rank

__all__ = [
    "Flat",
    "Affine",
    "Sumset",
    "LocalBit",
    "Local",
    "PolynomialImage",
    "Variety",
    "Source",
    "ThresholdQuery",
    "ThresholdResult",
    "ambient_length",
    "support_of",
    "sample_source",
    "min_entropy",
    "entropy_threshold",
    "variety_reduce",
    "uniform_flat",
]

#: Hard cap on exact-enumeration work (points visited) in :func:`support_of`.
ENUMERATION_BUDGET = 1 << 22


@dataclass(frozen=True)
class Flat:
    """Uniform distribution over an explicit set of points."""

    n: int
    support: tuple[BitVector, ...]

    def __post_init__(self):
        if not self.support:
            raise ValueError("flat source needs a nonempty support")
        if any(v.n != self.n for v in self.support):
            raise ValueError("support vectors must all have length n")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support contains duplicates")


@dataclass(frozen=True)
class Affine:
    """Uniform distribution over offset + span(basis)."""

    n: int
    offset: BitVector
    basis: tuple[BitVector, ...]

    def __post_init__(self):
        if self.offset.n != self.n or any(v.n != self.n for v in self.basis):
            raise ValueError("offset and basis vectors must have length n")
        if span_rank(v.bits for v in self.basis) != len(self.basis):
            raise ValueError("basis vectors must be linearly independent")


@dataclass(frozen=True)
class Sumset:
    """X + Y for independent flat sources X and Y over the same space."""

    x: Flat
    y: Flat

    def __post_init__(self):
        if self.x.n != self.y.n:
            raise ValueError("summands must live in the same space")


@dataclass(frozen=True)
class LocalBit:
    """One output coordinate: a lookup table over a few input positions.

    The table is indexed by the packed values of the listed inputs with the
    first listed input as the least significant bit.
    """

    inputs: tuple[int, ...]
    table: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError("input positions repeat")
        if len(self.table) != 1 << len(self.inputs):
            raise ValueError("table length must be 2^(number of inputs)")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be bits")

    def value(self, u_bits: int) -> int:
        idx = 0
        for k, pos in enumerate(self.inputs):
            idx |= ((u_bits >> pos) & 1) << k
        return self.table[idx]


@dataclass(frozen=True)
class Local:
    """Each output bit depends on at most r of m uniform input bits."""

    r: int
    m: int
    bits: tuple[LocalBit, ...]

    def __post_init__(self):
        if not self.bits:
            raise ValueError("local source needs at least one output bit")
        for b in self.bits:
            if len(b.inputs) > self.r:
                raise ValueError(f"output bit reads {len(b.inputs)} inputs, exceeding r={self.r}")
            if any(not 0 <= p < self.m for p in b.inputs):
                raise ValueError("input position out of range")

    def value(self, u_bits: int) -> int:
        out = 0
        for i, b in enumerate(self.bits):
            out |= b.value(u_bits) << i
        return out


@dataclass(frozen=True)
class PolynomialImage:
    """Image of the uniform distribution under a tuple of polynomials on m bits."""

    m: int
    polys: tuple[Polynomial, ...]

    def __post_init__(self):
        if not self.polys:
            raise ValueError("polynomial-image source needs at least one output")
        if any(p.order.n != self.m for p in self.polys):
            raise ValueError("every output polynomial must read all m inputs")

    def value(self, u_bits: int) -> int:
        out = 0
        for i, p in enumerate(self.polys):
            acc = 0
            for mask in p._active_masks:
                if u_bits & mask == mask:
                    acc ^= 1
            out |= acc << i
        return out


@dataclass(frozen=True)
class Variety:
    """Uniform distribution over the common zero set of a polynomial system."""

    n: int
    polys: tuple[Polynomial, ...]

    def __post_init__(self):
        if not self.polys:
            raise ValueError("variety needs at least one polynomial")
        if any(p.order.n != self.n for p in self.polys):
            raise ValueError("polynomials must be over n variables")


Source = Union[Flat, Affine, Sumset, Local, PolynomialImage, Variety]


def uniform_flat(n: int) -> Flat:
    """The uniform distribution over all of F_2^n as an explicit flat source."""
    if n > 22:
        raise BudgetExceededError("refusing to materialize more than 2^22 points")
    return Flat(n, tuple(BitVector(n, b) for b in range(1 << n)))


def ambient_length(source: Source) -> int:
    """Bit length of the source's output."""
    if isinstance(source, (Flat, Affine, Variety)):
        return source.n
    if isinstance(source, Sumset):
        return source.x.n
    if isinstance(source, (Local, PolynomialImage)):
        return len(source.bits) if isinstance(source, Local) else len(source.polys)
    raise TypeError(f"not a source: {source!r}")


def _check_budget(cost: int, what: str) -> None:
    if cost > ENUMERATION_BUDGET:
        raise BudgetExceededError(
            f"{what} needs {cost} enumeration steps, over the 2^22 budget"
        )


def _variety_member_mask(polys: Sequence[Polynomial], n: int) -> np.ndarray:
    member = np.ones(1 << n, dtype=bool)
    for p in polys:
        member &= anf.truth_table(p) == 0
    return member


def support_of(source: Source) -> list[tuple[BitVector, Fraction]]:
    """Exact output distribution as (point, probability) pairs.

    Pairs are sorted in the canonical (weight, lex-support) order and the
    probabilities sum to 1 exactly.  Raises :class:`BudgetExceededError`
    when full enumeration would exceed 2^22 visited points, and
    :class:`PreconditionError` for an empty variety.
    """
    n = ambient_length(source)
    counts: dict[int, int] = {}
    if isinstance(source, Flat):
        _check_budget(len(source.support), "flat support")
        total = len(source.support)
        for v in source.support:
            counts[v.bits] = counts.get(v.bits, 0) + 1
    elif isinstance(source, Affine):
        dim = len(source.basis)
        _check_budget(1 << dim, "affine span")
        total = 1 << dim
        points = [source.offset.bits]
        for b in source.basis:
            points.extend(x ^ b.bits for x in list(points))
        for x in points:
            counts[x] = 1
    elif isinstance(source, Sumset):
        _check_budget(len(source.x.support) * len(source.y.support), "sumset pairs")
        total = len(source.x.support) * len(source.y.support)
        ybits = [v.bits for v in source.y.support]
        for xv in source.x.support:
            xb = xv.bits
            for yb in ybits:
                s = xb ^ yb
                counts[s] = counts.get(s, 0) + 1
    elif isinstance(source, (Local, PolynomialImage)):
        _check_budget(1 << source.m, "input enumeration")
        total = 1 << source.m
        for u in range(1 << source.m):
            x = source.value(u)
            counts[x] = counts.get(x, 0) + 1
    elif isinstance(source, Variety):
        _check_budget(1 << source.n, "variety enumeration")
        member = _variety_member_mask(source.polys, source.n)
        pts = np.nonzero(member)[0]
        if pts.size == 0:
            raise PreconditionError("variety is empty; no distribution to enumerate")
        total = int(pts.size)
        for x in pts:
            counts[int(x)] = 1
    else:
        raise TypeError(f"not a source: {source!r}")
    out = [(BitVector(n, b), Fraction(c, total)) for b, c in counts.items()]
    out.sort(key=lambda pair: pair[0].canonical_key())
    return out


def sample_source(source: Source, stream: Random, rejection_budget: int = 10**6) -> BitVector:
    """One draw from the source.

    Varieties with more than 2^22 ambient points fall back to rejection
    sampling with the given budget; everything else samples directly.
    """
    if isinstance(source, Flat):
        return source.support[stream.randrange(len(source.support))]
    if isinstance(source, Affine):
        x = source.offset.bits
        if source.basis:
            r = stream.getrandbits(len(source.basis))
            for k, b in enumerate(source.basis):
                if (r >> k) & 1:
                    x ^= b.bits
        return BitVector(source.n, x)
    if isinstance(source, Sumset):
        xv = source.x.support[stream.randrange(len(source.x.support))]
        yv = source.y.support[stream.randrange(len(source.y.support))]
        return xv ^ yv
    if isinstance(source, (Local, PolynomialImage)):
        u = stream.getrandbits(source.m)
        return BitVector(ambient_length(source), source.value(u))
    if isinstance(source, Variety):
        if source.n <= 22:
            member = _variety_member_mask(source.polys, source.n)
            pts = np.nonzero(member)[0]
            if pts.size == 0:
                raise PreconditionError("variety is empty")
            return BitVector(source.n, int(pts[stream.randrange(int(pts.size))]))
        for _ in range(rejection_budget):
            xb = stream.getrandbits(source.n)
            if all(_eval_bits_poly(p, xb) == 0 for p in source.polys):
                return BitVector(source.n, xb)
        raise RetryExhaustedError(
            f"no variety point after {rejection_budget} rejection draws"
        )
    raise TypeError(f"not a source: {source!r}")


def _eval_bits_poly(p: Polynomial, xb: int) -> int:
    acc = 0
    for mask in p._active_masks:
        if xb & mask == mask:
            acc ^= 1
    return acc


def min_entropy(source: Source) -> float:
    """-log2 of the largest point probability, reported to 1e-9 bits.

    The maximizing probability is exact; only the final logarithm is floating
    point, and it is rounded to 9 decimal places.
    """
    dist = support_of(source)
    p = max(pr for _, pr in dist)
    return round(math.log2(p.denominator) - math.log2(p.numerator), 9)


@dataclass(frozen=True)
class ThresholdQuery:
    """Inputs for the structured-family entropy thresholds.

    ``kind`` is one of ``"local"``, ``"polynomial"``, ``"variety"``; ``n`` is
    the output length, ``d`` the extractor degree, ``r`` the structure
    parameter (locality / map degree / system degree).  ``c`` scales the
    threshold and ``beta`` the polynomial-kind family bound; both are caller
    inputs defaulting to 1 — nothing here certifies a concrete admissible
    value for them.
    """

    kind: str
    n: int
    d: int
    r: int
    c: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("local", "polynomial", "variety"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.n < 2 or self.d < 1 or self.r < 1:
            raise ValueError("need n >= 2, d >= 1, r >= 1")
        if self.kind == "polynomial" and self.d <= self.r:
            raise PreconditionError("polynomial-image threshold needs d > r")


@dataclass(frozen=True)
class ThresholdResult:
    """A (family size, entropy threshold) pair; threshold may be vacuous."""

    log2_family_size: Union[int, float]
    threshold: float
    vacuous: bool  # True when the threshold exceeds the output length n


def entropy_threshold(query: ThresholdQuery) -> ThresholdResult:
    """Min-entropy threshold and log2 family-size bound for a structured family.

    Exact integer arithmetic is used where the formulas permit (power-of-two
    n for the local count, always for the variety count); the thresholds
    themselves involve fractional powers and are floats.
    """
    n, d, r, c = query.n, query.d, query.r, query.c
    if query.kind == "local":
        if n & (n - 1) == 0:
            log2n: Union[int, float] = n.bit_length() - 1
        else:
            log2n = math.log2(n)
        family = n * (2 * r * log2n + 2**r)
        k = c * d * (2**r * n + r * n * log2n) ** (1.0 / d)
    elif query.kind == "polynomial":
        k = c * ((c**r * d**d / r**r) * n) ** (1.0 / (d - r))
        family = ((query.beta * (k - 1)) / r) ** r * n
    else:  # variety
        family = (n + 1) * binom_sum(n, r)
        k = c * d * n ** ((r + 1) / d)
    return ThresholdResult(family, k, vacuous=k > n)


def variety_reduce(
    polys: Sequence[Polynomial], stream: Random, budget: int = 64
) -> tuple[list[Polynomial], int]:
    """Compress a polynomial system to n+1 random combinations, same variety.

    Draws uniform coefficient rows, forms the n+1 combined polynomials, and
    accepts only after exhaustively confirming the combined system has exactly
    the original zero set (the containment direction is automatic).  Returns
    the accepted system and the number of rejected rounds; expected rejections
    are below one, so the default budget is generous.
    """
    if not polys:
        raise PreconditionError("need at least one polynomial")
    order = polys[0].order
    if any(p.order is not order for p in polys):
        raise PreconditionError("system must share one monomial order")
    n = order.n
    if n > 20:
        raise BudgetExceededError("exhaustive variety comparison is capped at n = 20")
    t = len(polys)
    tables = [anf.truth_table(p) for p in polys]
    target = np.ones(1 << n, dtype=bool)
    for tab in tables:
        target &= tab == 0
    ell = n + 1
    for attempt in range(budget):
        rows = [stream.getrandbits(t) for _ in range(ell)]
        combined = np.ones(1 << n, dtype=bool)
        for row in rows:
            mix = np.zeros(1 << n, dtype=np.uint8)
            for j in range(t):
                if (row >> j) & 1:
                    mix ^= tables[j]
            combined &= mix == 0
        if np.array_equal(combined, target):
            out = []
            for row in rows:
                bits = 0
                for j in range(t):
                    if (row >> j) & 1:
                        bits ^= polys[j].coeffs.bits
                out.append(Polynomial(order, BitVector(order.size, bits)))
            return out, attempt
    raise RetryExhaustedError(f"no exact reduction in {budget} rounds")
