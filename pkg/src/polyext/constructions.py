"""Concrete extractor builders: two-source, seeded subcode, and evasive maps.

Three families share the append-random-polynomials idea.  The two-source
extractor lifts both inputs through h(x) = (x, f_1(x), ..., f_r(x)) with
degree-2 f_i and takes the inner product, giving a total degree of at most 4.
The seeded extractor multiplies a random compressing matrix H into the
generator of the degree-<=d Reed-Muller-style code on t seed variables and
outputs one codeword coordinate per seed.  The evasive map is h itself, with
degree-d appendices, used by the structure audits.

All builders are deterministic functions of their integer seed; descriptors
embed that seed for provenance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import rng
from .anf import Polynomial, eval_bits, monomial_order, sample_poly
from .errors import BudgetExceededError, PreconditionError
from .gf2 import (
    BitMatrix,
    BitVector,
    binom_sum,
    canonical_index,
    hamming_ball,
    rank,
    sample_uniform_matrix,
)

__all__ = [
    "TwoSourceDescriptor",
    "SeededDescriptor",
    "EvasiveDescriptor",
    "build_two_source",
    "eval_two_source",
    "build_seeded",
    "eval_seeded",
    "build_evasive_h",
    "min_sumset_evasive_r",
    "lift_point",
    "split_left_degree",
]

#: Cap on generator-matrix work in build_seeded (entries of G and H).
SEEDED_BUILD_BUDGET = 1 << 24


@dataclass(frozen=True)
class TwoSourceDescriptor:
    """Inner-product extractor on inputs lifted by r random degree-2 polynomials."""

    n: int
    r: int
    polys: tuple[Polynomial, ...]
    seed: int

    def __post_init__(self):
        if self.r < 1 or len(self.polys) != self.r:
            raise ValueError("need r >= 1 appended polynomials")
        if any(p.order.n != self.n or p.order.d > 2 for p in self.polys):
            raise ValueError("appended polynomials must be degree <= 2 over n variables")


@dataclass(frozen=True)
class SeededDescriptor:
    """Linear seeded extractor built from a random subcode of the degree-d code.

    ``generator`` has one row per seed point of F_2^t in canonical order and
    one column per monomial of the t-variable degree-<=d order; ``compressor``
    is the uniform binom_sum(t, d) x n matrix H.
    """

    n: int
    t: int
    d: int
    generator: BitMatrix
    compressor: BitMatrix
    seed: int


@dataclass(frozen=True)
class EvasiveDescriptor:
    """The map h(x) = (x, f_1(x), ..., f_r(x)) with degree-<=d appendices."""

    k: int
    d: int
    r: int
    polys: tuple[Polynomial, ...]
    seed: int

    def __post_init__(self):
        if self.r < 1 or len(self.polys) != self.r:
            raise ValueError("need r >= 1 appended polynomials")
        if any(p.order.n != self.k or p.order.d > self.d for p in self.polys):
            raise ValueError("appended polynomials must be degree <= d over k variables")


def build_two_source(n: int, seed: int, r: int | None = None) -> TwoSourceDescriptor:
    """Sample the degree-4 two-source extractor descriptor.

    ``r`` defaults to 11n.  Build cost is O(r * binom_sum(n, 2)) coefficient
    draws, i.e. cubic in n at the default r.
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    if r is None:
        r = 11 * n
    if r < 1:
        raise PreconditionError("r must be positive")
    stream = rng.derive(seed, "two-source", n, r)
    polys = tuple(sample_poly(n, 2, stream) for _ in range(r))
    return TwoSourceDescriptor(n=n, r=r, polys=polys, seed=seed)


def lift_point(polys: tuple[Polynomial, ...], x: BitVector) -> int:
    """Packed (x, f_1(x), ..., f_r(x)) with x occupying the low bits."""
    out = x.bits
    pos = x.n
    for f in polys:
        acc = 0
        xb = x.bits
        for mask in f._active_masks:
            if xb & mask == mask:
                acc ^= 1
        out |= acc << pos
        pos += 1
    return out


def eval_two_source(desc: TwoSourceDescriptor, x: BitVector, y: BitVector) -> int:
    """Inner product of the two lifted inputs over n + r coordinates."""
    if x.n != desc.n or y.n != desc.n:
        raise PreconditionError("inputs must have length n")
    hx = lift_point(desc.polys, x)
    hy = lift_point(desc.polys, y)
    return (hx & hy).bit_count() & 1


def build_seeded(n: int, t: int, d: int, seed: int) -> SeededDescriptor:
    """Build the generator/compressor pair for the linear seeded extractor.

    G is materialized exactly — row y is the degree-<=d evaluation vector of
    the seed point y — and its full column rank is asserted (distinct
    monomials have distinct truth tables).  H is uniform.
    """
    if not 1 <= d <= t:
        raise PreconditionError("need 1 <= d <= t")
    if n < 1:
        raise PreconditionError("n must be positive")
    cols = binom_sum(t, d)
    if (1 << t) * cols + cols * n > SEEDED_BUILD_BUDGET:
        raise BudgetExceededError("generator material exceeds the build budget")
    order = monomial_order(t, d)
    seed_points = hamming_ball(t, t)
    g = BitMatrix(1 << t, cols, [eval_bits(y.bits, order) for y in seed_points])
    if rank(g) != cols:
        raise AssertionError("degree-d generator lost column rank; this is a bug")
    stream = rng.derive(seed, "seeded", n, t, d)
    h = sample_uniform_matrix(cols, n, stream)
    return SeededDescriptor(n=n, t=t, d=d, generator=g, compressor=h, seed=seed)


def eval_seeded(desc: SeededDescriptor, x: BitVector, y: BitVector) -> int:
    """Output bit: compress x through H, then dot with the y-indexed generator row.

    G·H is never materialized; evaluation is H first, then a single row
    lookup, so the cost is independent of the 2^t row count.
    """
    if x.n != desc.n:
        raise PreconditionError("source input must have length n")
    if y.n != desc.t:
        raise PreconditionError("seed must have length t")
    w = desc.compressor.apply_word(x.bits)
    row = desc.generator.row_words[canonical_index(y)]
    return (row & w).bit_count() & 1


def min_sumset_evasive_r(k: int, d: int, t: int) -> int:
    """Smallest appended-polynomial count r meeting 8 d^2 (2e)^d k / binom_sum(t/100, d/2).

    t/100 is taken as an integer floor; the result is the ceiling of the
    right-hand side.
    """
    if d < 2 or d % 2 != 0:
        raise PreconditionError("the formula is stated for even d >= 2")
    if t < 100:
        raise PreconditionError("need t >= 100 so the slice t/100 is nonempty")
    denom = binom_sum(t // 100, d // 2)
    value = 8.0 * d * d * (2.0 * math.e) ** d * k / denom
    return math.ceil(value)


def build_evasive_h(k: int, d: int, seed: int, r: int | None = None) -> EvasiveDescriptor:
    """Sample the evasive lifting map with r degree-<=d appended polynomials.

    ``r`` defaults to 11k (the subspace-evasive setting); pass the value from
    :func:`min_sumset_evasive_r` for the sumset-evasive parameterization.
    """
    if k < 1 or d < 1:
        raise PreconditionError("need k >= 1 and d >= 1")
    if r is None:
        r = 11 * k
    if r < 1:
        raise PreconditionError("r must be positive")
    stream = rng.derive(seed, "evasive", k, d, r)
    polys = tuple(sample_poly(k, d, stream) for _ in range(r))
    return EvasiveDescriptor(k=k, d=d, r=r, polys=polys, seed=seed)


def split_left_degree(f: Polynomial, n: int) -> tuple[Polynomial, Polynomial]:
    """Split a 2n-variable polynomial into (g, h) with f = g + h.

    h collects exactly the monomials supported inside the x-block (variables
    1..n, including the constant), re-indexed as a polynomial over n
    variables; g keeps the rest, so every monomial of g touches the y-block
    and the degree of g in x alone drops by at least one.
    """
    if f.order.n != 2 * n:
        raise PreconditionError("polynomial must be over exactly 2n variables")
    d = f.order.d
    x_order = monomial_order(n, min(d, n))
    g_bits = 0
    h_bits = 0
    for mon in f.active_monomials():
        if all(i < n for i in mon):
            h_bits |= 1 << x_order.index_of(mon)
        else:
            g_bits |= 1 << f.order.index_of(mon)
    g = Polynomial(f.order, BitVector(f.order.size, g_bits))
    h = Polynomial(x_order, BitVector(x_order.size, h_bits))
    return g, h
