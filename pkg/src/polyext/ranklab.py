"""Evaluation-rank certificates and high-rank sumset machinery.

The central quantity is the GF(2) rank of the monomial-evaluation vectors of
a point set, under a degree cap d.  Rank claims are never taken on faith:
every certificate carries an explicit independent witness subset that is
re-eliminated on construction.

Two samplers build structured pairs (A', B') whose sumset has provably high
evaluation rank: one selects preimages of a small Hamming ball under a random
surjection, the other draws the special product-form pair whose sumset
evaluation matrix has full rank |A'| * |B'|.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Optional, Sequence

from .anf import eval_bits, monomial_order
from .errors import EmptyFiberError, PreconditionError, RetryExhaustedError
from .gf2 import (
    AffineSolver,
    BitMatrix,
    BitVector,
    XorBasis,
    binom_sum,
    hamming_ball,
    sample_invertible,
    sample_uniform_matrix,
    weight_slice,
)
from .sources import Flat

__all__ = [
    "RankCertificate",
    "SumsetResult",
    "HighRankSelection",
    "SpecialSumsetDraw",
    "eval_rank",
    "sumset_of",
    "full_rank_check",
    "find_high_rank_subsets",
    "conditional_preimage_sample",
    "special_sumset_sampler",
]


@dataclass(frozen=True)
class RankCertificate:
    """Evaluation rank of a point set, with an independence witness.

    ``witness`` lists points whose evaluation vectors are linearly
    independent; there are exactly ``rank`` of them and they were verified
    independent when the certificate was built.
    """

    n: int
    degree: int
    point_count: int
    rank: int
    witness: tuple[BitVector, ...]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "point_count": self.point_count,
            "rank": self.rank,
            "witness": [v.to_string() for v in self.witness],
        }


@dataclass(frozen=True)
class SumsetResult:
    """A + B with bookkeeping about collisions."""

    sums: tuple[BitVector, ...]
    pair_count: int
    distinct_count: int
    collisions: bool


def eval_rank(points: Sequence[BitVector], d: int) -> RankCertificate:
    """Rank of the degree-<=d evaluation vectors of the given points.

    Duplicates are ignored.  The witness is the greedy independent subset in
    input order, re-checked before the certificate is returned.
    """
    pts = list(dict.fromkeys(points))
    if not pts:
        raise PreconditionError("need at least one point")
    n = pts[0].n
    if any(p.n != n for p in pts):
        raise PreconditionError("points must share one ambient length")
    order = monomial_order(n, d)
    basis = XorBasis()
    witness = []
    for p in pts:
        if basis.add(eval_bits(p.bits, order)):
            witness.append(p)
    check = XorBasis()
    for p in witness:
        if not check.add(eval_bits(p.bits, order)):
            raise AssertionError("witness re-verification failed; this is a bug")
    return RankCertificate(
        n=n,
        degree=d,
        point_count=len(pts),
        rank=len(witness),
        witness=tuple(witness),
    )


def sumset_of(a: Sequence[BitVector], b: Sequence[BitVector]) -> SumsetResult:
    """All pairwise sums of two point sets, with the collision flag."""
    if not a or not b:
        raise PreconditionError("both sets must be nonempty")
    n = a[0].n
    if any(v.n != n for v in a) or any(v.n != n for v in b):
        raise PreconditionError("sets must share one ambient length")
    bbits = [v.bits for v in b]
    seen: set[int] = set()
    for av in a:
        ab = av.bits
        for yb in bbits:
            seen.add(ab ^ yb)
    sums = sorted((BitVector(n, s) for s in seen), key=BitVector.canonical_key)
    pair_count = len(a) * len(b)
    return SumsetResult(
        sums=tuple(sums),
        pair_count=pair_count,
        distinct_count=len(seen),
        collisions=len(seen) != pair_count,
    )


def full_rank_check(
    a: Sequence[BitVector], b: Sequence[BitVector], d: int
) -> tuple[bool, RankCertificate]:
    """Does eval-rank of A+B equal |A| * |B|?  Collisions alone already fail.

    Returns the verdict together with the rank certificate of the (distinct)
    sums, so a failure is inspectable.
    """
    ss = sumset_of(a, b)
    cert = eval_rank(ss.sums, d)
    return (not ss.collisions) and cert.rank == ss.pair_count, cert


@dataclass(frozen=True)
class HighRankSelection:
    """Hamming-ball preimage subsets with their sumset rank certificate."""

    a_points: tuple[BitVector, ...]
    b_points: tuple[BitVector, ...]
    map_matrix: BitMatrix
    certificate: RankCertificate
    attempts: int


def _image_index(points: Sequence[BitVector], matrix: BitMatrix) -> dict[int, BitVector]:
    """First (canonical-order) preimage for each attained image value."""
    fibers: dict[int, BitVector] = {}
    for p in sorted(points, key=BitVector.canonical_key):
        img = matrix.apply_word(p.bits)
        if img not in fibers:
            fibers[img] = p
    return fibers


def find_high_rank_subsets(
    a: Sequence[BitVector],
    b: Sequence[BitVector],
    d: int,
    m: int,
    trials: int,
    stream: Random,
    fixed_map: Optional[BitMatrix] = None,
) -> HighRankSelection:
    """Select A' and B' of size binom_sum(m, d/2) whose sumset has rank >= binom_sum(m, d).

    Samples uniform linear maps to F_2^m until the images of both A and B
    cover the radius-d/2 Hamming ball — the only fibers the selection draws
    from, so this acceptance test is exactly what the rank argument needs (a
    supplied ``fixed_map`` is used instead and must cover the ball on both).
    A' collects, for every ball point, the canonically-first preimage in A;
    likewise B'.  The rank guarantee on A' + B' is certified by elimination,
    not assumed.

    Requires even d.  Raises :class:`RetryExhaustedError` when no sampled map
    covers the ball on both sets within ``trials``.
    """
    if d % 2 != 0 or d <= 0:
        raise PreconditionError("the ball-splitting argument needs even d >= 2")
    if not a or not b:
        raise PreconditionError("both sets must be nonempty")
    n = a[0].n
    if m > n or m <= 0:
        raise PreconditionError("need 1 <= m <= n")
    need = binom_sum(m, d // 2)
    if len(a) < need or len(b) < need:
        raise PreconditionError(f"sets must have at least binom_sum(m, d/2) = {need} points")
    ball_half = hamming_ball(m, d // 2)
    attempts = 0
    candidates = [fixed_map] if fixed_map is not None else None
    while True:
        attempts += 1
        if candidates is not None:
            if not candidates:
                raise RetryExhaustedError(
                    "the fixed map does not cover the radius-d/2 ball on both sets"
                )
            matrix = candidates.pop()
        else:
            if attempts > trials:
                raise RetryExhaustedError(f"no ball-covering map within {trials} samples")
            matrix = sample_uniform_matrix(m, n, stream)
        fibers_a = _image_index(a, matrix)
        if any(z.bits not in fibers_a for z in ball_half):
            continue
        fibers_b = _image_index(b, matrix)
        if any(z.bits not in fibers_b for z in ball_half):
            continue
        a_sel = tuple(fibers_a[z.bits] for z in ball_half)
        b_sel = tuple(fibers_b[z.bits] for z in ball_half)
        cert = eval_rank(sumset_of(a_sel, b_sel).sums, d)
        if cert.rank < binom_sum(m, d):
            raise AssertionError(
                "sumset rank fell below the guaranteed floor; this is a bug"
            )
        return HighRankSelection(a_sel, b_sel, matrix, cert, attempts)


def conditional_preimage_sample(
    source: Flat, matrix: BitMatrix, target: BitVector, stream: Random
) -> BitVector:
    """Uniform draw from {x in supp : matrix @ x = target}.

    Realizes conditional sampling given the linear observation; raises
    :class:`EmptyFiberError` when the fiber is empty.
    """
    if matrix.cols != source.n or matrix.rows != target.n:
        raise PreconditionError("dimension mismatch between source, matrix, target")
    zb = target.bits
    fiber = [p for p in source.support if matrix.apply_word(p.bits) == zb]
    if not fiber:
        raise EmptyFiberError(f"no support point maps to {target.to_string()}")
    return fiber[stream.randrange(len(fiber))]


@dataclass(frozen=True)
class SpecialSumsetDraw:
    """One draw of the product-form sumset pair with its full-rank verdict.

    ``surjection`` maps the ambient space onto F_2^m; ``mixer`` is the
    invertible matrix applied to the two disjoint-support ball slices
    ``b_zero`` / ``b_one``; ``x_star`` and ``y_star`` are the conditional
    preimages, one per slice point, and ``surjection`` restricted to
    ``x_star`` is a bijection onto mixer(b_zero).
    """

    surjection: BitMatrix
    mixer: BitMatrix
    b_zero: tuple[BitVector, ...]
    b_one: tuple[BitVector, ...]
    x_star: tuple[BitVector, ...]
    y_star: tuple[BitVector, ...]
    full_rank: bool

    def to_json_dict(self) -> dict:
        return {
            "surjection": self.surjection.to_string().split("\n"),
            "mixer": self.mixer.to_string().split("\n"),
            "b_zero": [v.to_string() for v in self.b_zero],
            "b_one": [v.to_string() for v in self.b_one],
            "x_star": [v.to_string() for v in self.x_star],
            "y_star": [v.to_string() for v in self.y_star],
            "full_rank": self.full_rank,
        }


class _FiberSampler:
    """Uniform fiber draws for one surjection over one flat support."""

    __slots__ = ("_solver", "_buckets", "_n")

    def __init__(self, support_bits: Sequence[int], n: int, row_words: Sequence[int]):
        self._n = n
        if len(support_bits) == 1 << n:
            # Full ambient support: fibers are affine solution sets.
            self._solver: Optional[AffineSolver] = AffineSolver(row_words, n)
            self._buckets: Optional[dict[int, list[int]]] = None
        else:
            self._solver = None
            buckets: dict[int, list[int]] = {}
            m = len(row_words)
            for xb in support_bits:
                img = 0
                for i, w in enumerate(row_words):
                    img |= ((w & xb).bit_count() & 1) << i
                buckets.setdefault(img, []).append(xb)
            self._buckets = buckets

    def covers(self, m: int) -> bool:
        if self._solver is not None:
            return len(self._solver._pivots) == m
        return len(self._buckets) == 1 << m

    def sample(self, z_bits: int, stream: Random) -> Optional[int]:
        if self._solver is not None:
            return self._solver.sample(z_bits, stream)
        bucket = self._buckets.get(z_bits)
        if not bucket:
            return None
        return bucket[stream.randrange(len(bucket))]


def special_sumset_sampler(
    x_source: Flat,
    y_source: Flat,
    d: int,
    m: int,
    trials: int,
    stream: Random,
    fixed_map: Optional[BitMatrix] = None,
) -> SpecialSumsetDraw:
    """Draw the special pair (X*, Y*) whose sumset always has full eval-rank.

    A uniform map E onto F_2^m is rejected until surjective on both supports
    (or ``fixed_map`` is used, once).  The two slices of the weight-floor(d/2)
    sphere — supports confined to the first and to the last floor(m/3)
    coordinates — are pushed through a fresh uniform invertible mixer L, and
    one uniform conditional preimage is drawn over each resulting fiber.  The
    full-rank property of X* + Y* is then re-verified by elimination; it holds
    on every draw by construction, so a False verdict would expose a bug
    rather than bad luck.
    """
    if d < 1:
        raise PreconditionError("degree must be at least 1")
    if m < 3:
        raise PreconditionError("need m >= 3 so the coordinate thirds are nonempty")
    third = m // 3
    half = d // 2
    if half > third:
        raise PreconditionError("floor(d/2) must fit inside floor(m/3) coordinates")
    n = x_source.n
    if y_source.n != n:
        raise PreconditionError("sources must share one ambient length")
    b_zero = weight_slice(m, half, 1, third) if third else []
    b_one = weight_slice(m, half, m - third + 1, m)
    xs_bits = [v.bits for v in x_source.support]
    ys_bits = [v.bits for v in y_source.support]

    fibers_x: Optional[_FiberSampler] = None
    fibers_y: Optional[_FiberSampler] = None
    surjection: Optional[BitMatrix] = None
    for attempt in range(trials):
        if fixed_map is not None:
            if attempt > 0:
                raise RetryExhaustedError("the fixed map is not surjective on both supports")
            cand = fixed_map
            if cand.rows != m or cand.cols != n:
                raise PreconditionError("fixed map has the wrong shape")
        else:
            cand = sample_uniform_matrix(m, n, stream)
        fx = _FiberSampler(xs_bits, n, cand.row_words)
        if not fx.covers(m):
            continue
        fy = _FiberSampler(ys_bits, n, cand.row_words)
        if not fy.covers(m):
            continue
        surjection, fibers_x, fibers_y = cand, fx, fy
        break
    if surjection is None:
        raise RetryExhaustedError(f"no surjective map within {trials} samples")

    for _ in range(trials):
        mixer = sample_invertible(m, stream)
        x_star_bits = []
        for u in b_zero:
            xb = fibers_x.sample(mixer.apply_word(u.bits), stream)
            if xb is None:
                break
            x_star_bits.append(xb)
        else:
            y_star_bits = []
            for v in b_one:
                yb = fibers_y.sample(mixer.apply_word(v.bits), stream)
                if yb is None:
                    break
                y_star_bits.append(yb)
            else:
                x_star = tuple(BitVector(n, xb) for xb in x_star_bits)
                y_star = tuple(BitVector(n, yb) for yb in y_star_bits)
                ok, _cert = full_rank_check(x_star, y_star, d)
                if not ok:
                    raise AssertionError(
                        "special draw failed the full-rank check; this is a bug"
                    )
                return SpecialSumsetDraw(
                    surjection=surjection,
                    mixer=mixer,
                    b_zero=tuple(b_zero),
                    b_one=tuple(b_one),
                    x_star=x_star,
                    y_star=y_star,
                    full_rank=True,
                )
    raise RetryExhaustedError(f"no mixer with nonempty fibers within {trials} draws")
