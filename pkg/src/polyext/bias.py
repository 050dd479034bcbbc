"""Bias of polynomials on weak sources: exact, sampled, and moment identities.

The bias of f on X is E[(-1)^f(X)] = Pr[f(X)=0] - Pr[f(X)=1].  Everything
exact here is :class:`fractions.Fraction` arithmetic over the enumerated
source support; the Monte-Carlo estimator carries an explicit concentration
halfwidth instead of pretending to be exact.

The moment identity cross-checks two independent computations of
E_f[bias(f)^t] for f uniform over all degree-<=d polynomials: a brute-force
average over every polynomial, and the probability that t independent source
draws have monomial-evaluation vectors XORing to zero.  The two must agree
as exact rationals, with no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Mapping, Optional, Sequence, Union

from .anf import Polynomial, eval_bits, monomial_order
from .errors import BudgetExceededError, PreconditionError
from .gf2 import BitVector
from .reports import AuditReport
from .sources import Source, sample_source, support_of

__all__ = [
    "BiasReport",
    "bias_exact",
    "bias_mc",
    "mc_halfwidth",
    "moment_by_poly_enumeration",
    "moment_by_eval_collision",
    "statistical_distance",
    "distribution_of",
    "extractor_audit",
    "disperser_audit",
]

#: Enumeration guard for the moment computations (polynomial count / states).
MOMENT_COEFF_LIMIT = 20
MOMENT_WORK_LIMIT = 1 << 24


@dataclass(frozen=True)
class BiasReport:
    """Monte-Carlo bias estimate with its concentration guarantee."""

    estimate: float
    samples: int
    halfwidth: float
    fail_prob: float


def _poly_on_bits(f: Polynomial, xb: int) -> int:
    acc = 0
    for mask in f._active_masks:
        if xb & mask == mask:
            acc ^= 1
    return acc


def bias_exact(f: Polynomial, source: Source) -> Fraction:
    """Exact bias of f on the source via full support enumeration."""
    total = Fraction(0)
    for point, prob in support_of(source):
        if point.n != f.order.n:
            raise PreconditionError("source output length must match the polynomial")
        total += -prob if _poly_on_bits(f, point.bits) else prob
    return total


def mc_halfwidth(samples: int, fail_prob: float) -> float:
    """Concentration halfwidth sqrt(4 ln(2/delta) / N) for the bias estimate."""
    if samples <= 0 or not 0 < fail_prob < 1:
        raise PreconditionError("need samples >= 1 and 0 < fail_prob < 1")
    return math.sqrt(4.0 * math.log(2.0 / fail_prob) / samples)


def bias_mc(
    f: Polynomial, source: Source, samples: int, fail_prob: float, stream: Random
) -> BiasReport:
    """Estimate the bias from independent draws.

    The reported halfwidth bounds |estimate - bias| except with probability
    at most ``fail_prob``; it comes from the two-sided exponential tail for
    bounded samples applied to the +-1 values.
    """
    hw = mc_halfwidth(samples, fail_prob)
    acc = 0
    for _ in range(samples):
        x = sample_source(source, stream)
        acc += -1 if _poly_on_bits(f, x.bits) else 1
    return BiasReport(acc / samples, samples, hw, fail_prob)


def _support_ints(source: Source, n: int, d: int) -> tuple[list[int], list[int], int]:
    """Support eval-vectors (packed), integer weights, and common denominator."""
    order = monomial_order(n, d)
    dist = support_of(source)
    denom = math.lcm(*(pr.denominator for _, pr in dist))
    evals = []
    weights = []
    for point, prob in dist:
        if point.n != n:
            raise PreconditionError("source output length must equal n")
        evals.append(eval_bits(point.bits, order))
        weights.append(prob.numerator * (denom // prob.denominator))
    return evals, weights, denom


def moment_by_poly_enumeration(source: Source, n: int, d: int, t: int) -> Fraction:
    """E over all degree-<=d polynomials of bias(f)^t, by direct enumeration.

    Walks every one of the 2^binom_sum(n, d) coefficient vectors, so it
    refuses to run when the coefficient count exceeds 20.
    """
    if t < 0:
        raise PreconditionError("moment index must be nonnegative")
    order = monomial_order(n, d)
    if order.size > MOMENT_COEFF_LIMIT:
        raise BudgetExceededError(
            f"enumerating 2^{order.size} polynomials is over the 2^{MOMENT_COEFF_LIMIT} cap"
        )
    evals, weights, denom = _support_ints(source, n, d)
    total = 0
    for c in range(1 << order.size):
        signed = 0
        for e, w in zip(evals, weights):
            signed += -w if (c & e).bit_count() & 1 else w
        total += signed**t
    return Fraction(total, denom**t * (1 << order.size))


def moment_by_eval_collision(source: Source, n: int, d: int, t: int) -> Fraction:
    """Pr that t independent draws have evaluation vectors summing to zero.

    Convolves the exact distribution of the packed evaluation vector with
    itself t times and reads off the mass at zero.  This is the second,
    independent route to the t-th bias moment.
    """
    if t < 0:
        raise PreconditionError("moment index must be nonnegative")
    evals, weights, denom = _support_ints(source, n, d)
    acc: dict[int, int] = {0: 1}
    for _ in range(t):
        if len(acc) * len(evals) > MOMENT_WORK_LIMIT:
            raise BudgetExceededError("eval-vector convolution exceeds the 2^24 step budget")
        nxt: dict[int, int] = {}
        for a, wa in acc.items():
            for e, we in zip(evals, weights):
                key = a ^ e
                nxt[key] = nxt.get(key, 0) + wa * we
        acc = nxt
    return Fraction(acc.get(0, 0), denom**t)


Distribution = Mapping[object, Fraction]


def distribution_of(source: Source) -> dict[BitVector, Fraction]:
    """Source support as a point -> probability mapping."""
    return dict(support_of(source))


def statistical_distance(p: Distribution, q: Distribution) -> Fraction:
    """Half the L1 distance between two enumerated distributions, exactly."""
    keys = set(p) | set(q)
    total = sum(abs(p.get(k, Fraction(0)) - q.get(k, Fraction(0))) for k in keys)
    return Fraction(total, 2)


def _pushforward(
    polys: Sequence[Polynomial], source: Source
) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    masks = [f._active_masks for f in polys]
    for point, prob in support_of(source):
        xb = point.bits
        key = 0
        for i, active in enumerate(masks):
            acc = 0
            for mask in active:
                if xb & mask == mask:
                    acc ^= 1
            key |= acc << i
        out[key] = out.get(key, Fraction(0)) + prob
    return out


def extractor_audit(
    polys: Sequence[Polynomial],
    sources: Sequence[Source],
    epsilon: Union[Fraction, float],
) -> AuditReport:
    """Exact closeness-to-uniform audit of a polynomial tuple on each source.

    Pushes every source's exact distribution through the m output polynomials
    (m <= 16), measures statistical distance to uniform on m bits, and passes
    iff the worst source stays within epsilon.  The witness index points at
    the first source attaining the maximum distance.
    """
    m = len(polys)
    if not 1 <= m <= 16:
        raise PreconditionError("output dimension must be between 1 and 16")
    order = polys[0].order
    if any(f.order is not order for f in polys):
        raise PreconditionError("output polynomials must share a monomial order")
    if not sources:
        raise PreconditionError("need at least one source")
    eps = Fraction(epsilon)
    uniform = Fraction(1, 1 << m)
    per_source = []
    max_distance = Fraction(0)
    witness = 0
    for idx, source in enumerate(sources):
        push = _pushforward(polys, source)
        dist = Fraction(
            sum(abs(push.get(z, Fraction(0)) - uniform) for z in range(1 << m)), 2
        )
        heaviest = max(push, key=lambda z: (push[z], -z))
        per_source.append(
            {
                "source_index": idx,
                "distance_num": dist.numerator,
                "distance_den": dist.denominator,
                "heaviest_output": heaviest,
                "support_points": len(push),
            }
        )
        if dist > max_distance:
            max_distance = dist
            witness = idx
    return AuditReport(
        kind="extractor",
        verdict=max_distance <= eps,
        epsilon=eps,
        max_distance=max_distance,
        witness_source_index=witness,
        per_source=per_source,
    )


def disperser_audit(f: Polynomial, sources: Sequence[Source]) -> AuditReport:
    """Check that f hits both output values on every source."""
    if not sources:
        raise PreconditionError("need at least one source")
    per_source = []
    witness: Optional[int] = None
    for idx, source in enumerate(sources):
        values = set()
        for point, _ in support_of(source):
            values.add(_poly_on_bits(f, point.bits))
            if len(values) == 2:
                break
        ok = values == {0, 1}
        per_source.append(
            {
                "source_index": idx,
                "hits_zero": 0 in values,
                "hits_one": 1 in values,
                "pass": ok,
            }
        )
        if not ok and witness is None:
            witness = idx
    return AuditReport(
        kind="disperser",
        verdict=witness is None,
        epsilon=None,
        max_distance=None,
        witness_source_index=witness,
        per_source=per_source,
    )
