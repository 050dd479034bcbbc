"""Packed GF(2) linear algebra: rank, samplers, and combinatorial generators."""

import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyext import rng
from polyext.errors import PreconditionError
from polyext.gf2 import (
    AffineSolver,
    BitMatrix,
    BitVector,
    XorBasis,
    binom_sum,
    canonical_index,
    enumerate_span,
    hamming_ball,
    nullspace_basis,
    rank,
    sample_invertible,
    sample_uniform_matrix,
    span_rank,
    weight_slice,
)

MASTER = 20260823


def bv(text: str) -> BitVector:
    return BitVector.from_string(text)


# ---------------------------------------------------------------------------
# BitVector / BitMatrix basics


def test_vector_string_round_trip():
    for text in ("", "0", "1", "0101", "11100", "0" * 40 + "1"):
        assert bv(text).to_string() == text


def test_vector_rejects_bad_characters():
    with pytest.raises(ValueError):
        BitVector.from_string("01x0")


def test_vector_support_and_weight():
    v = bv("10110")
    assert v.weight() == 3
    assert v.support() == (0, 2, 3)
    assert BitVector.from_support(5, (0, 2, 3)) == v


@given(st.text(alphabet="01", max_size=80))
def test_vector_xor_self_is_zero(text):
    v = bv(text)
    assert (v ^ v).bits == 0
    assert (v ^ v).n == v.n


@given(st.text(alphabet="01", max_size=40), st.text(alphabet="01", max_size=40))
def test_vector_xor_commutes(a, b):
    if len(a) != len(b):
        with pytest.raises(ValueError):
            bv(a) ^ bv(b)
    else:
        assert bv(a) ^ bv(b) == bv(b) ^ bv(a)


def test_matrix_row_column_consistency():
    m = BitMatrix.from_string("110\n011")
    assert m.row(0) == bv("110")
    assert m.column_word(1) == 0b11  # middle column hits both rows
    assert m.transpose().to_string() == "10\n11\n01"


def test_matrix_apply_is_row_dot():
    m = BitMatrix.from_string("110\n011\n101")
    x = bv("101")
    out = m.mul_vec(x)
    expected = [(m.row(i).bits & x.bits).bit_count() & 1 for i in range(3)]
    assert [out[i] for i in range(3)] == expected


# ---------------------------------------------------------------------------
# rank


def test_rank_identity():
    assert rank(BitMatrix.identity(3)) == 3


def test_rank_zero_matrix():
    assert rank(BitMatrix.zero(4, 7)) == 0


def test_rank_dependent_rows():
    # third row is the sum of the first two
    m = BitMatrix.from_string("110\n011\n101")
    assert rank(m) == 2


def _oracle_independent_count(words):
    """Greedy maximal independent subset, membership by brute-force subset XOR."""
    chosen = []
    for w in words:
        spanned = False
        for size in range(len(chosen) + 1):
            for combo in combinations(chosen, size):
                acc = 0
                for c in combo:
                    acc ^= c
                if acc == w:
                    spanned = True
                    break
            if spanned:
                break
        if not spanned:
            chosen.append(w)
    return len(chosen)


def test_rank_matches_greedy_oracle():
    stream = rng.derive(MASTER, "gf2", "rank-oracle")
    for _ in range(60):
        n = stream.randrange(1, 13)
        r = stream.randrange(1, 9)
        m = sample_uniform_matrix(r, n, stream)
        assert rank(m) == _oracle_independent_count(m.row_words)


def test_rank_invariant_under_row_operations():
    stream = rng.derive(MASTER, "gf2", "rank-rowops")
    for _ in range(1000):
        r = stream.randrange(1, 9)
        c = stream.randrange(1, 17)
        m = sample_uniform_matrix(r, c, stream)
        perm = list(range(r))
        stream.shuffle(perm)
        permuted = BitMatrix(r, c, [m.row_words[i] for i in perm])
        assert rank(permuted) == rank(m)
        if r >= 2:
            i, j = stream.sample(range(r), 2)
            added = list(m.row_words)
            added[i] ^= added[j]
            assert rank(BitMatrix(r, c, added)) == rank(m)


# ---------------------------------------------------------------------------
# samplers


def test_sample_uniform_matrix_zero_rows():
    m = sample_uniform_matrix(0, 5, rng.derive(MASTER, "gf2", "empty"))
    assert (m.rows, m.cols) == (0, 5)


def test_sample_uniform_matrix_deterministic():
    a = sample_uniform_matrix(2, 2, rng.derive(MASTER, "gf2", "det"))
    b = sample_uniform_matrix(2, 2, rng.derive(MASTER, "gf2", "det"))
    assert a == b


def test_sample_uniform_matrix_rank_rarely_deficient():
    """Random 64x64 matrices have rank >= 58 essentially always."""
    hits = 0
    for trial in range(1000):
        stream = rng.derive(MASTER, "gf2", "rank64", trial)
        if rank(sample_uniform_matrix(64, 64, stream)) >= 58:
            hits += 1
    assert hits >= 990


def test_sample_invertible_one_by_one():
    m = sample_invertible(1, rng.derive(MASTER, "gf2", "inv1"))
    assert m.row_words == (1,)


def test_sample_invertible_always_full_rank():
    stream = rng.derive(MASTER, "gf2", "invrank")
    for _ in range(50):
        m = stream.randrange(1, 12)
        assert rank(sample_invertible(m, stream)) == m


def test_sample_invertible_uniform_over_gl2():
    """Histogram over 60000 draws: each invertible 2x2 matrix near 1/6."""
    invertible = [
        (a, b)
        for a in range(4)
        for b in range(4)
        if rank(BitMatrix(2, 2, (a, b))) == 2
    ]
    assert len(invertible) == 6
    counts = dict.fromkeys(invertible, 0)
    stream = rng.derive(MASTER, "gf2", "gl2-histogram")
    draws = 60000
    for _ in range(draws):
        m = sample_invertible(2, stream)
        counts[(m.row_words[0], m.row_words[1])] += 1
    for key in invertible:
        assert abs(counts[key] / draws - 1 / 6) <= 0.01


def _matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    cols = [b.column_word(j) for j in range(b.cols)]
    rows = []
    for i in range(a.rows):
        w = 0
        for j, col in enumerate(cols):
            w |= ((a.row_words[i] & col).bit_count() & 1) << j
        rows.append(w)
    return BitMatrix(a.rows, b.cols, rows)


def _invert(m: BitMatrix) -> BitMatrix:
    """Inverse by augmented elimination; independent of the library rank path."""
    n = m.rows
    work = [m.row_words[i] | (1 << (n + i)) for i in range(n)]
    for col in range(n):
        pivot = next(i for i in range(col, n) if (work[i] >> col) & 1)
        work[col], work[pivot] = work[pivot], work[col]
        for i in range(n):
            if i != col and (work[i] >> col) & 1:
                work[i] ^= work[col]
    return BitMatrix(n, n, [w >> n for w in work])


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8, 16, 33, 64])
def test_sample_invertible_times_inverse_is_identity(m):
    mat = sample_invertible(m, rng.derive(MASTER, "gf2", "inverse", m))
    assert _matmul(mat, _invert(mat)) == BitMatrix.identity(m)


def test_sample_invertible_rejects_nonpositive():
    with pytest.raises(PreconditionError):
        sample_invertible(0, rng.derive(MASTER, "gf2", "bad"))


# ---------------------------------------------------------------------------
# hamming_ball / weight_slice / binom_sum


def test_ball_radius_zero():
    assert hamming_ball(3, 0) == [bv("000")]


def test_ball_radius_one_canonical_order():
    assert hamming_ball(3, 1) == [bv("000"), bv("100"), bv("010"), bv("001")]


def test_ball_full_space():
    for n in range(7):
        assert len(set(hamming_ball(n, n))) == 1 << n


def test_ball_size_matches_binom_sum():
    for n in range(17):
        for r in range(n + 1):
            assert len(hamming_ball(n, r)) == binom_sum(n, r)


def test_ball_sorted_by_canonical_key():
    ball = hamming_ball(6, 6)
    keys = [v.canonical_key() for v in ball]
    assert keys == sorted(keys)


def test_weight_slice_first_window():
    assert weight_slice(6, 1, 1, 2) == [bv("100000"), bv("010000")]


def test_weight_slice_last_window():
    assert weight_slice(6, 1, 5, 6) == [bv("000010"), bv("000001")]


def test_weight_slice_pair_count():
    out = weight_slice(8, 2, 1, 4)
    assert len(out) == 6
    assert all(v.weight() == 2 and max(v.support()) <= 3 for v in out)


def test_weight_slice_rejects_bad_window():
    with pytest.raises(PreconditionError):
        weight_slice(6, 1, 4, 3)
    with pytest.raises(PreconditionError):
        weight_slice(6, 3, 1, 2)


def test_binom_sum_values():
    assert binom_sum(4, 2) == 11
    assert binom_sum(3, 5) == 8
    for n in (0, 1, 7, 40):
        assert binom_sum(n, 0) == 1


@given(st.integers(min_value=0, max_value=200))
def test_binom_sum_saturates_at_power_of_two(n):
    assert binom_sum(n, n) == 1 << n


def test_binom_sum_large_values_exact():
    # far beyond 64-bit range; exactness is the point
    assert binom_sum(200, 100) == sum(math.comb(200, i) for i in range(101))


# ---------------------------------------------------------------------------
# canonical_index / enumerate_span / nullspace / solver


def test_canonical_index_inverts_enumeration():
    for n in range(1, 9):
        for idx, v in enumerate(hamming_ball(n, n)):
            assert canonical_index(v) == idx


def test_enumerate_span_counts():
    stream = rng.derive(MASTER, "gf2", "span")
    for _ in range(50):
        n = stream.randrange(1, 11)
        words = [stream.getrandbits(n) for _ in range(stream.randrange(0, 6))]
        span = enumerate_span(words)
        assert len(span) == len(set(span)) == 1 << span_rank(words)
        assert span[0] == 0
        member = set(span)
        for w in words:
            assert w in member


def test_nullspace_dimension_and_orthogonality():
    stream = rng.derive(MASTER, "gf2", "nullspace")
    for _ in range(80):
        cols = stream.randrange(1, 13)
        rows = [stream.getrandbits(cols) for _ in range(stream.randrange(0, 7))]
        basis = nullspace_basis(rows, cols)
        assert len(basis) == cols - span_rank(rows)
        assert span_rank(basis) == len(basis)
        for b in basis:
            for r in rows:
                assert (r & b).bit_count() % 2 == 0


def test_affine_solver_fiber_membership():
    stream = rng.derive(MASTER, "gf2", "solver")
    for _ in range(60):
        cols = stream.randrange(1, 10)
        m = stream.randrange(1, 7)
        rows = [stream.getrandbits(cols) for _ in range(m)]
        solver = AffineSolver(rows, cols)
        z = stream.getrandbits(m)
        sol = solver.sample(z, stream)
        brute = [
            x
            for x in range(1 << cols)
            if all(((rows[i] & x).bit_count() & 1) == ((z >> i) & 1) for i in range(m))
        ]
        if sol is None:
            assert brute == []
        else:
            assert sol in brute


def test_affine_solver_samples_fiber_uniformly():
    # one equation over 3 variables: fiber of size 4, frequencies near 1/4
    solver = AffineSolver([0b101], 3)
    stream = rng.derive(MASTER, "gf2", "solver-uniform")
    counts: dict[int, int] = {}
    for _ in range(8000):
        sol = solver.sample(1, stream)
        counts[sol] = counts.get(sol, 0) + 1
    assert sorted(counts) == [x for x in range(8) if (x & 0b101).bit_count() % 2 == 1]
    assert all(abs(c / 8000 - 0.25) < 0.03 for c in counts.values())


def test_xor_basis_tracks_span():
    basis = XorBasis()
    assert basis.add(0b011)
    assert basis.add(0b110)
    assert not basis.add(0b101)  # dependent: sum of the first two
    assert basis.contains(0b000)
    assert basis.contains(0b110)
    assert not basis.contains(0b001)
    assert len(basis) == 2


@settings(max_examples=60)
@given(st.lists(st.integers(min_value=0, max_value=2**12 - 1), max_size=10))
def test_span_rank_never_exceeds_word_count(words):
    r = span_rank(words)
    assert 0 <= r <= len(words)
    assert r == rank(BitMatrix(len(words), 12, words))
