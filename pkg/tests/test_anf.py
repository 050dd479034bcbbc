"""Algebraic normal form: monomial order, evaluation, Mobius transform, composition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyext import rng
from polyext.anf import (
    Polynomial,
    anf_from_truth_table,
    compose_linear,
    compose_linear_by_table,
    eval_vector,
    evaluate,
    mobius_transform,
    monomial_order,
    sample_poly,
    truth_table,
)
from polyext.gf2 import BitMatrix, BitVector, binom_sum, sample_uniform_matrix

MASTER = 20260823


def bv(text: str) -> BitVector:
    return BitVector.from_string(text)


# ---------------------------------------------------------------------------
# monomial order


def test_order_is_degree_then_lex():
    order = monomial_order(3, 2)
    assert order.monomials == ((), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2))
    assert order.size == binom_sum(3, 2)


def test_order_starts_with_constant():
    for n in range(5):
        for d in range(n + 1):
            assert monomial_order(n, d).monomials[0] == ()


def test_order_is_interned():
    assert monomial_order(4, 2) is monomial_order(4, 2)


# ---------------------------------------------------------------------------
# eval_vector / evaluate


def test_eval_vector_at_zero():
    assert eval_vector(bv("00"), monomial_order(2, 2)) == bv("1000")


def test_eval_vector_all_ones():
    assert eval_vector(bv("11"), monomial_order(2, 2)) == bv("1111")


def test_eval_vector_single_coordinate():
    assert eval_vector(bv("10"), monomial_order(2, 2)) == bv("1100")


def test_eval_vector_is_monomial_products():
    stream = rng.derive(MASTER, "anf", "evalvec")
    for _ in range(60):
        n = stream.randrange(1, 11)
        d = stream.randrange(0, min(n, 3) + 1)
        order = monomial_order(n, d)
        x = BitVector(n, stream.getrandbits(n))
        vec = eval_vector(x, order)
        for j, mon in enumerate(order.monomials):
            prod = 1
            for i in mon:
                prod &= x[i]
            assert vec[j] == prod


def test_evaluate_constant_one():
    one = Polynomial.from_monomials(3, 2, [[]])
    for xb in range(8):
        assert evaluate(one, BitVector(3, xb)) == 1


def test_evaluate_single_product_monomial():
    f = Polynomial.from_monomials(2, 2, [[0, 1]])
    assert evaluate(f, bv("11")) == 1
    assert evaluate(f, bv("10")) == 0


def test_evaluate_matches_term_summation_oracle():
    stream = rng.derive(MASTER, "anf", "eval-oracle")
    for _ in range(100):
        n = stream.randrange(1, 11)
        d = stream.randrange(0, min(n, 3) + 1)
        f = sample_poly(n, d, stream)
        x = BitVector(n, stream.getrandbits(n))
        acc = 0
        for mon in f.active_monomials():
            if all(x[i] for i in mon):
                acc ^= 1
        assert evaluate(f, x) == acc


def test_evaluate_rejects_length_mismatch():
    f = Polynomial.from_monomials(3, 1, [[0]])
    with pytest.raises(ValueError):
        evaluate(f, bv("01"))


def test_evaluate_additive_in_coefficients():
    """evaluate(f + g, x) = evaluate(f, x) XOR evaluate(g, x), all x, n <= 8."""
    stream = rng.derive(MASTER, "anf", "linearity")
    for n in (2, 5, 8):
        f = sample_poly(n, 2, stream)
        g = sample_poly(n, 2, stream)
        for xb in range(1 << n):
            x = BitVector(n, xb)
            assert evaluate(f ^ g, x) == evaluate(f, x) ^ evaluate(g, x)


# ---------------------------------------------------------------------------
# sample_poly


def test_sample_poly_deterministic():
    a = sample_poly(2, 1, rng.derive(MASTER, "anf", "det"))
    b = sample_poly(2, 1, rng.derive(MASTER, "anf", "det"))
    assert a == b


def test_sample_poly_coefficient_count():
    f = sample_poly(3, 2, rng.derive(MASTER, "anf", "count"))
    assert f.coeffs.n == 7 == binom_sum(3, 2)


def test_sample_poly_degree_zero_is_fair_coin():
    ones = 0
    for seed in range(10**4):
        f = sample_poly(4, 0, rng.derive(MASTER, "anf", "coin", seed))
        assert f.coeffs.n == 1
        ones += f.coeffs[0]
    assert abs(ones / 10**4 - 0.5) <= 0.02


# ---------------------------------------------------------------------------
# truth tables and the Mobius transform


def test_truth_table_of_zero():
    f = Polynomial.zero(3, 2)
    assert not truth_table(f).any()


def test_anf_from_all_zero_table():
    f = anf_from_truth_table(np.zeros(8, dtype=np.uint8))
    assert f.coeffs.bits == 0
    assert f.degree() == 0


def test_anf_of_xor_table():
    # table indexed by packed x: f(x) = x_1 + x_2
    f = anf_from_truth_table([0, 1, 1, 0])
    assert f.active_monomials() == ((0,), (1,))
    assert f.degree() == 1


def test_anf_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        anf_from_truth_table([0, 1, 1])


def test_anf_truth_table_round_trip():
    stream = rng.derive(MASTER, "anf", "round-trip")
    for _ in range(100):
        n = stream.randrange(1, 11)
        d = stream.randrange(0, min(n, 3) + 1)
        f = sample_poly(n, d, stream)
        g = anf_from_truth_table(truth_table(f))
        assert g.active_monomials() == f.active_monomials()


def test_table_poly_bijection_both_directions():
    stream = rng.derive(MASTER, "anf", "bijection")
    for n in range(1, 9):
        table = np.array([stream.randrange(2) for _ in range(1 << n)], dtype=np.uint8)
        f = anf_from_truth_table(table)
        assert np.array_equal(truth_table(f), table)


def test_mobius_transform_is_involution():
    stream = rng.derive(MASTER, "anf", "mobius")
    for n in range(1, 9):
        table = np.array([stream.randrange(2) for _ in range(1 << n)], dtype=np.uint8)
        assert np.array_equal(mobius_transform(mobius_transform(table)), table)


@settings(max_examples=40)
@given(st.integers(min_value=1, max_value=6), st.randoms(use_true_random=False))
def test_truth_table_agrees_with_evaluate(n, rand):
    f = sample_poly(n, min(n, 2), rand)
    table = truth_table(f)
    for xb in range(1 << n):
        assert table[xb] == evaluate(f, BitVector(n, xb))


# ---------------------------------------------------------------------------
# compose_linear


def test_compose_with_identity_is_no_op():
    stream = rng.derive(MASTER, "anf", "compose-id")
    for n in (2, 4, 6):
        q = sample_poly(n, 2, stream)
        assert compose_linear(q, BitMatrix.identity(n)).active_monomials() == q.active_monomials()


def test_compose_linear_polynomial_reads_first_row():
    q = Polynomial.from_monomials(2, 2, [[0]])  # y_1
    mat = BitMatrix.from_string("1101\n0110")
    composed = compose_linear(q, mat)
    assert composed.active_monomials() == ((0,), (1,), (3,))


def test_compose_worked_example():
    """(x1 + x2)(x2 + x3) expands to x1x2 + x1x3 + x2 + x2x3."""
    q = Polynomial.from_monomials(2, 2, [[0, 1]])
    mat = BitMatrix.from_string("110\n011")
    composed = compose_linear(q, mat)
    expected = Polynomial.from_monomials(3, 2, [[0, 1], [0, 2], [1], [1, 2]])
    assert composed.active_monomials() == expected.active_monomials()


def test_compose_rejects_dimension_mismatch():
    q = Polynomial.from_monomials(3, 1, [[2]])
    with pytest.raises(ValueError):
        compose_linear(q, BitMatrix.from_string("11\n01"))


def test_compose_symbolic_matches_table_path():
    stream = rng.derive(MASTER, "anf", "compose-paths")
    for _ in range(40):
        m = stream.randrange(1, 7)
        n = stream.randrange(1, 9)
        d = stream.randrange(0, min(m, 3) + 1)
        q = sample_poly(m, d, stream)
        mat = sample_uniform_matrix(m, n, stream)
        a = compose_linear(q, mat)
        b = compose_linear_by_table(q, mat)
        assert a.active_monomials() == b.active_monomials()


def test_compose_never_raises_degree():
    stream = rng.derive(MASTER, "anf", "compose-degree")
    for _ in range(500):
        m = stream.randrange(1, 9)
        n = stream.randrange(1, 9)
        d = stream.randrange(0, min(m, 3) + 1)
        q = sample_poly(m, d, stream)
        mat = sample_uniform_matrix(m, n, stream)
        assert compose_linear(q, mat).degree() <= q.degree()


def test_compose_evaluates_to_q_of_lx():
    stream = rng.derive(MASTER, "anf", "compose-eval")
    for _ in range(30):
        m = stream.randrange(1, 6)
        n = stream.randrange(1, 7)
        q = sample_poly(m, min(m, 2), stream)
        mat = sample_uniform_matrix(m, n, stream)
        composed = compose_linear(q, mat)
        for xb in range(1 << n):
            x = BitVector(n, xb)
            assert evaluate(composed, x) == evaluate(q, mat.mul_vec(x))
