import json
from fractions import Fraction

import numpy as np
import pytest

from hsig.errors import ConfigurationError, InvalidIncrement
from hsig.graded import (Tensor, algebra, basis_enumerate, dim_graded, exp_generators, exp_r,
                         from_terms, product_r, total_dim, unit, zeros)
from hsig.tensor import tensor_exp

# Counts obtained independently by brute-force enumeration of generator
# sequences (generators at rank 2: tau plus all rank-1 words of length >= 1).
RANK1_D1 = [1, 2, 4, 8, 16, 32, 64]
RANK2_D1 = [1, 3, 13, 59, 269, 1227]
RANK2_D2 = [1, 4, 25, 163, 1066, 6973]
RANK3_D1 = [1, 4, 29, 227, 1790, 14125, 111469, 879676]


def seq_count(gen_counts, k):
    """Number of sequences of generators with total degree k."""
    table = [1]
    for n in range(1, k + 1):
        table.append(sum(gen_counts.get(j, 0) * table[n - j] for j in range(1, n + 1)))
    return table[k]


class TestDimensions:
    def test_rank1(self):
        assert [dim_graded(1, 1, k) for k in range(7)] == RANK1_D1
        assert total_dim(1, 1, 6) == 127
        assert [dim_graded(1, 2, k) for k in range(3)] == [1, 3, 9]

    def test_rank2(self):
        assert [dim_graded(2, 1, k) for k in range(6)] == RANK2_D1
        assert total_dim(2, 1, 3) == 76
        assert [dim_graded(2, 2, k) for k in range(6)] == RANK2_D2

    def test_rank2_oracle(self):
        for d in (1, 2, 3):
            gens = {1: 1 + (d + 1)}
            gens.update({j: (d + 1) ** j for j in range(2, 7)})
            assert [dim_graded(2, d, k) for k in range(7)] == [seq_count(gens, k) for k in range(7)]

    def test_rank2_recursion(self):
        for d in (1, 2, 3):
            q = d + 1
            for k in range(2, 8):
                assert dim_graded(2, d, k) == (2 * q + 1) * dim_graded(2, d, k - 1) - q * dim_graded(2, d, k - 2)

    def test_rank3(self):
        assert [dim_graded(3, 1, k) for k in range(8)] == RANK3_D1

    @pytest.mark.parametrize("r,d,M", [(1, 1, 5), (1, 3, 4), (2, 1, 5), (2, 2, 5), (2, 3, 4), (3, 1, 5), (3, 2, 3)])
    def test_matches_enumeration(self, r, d, M):
        words = basis_enumerate(r, d, M)
        alg = algebra(r, d, M)
        deg = [sum(int(alg.gen_degrees[g]) for g in w) for w in words]
        for k in range(M + 1):
            assert deg.count(k) == dim_graded(r, d, k)

    def test_negative_degree(self):
        with pytest.raises(ConfigurationError):
            dim_graded(1, 1, -1)


class TestBasis:
    def test_rank1_small(self):
        assert basis_enumerate(1, 1, 1) == [(), (0,), (1,)]

    def test_rank2_degree1_generators(self):
        alg = algebra(2, 1, 3)
        deg1 = [alg.word_label(i) for i in range(alg.size) if alg.degrees[i] == 1]
        assert deg1 == [["t"], [[0]], [[1]]]

    def test_order_is_degree_then_lex(self):
        for r, d, M in [(1, 2, 3), (2, 1, 4), (3, 1, 4)]:
            alg = algebra(r, d, M)
            keys = [(int(alg.degrees[i]), w) for i, w in enumerate(alg.words)]
            assert keys == sorted(keys)

    def test_labels_round_trip(self):
        alg = algebra(3, 1, 4)
        for i in range(alg.size):
            assert alg.index[alg.word_from_label(alg.word_label(i))] == i

    def test_product_table_is_concatenation(self):
        alg = algebra(3, 1, 4)
        left, right, out = alg.product_table
        for a, b, c in zip(left, right, out):
            assert alg.words[c] == alg.words[a] + alg.words[b]


def rand_elem(rng, r, d, M):
    alg = algebra(r, d, M)
    return Tensor(alg, rng.normal(size=alg.size))


class TestProduct:
    def test_example(self):
        alg = algebra(2, 1, 2)
        tau, g = (0,), (1,)
        a = from_terms(alg, {(): 1, tau: 1})
        b = from_terms(alg, {(): 1, g: 1})
        c = product_r(a, b)
        expected = from_terms(alg, {(): 1, tau: 1, g: 1, (0, 1): 1})
        assert np.array_equal(c.coeffs, expected.coeffs)

    def test_laws(self, rng):
        for r, d, M in [(2, 1, 4), (2, 2, 3), (3, 1, 4)]:
            for _ in range(5):
                a, b, c = (rand_elem(rng, r, d, M) for _ in range(3))
                np.testing.assert_allclose(product_r(product_r(a, b), c).coeffs,
                                           product_r(a, product_r(b, c)).coeffs, atol=1e-10, rtol=1e-12)
                one = unit(a.algebra)
                assert np.array_equal(product_r(one, a).coeffs, a.coeffs)
                assert np.array_equal(product_r(a, one).coeffs, a.coeffs)

    def test_rank1_subalgebra_embedding(self, rng):
        # Rank-2 elements built only from the letter generators (0,) and (1,)
        # of the rank-1 algebra multiply like rank-1 words.
        M = 4
        a1, b1 = rand_elem(rng, 1, 1, M), rand_elem(rng, 1, 1, M)
        alg2 = algebra(2, 1, M)
        low = algebra(1, 1, M)
        letter_gen = {0: low.index[(0,)], 1: low.index[(1,)]}

        def embed(t):
            return from_terms(alg2, {tuple(letter_gen[x] for x in w): t[w] for w in low.words})

        prod1 = product_r(a1, b1)
        np.testing.assert_allclose(product_r(embed(a1), embed(b1)).coeffs, embed(prod1).coeffs, atol=1e-12)

    def test_mismatch(self, rng):
        with pytest.raises(ConfigurationError):
            product_r(rand_elem(rng, 2, 1, 2), rand_elem(rng, 2, 1, 3))


class TestExp:
    def test_pure_time(self):
        lower = zeros(algebra(1, 1, 3))
        e = exp_r(1.0, lower)
        assert e.rank == 2
        for m in range(4):
            assert e[(0,) * m] == pytest.approx(1 / [1, 1, 2, 6][m])
        assert np.count_nonzero(e.coeffs) == 4

    def test_single_generator(self):
        low = algebra(1, 1, 2)
        g = from_terms(low, {(1,): 1})
        e = exp_r(1, g)
        gi = low.index[(1,)]
        expected = from_terms(e.algebra, {(): 1, (0,): 1, (gi,): 1, (0, 0): 0.5, (0, gi): 0.5,
                                          (gi, 0): 0.5, (gi, gi): 0.5})
        np.testing.assert_allclose(e.coeffs, expected.coeffs)

    def test_truncation_zero(self):
        e = exp_r(1.0, zeros(algebra(1, 2, 0)))
        assert e.coeffs.tolist() == [1.0]

    def test_nonzero_unit_rejected(self):
        with pytest.raises(InvalidIncrement):
            exp_r(1.0, unit(algebra(1, 1, 2)))

    def test_rank1_matches_tensor_exp(self, rng):
        v = rng.normal(size=3)
        np.testing.assert_allclose(exp_r(v[0], v[1:], 4).coeffs, tensor_exp(v, 4).coeffs, atol=1e-14)

    def test_exact(self):
        low = algebra(1, 1, 3)
        g = from_terms(low, {(1,): Fraction(1, 2)}, exact=True)
        e = exp_r(1, g)
        gi = low.index[(1,)]
        assert e.exact and e[(gi, gi, gi)] == Fraction(1, 48)

    def test_higher_degree_generator(self):
        # A degree-2 lower word is a single degree-2 generator at the next rank.
        low = algebra(1, 1, 4)
        w = low.index[(1, 1)]
        e = exp_r(0, from_terms(low, {(1, 1): 3.0}))
        assert e[(w,)] == 3.0 and e[(w, w)] == 4.5
        assert e.algebra.degrees[e.algebra.index[(w, w)]] == 4


class TestSerialization:
    def test_round_trip(self, rng):
        t = rand_elem(rng, 3, 1, 3)
        data = json.loads(json.dumps(t.to_dict()))
        back = Tensor.from_dict(data)
        assert back.algebra is t.algebra
        np.testing.assert_array_equal(back.coeffs, t.coeffs)

    def test_exact_round_trip(self):
        e = exp_r(1, from_terms(algebra(1, 1, 2), {(1,): Fraction(1, 3)}, exact=True))
        back = Tensor.from_dict(json.loads(json.dumps(e.to_dict())))
        assert back.exact and list(back.coeffs) == list(e.coeffs)

    def test_version_checked(self, rng):
        d = rand_elem(rng, 1, 1, 1).to_dict()
        d["version"] = 99
        with pytest.raises(ConfigurationError):
            Tensor.from_dict(d)

    def test_immutable(self, rng):
        t = rand_elem(rng, 1, 1, 1)
        with pytest.raises(ValueError):
            t.coeffs[0] = 5.0


def test_exp_generators_shape_checked():
    with pytest.raises(ConfigurationError):
        exp_generators(algebra(1, 1, 2), np.zeros(5))
