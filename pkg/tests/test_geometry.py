"""Parallelogram-law detection, Gram recovery, and exponent-pattern scans."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadlab import (
    Exponents,
    ParameterError,
    Sampler,
    UndefinedValueError,
    default_exponent_grid,
    detect_inner_product,
    equation_params,
    euclidean,
    exponent_scan,
    gq_norm_defect,
    p_norm,
    parallelogram_defect,
    recover_gram,
    sup_norm,
    weighted_quadratic,
)
from quadlab.errors import DimensionMismatchError

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


class TestParallelogramDefect:
    def test_one_norm_basis_witness_is_four(self):
        assert parallelogram_defect(p_norm(2, 1.0), E1, E2) == 4.0

    def test_sup_norm_basis_witness_is_minus_two(self):
        assert parallelogram_defect(sup_norm(2), E1, E2) == -2.0

    def test_three_norm_basis_witness(self):
        want = 2.0 * 2.0 ** (2.0 / 3.0) - 4.0
        got = parallelogram_defect(p_norm(2, 3.0), E1, E2)
        assert got == pytest.approx(want, rel=1e-14)
        assert abs(got) > 0.8

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_euclidean_defect_is_rounding_level(self, seed):
        rng = np.random.default_rng(seed)
        x, y = rng.standard_normal((2, 4)) * 5.0
        defect = parallelogram_defect(euclidean(4), x, y)
        scale = 1.0 + float(x @ x) + float(y @ y)
        assert abs(defect) <= 1e-12 * scale

    def test_weighted_norm_satisfies_law(self):
        space = weighted_quadratic([[2.0, 1.0], [1.0, 3.0]])
        rng = np.random.default_rng(1)
        xs, ys = rng.standard_normal((2, 200, 2))
        defects = parallelogram_defect(space, xs, ys)
        assert np.abs(defects).max() <= 1e-12 * 100.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            parallelogram_defect(euclidean(2), np.zeros(2), np.zeros((3, 2)))


class TestGramRecovery:
    def test_weighted_gram_recovered(self):
        # Recovery squares square roots, so expect one rounding step per entry.
        g = np.array([[2.0, 1.0], [1.0, 3.0]])
        got = recover_gram(weighted_quadratic(g))
        assert np.allclose(got, g, rtol=0.0, atol=1e-14)

    def test_euclidean_recovers_identity(self):
        assert np.array_equal(recover_gram(euclidean(3)), np.eye(3))


class TestDetectInnerProduct:
    def _sampler(self, seed=5, count=300):
        return Sampler.restricted_pairs(seed, count, 2.0)

    def test_accepts_euclidean(self):
        verdict = detect_inner_product(euclidean(3), self._sampler())
        assert verdict.accepted
        assert np.allclose(verdict.recovered_gram, np.eye(3), atol=1e-12)
        assert verdict.bilinearity_defect <= 1e-10
        assert verdict.gram_min_eigenvalue == pytest.approx(1.0, abs=1e-12)

    def test_accepts_weighted(self):
        g = np.array([[2.0, 0.0], [0.0, 3.0]])
        verdict = detect_inner_product(weighted_quadratic(g), self._sampler())
        assert verdict.accepted
        assert np.allclose(verdict.recovered_gram, g, atol=1e-10)

    def test_accepts_two_norm_spelled_as_p(self):
        verdict = detect_inner_product(p_norm(2, 2.0), self._sampler())
        assert verdict.accepted
        assert np.allclose(verdict.recovered_gram, np.eye(2), atol=1e-10)

    def test_rejects_one_norm_with_clean_witness(self):
        verdict = detect_inner_product(p_norm(2, 1.0), self._sampler())
        assert not verdict.accepted
        assert verdict.basis_witness_max == 4.0
        assert verdict.recovered_gram is None
        assert verdict.bilinearity_defect is None

    def test_rejects_sup_norm(self):
        verdict = detect_inner_product(sup_norm(2), self._sampler())
        assert not verdict.accepted
        assert verdict.basis_witness_max == 2.0

    def test_rejects_three_norm(self):
        verdict = detect_inner_product(p_norm(2, 3.0), self._sampler())
        assert not verdict.accepted
        assert verdict.basis_witness_max == pytest.approx(
            4.0 - 2.0 * 2.0 ** (2.0 / 3.0), rel=1e-12
        )

    def test_quasi_norm_is_rejected_and_flagged(self):
        verdict = detect_inner_product(p_norm(2, 0.5), self._sampler())
        assert not verdict.accepted
        assert verdict.space["quasi_norm"] is True

    def test_dimension_one_always_inner_product(self):
        # On a line every p-norm is |x|, which does come from a product.
        verdict = detect_inner_product(p_norm(1, 1.0), self._sampler())
        assert verdict.accepted
        assert np.allclose(verdict.recovered_gram, [[1.0]], atol=1e-12)

    def test_bad_tol(self):
        with pytest.raises(ParameterError):
            detect_inner_product(euclidean(2), self._sampler(), tol=0.0)

    def test_dict_round_trip(self):
        d = detect_inner_product(euclidean(2), self._sampler()).to_dict()
        assert d["accepted"] is True
        assert d["recovered_gram"] == [[1.0, 0.0], [0.0, 1.0]]


class TestNormIdentityDefect:
    def test_all_squares_vanishes_on_inner_product(self):
        params = equation_params("1/3")
        exps = Exponents(2.0, 2.0, 2.0, 2.0)
        rng = np.random.default_rng(2)
        xs, ys = rng.standard_normal((2, 300, 3)) * 3.0
        defects = gq_norm_defect(euclidean(3), params, exps, xs, ys)
        scale = 1.0 + (np.sum(xs * xs, axis=-1) + np.sum(ys * ys, axis=-1)).max()
        assert np.abs(defects).max() <= 1e-12 * scale

    def test_first_exponent_oracle(self):
        # Pattern (1,2,2,2) with r = s = 1/2 at the basis pair:
        # sqrt(1/2) + (1/4) * 2 - 1/2 - 1/2 = sqrt(1/2) - 1/2.
        got = gq_norm_defect(
            euclidean(2), equation_params("1/2"), Exponents(1, 2, 2, 2), E1, E2
        )
        assert got == pytest.approx(np.sqrt(0.5) - 0.5, rel=1e-14)

    def test_tied_pair_oracle(self):
        # Pattern (2,2,3,3) at (w, w), w = 2 e1, r = s = 1/2:
        # 4 + 0 - (1/2) 8 - (1/2) 8 = -4.
        w = 2.0 * E1
        got = gq_norm_defect(
            euclidean(2), equation_params("1/2"), Exponents(2, 2, 3, 3), w, w
        )
        assert got == -4.0

    def test_zero_norm_negative_exponent(self):
        with pytest.raises(UndefinedValueError):
            gq_norm_defect(
                euclidean(2),
                equation_params("1/2"),
                Exponents(2, -1, 2, 2),
                E1,
                E1,
            )

    def test_batch_matches_single(self):
        params = equation_params("1/3")
        exps = Exponents(1, 2, 3, 2)
        rng = np.random.default_rng(3)
        xs, ys = rng.standard_normal((2, 10, 2))
        batch = gq_norm_defect(euclidean(2), params, exps, xs, ys)
        for i in range(10):
            single = gq_norm_defect(euclidean(2), params, exps, xs[i], ys[i])
            assert single == batch[i]

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            gq_norm_defect(
                euclidean(2),
                equation_params("1/2"),
                Exponents(2, 2, 2, 2),
                np.zeros(2),
                np.zeros(3),
            )


class TestExponents:
    def test_zero_exponent_rejected(self):
        with pytest.raises(ParameterError):
            Exponents(2, 0, 2, 2)

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            Exponents(2, 2, np.inf, 2)

    def test_label_and_tuple(self):
        e = Exponents(1, 2, 3, 2)
        assert e.astuple() == (1.0, 2.0, 3.0, 2.0)
        assert e.label() == "1,2,3,2"

    def test_default_grid_size(self):
        grid = default_exponent_grid()
        assert len(grid) == 81
        assert len({e.astuple() for e in grid}) == 81


class TestExponentScan:
    def _scan(self, space, r="1/3", seed=9, count=300, tol=1e-9, grid=None):
        return exponent_scan(
            space,
            equation_params(r),
            default_exponent_grid() if grid is None else grid,
            Sampler.restricted_pairs(seed, count, 2.0),
            tol=tol,
        )

    def test_euclidean_flags_only_all_squares(self):
        table = self._scan(euclidean(2))
        assert [e.astuple() for e in table.flagged()] == [(2.0, 2.0, 2.0, 2.0)]

    def test_one_norm_flags_nothing(self):
        table = self._scan(p_norm(2, 1.0))
        assert table.flagged() == []

    def test_all_other_patterns_have_visible_defects(self):
        table = self._scan(euclidean(2))
        others = [
            e for e in table.entries if e.exponents.astuple() != (2.0, 2.0, 2.0, 2.0)
        ]
        assert len(others) == 80
        assert all(e.sup_defect is None or e.sup_defect > 1e-3 for e in others)

    def test_negative_exponent_excludes_structured_witnesses(self):
        # (2,2,2,-1) hits norm(y) = 0 on the three (w, 0) witnesses.
        table = self._scan(euclidean(2), grid=[Exponents(2, 2, 2, -1)])
        entry = table.entries[0]
        assert entry.excluded_witness_count == 3
        assert entry.sup_defect is not None
        assert entry.error is None

    def test_determinism(self):
        a = self._scan(euclidean(2)).to_dict()
        b = self._scan(euclidean(2)).to_dict()
        assert a == b

    def test_empty_grid_rejected(self):
        with pytest.raises(ParameterError):
            self._scan(euclidean(2), grid=[])

    def test_bad_tol(self):
        with pytest.raises(ParameterError):
            self._scan(euclidean(2), tol=-1.0)
