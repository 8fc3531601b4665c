"""Reduced-system construction against the inner-product oracle."""

import math

import numpy as np
import pytest

from knlayer.system_builder import (
    SystemKind,
    build_kramers_system,
    build_temperature_system,
    inner_product_oracle,
    kramers_even_basis,
    kramers_odd_basis,
    temperature_even_basis,
    temperature_odd_basis,
)


def basis_norm(combo):
    return math.sqrt(
        sum(c * c * math.prod(math.factorial(x) for x in idx) for c, idx in combo)
    )


def oracle_entry(system, i, j):
    """Coupling entry (i, j) re-derived from the basis combinations."""
    if system.kind is SystemKind.TEMPERATURE_JUMP:
        even, odd = temperature_even_basis, temperature_odd_basis
    else:
        even, odd = kramers_even_basis, kramers_odd_basis
    ip = sum(
        ce * co * inner_product_oracle(ie, io)
        for ce, ie in even(i)
        for co, io in odd(j)
    )
    a_sq = basis_norm(even(i)) ** 2
    if system.kind is SystemKind.KRAMERS and i == 1:
        a_sq *= 1.0 - (1.0 - system.prandtl) / 5.0
    return ip / (math.sqrt(a_sq) * basis_norm(odd(j)))


class TestInnerProductOracle:
    def test_pure_normal_pair(self):
        # xi2 He_3 = 3 He_2 + He_4; only the He_2 term survives
        assert inner_product_oracle((0, 2, 0), (0, 3, 0)) == 6.0

    def test_orthogonal_pair(self):
        assert inner_product_oracle((1, 0, 0), (0, 1, 0)) == 0.0

    def test_upshift_term(self):
        # down-shift of (2,1,0) and up-shift of (2,0,0) both land on a norm
        assert inner_product_oracle((2, 0, 0), (2, 1, 0)) == 2.0
        assert inner_product_oracle((2, 1, 0), (2, 0, 0)) == 2.0

    def test_against_gauss_hermite_quadrature(self):
        # probabilists' nodes/weights; weight integrates to sqrt(2 pi) per axis
        nodes, weights = np.polynomial.hermite_e.hermegauss(24)
        weights = weights / math.sqrt(2.0 * math.pi)

        def he(n, x):
            vals = [np.ones_like(x), x]
            for k in range(1, n + 1):
                vals.append(x * vals[-1] - k * vals[-2])
            return vals[n]

        for a, b in [((0, 2, 0), (0, 3, 0)), ((2, 1, 0), (2, 0, 0)), ((1, 2, 0), (1, 3, 0))]:
            num = 1.0
            for axis in range(3):
                fa = he(a[axis], nodes)
                fb = he(b[axis], nodes)
                extra = nodes if axis == 1 else 1.0
                num *= float(np.sum(weights * fa * fb * extra))
            assert inner_product_oracle(a, b) == pytest.approx(num, rel=1e-10, abs=1e-10)


class TestTemperatureSystem:
    def test_dimensions(self):
        for order in (3, 5, 7, 9, 21):
            system = build_temperature_system(order)
            assert system.m_odd == 2 * ((order - 1) // 2) - 1
            assert system.m_even == 2 * (order // 2) - 1
            assert system.m_odd + system.m_even == 2 * (order - 2)

    def test_order_three_entries(self):
        system = build_temperature_system(3)
        assert system.m_even == system.m_odd == 1
        assert system.coupling_entry(1, 1) == pytest.approx(3.0 / math.sqrt(5.0), rel=1e-15)
        assert system.even_scale(1) == pytest.approx(math.sqrt(3.0), rel=1e-15)
        assert system.odd_scale(1) == pytest.approx(math.sqrt(15.0), rel=1e-15)

    def test_order_five_entries_from_oracle(self):
        system = build_temperature_system(5)
        expected = np.array(
            [[oracle_entry(system, i, j) for j in range(1, 4)] for i in range(1, 4)]
        )
        np.testing.assert_allclose(system.coupling_dense(), expected, rtol=1e-13, atol=1e-14)
        # diagonal entries in closed form
        assert system.coupling_entry(2, 2) == pytest.approx(math.sqrt(5.0), rel=1e-15)
        assert system.coupling_entry(3, 3) == pytest.approx(math.sqrt(3.0), rel=1e-15)

    def test_order_seven_band_entries(self):
        system = build_temperature_system(7)
        assert system.coupling_entry(4, 4) == pytest.approx(math.sqrt(7.0), rel=1e-15)
        assert system.coupling_entry(5, 3) == pytest.approx(2.0, rel=1e-15)
        assert system.coupling_entry(4, 2) == pytest.approx(math.sqrt(6.0), rel=1e-15)

    @pytest.mark.parametrize("order", range(3, 32, 2))
    def test_all_entries_match_oracle(self, order):
        system = build_temperature_system(order)
        worst = 0.0
        for j in range(1, system.m_odd + 1):
            for i in range(1, system.m_even + 1):
                expected = oracle_entry(system, i, j)
                got = system.coupling_entry(i, j)
                worst = max(worst, abs(got - expected) / max(1.0, abs(expected)))
        assert worst < 1e-12

    def test_band_structure(self):
        system = build_temperature_system(13)
        dense = system.coupling_dense()
        for i in range(system.m_even):
            for j in range(system.m_odd):
                if not 0 <= i - j <= 2:
                    assert dense[i, j] == 0.0

    def test_full_column_rank(self):
        for order in range(3, 100, 2):
            dense = build_temperature_system(order).coupling_dense()
            smallest = np.linalg.svd(dense, compute_uv=False)[-1]
            assert smallest > 0.0

    def test_entry_magnitude_bound(self):
        for order in range(3, 1026, 2):
            system = build_temperature_system(order)
            top = max(
                np.max(np.abs(system.diag_main), initial=0.0),
                np.max(np.abs(system.diag_sub1), initial=0.0),
                np.max(np.abs(system.diag_sub2), initial=0.0),
            )
            assert top <= math.sqrt(order + 3.0)
        for order in range(4, 1025, 2):
            system = build_kramers_system(order, 2.0 / 3.0)
            top = max(
                np.max(np.abs(system.diag_main), initial=0.0),
                np.max(np.abs(system.diag_sub1), initial=0.0),
            )
            assert top <= math.sqrt(order + 3.0)

    def test_rejects_bad_orders(self):
        with pytest.raises(ValueError):
            build_temperature_system(4)
        with pytest.raises(ValueError):
            build_temperature_system(1)
        with pytest.raises(ValueError):
            build_temperature_system(4099)


class TestKramersSystem:
    def test_dimensions(self):
        for order in (4, 6, 8, 20):
            system = build_kramers_system(order, 1.0)
            assert system.m_even == (order - 1) // 2
            assert system.m_odd == (order - 2) // 2

    def test_leading_scale_bgk(self):
        system = build_kramers_system(4, 1.0)
        assert system.even_scale(1) == pytest.approx(math.sqrt(2.0), rel=1e-15)

    def test_leading_scale_prandtl(self):
        system = build_kramers_system(4, 2.0 / 3.0)
        assert system.even_scale(1) == pytest.approx(math.sqrt(28.0 / 15.0), rel=1e-15)
        ratio = build_kramers_system(4, 1.0).even_scale(1) / system.even_scale(1)
        assert ratio == pytest.approx(math.sqrt(5.0 / (4.0 + 2.0 / 3.0)), rel=1e-14)

    def test_leading_entry(self):
        system = build_kramers_system(6, 1.0)
        assert system.coupling_entry(1, 1) == pytest.approx(math.sqrt(3.0), rel=1e-15)

    @pytest.mark.parametrize("order", range(4, 31, 2))
    @pytest.mark.parametrize("prandtl", [1.0, 2.0 / 3.0])
    def test_all_entries_match_oracle(self, order, prandtl):
        system = build_kramers_system(order, prandtl)
        for j in range(1, system.m_odd + 1):
            for i in range(1, system.m_even + 1):
                expected = oracle_entry(system, i, j)
                got = system.coupling_entry(i, j)
                assert got == pytest.approx(expected, rel=1e-13, abs=1e-14)

    def test_bidiagonal(self):
        dense = build_kramers_system(20, 0.7).coupling_dense()
        for i in range(dense.shape[0]):
            for j in range(dense.shape[1]):
                if i - j not in (0, 1):
                    assert dense[i, j] == 0.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            build_kramers_system(5, 1.0)
        with pytest.raises(ValueError):
            build_kramers_system(4, 0.0)
        with pytest.raises(ValueError):
            build_kramers_system(4, -1.0)


class TestParityDense:
    def test_assembled_shape_and_symmetry(self):
        system = build_temperature_system(9)
        dense = system.parity_dense()
        n = system.m_even + system.m_odd
        assert dense.shape == (n, n)
        np.testing.assert_array_equal(dense, dense.T)
        assert np.all(dense[: system.m_even, : system.m_even] == 0.0)
        assert np.all(dense[system.m_even:, system.m_even:] == 0.0)
