# 레이저 노출 예산 테스트
import logging
import math

import pytest

from src.engine.exposure import (
    beam_ratio,
    critical_chip_width,
    design_ratio,
    direct_power,
    edge_beam_radius,
    exposure_budget,
    flipchip_table,
    min_plate_distance,
    scattered_power,
    scattering_rate,
    tail_power_quadrature,
)
from src.engine.geometry import flipchip_dimensions
from src.errors import InvalidInputError, NoSafeWidthError
from src.models.beam import GaussianBeam

TWO_PI = 2 * math.pi

# (d, l, l_ch, l_ch^crit) [µm, µm, mm, mm]
FLIPCHIP_ROWS = [
    (100, 250, 0.60, 0.86),
    (150, 300, 0.70, 2.36),
    (200, 400, 0.85, 3.51),
    (250, 500, 1.00, 4.58),
    (300, 600, 1.15, 5.62),
    (350, 700, 1.30, 6.64),
    (400, 800, 1.45, 7.66),
    (450, 900, 1.60, 8.66),
    (500, 1000, 1.75, 9.66),
    (550, 1100, 1.90, 10.66),
    (600, 1200, 2.05, 11.65),
]


class TestDirectPower:
    """직접 입사 파워 테스트"""

    def test_tapered_chip(self, standard_beam):
        """z0 = 80 µm, l_ch = 1.6 mm → 66 aW (2배 이내)"""
        power = direct_power(standard_beam, 80e-6, 1.6e-3)
        assert 33e-18 < power < 132e-18

    def test_edge_radius_close_to_20_microns(self, standard_beam):
        assert edge_beam_radius(standard_beam, 1.6e-3) == pytest.approx(20e-6, rel=0.02)

    def test_full_width_chip(self, standard_beam):
        """테이퍼 없는 3.5 mm 칩 → ~38 nW"""
        power = direct_power(standard_beam, 80e-6, 3.5e-3)
        assert 19e-9 < power < 76e-9

    def test_zero_chip_width_uses_waist(self, standard_beam):
        """l_ch = 0 → w_e = w_dp"""
        expected = standard_beam.power / 2 * math.erfc(math.sqrt(2) * 50e-6 / standard_beam.waist)
        assert direct_power(standard_beam, 50e-6, 0.0) == pytest.approx(expected, rel=1e-12)

    def test_beam_axis_on_surface_gives_half_power(self, standard_beam):
        assert direct_power(standard_beam, 0.0, 1e-3) == pytest.approx(standard_beam.power / 2)

    def test_matches_tail_quadrature(self, standard_beam):
        for z0, l_ch in ((20e-6, 0.0), (30e-6, 1e-3)):
            assert direct_power(standard_beam, z0, l_ch) == pytest.approx(
                tail_power_quadrature(standard_beam, z0, l_ch), rel=1e-8
            )

    def test_negative_width_rejected(self, standard_beam):
        with pytest.raises(InvalidInputError):
            direct_power(standard_beam, 80e-6, -1e-3)


class TestScattering:
    """산란율 / 산란 파워 테스트"""

    def test_scattering_rate(self, standard_beam, rb87):
        """Γ_sc = 2π×15 s⁻¹ (±15%)"""
        assert scattering_rate(standard_beam, rb87) == pytest.approx(TWO_PI * 15, rel=0.15)

    def test_scattered_power(self, standard_beam, rb87):
        """10⁶ 원자 → 23 pW (±15%)"""
        assert scattered_power(standard_beam, rb87, 1e6) == pytest.approx(23e-12, rel=0.15)

    def test_rate_follows_local_intensity(self, standard_beam, rb87):
        center = scattering_rate(standard_beam, rb87)
        off_axis = scattering_rate(standard_beam, rb87, r=standard_beam.waist)
        assert off_axis == pytest.approx(center * math.exp(-2))

    def test_negative_atom_count_rejected(self, standard_beam, rb87):
        with pytest.raises(InvalidInputError):
            scattered_power(standard_beam, rb87, -1)


class TestCriticalChipWidth:
    """임계 칩 폭 테스트"""

    def test_beam_ratio(self, standard_beam):
        """0.1 nW → r_e = 3.0 (±2%)"""
        assert beam_ratio(standard_beam, 0.1e-9) == pytest.approx(3.0, rel=0.02)

    def test_min_plate_distance(self, standard_beam):
        """d ≳ 2 r_e w_dp = 90 µm"""
        assert min_plate_distance(standard_beam, 0.1e-9) == pytest.approx(90e-6, rel=0.03)

    def test_width_reproduces_power_limit(self, standard_beam):
        """정확한 r_e: P_dir(z0, l_ch^crit) = P_limit"""
        for z0 in (60e-6, 100e-6, 250e-6):
            width = critical_chip_width(standard_beam, z0, 0.1e-9, ratio_digits=None)
            assert direct_power(standard_beam, z0, width) == pytest.approx(0.1e-9, rel=0.01)

    def test_rounded_ratio_stays_below_limit(self, standard_beam):
        """올림한 r_e: P_dir(z0, l_ch^crit) <= P_limit"""
        assert design_ratio(standard_beam, 0.1e-9) == pytest.approx(3.0)
        for z0 in (60e-6, 100e-6, 250e-6):
            width = critical_chip_width(standard_beam, z0, 0.1e-9)
            assert direct_power(standard_beam, z0, width) <= 0.1e-9

    def test_closest_flipchip_gap(self, standard_beam):
        """d = 100 µm (z0 = 50 µm) → 0.86 mm, 표와 동일"""
        width = critical_chip_width(standard_beam, 50e-6, 1e-10)
        assert width == pytest.approx(0.86e-3, rel=0.05)
        row, = flipchip_table(standard_beam, [100e-6], 1e-10)
        assert width == pytest.approx(row.l_ch_crit, rel=1e-12)

    def test_no_safe_width_close_to_chip(self, standard_beam):
        with pytest.raises(NoSafeWidthError):
            critical_chip_width(standard_beam, 40e-6, 0.1e-9)

    def test_generous_limit_allows_any_width(self, standard_beam):
        """P_limit >= P/2 → 제한 없음"""
        assert beam_ratio(standard_beam, 0.05) == 0.0
        assert critical_chip_width(standard_beam, 80e-6, 0.05) == math.inf

    def test_invalid_limit_rejected(self, standard_beam):
        with pytest.raises(InvalidInputError):
            beam_ratio(standard_beam, 0.0)


class TestFlipChipTable:
    """플립칩 설계 표 테스트"""

    def test_eleven_rows(self, standard_beam):
        rows = flipchip_table(standard_beam, [d * 1e-6 for d, *_ in FLIPCHIP_ROWS], 0.1e-9)
        assert len(rows) == 11
        for row, (d, l, l_ch, crit) in zip(rows, FLIPCHIP_ROWS):
            assert row.d == pytest.approx(d * 1e-6, rel=1e-12)
            assert row.a == pytest.approx(d * 1e-6, rel=1e-12)
            assert row.l == pytest.approx(l * 1e-6, rel=1e-12)
            assert row.l_ch == pytest.approx(l_ch * 1e-3, rel=1e-12)
            assert row.l_ch_crit == pytest.approx(crit * 1e-3, rel=0.05)

    def test_unrounded_ratio_gives_wider_small_gap(self, standard_beam):
        """정확한 r_e (< 3.0) 는 더 넓은 폭을 허용"""
        rounded, = flipchip_table(standard_beam, [100e-6], 0.1e-9)
        exact, = flipchip_table(standard_beam, [100e-6], 0.1e-9, ratio_digits=None)
        assert exact.l_ch_crit > rounded.l_ch_crit

    def test_dimensions_rule(self):
        """a = d, l = max(2d, 250 µm), l_ch = l + a + 250 µm"""
        assert flipchip_dimensions(100e-6) == pytest.approx((100e-6, 250e-6, 600e-6))
        assert flipchip_dimensions(300e-6) == pytest.approx((300e-6, 600e-6, 1150e-6))


class TestExposureBudget:
    """노출 예산 테스트"""

    def test_tapered_design_is_acceptable(self, standard_beam, rb87):
        budget = exposure_budget(standard_beam, rb87, 80e-6, 1.6e-3)
        assert budget.acceptable
        assert budget.p_dir < budget.p_limit
        assert budget.p_sc > budget.p_dir

    def test_full_width_chip_logs_warning(self, standard_beam, rb87, caplog):
        with caplog.at_level(logging.WARNING, logger="src.engine.exposure"):
            budget = exposure_budget(standard_beam, rb87, 80e-6, 3.5e-3)
        assert not budget.acceptable
        assert "exceeds the limit" in caplog.text

    def test_lower_beam_gets_more_power(self, rb87):
        low = GaussianBeam(focus_height=60e-6)
        high = GaussianBeam(focus_height=100e-6)
        assert direct_power(low, low.focus_height, 1.6e-3) > direct_power(high, high.focus_height, 1.6e-3)
