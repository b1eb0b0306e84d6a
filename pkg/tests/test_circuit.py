# 공진기 회로 모델 테스트
import math

import numpy as np
import pytest
from scipy.constants import hbar
from scipy.integrate import quad

from src.engine.circuit import (
    collective_rabi,
    coupling,
    cpw_capacitance_correction,
    cpw_input_impedance,
    extrapolate_l0,
    lumped_inductance,
    quality_factors,
    resonance_frequency,
    resonance_residual,
    shunt_capacitance_for_q_ext,
    solve_resonator,
    solve_wire_length,
    strong_coupling,
    zero_point_voltage,
)
from src.engine.optimize import DesignConstants, evaluate_point
from src.errors import InvalidInputError, NoRootError
from src.models.resonator import DEFAULT_DIPOLE, ResonatorModel

TARGET_OMEGA = 2 * math.pi * 11e9


@pytest.fixture
def model():
    """C₀ = 140 fF, 나머지는 기본값 (C′ 56 pF/m, v_φ 1.28e8 m/s, L₀ 0.7 nH, q 400 µm)"""
    return ResonatorModel(c0=140e-15)


class TestResonatorModel:
    """모델 검증 테스트"""

    def test_z1_derived_from_line(self, model):
        assert model.z1 == pytest.approx(139.5, rel=1e-3)

    def test_wire_shorter_than_q_rejected(self):
        with pytest.raises(InvalidInputError):
            ResonatorModel(c0=140e-15, s=100e-6)

    def test_nonpositive_capacitance_rejected(self):
        with pytest.raises(InvalidInputError):
            ResonatorModel(c0=0.0)

    def test_unset_length(self, model):
        with pytest.raises(InvalidInputError):
            _ = model.s_cpw


class TestResonance:
    """공진 조건 테스트"""

    def test_design_point_near_eleven_ghz(self, model):
        """s = 1.1 mm → ≈ 11 GHz"""
        omega0 = resonance_frequency(model.with_wire_length(1.1e-3))
        assert omega0 / (2 * math.pi) == pytest.approx(11e9, rel=0.02)

    def test_root_satisfies_condition(self, model):
        resonant = model.with_wire_length(1.1e-3)
        omega0 = resonance_frequency(resonant)
        assert abs(resonance_residual(resonant, omega0)) < 1e-6 * resonant.z1

    def test_lumped_limit(self, model):
        """s = q → 1/√(L₀C₀)"""
        omega0 = resonance_frequency(model.with_wire_length(model.q))
        assert omega0 == pytest.approx(1 / math.sqrt(model.l0 * model.c0), rel=1e-12)

    def test_no_inductance_no_resonance(self):
        with pytest.raises(NoRootError):
            resonance_frequency(ResonatorModel(c0=140e-15, l0=0.0, s=400e-6))

    def test_longer_wire_lowers_frequency(self, model):
        short = resonance_frequency(model.with_wire_length(0.9e-3))
        long = resonance_frequency(model.with_wire_length(1.5e-3))
        assert long < short

    def test_short_cpw_matches_lumped_inductance(self, model):
        """짧은 CPW 는 L = L₀ + L′s̃"""
        solution = solve_resonator(model.with_wire_length(model.q + 100e-6))
        assert solution.inductance == pytest.approx(lumped_inductance(solution.model), rel=0.01)


class TestWireLength:
    """목표 주파수 선 길이 테스트"""

    def test_round_trip(self, model):
        s = solve_wire_length(model, TARGET_OMEGA)
        assert s > model.q
        assert resonance_frequency(model.with_wire_length(s)) == pytest.approx(TARGET_OMEGA, rel=1e-9)

    def test_below_quarter_wave(self, model):
        s = solve_wire_length(model, TARGET_OMEGA)
        assert s - model.q < math.pi * model.phase_velocity / (2 * TARGET_OMEGA)

    def test_round_trip_random_models(self):
        """무작위 100 개 모델: s → ω₀ 가 목표를 10⁻⁶ 이내로 재현"""
        rng = np.random.default_rng(20260)
        for _ in range(100):
            random_model = ResonatorModel(
                c0=rng.uniform(80e-15, 180e-15),
                c_prime=rng.uniform(40e-12, 70e-12),
                phase_velocity=rng.uniform(1.1e8, 1.4e8),
                l0=rng.uniform(0.3e-9, 0.9e-9),
                q=rng.uniform(200e-6, 600e-6),
            )
            s = solve_wire_length(random_model, TARGET_OMEGA)
            assert random_model.q <= s
            assert resonance_frequency(random_model.with_wire_length(s)) == pytest.approx(TARGET_OMEGA, rel=1e-6)

    def test_above_lumped_limit(self, model):
        with pytest.raises(NoRootError) as exc_info:
            solve_wire_length(model, 2 * math.pi * 20e9)
        assert exc_info.value.details["achievable_omega"][1] == pytest.approx(1 / math.sqrt(model.l0 * model.c0))

    def test_nonpositive_target_rejected(self, model):
        with pytest.raises(InvalidInputError):
            solve_wire_length(model, 0.0)


class TestCpwCapacitance:
    """정상파 용량 보정 테스트"""

    def test_matches_voltage_profile_quadrature(self):
        """L₀ = 0 에서 C_CPW = C′ ∫ (V(x)/V_in)² dx"""
        resonant = ResonatorModel(c0=140e-15, l0=0.0, s=1.0e-3)
        solution = solve_resonator(resonant)
        k = solution.omega0 / resonant.phase_velocity
        s_cpw = resonant.s_cpw
        profile, _ = quad(lambda x: math.sin(k * x) ** 2, 0.0, s_cpw)
        expected = resonant.c_prime * profile / math.sin(k * s_cpw) ** 2
        assert solution.c_cpw == pytest.approx(expected, rel=1e-8)

    def test_effective_capacitance(self, model):
        solution = solve_resonator(model.with_wire_length(1.1e-3))
        assert solution.capacitance == pytest.approx(model.c0 + solution.c_cpw, rel=1e-12)
        assert 0 < solution.c_cpw < model.c_prime * solution.model.s_cpw

    def test_quarter_wave_pole_rejected(self, model):
        lam = 2 * math.pi * model.phase_velocity / TARGET_OMEGA
        with pytest.raises(InvalidInputError):
            cpw_input_impedance(model.z1, lam / 4, lam)
        with pytest.raises(InvalidInputError):
            cpw_input_impedance(model.z1, 3 * lam / 4, lam)
        with pytest.raises(InvalidInputError):
            cpw_input_impedance(model.z1, -1e-6, lam)

    def test_input_reactance(self, model):
        lam = 2 * math.pi * model.phase_velocity / TARGET_OMEGA
        assert cpw_input_impedance(model.z1, lam / 8, lam) == pytest.approx(model.z1)

    def test_outside_fundamental_branch_rejected(self, model):
        """s̃ < 0 또는 s̃ ≥ λ/4 는 기본 모드가 아님"""
        lam = 2 * math.pi * model.phase_velocity / TARGET_OMEGA
        for s_cpw in (-1e-6, lam / 4, 0.3 * lam, 0.6 * lam):
            with pytest.raises(InvalidInputError):
                cpw_capacitance_correction(s_cpw, TARGET_OMEGA, model.c0, model.z1, model.c_prime)
        assert cpw_capacitance_correction(0.0, TARGET_OMEGA, model.c0, model.z1, model.c_prime) == 0.0
        assert cpw_capacitance_correction(0.2 * lam, TARGET_OMEGA, model.c0, model.z1, model.c_prime) > 0


class TestInductance:
    """인덕턴스 외삽 테스트"""

    def test_extrapolate_exact_line(self):
        slope = 4e-7
        s_values = [0.8e-3, 1.0e-3, 1.2e-3]
        l_values = [0.7e-9 + slope * (s - 400e-6) for s in s_values]
        assert extrapolate_l0(s_values, l_values, 400e-6) == pytest.approx(0.7e-9, rel=1e-9)

    def test_extrapolate_design_pipeline(self):
        """evaluate_point 의 L = 1/(ω₀²C) 를 여러 C₀ 에서 모아 s = q 로 외삽 → L₀ (25% 이내)"""
        constants = DesignConstants()
        points = [
            evaluate_point(c0, 3700.0, constants, a=120e-6, b=40e-6)
            for c0 in np.linspace(100e-15, 180e-15, 5)
        ]
        s_values = [p.s for p in points]
        l_values = [p.inductance for p in points]
        assert all(later < earlier for earlier, later in zip(s_values, s_values[1:]))
        assert extrapolate_l0(s_values, l_values, constants.q) == pytest.approx(constants.l0, rel=0.25)

    def test_needs_two_points(self):
        with pytest.raises(InvalidInputError):
            extrapolate_l0([1e-3], [1e-9], 400e-6)


class TestCoupling:
    """영점 요동 / 결합 테스트"""

    def test_zero_point_voltage(self):
        omega0 = TARGET_OMEGA
        assert zero_point_voltage(omega0, 150e-15) == pytest.approx(math.sqrt(hbar * omega0 / 300e-15))

    def test_coupling_scales_with_field_ratio(self):
        weak = coupling(TARGET_OMEGA, 150e-15, 3700.0)
        strong = coupling(TARGET_OMEGA, 150e-15, 7400.0)
        assert strong.g == pytest.approx(2 * weak.g)
        assert weak.g == pytest.approx(weak.e_zpf * DEFAULT_DIPOLE / hbar)
        assert weak.vacuum_rabi == pytest.approx(2 * weak.g)

    def test_nonpositive_dipole_rejected(self):
        with pytest.raises(InvalidInputError):
            coupling(TARGET_OMEGA, 150e-15, 3700.0, dipole=0.0)

    def test_collective_rabi(self):
        assert collective_rabi(1.0, 100.0) == pytest.approx(10.0)
        with pytest.raises(InvalidInputError):
            collective_rabi(1.0, -1.0)

    def test_strong_coupling_criterion(self):
        assert strong_coupling(g=1e6, kappa=1e6)
        assert not strong_coupling(g=1e6, kappa=3e6)
        assert not strong_coupling(g=1e6, kappa=1e6, gamma_rydberg=5e6)


class TestQualityFactors:
    """품질 인자 테스트"""

    def test_shunt_inverse_round_trip(self):
        c_s = shunt_capacitance_for_q_ext(TARGET_OMEGA, 150e-15, 50.0, 1e4)
        factors = quality_factors(TARGET_OMEGA, 150e-15, c_s, 50.0, 0.0)
        assert factors.q_ext == pytest.approx(1e4, rel=1e-9)
        assert factors.q_int == math.inf
        assert factors.kappa_int == 0.0

    def test_loss_sets_internal_q(self):
        factors = quality_factors(TARGET_OMEGA, 150e-15, 5e-15, 50.0, 1e-3)
        assert factors.q_int == pytest.approx(TARGET_OMEGA / factors.kappa_int)
        assert factors.kappa_int > 0

    def test_invalid_inputs_rejected(self):
        with pytest.raises(InvalidInputError):
            quality_factors(TARGET_OMEGA, 150e-15, 0.0, 50.0, 0.0)
        with pytest.raises(InvalidInputError):
            shunt_capacitance_for_q_ext(TARGET_OMEGA, 150e-15, 50.0, -1.0)
