# 정전 단면 솔버 테스트
import numpy as np
import pytest
from scipy.constants import epsilon_0

from src.cache import FieldMapCache
from src.engine.fieldio import load_fieldmap_npz, read_fieldmap_csv, save_fieldmap_npz, write_fieldmap_csv
from src.engine.fieldsolve import (
    build_axis,
    capacitance_mismatch,
    capacitance_per_length,
    charge_capacitance_per_length,
    coplanar_capacitance,
    field_at,
    field_ratio,
    homogeneity_eta,
    richardson_order,
    solve,
    solve_cached,
)
from src.engine.geometry import (
    coplanar_cross_section,
    flipchip_cross_section,
    parallel_plate_cross_section,
    planar_cross_section,
)
from src.errors import GeometryError, InvalidInputError, NumericalError
from src.models.chip import ChipCrossSection, Conductor, GridSpec
from src.engine.beam_trap import cloud_profile
from src.models.beam import RB87, GaussianBeam
from src.models.cloud import AtomCloud


@pytest.fixture
def plate_map(coarse_grid):
    """폭 1 mm, 간격 50 µm 진공 평행판"""
    return solve(parallel_plate_cross_section(1e-3, 50e-6), coarse_grid)


@pytest.fixture
def planar_map(coarse_grid):
    return solve(planar_cross_section(120e-6, 40e-6), coarse_grid)


class TestGrid:
    """등급 격자 테스트"""

    def test_refine_points_are_nodes(self):
        grid = GridSpec(h_fine=2e-6, h_max=200e-6, growth=1.2)
        axis = build_axis(-1e-3, 1e-3, [-20e-6, 60e-6], [5e-6], grid)
        for point in (-1e-3, -20e-6, 5e-6, 60e-6, 1e-3):
            assert np.min(np.abs(axis - point)) < 1e-15
        assert np.all(np.diff(axis) > 0)

    def test_spacing_bounds(self):
        grid = GridSpec(h_fine=2e-6, h_max=200e-6, growth=1.2)
        axis = build_axis(-1e-3, 1e-3, [0.0], [], grid)
        spacing = np.diff(axis)
        assert spacing.min() == pytest.approx(2e-6, rel=0.5)
        assert spacing.max() <= 200e-6 * 1.05

    def test_refinement_nests_axis(self):
        """refinement 한 단계 → 셀 수 두 배, 기존 노드 유지"""
        grid = GridSpec(h_fine=2e-6, h_max=200e-6, growth=1.2)
        coarse = build_axis(-1e-3, 1e-3, [0.0], [], grid, edges=[50e-6])
        fine = build_axis(-1e-3, 1e-3, [0.0], [], grid.refined(), edges=[50e-6])
        assert fine.size == 2 * coarse.size - 1
        np.testing.assert_allclose(fine[::2], coarse, rtol=0, atol=1e-12)

    def test_edges_are_graded(self):
        """모서리 쪽으로 간격이 h_fine 보다 작아지고 단조 증가"""
        grid = GridSpec(h_fine=2e-6, h_max=200e-6, growth=1.2)
        axis = build_axis(-1e-3, 1e-3, [], [], grid, edges=[0.0])
        right = np.diff(axis[axis >= 0.0])
        assert right[0] < 0.05 * grid.h_fine
        assert np.all(np.diff(right[right < grid.h_fine]) > 0)
        ungraded = build_axis(-1e-3, 1e-3, [], [], GridSpec(h_fine=2e-6, h_max=200e-6, growth=1.2, edge_grading=1.0), edges=[0.0])
        assert np.diff(ungraded).min() == pytest.approx(2e-6, rel=0.5)

    def test_invalid_grid_rejected(self):
        with pytest.raises(GeometryError):
            GridSpec(h_fine=1e-6, h_max=0.5e-6)
        with pytest.raises(GeometryError):
            GridSpec(growth=1.0)
        with pytest.raises(GeometryError):
            GridSpec(edge_grading=0.5)


class TestGeometry:
    """단면 형상 검증 테스트"""

    def test_touching_conductors_rejected(self):
        """같은 평면에서 간격 0"""
        with pytest.raises(GeometryError):
            ChipCrossSection(
                conductors=(
                    Conductor("ground", -5e-3, 0.0, 0.0, 0.0),
                    Conductor("plate", 0.0, 100e-6, 0.0, 1.0),
                ),
            )

    def test_small_box_rejected(self):
        with pytest.raises(GeometryError):
            ChipCrossSection(conductors=(Conductor("plate", -1e-3, 1e-3, 0.0, 1.0),), half_width=3e-3, half_height=3e-3)

    def test_nonpositive_dimension_rejected(self):
        with pytest.raises(GeometryError):
            planar_cross_section(120e-6, 0.0)

    def test_box_grows_with_conductor(self):
        geometry = flipchip_cross_section(600e-6, 1.2e-3)
        assert geometry.half_width >= 0.6e-3 + 5 * 1.2e-3


class TestSolve:
    """Laplace 풀이 테스트"""

    def test_parallel_plate_midfield(self, plate_map):
        """중앙 전기장 = V/d (1% 이내)"""
        magnitude, ex, ez = field_at(plate_map, 0.0, 0.0)
        assert magnitude == pytest.approx(1 / 50e-6, rel=0.01)
        assert abs(ex) < 1e-3 * magnitude
        assert ez < 0

    def test_parallel_plate_capacitance_exceeds_area_term(self, plate_map):
        """가장자리 fringing 만큼 ε₀w/d 보다 큼"""
        c_per_length = capacitance_per_length(plate_map, "top")
        assert c_per_length > epsilon_0 * 1e-3 / 50e-6
        assert c_per_length < 1.5 * epsilon_0 * 1e-3 / 50e-6

    def test_energy_and_charge_capacitance_agree(self, plate_map):
        """평행판: Gauss 경로 전하와 에너지 용량이 2% 이내"""
        energy = capacitance_per_length(plate_map, "top", check=False)
        charge = charge_capacitance_per_length(plate_map, "top")
        assert charge == pytest.approx(energy, rel=0.02)
        assert charge != energy
        assert capacitance_mismatch(plate_map, "top") < 0.02

    def test_coarse_grid_flagged_under_resolved(self):
        """간격 40 µm 에 격자 40 µm → 두 방법이 어긋나 UNDER_RESOLVED"""
        geometry = planar_cross_section(120e-6, 40e-6)
        field_map = solve(geometry, GridSpec(h_fine=40e-6, h_max=500e-6, growth=1.5, edge_grading=1.0))
        assert capacitance_mismatch(field_map, "plate") > 0.02
        with pytest.raises(NumericalError) as excinfo:
            capacitance_per_length(field_map, "plate")
        assert excinfo.value.code == "UNDER_RESOLVED"
        assert excinfo.value.details["mismatch"] > 0.02

    def test_charge_needs_permittivity(self, planar_map, tmp_path):
        """CSV 맵에는 ε 가 없어 전하법을 쓸 수 없음"""
        loaded = read_fieldmap_csv(write_fieldmap_csv(planar_map, tmp_path / "field.csv"))
        with pytest.raises(InvalidInputError):
            charge_capacitance_per_length(loaded, "plate")

    def test_discrete_maximum_principle(self, planar_map):
        assert planar_map.phi.min() >= -1e-9
        assert planar_map.phi.max() <= 1 + 1e-9

    def test_conductor_nodes_hold_potential(self, planar_map):
        plate = planar_map.conductor_names.index("plate")
        np.testing.assert_allclose(planar_map.phi[planar_map.conductor_index == plate], 1.0)

    def test_residual_recorded(self, planar_map):
        assert planar_map.residual <= 1e-9
        assert planar_map.residual_history

    def test_scale_invariance(self, coarse_grid):
        """길이를 2배 → C′ 불변, |E|/V 절반"""
        geometry = planar_cross_section(120e-6, 40e-6)
        bigger = geometry.scaled(2.0)
        grid2 = GridSpec(h_fine=2 * coarse_grid.h_fine, h_max=2 * coarse_grid.h_max, growth=coarse_grid.growth)
        small_map = solve(geometry, coarse_grid)
        big_map = solve(bigger, grid2)
        assert capacitance_per_length(big_map, check=False) == pytest.approx(capacitance_per_length(small_map, check=False), rel=1e-6)
        assert field_ratio(big_map, 0.0, 160e-6) == pytest.approx(field_ratio(small_map, 0.0, 80e-6) / 2, rel=1e-6)

    def test_sor_matches_direct(self):
        geometry = parallel_plate_cross_section(1e-3, 200e-6)
        grid = GridSpec(h_fine=50e-6, h_max=400e-6, growth=1.5, edge_grading=1.0)
        direct = solve(geometry, grid)
        iterative = solve(geometry, grid, tol=1e-10, method="sor")
        assert iterative.method == "sor"
        assert len(iterative.residual_history) >= 1
        assert capacitance_per_length(iterative, "top", check=False) == pytest.approx(
            capacitance_per_length(direct, "top", check=False), rel=1e-4
        )

    def test_unknown_method_rejected(self, coarse_grid):
        with pytest.raises(InvalidInputError):
            solve(parallel_plate_cross_section(1e-3, 50e-6), coarse_grid, method="multigrid")

    def test_capacitance_needs_grounded_neighbours(self, coarse_grid):
        geometry = planar_cross_section(120e-6, 40e-6).with_potentials({"ground": 0.5})
        field_map = solve(geometry, coarse_grid)
        with pytest.raises(InvalidInputError):
            capacitance_per_length(field_map, "plate")


class TestSuperposition:
    """전위 선형성 테스트"""

    @pytest.fixture
    def doubled_map(self, coarse_grid):
        return solve(planar_cross_section(120e-6, 40e-6).with_potentials({"plate": 2.0}), coarse_grid)

    def test_potential_scales_with_voltage(self, planar_map, doubled_map):
        np.testing.assert_allclose(doubled_map.phi, 2 * planar_map.phi, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(doubled_map.ez, 2 * planar_map.ez, rtol=1e-9, atol=1e-6)

    def test_per_volt_quantities_unchanged(self, planar_map, doubled_map):
        assert capacitance_per_length(doubled_map, check=False) == pytest.approx(
            capacitance_per_length(planar_map, check=False), rel=1e-9
        )
        assert field_ratio(doubled_map, 0.0, 80e-6) == pytest.approx(field_ratio(planar_map, 0.0, 80e-6), rel=1e-9)
        assert capacitance_mismatch(doubled_map) == pytest.approx(capacitance_mismatch(planar_map), rel=1e-6, abs=1e-12)

    def test_homogeneity_independent_of_voltage(self, planar_map, doubled_map):
        cloud = AtomCloud(sigma_r=2e-6, sigma_y=30e-6, temperature=1e-6)
        assert homogeneity_eta(doubled_map, cloud, (0.0, 80e-6)) == pytest.approx(
            homogeneity_eta(planar_map, cloud, (0.0, 80e-6)), rel=1e-9
        )


class TestFieldAt:
    """보간 테스트"""

    def test_outside_domain_rejected(self, planar_map):
        with pytest.raises(InvalidInputError):
            field_at(planar_map, 1.0, 0.0)

    def test_vectorized_evaluation(self, planar_map):
        xs = np.array([0.0, 10e-6, 20e-6])
        magnitude, _, _ = field_at(planar_map, xs, np.full(3, 80e-6))
        assert magnitude.shape == (3,)
        assert magnitude[0] == pytest.approx(field_at(planar_map, 0.0, 80e-6)[0])

    def test_field_decays_with_height(self, planar_map):
        assert field_ratio(planar_map, 0.0, 40e-6) > field_ratio(planar_map, 0.0, 80e-6) > field_ratio(planar_map, 0.0, 200e-6)


class TestCoplanarOracle:
    """등각사상 CPW 해와 비교"""

    def test_formula_limits(self):
        """간격이 넓을수록 용량 감소"""
        assert coplanar_capacitance(20e-6, 5e-6, 10.0) > coplanar_capacitance(20e-6, 20e-6, 10.0)
        with pytest.raises(InvalidInputError):
            coplanar_capacitance(0.0, 10e-6, 10.0)

    def test_coarse_grid_close_to_oracle(self):
        geometry = coplanar_cross_section(200e-6, 100e-6, eps_r=10.0)
        field_map = solve(geometry, GridSpec(h_fine=4e-6, h_max=400e-6, growth=1.25))
        numeric = capacitance_per_length(field_map, "strip", check=False)
        assert numeric == pytest.approx(coplanar_capacitance(200e-6, 100e-6, 10.0), rel=0.08)

    @pytest.mark.slow
    def test_production_grid_within_three_percent(self):
        geometry = coplanar_cross_section(20e-6, 10e-6, eps_r=10.0)
        field_map = solve(geometry, GridSpec(h_fine=0.25e-6))
        numeric = capacitance_per_length(field_map, "strip")
        assert numeric == pytest.approx(coplanar_capacitance(20e-6, 10e-6, 10.0), rel=0.03)


class TestRichardson:
    """격자 수렴 차수 테스트"""

    def test_exact_second_order_sequence(self):
        assert richardson_order(1.0 + 4e-2, 1.0 + 1e-2, 1.0 + 0.25e-2) == pytest.approx(2.0)

    def test_non_monotone_sequence_rejected(self):
        with pytest.raises(NumericalError):
            richardson_order(1.0, 1.1, 1.0)

    @pytest.mark.slow
    def test_planar_capacitance_converges(self):
        """모서리 등급 격자에서 관측 차수 ≥ 1.5"""
        geometry = planar_cross_section(120e-6, 40e-6)
        grid = GridSpec(h_fine=4e-6, h_max=200e-6, growth=1.3)
        values = [
            capacitance_per_length(solve(geometry, grid.refined(level)), check=False)
            for level in (0, 1, 2)
        ]
        assert values[0] > values[1] > values[2]
        assert richardson_order(*values) >= 1.5

    @pytest.mark.slow
    def test_uniform_edges_converge_slower(self):
        """등급 없이 같은 수열 → 모서리 특이점 때문에 차수가 낮다"""
        geometry = planar_cross_section(120e-6, 40e-6)
        graded = GridSpec(h_fine=4e-6, h_max=200e-6, growth=1.3)
        uniform = GridSpec(h_fine=4e-6, h_max=200e-6, growth=1.3, edge_grading=1.0)
        orders = [
            richardson_order(*[
                capacitance_per_length(solve(geometry, grid.refined(level)), check=False)
                for level in (0, 1, 2)
            ])
            for grid in (graded, uniform)
        ]
        assert orders[0] > orders[1]


class TestFieldAnchor:
    """제작 평면 형상의 원자 위치 전기장"""

    @pytest.mark.slow
    def test_field_ratio_at_cloud(self):
        """(a, b) = (120, 40) µm, z = 80 µm → 37 /cm (±20%)"""
        field_map = solve(planar_cross_section(120e-6, 40e-6), GridSpec())
        assert field_ratio(field_map, 0.0, 80e-6) == pytest.approx(3700.0, rel=0.20)

    @pytest.mark.slow
    def test_field_converged_under_refinement(self):
        """h → h/2 에서 구름 위치 |E|/V 변화 < 0.5%"""
        geometry = planar_cross_section(120e-6, 40e-6)
        base = field_ratio(solve(geometry, GridSpec()), 0.0, 80e-6)
        refined = field_ratio(solve(geometry, GridSpec().refined()), 0.0, 80e-6)
        assert refined == pytest.approx(base, rel=0.005)

    @pytest.mark.slow
    def test_production_grid_passes_charge_check(self):
        """제작 격자에서는 에너지법 / 전하법이 2% 이내"""
        field_map = solve(planar_cross_section(120e-6, 40e-6), GridSpec())
        assert capacitance_mismatch(field_map, "plate") < 0.02
        assert capacitance_per_length(field_map, "plate") > 0

    @pytest.mark.slow
    def test_planar_homogeneity(self):
        """1 µK 구름, z = 80 µm → η ≈ 0.5% (2배 이내)"""
        field_map = solve(planar_cross_section(120e-6, 40e-6), GridSpec())
        cloud = cloud_profile(GaussianBeam(), RB87, 1e-6, 1e6)
        eta = homogeneity_eta(field_map, cloud, (0.0, 80e-6))
        assert 0.0025 <= eta <= 0.01


class TestHomogeneity:
    """균일도 η 테스트"""

    def test_uniform_field_gives_zero(self, plate_map):
        cloud = AtomCloud(sigma_r=0.4e-6, sigma_y=30e-6, temperature=1e-6)
        assert homogeneity_eta(plate_map, cloud, (0.0, 0.0)) < 1e-4

    def test_planar_field_is_less_uniform(self, plate_map, planar_map):
        cloud = AtomCloud(sigma_r=2e-6, sigma_y=30e-6, temperature=1e-6)
        planar = homogeneity_eta(planar_map, cloud, (0.0, 80e-6))
        uniform = homogeneity_eta(plate_map, cloud, (0.0, 0.0))
        assert planar > uniform
        assert 0 < planar < 0.2

    def test_identical_longitudinal_map_adds_spread(self, planar_map):
        """두 단면 곱 → 변화량 증가"""
        cloud = AtomCloud(sigma_r=2e-6, sigma_y=2e-6, temperature=1e-6)
        single = homogeneity_eta(planar_map, cloud, (0.0, 80e-6))
        combined = homogeneity_eta(planar_map, cloud, (0.0, 80e-6), longitudinal=planar_map, longitudinal_center=(0.0, 80e-6))
        assert combined > single


class TestCacheAndIO:
    """캐시 / 파일 형식 테스트"""

    def test_cached_solve_reuses_map(self, coarse_grid, field_store):
        geometry = planar_cross_section(120e-6, 40e-6)
        first = solve_cached(geometry, coarse_grid, cache=field_store)
        second = solve_cached(geometry, coarse_grid, cache=field_store)
        assert second is first
        assert len(field_store) == 1

    def test_disk_cache_survives_new_store(self, coarse_grid, field_store):
        geometry = planar_cross_section(120e-6, 40e-6)
        fresh = solve_cached(geometry, coarse_grid, cache=field_store)
        reopened = FieldMapCache(str(field_store.directory))
        loaded = solve_cached(geometry, coarse_grid, cache=reopened)
        np.testing.assert_array_equal(loaded.phi, fresh.phi)
        assert capacitance_per_length(loaded, check=False) == capacitance_per_length(fresh, check=False)

    def test_different_geometry_is_a_miss(self, coarse_grid, field_store):
        solve_cached(planar_cross_section(120e-6, 40e-6), coarse_grid, cache=field_store)
        solve_cached(planar_cross_section(120e-6, 50e-6), coarse_grid, cache=field_store)
        assert len(field_store) == 2

    def test_csv_export(self, planar_map, tmp_path):
        path = write_fieldmap_csv(planar_map, tmp_path / "field.csv")
        header = path.read_text(encoding="utf-8").splitlines()[:6]
        assert header[-1] == "# x_m,z_m,phi_V,Ex_V_per_m,Ez_V_per_m"
        loaded = read_fieldmap_csv(path)
        assert loaded.geometry_hash == planar_map.geometry_hash
        np.testing.assert_allclose(loaded.phi, planar_map.phi, rtol=1e-11, atol=1e-15)
        assert field_ratio(loaded, 0.0, 80e-6) == pytest.approx(field_ratio(planar_map, 0.0, 80e-6), rel=1e-9)

    def test_npz_keeps_capacitance(self, planar_map, tmp_path):
        loaded = load_fieldmap_npz(save_fieldmap_npz(planar_map, tmp_path / "field.npz"))
        assert capacitance_per_length(loaded, check=False) == capacitance_per_length(planar_map, check=False)
        assert charge_capacitance_per_length(loaded) == charge_capacitance_per_length(planar_map)
        assert loaded.conductor_names == planar_map.conductor_names
