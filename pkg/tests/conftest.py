# pytest 설정 및 공통 fixture
# 외부 모듈
import pytest
from fastapi.testclient import TestClient

# 내부 모듈
from src.main import app
from src.cache import FieldMapCache
from src.models.beam import RB87, GaussianBeam
from src.models.chip import GridSpec


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run production-grid anchors and Monte-Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="function")
def client():
    """테스트 클라이언트"""
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def standard_beam():
    """800 nm / 15 µm / 50 mW, 칩 위 80 µm"""
    return GaussianBeam()


@pytest.fixture
def rb87():
    return RB87


@pytest.fixture
def coarse_grid():
    """빠른 테스트용 격자 (수치 기준값 비교에는 쓰지 않음)"""
    return GridSpec(h_fine=5e-6, h_max=500e-6, growth=1.3)


@pytest.fixture
def field_store(tmp_path):
    """테스트마다 분리된 field map 캐시 (디스크 포함)"""
    return FieldMapCache(str(tmp_path / "cache"))
