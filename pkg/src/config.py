#환경변수 설정
import logging
import os
from dotenv import load_dotenv

# .env 파일 로드
load_dotenv()

class Settings:
    # Server
    PORT_NUM: int = int(os.getenv("PORT_NUM", 8080))

    # Output / cache
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "out")
    CACHE_DIR: str = os.getenv("CACHE_DIR", "")

    # Config
    DEFAULT_CONFIG: str = os.getenv(
        "DEFAULT_CONFIG",
        os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs", "default.toml")
    )

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Sweep
    JOBS: int = int(os.getenv("JOBS", 1))

settings = Settings()


def setup_logging(level: str | None = None) -> None:
    """루트 로거 설정 (CLI / 서버 시작 시 한 번 호출)"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
