"""Field map store keyed by geometry hash"""
import hashlib
import logging
import threading
from pathlib import Path
from typing import Optional

from src.config import settings
from src.engine.fieldio import load_fieldmap_npz, save_fieldmap_npz
from src.models.fieldmap import FieldMap

logger = logging.getLogger(__name__)


class FieldMapCache:
    """메모리 캐시 + (선택) npz 디렉터리

    directory 가 주어지면 프로세스 간 공유된다 (스윕 워커).
    """

    def __init__(self, directory: Optional[str] = None):
        self.directory = Path(directory) if directory else None
        self._memory: dict[str, FieldMap] = {}
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.npz"

    # ==================== 조회 / 저장 ====================

    def get(self, key: str) -> Optional[FieldMap]:
        """메모리 → 디스크 순서로 조회"""
        with self._lock:
            hit = self._memory.get(key)
        if hit is not None:
            return hit
        if self.directory is not None and self._path(key).exists():
            field_map = load_fieldmap_npz(self._path(key))
            with self._lock:
                self._memory[key] = field_map
            logger.debug("loaded cached field map from %s", self._path(key))
            return field_map
        return None

    def set(self, key: str, field_map: FieldMap) -> None:
        with self._lock:
            self._memory[key] = field_map
        if self.directory is not None:
            save_fieldmap_npz(field_map, self._path(key))

    def exists(self, key: str) -> bool:
        return self.get(key) is not None

    def clear(self) -> None:
        """메모리 캐시만 비움 (디스크 파일은 유지)"""
        with self._lock:
            self._memory.clear()

    def __len__(self) -> int:
        return len(self._memory)


# 전역 캐시
field_cache = FieldMapCache(settings.CACHE_DIR or None)
