"""열거 도중 메모리 사용량 감시 유틸리티"""
import logging
import os
from typing import Dict, Optional

import psutil

from .constants import MEMORY_LIMIT_MB

logger = logging.getLogger(__name__)

_MB = 1024 * 1024


def memory_snapshot() -> Optional[Dict[str, float]]:
    """프로세스 RSS, 스레드 수, 시스템 사용률. psutil 실패 시 None"""
    try:
        process = psutil.Process(os.getpid())
        return {
            "rss_mb": round(process.memory_info().rss / _MB, 2),
            "threads": process.num_threads(),
            "system_percent": round(psutil.virtual_memory().percent, 1),
        }
    except psutil.Error as e:
        logger.warning(f"[MEMORY] psutil error={e}")
        return None


def get_memory_usage_mb() -> float:
    snapshot = memory_snapshot()
    return snapshot["rss_mb"] if snapshot else 0.0


def log_memory_info(context: str = "") -> None:
    snapshot = memory_snapshot()
    if snapshot is None:
        return
    logger.info(
        f"[MEMORY] context={context or '-'} rss={snapshot['rss_mb']}MB "
        f"system={snapshot['system_percent']}% threads={snapshot['threads']}"
    )


def check_memory_threshold(threshold_mb: float = MEMORY_LIMIT_MB) -> bool:
    """RSS가 임계값을 넘었으면 True"""
    return get_memory_usage_mb() > threshold_mb


class MemoryGuard:
    """BFS 한 층마다 호출하는 메모리 가드. 매 호출마다 psutil을 부르지 않도록 간격을 둔다."""

    def __init__(self, threshold_mb: float = MEMORY_LIMIT_MB, every: int = 1):
        self.threshold_mb = threshold_mb
        self.every = max(1, every)
        self._calls = 0
        self.tripped = False

    def check(self, context: str = "") -> bool:
        self._calls += 1
        if self._calls % self.every:
            return self.tripped
        if check_memory_threshold(self.threshold_mb):
            self.tripped = True
            logger.warning(f"[MEMORY] threshold exceeded context={context} limit={self.threshold_mb}MB")
            log_memory_info(context)
        return self.tripped
