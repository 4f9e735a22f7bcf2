"""실행 단계별 소요 시간 추적 유틸리티"""
import json
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional


class PerformanceLogger:
    """명령 하나의 단계별 경과 시간 기록"""

    def __init__(self, run_id: str, echo: bool = True):
        self.run_id = run_id
        self.echo = echo
        self.start_time = time.time()
        self.started_at = datetime.now().isoformat(timespec="seconds")
        self.steps: Dict[str, float] = {}
        self.step_order: List[str] = []
        self.step_category: Dict[str, str] = {}  # "serial" or "shard"

    def log_step(self, step_name: str, category: str = "serial") -> float:
        """단계 로그 기록

        Args:
            step_name: 단계 이름
            category: "serial" (순차 단계) or "shard" (샤드 병렬 단계)
        """
        elapsed = time.time() - self.start_time
        self.steps[step_name] = elapsed
        if step_name not in self.step_order:
            self.step_order.append(step_name)
        self.step_category[step_name] = category

        # stdout은 결과용이므로 stderr로 출력
        if self.echo:
            timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
            print(f"[PERF][{timestamp}][{category.upper()}] {step_name}: {elapsed:.3f}s", file=sys.stderr, flush=True)
        return elapsed

    def wall_time(self) -> float:
        return round(time.time() - self.start_time, 3)

    def get_summary(self) -> Dict:
        """성능 요약 반환"""
        steps = []
        prev = 0.0
        for step in self.step_order:
            at = self.steps[step]
            steps.append({
                "step": step,
                "category": self.step_category.get(step, "serial"),
                "elapsed_from_start": round(at, 3),
                "duration": round(at - prev, 3),
            })
            prev = at
        return {
            "run_id": self.run_id,
            "started_at": self.started_at,
            "total_duration": self.wall_time(),
            "steps": steps,
        }

    def save_to_file(self, directory: Path) -> Path:
        """요약을 JSON 파일로 저장"""
        directory.mkdir(parents=True, exist_ok=True)
        log_file = directory / f"perf_{self.run_id.replace(':', '_')}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
        with open(log_file, "w", encoding="utf-8") as f:
            json.dump(self.get_summary(), f, indent=2, ensure_ascii=False)
        if self.echo:
            print(f"[PERF] 로그 저장 완료: {log_file}", file=sys.stderr, flush=True)
        return log_file


# 전역 인스턴스 관리 (run_id별)
_loggers: Dict[str, PerformanceLogger] = {}


def get_performance_logger(run_id: str, echo: Optional[bool] = None) -> PerformanceLogger:
    """run_id별 성능 로거 가져오기 또는 생성"""
    if run_id not in _loggers:
        _loggers[run_id] = PerformanceLogger(run_id, echo=True if echo is None else echo)
    return _loggers[run_id]


def clear_logger(run_id: str) -> None:
    """로거 정리"""
    _loggers.pop(run_id, None)
