"""결과 레코드 저장소: JSON-lines (주 출력)와 CSV 표"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

from ..dto import GrowthTable, ResultRecord, SpectrumTable

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.jsonl"


def record_line(record: ResultRecord) -> str:
    """키 정렬된 한 줄 JSON. runtime 블록만 실행마다 달라진다."""
    return json.dumps(record.model_dump(mode="json"), sort_keys=True, ensure_ascii=False)


def deterministic_line(record: ResultRecord) -> str:
    """runtime을 뺀 비교용 직렬화"""
    data = record.model_dump(mode="json", exclude={"runtime"})
    return json.dumps(data, sort_keys=True, ensure_ascii=False)


def append_record(directory: Path, record: ResultRecord) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / RESULTS_FILE
    with open(path, "a", encoding="utf-8") as f:
        f.write(record_line(record) + "\n")
    logger.info(f"[RESULT] command={record.command} appended to {path}")
    return path


def read_records(path: Path) -> List[Dict[str, Any]]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def growth_rows(table: GrowthTable) -> List[List[Any]]:
    return [[n, s, b] for n, (s, b) in enumerate(zip(table.sphere, table.ball))]


def spectrum_rows(table: SpectrumTable) -> List[List[Any]]:
    return [
        [
            r.class_id,
            r.encoding,
            r.size,
            f"{r.point_estimate:.12g}",
            f"{r.certified_upper:.12g}",
            int(r.merged),
            int(r.minimum),
            " ".join(str(b) for b in r.ball),
        ]
        for r in table.rows
    ]


GROWTH_HEADER = ["n", "sphere", "ball"]
SPECTRUM_HEADER = ["class_id", "generators", "size", "point_estimate", "certified_upper", "merged", "minimum", "ball"]


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    write_csv(buffer, header, rows)
    return buffer.getvalue()


def save_csv(directory: Path, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Optional[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.csv"
    with open(path, "w", encoding="utf-8", newline="") as f:
        write_csv(f, header, rows)
    logger.info(f"[RESULT] csv saved {path}")
    return path
