"""정적 SVG 그림 (스펙트럼, 연속성 추세)"""
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..dto import ContinuityReport, SpectrumTable  # noqa: E402

logger = logging.getLogger(__name__)

# SVG 안의 무작위 id를 고정해서 같은 입력이면 같은 파일이 나오게 한다
plt.rcParams["svg.hashsalt"] = "growthlab"
plt.rcParams["svg.fonttype"] = "none"


def save_spectrum_plot(table: SpectrumTable, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    xs = list(range(1, len(table.rows) + 1))
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.plot(xs, [r.point_estimate for r in table.rows], "o-", label="point estimate")
    ax.plot(xs, [r.certified_upper for r in table.rows], "v", alpha=0.6, label="certified upper")
    ax.set_xlabel("rank in sorted spectrum")
    ax.set_ylabel("growth rate")
    ax.set_title(f"{table.model}: |S| <= {table.max_cardinality}, length <= {table.max_length}, depth {table.depth}")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"[PLOT] spectrum saved {path}")
    return path


def save_continuity_plot(report: ContinuityReport, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    ns = [r.n for r in report.rows]
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.semilogx(ns, [r.point_estimate for r in report.rows], "o-", base=2, label="e(G, f_n S) point")
    ax.axhline(report.limit_point_estimate, color="k", linestyle="--", label="e(L, eta S) point")
    ax.set_xlabel("n")
    ax.set_ylabel("growth rate")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"[PLOT] continuity saved {path}")
    return path
