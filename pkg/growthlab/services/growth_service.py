import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Set, Tuple

from ..constants import DEFAULT_CAP, DEFAULT_SHARDS, FLOAT_TOLERANCE, MEMORY_LIMIT_MB
from ..dto import GrowthEstimate, GrowthTable
from ..exceptions import ConstructionException, InvariantViolation, OutOfMemoryException, ValidationException
from ..memory_monitor import MemoryGuard
from ..models import IDENTITY, GeneratingSet, GroupModel, Word
from ..word_service import multiply, require_non_empty, symmetrize

logger = logging.getLogger(__name__)


def shard_of(word: Word, shards: int) -> int:
    # 정수 튜플의 hash는 PYTHONHASHSEED와 무관하다
    return hash(word) % shards


def _partition(level: Set[Word], shards: int) -> List[List[Word]]:
    parts: List[List[Word]] = [[] for _ in range(shards)]
    for g in level:
        parts[shard_of(g, shards)].append(g)
    return parts


def _expand(part: Sequence[Word], letters: Sequence[Word], model: GroupModel) -> Set[Word]:
    out: Set[Word] = set()
    for g in part:
        for s in letters:
            out.add(multiply(g, s, model))
    return out


def enumerate_balls(
    S: GeneratingSet,
    n_max: int,
    cap: int = DEFAULT_CAP,
    shards: int = DEFAULT_SHARDS,
    memory_limit_mb: float = MEMORY_LIMIT_MB,
    symmetric: bool = True,
    truncate_on_memory: bool = False,
) -> GrowthTable:
    """Exact β_0..β_n by breadth-first search over canonical forms.

    With a symmetrized S the Cayley graph is undirected, so a new sphere is the
    neighbourhood of the current one minus the two previous spheres. Shards split
    the frontier by hash; the merged sets do not depend on the shard count.
    Reaching the cap truncates the table. Tripping the memory guard raises
    OutOfMemoryException unless truncate_on_memory is set.
    """
    if n_max < 0:
        raise ValidationException("depth must be non-negative")
    require_non_empty(S, "enumerate_balls")
    shards = max(1, shards)
    model = S.model
    gens = symmetrize(S) if symmetric else S
    letters = gens.elements
    guard = MemoryGuard(memory_limit_mb)

    previous: Set[Word] = set()
    current: Set[Word] = {IDENTITY}
    seen: Optional[Set[Word]] = None if symmetric else {IDENTITY}
    ball = [1]
    sphere = [1]
    truncated_at: Optional[int] = None

    pool = ThreadPoolExecutor(max_workers=shards) if shards > 1 else None
    try:
        for n in range(1, n_max + 1):
            if pool is None:
                candidates = _expand(list(current), letters, model)
            else:
                parts = _partition(current, shards)
                candidates = set()
                for found in pool.map(lambda part: _expand(part, letters, model), parts):
                    candidates |= found
            if seen is None:
                new = candidates - current - previous
            else:
                new = candidates - seen
            if ball[-1] + len(new) > cap:
                logger.warning(f"[GROWTH] cap reached model={model.name} n={n} cap={cap}")
                truncated_at = n
                break
            if guard.check(f"growth n={n}"):
                if not truncate_on_memory:
                    raise OutOfMemoryException(
                        f"memory limit {memory_limit_mb}MB exceeded at n={n} (ball={ball[-1]}) for {model.name}"
                    )
                truncated_at = n
                break
            sphere.append(len(new))
            ball.append(ball[-1] + len(new))
            if seen is not None:
                seen |= new
            previous, current = current, new
            logger.debug(f"[GROWTH] n={n} sphere={len(new)} ball={ball[-1]}")
    finally:
        if pool is not None:
            pool.shutdown()

    logger.info(f"[GROWTH] model={model.name} |S|={len(letters)} depth={len(ball) - 1} ball={ball[-1]} shards={shards}")
    return GrowthTable(
        model=model.name,
        generators=S.encoding(),
        depth=n_max,
        ball=ball,
        sphere=sphere,
        truncated=truncated_at is not None,
        truncated_at=truncated_at,
    )


def free_group_closed_form(rank: int, n: int) -> int:
    """β_n of F_rank with the standard basis."""
    if rank == 1:
        return 2 * n + 1
    r = 2 * rank - 1
    return 1 + rank * (r ** n - 1) // (rank - 1)


def check_submultiplicativity(table: GrowthTable) -> None:
    ball = table.ball
    top = len(ball) - 1
    for i in range(1, top + 1):
        for j in range(i, top - i + 1):
            if ball[i + j] > ball[i] * ball[j]:
                raise InvariantViolation("beta_{i+j} <= beta_i * beta_j", ball[i + j], ball[i] * ball[j], f"i={i} j={j}")


def certified_upper(table: GrowthTable) -> Tuple[float, List[int]]:
    """min_n β_n^{1/n} and its witness; valid for e(G,S) by Fekete's lemma."""
    best_value = math.inf
    best = [1, 0]
    for n in range(1, len(table.ball)):
        value = math.exp(math.log(table.ball[n]) / n)
        if value < best_value:
            best_value, best = value, [table.ball[n], n]
    return best_value, best


def growth_estimate(table: GrowthTable) -> GrowthEstimate:
    n = len(table.ball) - 1
    if n < 2:
        raise ValidationException(f"growth_estimate needs depth >= 2, table has {n}")
    upper, witness = certified_upper(table)
    sphere = table.sphere
    last_ratio = sphere[n] / sphere[n - 1] if sphere[n - 1] else 0.0
    if sphere[n] == 0:
        logger.info(f"[GROWTH] finite group detected model={table.model} ball={table.ball[-1]}")
        return GrowthEstimate(
            certified_upper=upper, upper_witness=witness, point_estimate=1.0, last_ratio=last_ratio, marker="finite"
        )
    # 두 단계 비율: 이분 그래프처럼 교대하는 구 크기에서도 안정적
    point = math.sqrt(sphere[n] / sphere[n - 2])
    marker = "subexponential" if point <= 1.0 + FLOAT_TOLERANCE else None
    if marker:
        point = 1.0
    point = min(point, upper)
    return GrowthEstimate(
        certified_upper=upper,
        upper_witness=witness,
        point_estimate=point,
        last_ratio=last_ratio,
        marker=marker,
    )


def ratio_identity_estimate(table: GrowthTable) -> float:
    """|Sph_n|^{1/n} at the deepest level."""
    n = len(table.sphere) - 1
    if n < 1 or table.sphere[n] == 0:
        return 1.0
    return math.exp(math.log(table.sphere[n]) / n)


def certified_lower_bound(
    S: GeneratingSet,
    basis: Sequence[Word],
    p: int,
    certificate_passed: Optional[bool],
) -> float:
    """|basis|^{1/p} for a basis of a free subgroup contained in S^p."""
    if not basis:
        raise ValidationException("certified_lower_bound: empty basis")
    if p < 1:
        raise ValidationException("certified_lower_bound: p must be positive")
    if certificate_passed is None:
        raise ConstructionException("lower-bound", "no ping-pong certificate supplied")
    if not certificate_passed:
        raise ConstructionException("lower-bound", "ping-pong certificate failed")
    value = len(basis) ** (1.0 / p)
    logger.info(f"[GROWTH] certified lower bound model={S.model.name} |basis|={len(basis)} p={p} value={value:.12g}")
    return value


def with_lower_bound(estimate: GrowthEstimate, value: float, certificate_id: str) -> GrowthEstimate:
    if value > estimate.certified_upper + FLOAT_TOLERANCE:
        raise InvariantViolation("certified_lower <= certified_upper", value, estimate.certified_upper, certificate_id)
    if value > estimate.point_estimate + FLOAT_TOLERANCE:
        raise InvariantViolation("certified_lower <= point_estimate", value, estimate.point_estimate, certificate_id)
    return estimate.model_copy(update={"certified_lower": value, "certificate_id": certificate_id})

