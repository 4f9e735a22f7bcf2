import logging
from typing import Any, Callable, Dict, List, Optional

from ..constants import AUDIT_PING_PONG_DEPTH, DEFAULT_CAP, DEFAULT_POWER_CAP, DEFAULT_SHARDS, PING_PONG_DEPTH
from ..dto import AuditReport, AuditStage, GrowthTightReport
from ..exceptions import InvariantViolation, ToolkitException, ValidationException
from ..models import ActionConstants, GeneratingSet, GroupModel
from ..space_service import SpaceModel
from ..word_service import make_generating_set, parse_words
from .construction_service import ConstructionService
from .feasible_service import FeasibleService
from .growth_service import enumerate_balls, growth_estimate
from .separator_service import SeparatorService

logger = logging.getLogger(__name__)

AUDIT_STAGES = (
    "large-displacement",
    "non-elementarity",
    "free-pair",
    "primitive-u",
    "separators",
    "phi-check",
    "lower-bound",
)


def growth_tight_experiment(depth: int, cap: int = DEFAULT_CAP, shards: int = DEFAULT_SHARDS) -> GrowthTightReport:
    """H = BS(2,3) * Z with S = {a, t, z} against f(S) = {a², t, z}.

    The deficit β_k(f(S)) < β_k(S) is reported, never asserted. Only
    β_k(f(S)) <= β_{2k}(S) is checked, for every k where β_{2k}(S) fits under the cap.
    """
    if depth < 2:
        raise ValidationException("growth-tight needs depth >= 2")
    model = GroupModel.baumslag_solitar(2, 3, extra_rank=1)
    S = make_generating_set(model, parse_words("a,t,z", model))
    fS = make_generating_set(model, parse_words("a^2,t,z", model))

    source = enumerate_balls(S, 2 * depth, cap, shards, truncate_on_memory=True)
    image = enumerate_balls(fS, depth, cap, shards)
    doubled: List[Optional[int]] = []
    for k in range(len(image.ball)):
        value = source.ball[2 * k] if 2 * k < len(source.ball) else None
        doubled.append(value)
        if value is not None and image.ball[k] > value:
            raise InvariantViolation("beta_k(f(S)) <= beta_2k(S)", image.ball[k], value, f"k={k}")

    first_deficit = next(
        (k for k in range(min(len(image.ball), len(source.ball))) if image.ball[k] < source.ball[k]),
        None,
    )
    logger.info(f"[EXPERIMENT] growth-tight depth={depth} first_deficit={first_deficit} truncated={source.truncated}")
    return GrowthTightReport(
        depth=depth,
        source_ball=source.ball[: depth + 1],
        image_ball=image.ball,
        doubled_ball=doubled,
        first_deficit=first_deficit,
        source_estimate=growth_estimate(source),
        image_estimate=growth_estimate(image),
    )


class AuditService:
    """Runs every construction on one generating set; the first failure stops the run."""

    def __init__(
        self,
        constants: ActionConstants,
        m: int = 2,
        q: int = 1,
        growth_depth: int = 8,
        ping_pong_depth: int = PING_PONG_DEPTH,
        audit_depth: int = AUDIT_PING_PONG_DEPTH,
        cap: int = DEFAULT_CAP,
        power_cap: int = DEFAULT_POWER_CAP,
    ):
        self.constants = constants
        self.m = m
        self.q = q
        self.growth_depth = growth_depth
        self.ping_pong_depth = ping_pong_depth
        self.audit_depth = audit_depth
        self.cap = cap
        self.power_cap = power_cap

    def full_pipeline_audit(self, S: GeneratingSet) -> AuditReport:
        model = S.model
        space = SpaceModel(model, self.constants.delta)
        constructions = ConstructionService(space, self.constants, self.power_cap)
        state: Dict[str, Any] = {}

        def displacement() -> Dict[str, Any]:
            witness, g, x = constructions.displacement_search(S)
            state.update(witness=witness, g=g, x=x)
            return witness.model_dump()

        def non_elementarity() -> Dict[str, Any]:
            s = constructions.non_elementary_conjugator(S, state["g"])
            return {"s": constructions._fmt(s)}

        def free_pair() -> Dict[str, Any]:
            witness = state["witness"]
            pair = constructions.free_pair_from(S, state["g"], witness.power, witness.L_g, self.ping_pong_depth)
            state["pair"] = pair
            return pair.certificate.model_dump()

        def primitive() -> Dict[str, Any]:
            witness = state["witness"]
            prim = constructions.build_primitive_u(state["pair"], state["x"], witness.L_g, witness.power)
            return prim.report.model_dump()

        def separators() -> Dict[str, Any]:
            service = SeparatorService(space, self.constants, self.power_cap)
            seps = service.build_separators(S)
            state.update(separator_service=service, seps=seps)
            return seps.report.model_dump()

        def phi_check() -> Dict[str, Any]:
            feasible = FeasibleService(state["separator_service"], state["seps"], self.power_cap)
            return feasible.phi_injectivity_check(self.m, self.q).model_dump()

        def lower_bound() -> Dict[str, Any]:
            estimate = growth_estimate(enumerate_balls(S, self.growth_depth, self.cap))
            cert = constructions.lower_bound_audit(S, estimate, self.audit_depth)
            return cert.model_dump()

        steps: List[Callable[[], Dict[str, Any]]] = [
            displacement, non_elementarity, free_pair, primitive, separators, phi_check, lower_bound,
        ]
        stages: List[AuditStage] = []
        failed: Optional[str] = None
        for name, step in zip(AUDIT_STAGES, steps):
            try:
                detail = step()
            except ToolkitException as e:
                logger.warning(f"[AUDIT] stage={name} failed exit_code={e.exit_code} error={e.message}")
                stages.append(AuditStage(stage=name, passed=False, detail={"error": e.message, "exit_code": e.exit_code}))
                failed = name
                break
            stages.append(AuditStage(stage=name, passed=True, detail=detail))
            logger.info(f"[AUDIT] stage={name} passed")
        return AuditReport(
            model=model.name,
            generators=S.encoding(),
            stages=stages,
            passed=failed is None,
            failed_stage=failed,
        )
