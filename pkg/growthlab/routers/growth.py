from ..performance_logger import PerformanceLogger
from ..repositories.result_repo import GROWTH_HEADER, growth_rows
from ..services.automaton_service import cone_automaton, spectral_radius
from ..services.growth_service import check_submultiplicativity, enumerate_balls, growth_estimate, ratio_identity_estimate
from ..settings import RunConfig
from ..space_service import SpaceModel
from .base import CommandResult, CommandRouter, arg

router = CommandRouter("growth")


@router.command("growth", "exact ball/sphere counts and growth-rate brackets")
def growth_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S = config.generating_set()
    table = enumerate_balls(S, config.run.depth, config.run.cap, config.run.shards, config.run.memory_limit_mb)
    perf.log_step("enumerate_balls", "shard")
    check_submultiplicativity(table)
    estimate = growth_estimate(table)
    payload = {
        "table": table.model_dump(),
        "estimate": estimate.model_dump(),
        "ratio_identity": ratio_identity_estimate(table),
    }
    return CommandResult(payload, table=(GROWTH_HEADER, growth_rows(table)))


@router.command(
    "automaton",
    "cone-type automaton of shortlex geodesics and its spectral radius",
    [arg("--cutoff", type=int, help="cone-type comparison depth")],
)
def automaton_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S = config.generating_set()
    automaton = cone_automaton(S, config.run.cutoff, validate_depth=max(config.run.depth, 2), cap=config.run.cap)
    perf.log_step("cone_automaton")
    rho = spectral_radius(automaton)
    perf.log_step("spectral_radius")
    return CommandResult({"automaton": automaton.model_dump(), "spectral_radius": rho})


@router.command(
    "delta",
    "four-point hyperbolicity estimate on sampled orbit points",
    [arg("--radius", type=int), arg("--samples", type=int)],
)
def delta_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    constants = config.action_constants()
    space = SpaceModel(config.group_model(), constants.delta)
    points = space.orbit_sample(config.run.radius)
    estimate = space.four_point_delta(points, config.run.samples, config.run.seed)
    perf.log_step("four_point_delta")
    holds = estimate <= constants.delta
    return CommandResult(
        {"points": len(points), "samples": config.run.samples, "delta_estimate": str(estimate), "within_declared": holds},
        exit_code=0 if holds else 2,
    )


@router.command(
    "wpd",
    "sampled estimate of the uniform-WPD constant D",
    [arg("--radius", type=int), arg("--samples", type=int)],
)
def wpd_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    constants = config.action_constants()
    space = SpaceModel(config.group_model(), constants.delta)
    epsilon = int(constants.epsilon)
    D = space.estimate_uniform_wpd_D(epsilon, config.run.samples, config.run.radius, config.run.seed)
    perf.log_step("estimate_uniform_wpd_D")
    return CommandResult({"epsilon": epsilon, "D": D, "samples": config.run.samples, "claim_at_sample": True})


@router.command(
    "acylindricity",
    "sampled acylindricity constants (N, K) and the derived uniform-WPD D",
    [arg("--R", type=int, dest="R"), arg("--radius", type=int), arg("--samples", type=int)],
)
def acylindricity_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    constants = config.action_constants()
    space = SpaceModel(config.group_model(), constants.delta)
    epsilon = int(constants.epsilon)
    result = space.estimate_acylindricity(epsilon, config.run.R, config.run.samples, config.run.radius, config.run.seed)
    perf.log_step("estimate_acylindricity")
    return CommandResult(dict(result))
