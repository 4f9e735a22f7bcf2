from ..performance_logger import PerformanceLogger
from ..services.construction_service import ConstructionService
from ..services.feasible_service import FeasibleService
from ..services.growth_service import certified_lower_bound, enumerate_balls, growth_estimate, with_lower_bound
from ..services.separator_service import SeparatorService
from ..settings import RunConfig
from ..space_service import SpaceModel
from .base import CommandResult, CommandRouter, arg

router = CommandRouter("constructions")


def _services(config: RunConfig):
    constants = config.action_constants()
    model = config.group_model()
    space = SpaceModel(model, constants.delta)
    S = config.generating_set(model)
    return S, space, constants


def _germ_constants(seps) -> dict:
    return {"Delta": seps.context.Delta, "L_power": seps.context.L}


@router.command("find-hyperbolic", "first hyperbolic element in S, S^2, ..., S^M")
def find_hyperbolic_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S, space, constants = _services(config)
    service = ConstructionService(space, constants, config.run.power_cap)
    found = service.find_hyperbolic_in_power(S)
    perf.log_step("find_hyperbolic_in_power")
    return CommandResult(
        {"g": service._fmt(found.word), "power": found.s_length, "axis": service.axis_record(space.axis(found.word)).model_dump()}
    )


@router.command("free-pair", "large-displacement element and the free pair (g^k, s g^k s^-1)",
                [arg("--ping-pong-depth", type=int, dest="ping_pong_depth")])
def free_pair_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S, space, constants = _services(config)
    service = ConstructionService(space, constants, config.run.power_cap)
    witness, g, _ = service.displacement_search(S)
    perf.log_step("displacement_search")
    pair = service.free_pair_from(S, g, witness.power, witness.L_g, config.run.ping_pong_depth)
    perf.log_step("ping_pong")
    return CommandResult({"witness": witness.model_dump(), "certificate": pair.certificate.model_dump()})


@router.command("primitive-u", "primitive hyperbolic element u and its checks",
                [arg("--ping-pong-depth", type=int, dest="ping_pong_depth")])
def primitive_u_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S, space, constants = _services(config)
    service = ConstructionService(space, constants, config.run.power_cap)
    pair, prim = service.primitive_pipeline(S, config.run.ping_pong_depth)
    perf.log_step("primitive_pipeline")
    return CommandResult({"certificate": pair.certificate.model_dump(), "primitive": prim.report.model_dump()})


@router.command("separators", "the four separators with their germ, translation and small-cancellation checks", [arg("--radius", type=int)])
def separators_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S, space, constants = _services(config)
    service = SeparatorService(space, constants, config.run.power_cap)
    seps = service.build_separators(S, config.run.radius)
    perf.log_step("build_separators")
    return CommandResult({"separators": seps.report.model_dump()}, extra_constants=_germ_constants(seps))


@router.command(
    "phi-check",
    "forbidden/adequate classification and exhaustive injectivity of the feasible map",
    [arg("--m", type=int, dest="m"), arg("--q", type=int, dest="q"), arg("--radius", type=int)],
)
def phi_check_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S, space, constants = _services(config)
    separators = SeparatorService(space, constants, config.run.power_cap)
    seps = separators.build_separators(S, config.run.radius)
    perf.log_step("build_separators")
    feasible = FeasibleService(separators, seps, config.run.power_cap)
    estimate = growth_estimate(enumerate_balls(S, config.run.depth, config.run.cap, config.run.shards))
    report = feasible.feasible_growth_bound(config.run.m, config.run.q, estimate)
    perf.log_step("phi_injectivity_check")
    naive = feasible.naive_concatenation_collisions(config.run.m, config.run.q)
    return CommandResult(
        {"report": report.model_dump(), "naive_collisions": naive},
        extra_constants=_germ_constants(seps),
    )


@router.command("lower-bound", "coset-separated W, U = u^(20D) and the certified lower bound on e(G,S)",
                [arg("--audit-depth", type=int, dest="audit_depth")])
def lower_bound_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    S, space, constants = _services(config)
    service = ConstructionService(space, constants, config.run.power_cap)
    table = enumerate_balls(S, config.run.depth, config.run.cap, config.run.shards)
    estimate = growth_estimate(table)
    perf.log_step("enumerate_balls", "shard")
    cert = service.lower_bound_audit(S, estimate, config.run.audit_depth)
    perf.log_step("lower_bound_audit")
    lower = certified_lower_bound(S, cert.W, cert.actual_power, cert.passed)
    estimate = with_lower_bound(estimate, lower, f"ping-pong depth {cert.ping_pong_depth}, p={cert.actual_power}")
    return CommandResult({"certificate": cert.model_dump(), "estimate": estimate.model_dump()})
