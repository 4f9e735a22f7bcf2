from ..performance_logger import PerformanceLogger
from ..repositories.plot_repo import save_spectrum_plot
from ..repositories.result_repo import SPECTRUM_HEADER, spectrum_rows
from ..services.experiment_service import AuditService, growth_tight_experiment
from ..services.spectrum_service import SpectrumService
from ..settings import RunConfig
from .base import CommandResult, CommandRouter, arg

router = CommandRouter("experiments")

SCAN_ARGS = [
    arg("--max-cardinality", type=int, dest="max_cardinality"),
    arg("--max-length", type=int, dest="max_length"),
]


def _spectrum_service(config: RunConfig) -> SpectrumService:
    return SpectrumService(config.group_model(), config.run.depth, config.run.cap, config.run.shards)


def _spectrum_result(table) -> CommandResult:
    return CommandResult(
        {"spectrum": table.model_dump()},
        table=(SPECTRUM_HEADER, spectrum_rows(table)),
        plot=lambda path: save_spectrum_plot(table, path),
    )


@router.command("xi-scan", "growth spectrum over generating sets of the whole group", SCAN_ARGS)
def xi_scan_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    table = _spectrum_service(config).xi_scan(config.run.max_cardinality, config.run.max_length)
    perf.log_step("xi_scan", "shard")
    return _spectrum_result(table)


@router.command(
    "theta-scan",
    "growth spectrum over finitely generated subgroups",
    SCAN_ARGS + [arg("--require-hyperbolic", action="store_true", dest="require_hyperbolic")],
)
def theta_scan_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    table = _spectrum_service(config).theta_scan(
        config.run.max_cardinality,
        config.run.max_length,
        require_hyperbolic=config.run.require_hyperbolic,
        constants=config.action_constants(),
    )
    perf.log_step("theta_scan", "shard")
    return _spectrum_result(table)


@router.command("growth-tight", "BS(2,3)*Z with S = {a,t,z} against f(S) = {a^2,t,z}")
def growth_tight_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    report = growth_tight_experiment(config.run.depth, config.run.cap, config.run.shards)
    perf.log_step("growth_tight_experiment", "shard")
    header = ["k", "beta_k_S", "beta_k_fS", "beta_2k_S"]
    rows = [
        [k, report.source_ball[k] if k < len(report.source_ball) else "", b, "" if d is None else d]
        for k, (b, d) in enumerate(zip(report.image_ball, report.doubled_ball))
    ]
    return CommandResult({"report": report.model_dump()}, table=(header, rows))


@router.command(
    "audit",
    "every construction on one generating set, stopping at the first failure",
    [arg("--m", type=int, dest="m"), arg("--q", type=int, dest="q")],
)
def audit_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    service = AuditService(
        config.action_constants(),
        m=config.run.m,
        q=config.run.q,
        growth_depth=config.run.depth,
        ping_pong_depth=config.run.ping_pong_depth,
        audit_depth=config.run.audit_depth,
        cap=config.run.cap,
        power_cap=config.run.power_cap,
    )
    report = service.full_pipeline_audit(config.generating_set())
    perf.log_step("full_pipeline_audit")
    exit_code = 0 if report.passed else report.stages[-1].detail.get("exit_code", 2)
    return CommandResult({"audit": report.model_dump()}, exit_code=exit_code)
