from ..exceptions import ValidationException
from ..performance_logger import PerformanceLogger
from ..repositories.plot_repo import save_continuity_plot
from ..services.limit_service import HomomorphismSequence, factoring_check, growth_continuity_probe, stable_kernel_scan
from ..settings import RunConfig, parse_model_spec
from ..word_service import make_generating_set, parse_words
from .base import CommandResult, CommandRouter, arg

router = CommandRouter("limit")

SEQUENCE_ARGS = [
    arg("--images", help="image templates separated by ';', e.g. \"a; A^n b a^n\""),
    arg("--target", help="target model spec (default: --model)"),
    arg("--horizon", type=int),
]


def _sequence(config: RunConfig) -> HomomorphismSequence:
    if not config.sequence.images:
        raise ValidationException("a homomorphism sequence needs --images (or [sequence] images)")
    target = parse_model_spec(config.sequence.target or config.model.spec)
    templates = [t.strip() for t in config.sequence.images.split(";")]
    return HomomorphismSequence.from_templates(target, templates)


@router.command("stable-kernel", "classify short words by their fate under f_n", SEQUENCE_ARGS + [arg("--length-cap", type=int, dest="length_cap")])
def stable_kernel_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    seq = _sequence(config)
    report = stable_kernel_scan(seq, config.sequence.length_cap, config.sequence.horizon, config.run.shards)
    perf.log_step("stable_kernel_scan", "shard")
    return CommandResult({"sequence": seq.description, "report": report.model_dump()})


@router.command("factoring", "least sampled n0 after which the relations die", SEQUENCE_ARGS + [arg("--relations")])
def factoring_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    seq = _sequence(config)
    relations = parse_words(config.sequence.relations, seq.source) if config.sequence.relations else []
    report = factoring_check(seq, relations, config.sequence.horizon)
    perf.log_step("factoring_check")
    return CommandResult({"sequence": seq.description, "report": report.model_dump()})


@router.command(
    "continuity",
    "balls of f_n(S) against the supplied limit group",
    SEQUENCE_ARGS + [arg("--limit-model", dest="limit_model"), arg("--eta")],
)
def continuity_command(config: RunConfig, perf: PerformanceLogger) -> CommandResult:
    seq = _sequence(config)
    if config.generators.words:
        S = make_generating_set(seq.source, parse_words(config.generators.words, seq.source))
    else:
        S = make_generating_set(seq.source, seq.source.standard_generators())
    limit_model = parse_model_spec(config.limit.spec) if config.limit.spec else None
    eta = parse_words(config.limit.eta, limit_model) if (limit_model is not None and config.limit.eta) else None
    report = growth_continuity_probe(
        seq, S, limit_model, eta, config.run.depth, config.sequence.horizon, config.run.cap, config.run.shards
    )
    perf.log_step("growth_continuity_probe", "shard")
    header = ["n"] + [f"beta_{k}" for k in range(len(report.limit_ball))] + ["point_estimate", "certified_upper"]
    rows = [[r.n] + r.ball + [f"{r.point_estimate:.12g}", f"{r.certified_upper:.12g}"] for r in report.rows]
    rows.append(["limit"] + report.limit_ball + [f"{report.limit_point_estimate:.12g}", f"{report.limit_certified_upper:.12g}"])
    return CommandResult(
        {"sequence": seq.description, "report": report.model_dump()},
        table=(header, rows),
        plot=lambda path: save_continuity_plot(report, path),
    )
