"""growthlab 명령행 진입점

    python run_growthlab.py growth --model f2 --gens "a,b" --depth 10
    python run_growthlab.py audit --model fp:2,3 --out results/

종료 코드: 0 성공, 1 입력/설정/입출력 오류, 2 부등식 위반 또는 구성 실패.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .constants import LOG_LEVEL, RESULT_SCHEMA_VERSION
from .dto import ResultRecord, RuntimeInfo
from .exceptions import ToolkitException
from .memory_monitor import log_memory_info
from .performance_logger import clear_logger, get_performance_logger
from .repositories.result_repo import append_record, csv_text, record_line, save_csv
from .routers import constructions, experiments, growth, limit
from .routers.base import Command
from .settings import build_config

logger = logging.getLogger(__name__)

ROUTERS = [growth.router, constructions.router, limit.router, experiments.router]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse 기본 종료 코드 2 대신 1을 쓰기 위해 예외로 바꾼다"""

    def error(self, message: str):
        raise _UsageError(f"{self.prog}: error: {message}")


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI run configuration (values override flags)")
    common.add_argument("--model", default=None, help="f2 | free:<r> | fp:<o1>,<o2>,... (inf = Z) | bs:<p>,<q>[,<r>]")
    common.add_argument("--gens", default=None, help='comma-separated words, e.g. "a,b" (capital = inverse)')
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--cap", type=int, default=None)
    common.add_argument("--power-cap", type=int, default=None, dest="power_cap")
    common.add_argument("--constants-D", type=int, default=None, dest="constants_D")
    common.add_argument("--constants-M", type=int, default=None, dest="constants_M")
    common.add_argument("--delta", default=None)
    common.add_argument("--epsilon", default=None)
    common.add_argument("--shards", type=int, default=None)
    common.add_argument("--memory-limit-mb", type=float, default=None, dest="memory_limit_mb")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory (results.jsonl, <command>.csv, <command>.svg)")
    common.add_argument("--plot", action="store_true", default=None)
    common.add_argument("--run-id", default=None, dest="run_id")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="growthlab", description="Growth rates and constructions on exactly computable tree actions")
    parser.add_argument("--version", action="version", version=f"growthlab {__version__}")
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)
    subparsers.required = True
    parser.set_defaults(_commands={})
    common = _common_options()
    commands: Dict[str, Command] = {}
    for router in ROUTERS:
        commands.update(router.include(subparsers, [common]))
    parser.set_defaults(_commands=commands)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    values = {k: v for k, v in vars(args).items() if not k.startswith("_")}
    command: Command = args._commands[args.command]

    perf = None
    try:
        config = build_config(values, values.get("config"))
        perf = get_performance_logger(f"{config.output.run_id}:{args.command}", echo=True)
        result = command.handler(config, perf)
        constants = config.action_constants().ledger()
        constants.update(result.extra_constants)
        record = ResultRecord(
            schema_version=RESULT_SCHEMA_VERSION,
            command=args.command,
            config=config.echo(),
            constants=constants,
            payload=result.payload,
            version=__version__,
            runtime=RuntimeInfo(
                wall_time=perf.wall_time(),
                shards=config.run.shards,
                started_at=perf.started_at,
            ),
        )
        if config.output.directory:
            directory = Path(config.output.directory)
            append_record(directory, record)
            if result.table is not None:
                save_csv(directory, args.command, *result.table)
            if config.output.plot and result.plot is not None:
                result.plot(directory / f"{args.command}.svg")
        elif result.table is not None:
            sys.stdout.write(csv_text(*result.table))
        else:
            sys.stdout.write(record_line(record) + "\n")
        sys.stdout.flush()
        perf.log_step("done")
        if config.output.directory:
            perf.save_to_file(Path(config.output.directory))
        log_memory_info(args.command)
        return result.exit_code
    except ToolkitException as e:
        logger.error(f"[ERROR] command={args.command} exit_code={e.exit_code} {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error(f"[ERROR] command={args.command} io: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    finally:
        if perf is not None:
            clear_logger(perf.run_id)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
