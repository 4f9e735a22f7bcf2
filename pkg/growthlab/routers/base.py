"""argparse 서브커맨드 라우터"""
import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..performance_logger import PerformanceLogger
from ..settings import RunConfig

ArgSpec = Tuple[Sequence[str], Dict[str, Any]]


@dataclass
class CommandResult:
    payload: Dict[str, Any]
    table: Optional[Tuple[List[str], List[List[Any]]]] = None  # (header, rows)
    plot: Optional[Callable[[Path], Path]] = None
    extra_constants: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0


Handler = Callable[[RunConfig, PerformanceLogger], CommandResult]


@dataclass
class Command:
    name: str
    help: str
    handler: Handler
    arguments: List[ArgSpec]


class CommandRouter:
    """명령 이름 → 핸들러 등록부. main이 서브파서를 만든다."""

    def __init__(self, tag: str):
        self.tag = tag
        self.commands: List[Command] = []

    def command(self, name: str, help: str, arguments: Sequence[ArgSpec] = ()):
        def register(handler: Handler) -> Handler:
            self.commands.append(Command(name, help, handler, list(arguments)))
            return handler

        return register

    def include(self, subparsers, parents: Sequence[argparse.ArgumentParser]) -> Dict[str, Command]:
        registered: Dict[str, Command] = {}
        for cmd in self.commands:
            sub = subparsers.add_parser(cmd.name, help=cmd.help, parents=list(parents))
            for flags, kwargs in cmd.arguments:
                sub.add_argument(*flags, **kwargs)
            registered[cmd.name] = cmd
        return registered


def arg(*flags: str, **kwargs: Any) -> ArgSpec:
    kwargs.setdefault("default", None)
    return flags, kwargs
