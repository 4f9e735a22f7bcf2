"""실행 설정: INI 파일 + CLI 플래그 + 환경변수 기본값"""
import configparser
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .constants import (
    AUDIT_PING_PONG_DEPTH,
    DEFAULT_CAP,
    DEFAULT_D,
    DEFAULT_M,
    DEFAULT_POWER_CAP,
    DEFAULT_SEED,
    DEFAULT_SHARDS,
    MEMORY_LIMIT_MB,
    PING_PONG_DEPTH,
    SMALL_CANCELLATION_RADIUS,
)
from .exceptions import ConfigurationException
from .models import ActionConstants, GeneratingSet, GroupModel
from .word_service import make_generating_set, parse_words

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSection(_Section):
    spec: str = "f2"


class GeneratorsSection(_Section):
    words: Optional[str] = None  # None = 표준 생성자


class ConstantsSection(_Section):
    delta: str = "0"
    D: int = DEFAULT_D
    M: int = DEFAULT_M
    epsilon: str = "0"

    @field_validator("delta", "epsilon")
    @classmethod
    def _check_fraction(cls, value: str) -> str:
        try:
            Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e
        return value


class RunSection(_Section):
    depth: int = 8
    cap: int = DEFAULT_CAP
    power_cap: int = DEFAULT_POWER_CAP
    seed: int = DEFAULT_SEED
    shards: int = DEFAULT_SHARDS
    memory_limit_mb: float = MEMORY_LIMIT_MB
    ping_pong_depth: int = PING_PONG_DEPTH
    audit_depth: int = AUDIT_PING_PONG_DEPTH
    radius: int = SMALL_CANCELLATION_RADIUS
    cutoff: int = 3
    m: int = 2
    q: int = 1
    max_cardinality: int = 2
    max_length: int = 2
    require_hyperbolic: bool = False
    samples: int = 32
    R: int = 10


class OutputSection(_Section):
    directory: Optional[str] = None
    plot: bool = False
    run_id: str = "growthlab"


class SequenceSection(_Section):
    target: Optional[str] = None  # None = [model] spec
    images: Optional[str] = None  # 템플릿을 ';'로 구분
    horizon: int = 16
    length_cap: int = 4
    relations: Optional[str] = None


class LimitSection(_Section):
    spec: Optional[str] = None
    eta: Optional[str] = None


SECTIONS = {
    "model": ModelSection,
    "generators": GeneratorsSection,
    "constants": ConstantsSection,
    "run": RunSection,
    "output": OutputSection,
    "sequence": SequenceSection,
    "limit": LimitSection,
}

# CLI dest -> (section, key)
CLI_KEYS = {
    "model": ("model", "spec"),
    "gens": ("generators", "words"),
    "delta": ("constants", "delta"),
    "constants_D": ("constants", "D"),
    "constants_M": ("constants", "M"),
    "epsilon": ("constants", "epsilon"),
    "depth": ("run", "depth"),
    "cap": ("run", "cap"),
    "power_cap": ("run", "power_cap"),
    "seed": ("run", "seed"),
    "shards": ("run", "shards"),
    "memory_limit_mb": ("run", "memory_limit_mb"),
    "ping_pong_depth": ("run", "ping_pong_depth"),
    "audit_depth": ("run", "audit_depth"),
    "radius": ("run", "radius"),
    "cutoff": ("run", "cutoff"),
    "m": ("run", "m"),
    "q": ("run", "q"),
    "max_cardinality": ("run", "max_cardinality"),
    "max_length": ("run", "max_length"),
    "require_hyperbolic": ("run", "require_hyperbolic"),
    "samples": ("run", "samples"),
    "R": ("run", "R"),
    "out": ("output", "directory"),
    "plot": ("output", "plot"),
    "run_id": ("output", "run_id"),
    "target": ("sequence", "target"),
    "images": ("sequence", "images"),
    "horizon": ("sequence", "horizon"),
    "length_cap": ("sequence", "length_cap"),
    "relations": ("sequence", "relations"),
    "limit_model": ("limit", "spec"),
    "eta": ("limit", "eta"),
}


class RunConfig(_Section):
    model: ModelSection = ModelSection()
    generators: GeneratorsSection = GeneratorsSection()
    constants: ConstantsSection = ConstantsSection()
    run: RunSection = RunSection()
    output: OutputSection = OutputSection()
    sequence: SequenceSection = SequenceSection()
    limit: LimitSection = LimitSection()

    def group_model(self) -> GroupModel:
        return parse_model_spec(self.model.spec)

    def action_constants(self) -> ActionConstants:
        c = self.constants
        try:
            return ActionConstants(delta=Fraction(c.delta), D=c.D, M=c.M, epsilon=Fraction(c.epsilon))
        except ValidationError as e:
            raise ConfigurationException(f"invalid constants: {e.errors()[0]['msg']}") from e

    def generating_set(self, model: Optional[GroupModel] = None) -> GeneratingSet:
        model = model or self.group_model()
        if self.generators.words is None:
            return make_generating_set(model, model.standard_generators())
        return make_generating_set(model, parse_words(self.generators.words, model))

    def echo(self) -> Dict[str, Any]:
        """결과 레코드에 넣는 설정. shards는 실행 정보라 제외한다."""
        data = self.model_dump()
        data["run"].pop("shards", None)
        data["run"].pop("memory_limit_mb", None)
        return data


def parse_model_spec(spec: str) -> GroupModel:
    """f2 / free:2 / fp:2,3 / fp:2,inf / bs:2,3,1"""
    text = spec.strip().lower()
    try:
        if text.startswith("free:"):
            return GroupModel.free_group(int(text[5:]))
        if text.startswith("f") and text[1:].isdigit():
            return GroupModel.free_group(int(text[1:]))
        if text.startswith("fp:"):
            orders: List[Optional[int]] = [
                None if part.strip() in ("inf", "oo", "0") else int(part) for part in text[3:].split(",")
            ]
            return GroupModel.free_product(orders)
        if text.startswith("bs:"):
            parts = [int(part) for part in text[3:].split(",")]
            if len(parts) not in (2, 3):
                raise ValueError("bs spec needs p,q or p,q,r")
            return GroupModel.baumslag_solitar(parts[0], parts[1], parts[2] if len(parts) == 3 else 0)
    except (ValueError, ValidationError) as e:
        raise ConfigurationException(f"invalid model spec {spec!r}: {e}") from e
    raise ConfigurationException(f"unknown model spec {spec!r} (use f<r>, free:<r>, fp:<o1>,<o2>,..., bs:<p>,<q>[,<r>])")


def read_config_file(path: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # D, M, R 대소문자 유지
    try:
        with open(path, encoding="utf-8") as f:
            parser.read_file(f)
    except OSError as e:
        raise ConfigurationException(f"cannot read config {path}: {e}") from e
    except configparser.Error as e:
        raise ConfigurationException(f"malformed config {path}: {e}") from e
    data: Dict[str, Dict[str, str]] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigurationException(f"unknown config section [{section}] in {path}")
        data[section] = dict(parser.items(section))
    return data


def build_config(cli_values: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """CLI 값 위에 설정 파일 값을 덮어쓴다 (파일 우선)"""
    merged: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}
    for dest, value in cli_values.items():
        if value is None or dest not in CLI_KEYS:
            continue
        section, key = CLI_KEYS[dest]
        merged[section][key] = value
    if config_path:
        for section, values in read_config_file(config_path).items():
            merged[section].update(values)
            logger.info(f"[CONFIG] section={section} keys={sorted(values)} from {config_path}")
    try:
        return RunConfig(**{name: SECTIONS[name](**values) for name, values in merged.items()})
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ConfigurationException(f"invalid configuration at {where}: {first['msg']}") from e
