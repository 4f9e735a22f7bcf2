from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


# 성장 테이블 / 추정 관련 DTO
class GrowthTable(BaseModel):
    """공/구 크기 테이블"""
    model_config = ConfigDict(frozen=True)

    model: str
    generators: str
    depth: int
    ball: List[int]
    sphere: List[int]
    truncated: bool = False  # 상한(cap) 또는 메모리 가드로 잘렸는지
    truncated_at: Optional[int] = None


class GrowthEstimate(BaseModel):
    certified_upper: float
    upper_witness: List[int]  # (β_n, n)
    point_estimate: float
    last_ratio: Optional[float] = None
    certified_lower: Optional[float] = None
    certificate_id: Optional[str] = None
    marker: Optional[str] = None  # "finite" / "subexponential"


# 원뿔 자동자 관련 DTO
class ConeAutomaton(BaseModel):
    states: int  # 시작 상태 제외
    transitions: List[List[int]]  # transitions[state] = 다음 상태 목록 (중복 허용)
    start_successors: List[int]
    cutoff_radius: int
    validated_depth: int
    certified: bool = False


# 구성(construction) 관련 DTO
class AxisRecord(BaseModel):
    carrier: str
    translation_length: int
    basepoint: str


class DisplacementWitness(BaseModel):
    g: str
    x: str
    L_S: int
    displacement: int
    L_g: int
    power: int  # g가 발견된 S의 거듭제곱


class FreePairCertificate(BaseModel):
    generators: List[str]
    k: int
    s: str
    depth: int
    words_checked: int
    min_translation_length: int
    lambda_bound: int
    passed: bool


class PrimitiveElement(BaseModel):
    u: str
    u_length: int
    s_length: int
    s_length_bound: int
    axis: AxisRecord
    checks: Dict[str, bool]
    fixer_size: int  # |F(u)|


class SeparatorReport(BaseModel):
    words: List[str]
    s_lengths: List[int]
    b: int
    Delta: int
    L_power: int
    y: str
    translation_lengths: List[int]
    checks: Dict[str, bool]
    small_cancellation_pairs: int


class FeasibleReport(BaseModel):
    m: int
    q: int
    ball_size: int
    forbidden: int
    non_forbidden: int
    adequate: int
    adequate_bound: float
    tuples_checked: int
    images_distinct: bool
    implied_lower: Optional[float] = None
    implied_lower_constant_b: Optional[float] = None


class LowerBoundCertificate(BaseModel):
    W: List[str]
    u: str
    U: str
    basis_lengths: List[int]
    ping_pong_depth: int
    power_bound: int
    actual_power: int
    implied_bound: float
    certified_lower: float
    A_bound: float
    passed: bool


# 극한군 관련 DTO
class WordClassification(BaseModel):
    word: str
    status: str  # eventually_trivial / eventually_nontrivial / undecided
    flips: int = 0
    last_flip: Optional[int] = None


class StableKernelReport(BaseModel):
    length_cap: int
    horizon: int
    samples: List[int]
    rows: List[WordClassification]
    claims_at_horizon: bool = True


class FactoringReport(BaseModel):
    relations: List[str]
    horizon: int
    n0: Optional[int]  # None = 관측 범위 안에서 없음


class ContinuityRow(BaseModel):
    n: int
    ball: List[int]
    point_estimate: float
    certified_upper: float
    inequality_holds: bool


class ContinuityReport(BaseModel):
    limit_ball: List[int]
    limit_point_estimate: float
    limit_certified_upper: float
    rows: List[ContinuityRow]
    strict_somewhere: bool


# 스펙트럼 관련 DTO
class SpectrumRow(BaseModel):
    encoding: str
    size: int
    ball: List[int]
    point_estimate: float
    certified_upper: float
    class_id: int
    merged: bool = False
    minimum: bool = False


class SpectrumTable(BaseModel):
    model: str
    max_cardinality: int
    max_length: int
    depth: int
    rows: List[SpectrumRow]
    excluded: int
    truncated: bool = False


class GrowthTightReport(BaseModel):
    depth: int
    source_ball: List[int]
    image_ball: List[int]
    doubled_ball: List[Optional[int]]  # β_{2k}(S), 상한 안에서만
    first_deficit: Optional[int]
    source_estimate: GrowthEstimate
    image_estimate: GrowthEstimate


class AuditStage(BaseModel):
    stage: str
    passed: bool
    detail: Dict[str, Any] = Field(default_factory=dict)


class AuditReport(BaseModel):
    model: str
    generators: str
    stages: List[AuditStage]
    passed: bool
    failed_stage: Optional[str] = None


# 결과 레코드 DTO
class RuntimeInfo(BaseModel):
    wall_time: float
    shards: int
    started_at: str


class ResultRecord(BaseModel):
    schema_version: int
    command: str
    config: Dict[str, Any]
    constants: Dict[str, Any]
    payload: Dict[str, Any]
    version: str
    runtime: RuntimeInfo
