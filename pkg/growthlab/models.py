"""군 모델, 생성집합, 준동형, 작용 상수 정의"""
import string
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_serializer, field_validator, model_validator

# 문자(letter)는 ±(생성자 인덱스 + 1), 대문자 기호가 역원
Letter = int
Word = Tuple[Letter, ...]

IDENTITY: Word = ()


class ModelKind(str, Enum):
    FREE = "free"
    FREE_PRODUCT = "free_product"
    BS_FREE_PRODUCT = "bs_free_product"


class FactorKind(str, Enum):
    CYCLIC = "cyclic"
    BAUMSLAG_SOLITAR = "bs"


class Factor(NamedTuple):
    """자유곱 인자 하나. order가 None이면 무한 순환군."""
    kind: FactorKind
    generators: Tuple[int, ...]
    order: Optional[int] = None
    p: int = 0
    q: int = 0

    @property
    def is_loop(self) -> bool:
        # 무한 순환 인자는 트리에서 꼭짓점이 아니라 케일리 고리로 그린다
        return self.kind == FactorKind.CYCLIC and self.order is None


class ModelLayout(NamedTuple):
    factors: Tuple[Factor, ...]
    factor_of: Tuple[int, ...]
    symbols: Tuple[str, ...]
    all_loops: bool
    half_scale: bool
    vertex_factors: Tuple[int, ...]


FREE_SYMBOLS = string.ascii_lowercase
FREE_PRODUCT_SYMBOLS = "stuvwxyz" + "abcdefghijklmnopqr"
BS_SYMBOLS = "at" + "zyxwvusrqponmlkjihgfedcb"


class GroupModel(BaseModel):
    """정규형이 결정 가능한 유한생성군 (닫힌 열거)"""
    model_config = ConfigDict(frozen=True)

    kind: ModelKind
    rank: int = 0
    orders: Tuple[Optional[int], ...] = ()
    p: int = 0
    q: int = 0
    extra_rank: int = 0

    @model_validator(mode="after")
    def _check_parameters(self) -> "GroupModel":
        if self.kind == ModelKind.FREE:
            if self.rank < 1:
                raise ValueError("FreeGroup needs rank >= 1")
            if self.rank > len(FREE_SYMBOLS):
                raise ValueError(f"FreeGroup rank is limited to {len(FREE_SYMBOLS)}")
        elif self.kind == ModelKind.FREE_PRODUCT:
            if len(self.orders) < 2:
                raise ValueError("FreeProduct needs at least two factors")
            if len(self.orders) > len(FREE_PRODUCT_SYMBOLS):
                raise ValueError("too many free-product factors")
            for order in self.orders:
                if order is not None and order < 2:
                    raise ValueError(f"factor order must be >= 2 or infinite, got {order}")
        else:
            if self.p == 0 or self.q == 0:
                raise ValueError("BS(p, q) needs non-zero p and q")
            if self.p < 0 or self.q < 0:
                raise ValueError("BS(p, q) is supported for positive p, q")
            if self.extra_rank < 0 or self.extra_rank + 2 > len(BS_SYMBOLS):
                raise ValueError("invalid extra free rank")
        return self

    @classmethod
    def free_group(cls, rank: int) -> "GroupModel":
        return cls(kind=ModelKind.FREE, rank=rank)

    @classmethod
    def free_product(cls, orders: List[Optional[int]]) -> "GroupModel":
        return cls(kind=ModelKind.FREE_PRODUCT, orders=tuple(orders))

    @classmethod
    def baumslag_solitar(cls, p: int, q: int, extra_rank: int = 0) -> "GroupModel":
        return cls(kind=ModelKind.BS_FREE_PRODUCT, p=p, q=q, extra_rank=extra_rank)

    def layout(self) -> ModelLayout:
        return _layout(self)

    @property
    def arity(self) -> int:
        return len(self.layout().factor_of)

    @property
    def name(self) -> str:
        if self.kind == ModelKind.FREE:
            return f"F{self.rank}"
        if self.kind == ModelKind.FREE_PRODUCT:
            return "*".join("Z" if o is None else f"Z/{o}" for o in self.orders)
        base = f"BS({self.p},{self.q})"
        return base if self.extra_rank == 0 else f"{base}*F{self.extra_rank}"

    def standard_generators(self) -> List[Word]:
        return [(i + 1,) for i in range(self.arity)]


@lru_cache(maxsize=None)
def _layout(model: GroupModel) -> ModelLayout:
    factors: List[Factor] = []
    if model.kind == ModelKind.FREE:
        for i in range(model.rank):
            factors.append(Factor(FactorKind.CYCLIC, (i,), None))
        symbols = tuple(FREE_SYMBOLS[: model.rank])
    elif model.kind == ModelKind.FREE_PRODUCT:
        for i, order in enumerate(model.orders):
            factors.append(Factor(FactorKind.CYCLIC, (i,), order))
        symbols = tuple(FREE_PRODUCT_SYMBOLS[: len(model.orders)])
    else:
        factors.append(Factor(FactorKind.BAUMSLAG_SOLITAR, (0, 1), None, model.p, model.q))
        for j in range(model.extra_rank):
            factors.append(Factor(FactorKind.CYCLIC, (2 + j,), None))
        symbols = tuple(BS_SYMBOLS[: 2 + model.extra_rank])

    factor_of: List[int] = [0] * len(symbols)
    for pos, factor in enumerate(factors):
        for gen in factor.generators:
            factor_of[gen] = pos
    vertex_factors = tuple(pos for pos, f in enumerate(factors) if not f.is_loop)
    all_loops = not vertex_factors
    half_scale = len(vertex_factors) == 2 and len(factors) == 2
    return ModelLayout(tuple(factors), tuple(factor_of), symbols, all_loops, half_scale, vertex_factors)


def shortlex_key(word: Word) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """(길이, 생성자 인덱스, 부호 + < -) 순서의 shortlex 키"""
    return len(word), tuple((abs(x) - 1, 0 if x > 0 else 1) for x in word)


class GeneratingSet(BaseModel):
    """정규형으로 중복 제거된 유한 생성집합"""
    model_config = ConfigDict(frozen=True)

    model: GroupModel
    elements: Tuple[Word, ...]
    symmetrized: bool = False

    def __len__(self) -> int:
        return len(self.elements)

    def encoding(self) -> str:
        from .word_service import format_word

        return "{" + ", ".join(format_word(w, self.model) for w in self.elements) + "}"


class Homomorphism(BaseModel):
    """F_ℓ → target. images[i]는 i번째 자유 생성자의 상"""
    model_config = ConfigDict(frozen=True)

    source_arity: int
    target: GroupModel
    images: Tuple[Word, ...]

    @model_validator(mode="after")
    def _check_arity(self) -> "Homomorphism":
        if len(self.images) != self.source_arity:
            raise ValueError(f"expected {self.source_arity} images, got {len(self.images)}")
        return self


class ActionConstants(BaseModel):
    """(δ, D, M)과 파생 상수. 파생값은 매번 다시 계산한다."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: Fraction = Fraction(0)
    D: int = 1
    M: int = 2
    epsilon: Fraction = Fraction(0)

    @field_validator("delta", "epsilon", mode="before")
    @classmethod
    def _to_fraction(cls, value):
        if isinstance(value, Fraction):
            return value
        return Fraction(str(value))

    @model_validator(mode="after")
    def _check_ranges(self) -> "ActionConstants":
        if self.delta < 0 or self.epsilon < 0:
            raise ValueError("delta and epsilon must be non-negative")
        if self.D < 1 or self.M < 1:
            raise ValueError("D and M must be positive integers")
        return self

    @field_serializer("delta", "epsilon")
    def _serialize_fraction(self, value: Fraction) -> str:
        return str(value)

    @property
    def T(self) -> Fraction:
        return Fraction(50) * self.delta / self.D

    @property
    def k(self) -> int:
        return 60 * self.D

    @property
    def m(self) -> int:
        # 14k + 4 와 D = 1에서 일치하고 D > 1이면 더 크다
        return 844 * self.D

    @property
    def b(self) -> int:
        return 343640 * self.D ** 2 * self.M + 22

    @property
    def A(self) -> Fraction:
        return Fraction(1, 16880 * self.M * self.D ** 3 + 2)

    @property
    def lower_bound_power(self) -> int:
        """|W|^(1/p)의 p = 20·M·D²·m + 2"""
        return 20 * self.M * self.D ** 2 * self.m + 2

    def ledger(self) -> Dict[str, object]:
        return {
            "delta": str(self.delta),
            "D": self.D,
            "M": self.M,
            "epsilon": str(self.epsilon),
            "T": str(self.T),
            "k": self.k,
            "m": self.m,
            "b": self.b,
            "A": str(self.A),
        }
