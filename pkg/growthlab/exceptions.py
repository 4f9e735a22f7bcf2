"""전역 예외 처리 모듈"""
from typing import Any, Optional


class ToolkitException(Exception):
    """툴킷 기본 예외 클래스 (exit_code는 CLI 종료 코드)"""
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code
        self.message = message


class ValidationException(ToolkitException):
    """입력 검증 오류 (1)"""
    def __init__(self, message: str):
        super().__init__(exit_code=1, message=message)


class WordParseException(ValidationException):
    """단어 문자열 파싱 오류 (위치 포함)"""
    def __init__(self, text: str, position: int, reason: str):
        pointer = " " * position + "^"
        super().__init__(f"{reason} at position {position}\n  {text}\n  {pointer}")
        self.text = text
        self.position = position


class ConfigurationException(ToolkitException):
    """설정 파일/플래그 오류 (1)"""
    def __init__(self, message: str):
        super().__init__(exit_code=1, message=message)


class CapExceededException(ToolkitException):
    """열거 상한 초과 (1)"""
    def __init__(self, message: str, cap: int):
        super().__init__(exit_code=1, message=f"{message} (cap={cap})")
        self.cap = cap


class OutOfMemoryException(ToolkitException):
    """메모리 부족 오류 (1)"""
    def __init__(self, message: str):
        super().__init__(exit_code=1, message=message)


class InvariantViolation(ToolkitException):
    """검사한 부등식이 깨짐 (2)"""
    def __init__(self, name: str, lhs: Any, rhs: Any, witness: Optional[str] = None):
        detail = f"invariant '{name}' violated: lhs={lhs} rhs={rhs}"
        if witness:
            detail += f" witness={witness}"
        super().__init__(exit_code=2, message=detail)
        self.name = name
        self.lhs = lhs
        self.rhs = rhs
        self.witness = witness


class ConstructionException(ToolkitException):
    """구성 단계 실패 (2)"""
    def __init__(self, stage: str, message: str):
        super().__init__(exit_code=2, message=f"[{stage}] {message}")
        self.stage = stage


class GermComparisonException(ConstructionException):
    """빈 germ 또는 원점/스케일이 다른 germ 비교"""
    def __init__(self, message: str):
        super().__init__(stage="germ", message=message)
