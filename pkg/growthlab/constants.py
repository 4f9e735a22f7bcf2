import os

# 열거 상한 (정규형 원소 개수, 환경변수 GROWTHLAB_CAP으로 오버라이드 가능)
DEFAULT_CAP = int(os.getenv("GROWTHLAB_CAP", "10000000"))

# S^k 같은 중간 집합의 상한
DEFAULT_POWER_CAP = int(os.getenv("GROWTHLAB_POWER_CAP", "200000"))

# 모든 난수 샘플링의 기본 시드
DEFAULT_SEED = int(os.getenv("GROWTHLAB_SEED", "20240601"))

# 균등 WPD 상수 D와 S^M의 M
DEFAULT_D = int(os.getenv("GROWTHLAB_D", "1"))
DEFAULT_M = int(os.getenv("GROWTHLAB_M", "2"))

DEFAULT_SHARDS = int(os.getenv("GROWTHLAB_SHARDS", "1"))

# BFS 도중 RSS가 이 값을 넘으면 잘린 테이블로 끝낸다
MEMORY_LIMIT_MB = float(os.getenv("GROWTHLAB_MEMORY_LIMIT_MB", "4096"))

# 핑퐁 검사 깊이 (자유쌍 / 하한 감사)
PING_PONG_DEPTH = int(os.getenv("GROWTHLAB_PING_PONG_DEPTH", "8"))
AUDIT_PING_PONG_DEPTH = int(os.getenv("GROWTHLAB_AUDIT_DEPTH", "4"))

# 분리자 소거 성질 (iii) 검사에 쓰는 공의 반지름
SMALL_CANCELLATION_RADIUS = int(os.getenv("GROWTHLAB_SMALL_CANCELLATION_RADIUS", "3"))

# 원시성 데스크 체크 공의 반지름
PRIMITIVITY_RADIUS = int(os.getenv("GROWTHLAB_PRIMITIVITY_RADIUS", "3"))

LOG_LEVEL = os.getenv("GROWTHLAB_LOG_LEVEL", "INFO")

RESULT_SCHEMA_VERSION = 1

# 결과 레코드에서 단어를 그대로 적는 최대 길이 (넘으면 요약)
WORD_ECHO_LIMIT = 64

FLOAT_TOLERANCE = 1e-9
