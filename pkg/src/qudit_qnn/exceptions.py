"""
qudit-qnn 예외 계층

모든 예외는 QuditQnnError를 상속합니다. 입력값 문제를 나타내는 예외는
ValueError도 함께 상속하므로 기존 `except ValueError` 코드와 호환됩니다.
"""


class QuditQnnError(Exception):
    """qudit-qnn 최상위 예외"""


# ===========================================
# 수학 코어 / 회로
# ===========================================

class InvalidTheta(QuditQnnError, ValueError):
    """ThetaVector 불변식 위반 (길이 != d-1, 비유한 값, d < 2)"""


class DegenerateParameter(QuditQnnError, ValueError):
    """|s_1 - 1| <= 1e-9 인 퇴화 지점. 행렬 경로 대신 closed form 경로를 사용해야 함"""


class SingularSolve(QuditQnnError):
    """선형 해법이 실패함 (반대칭이 아닌 입력의 신호)"""


class DimensionTooLarge(QuditQnnError, ValueError):
    """상태벡터 시뮬레이션 허용 차원(d <= 24) 초과"""


# ===========================================
# 특성 / SVM / 학습기
# ===========================================

class FeatureOverflow(QuditQnnError, OverflowError):
    """특성 개수가 플랫폼 정수 범위를 초과함"""


class NonFinite(QuditQnnError, ValueError):
    """NaN 또는 무한대 값 발견"""


class DimensionMismatch(QuditQnnError, ValueError):
    """배열 차원 불일치"""


class SingleClass(QuditQnnError, ValueError):
    """이진 SVM 문제에 한 가지 레이블만 존재함"""


class ClassMissing(QuditQnnError, ValueError):
    """학습 데이터에 d개 클래스 중 일부가 없음"""


class DegenerateStep(QuditQnnError):
    """순차 제거 단계의 생존 집합이 한 클래스만 포함함"""


class SchemaVersionMismatch(QuditQnnError):
    """모델 파일의 schema_version을 지원하지 않음"""


class CorruptFile(QuditQnnError):
    """모델 파일이 손상되었거나 필수 필드가 없음"""


# ===========================================
# 데이터 파이프라인
# ===========================================

class IdxFormatError(QuditQnnError, ValueError):
    """IDX 형식 오류"""


class BadMagic(IdxFormatError):
    """IDX 매직 넘버 불일치"""


class TruncatedPayload(IdxFormatError):
    """IDX 페이로드가 차원 곱보다 짧음"""


class DimensionOverflow(IdxFormatError):
    """IDX 차원 곱이 허용 범위를 초과함"""


class RankDeficient(QuditQnnError, ValueError):
    """양의 고유값이 k개보다 적음"""


class ClassTooSmall(QuditQnnError, ValueError):
    """어떤 클래스의 샘플 수가 fold 수 K보다 적음"""


class EmptySplit(QuditQnnError, ValueError):
    """평가 분할이 비어 있음"""


class DatasetNotFound(QuditQnnError, FileNotFoundError):
    """캐시 디렉토리에서 데이터셋 파일을 찾을 수 없음"""


class FetchError(QuditQnnError):
    """데이터셋 다운로드 실패"""


# ===========================================
# 설정
# ===========================================

class InvalidConfig(QuditQnnError, ValueError):
    """RunConfig 필드가 허용 범위를 벗어남"""
