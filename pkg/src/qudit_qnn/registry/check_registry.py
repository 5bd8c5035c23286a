"""
자기 점검 레지스트리
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional


@dataclass
class CheckInfo:
    """점검 정보를 담는 데이터클래스"""
    name: str
    korean_name: str
    description: str
    runner: Callable[..., Any]
    parameters: Dict[str, Any] = field(default_factory=dict)
    accepts_seed: bool = True
    linked_checks: List[str] = field(default_factory=list)


class CheckRegistry:
    """자기 점검 레지스트리 클래스 (등록 순서 = 실행 순서)"""

    def __init__(self):
        self.checks: Dict[str, CheckInfo] = {}

    def register_check(self,
                       name: str,
                       korean_name: str,
                       description: str,
                       runner: Callable[..., Any],
                       parameters: Optional[Dict[str, Any]] = None,
                       accepts_seed: bool = True,
                       linked_checks: Optional[List[str]] = None) -> None:
        """점검을 레지스트리에 등록"""
        self.checks[name] = CheckInfo(
            name=name,
            korean_name=korean_name,
            description=description,
            runner=runner,
            parameters=parameters or {},
            accepts_seed=accepts_seed,
            linked_checks=linked_checks or [],
        )

    def get_check(self, name: str) -> Optional[CheckInfo]:
        """점검 정보 조회"""
        return self.checks.get(name)

    def get_all_checks(self) -> Dict[str, CheckInfo]:
        """모든 점검 정보 조회"""
        return self.checks

    def get_linked_checks(self, name: str) -> List[str]:
        """연관 점검 목록 조회"""
        check = self.get_check(name)
        return check.linked_checks if check else []
