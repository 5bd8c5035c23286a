"""
단일 qudit 양자 신경망 다중 클래스 분류기

명령행 도구는 qudit_qnn.cli, MCP 서버는 qudit_qnn.server 에 있습니다.
"""

__version__ = "0.1.0"

__all__: list[str] = ["__version__"]
