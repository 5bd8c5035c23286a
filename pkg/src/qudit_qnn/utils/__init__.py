"""
공통 유틸리티 (캐시, 다운로드, 포맷팅, 참조표, MCP 컨텍스트)
"""
