"""
MCP 도구 모듈 (server.py에서 자동으로 로드됩니다)
"""
