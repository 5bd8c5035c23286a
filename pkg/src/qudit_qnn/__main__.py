"""
명령행 진입점

python -m qudit_qnn 으로 실행 시 사용됩니다.
"""
from qudit_qnn.cli import main

if __name__ == "__main__":
    main()
