"""
命令行启动脚本
"""
import sys

from su11cg.api.cli import main

if __name__ == "__main__":
    sys.exit(main())
