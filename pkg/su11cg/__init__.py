"""
su11cg - su(1,1) Clebsch-Gordan Special Function Library
su(1,1) 张量积分解相关特殊函数库与恒等式验证工具
"""

__version__ = "0.1.1"
