"""
自定义异常类
"""


class SU11Error(Exception):
    """库基础异常"""
    pass


class DomainError(SU11Error):
    """参数不在函数定义域内"""
    pass


class PoleError(DomainError):
    """Gamma函数极点"""
    pass


class DegenerateDenominator(DomainError):
    """超几何级数分母参数为非正整数"""
    pass


class UnsupportedArgument(DomainError):
    """参数超出实现支持的范围"""
    pass


class SeriesRadiusError(UnsupportedArgument):
    """变换后级数自变量仍超出收敛半径阈值，或落在分支割线上"""
    pass


class InvalidRegime(DomainError):
    """Meixner函数参数不属于任何酉区间"""
    pass


class WindowError(DomainError):
    """截断窗口偏移量对该表示系列无效"""
    pass


class BoundaryError(DomainError):
    """张量积参数过于接近分解情形边界"""
    pass


class AnnulusError(DomainError):
    """Poisson核参数t过于接近收敛圆环边界"""
    pass


class NumericalError(SU11Error):
    """数值计算失败"""
    pass


class ConvergenceError(NumericalError):
    """级数在最大项数内未收敛"""
    pass


class TailTooLarge(NumericalError):
    """积分截断尾部估计超过容差"""
    pass


class ConfigError(SU11Error):
    """配置错误异常"""
    pass


class UnknownIdentityError(SU11Error):
    """未注册的恒等式"""
    pass


class UnknownFunctionError(SU11Error):
    """未注册的求值函数"""
    pass
