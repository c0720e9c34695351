"""
依赖注入模块
命令行入口共享同一个验证服务实例
"""
from typing import Optional

from su11cg.services.harness import VerificationService


# 使用单例模式管理验证服务实例
_verification_service_instance: Optional[VerificationService] = None


def get_verification_service() -> VerificationService:
    """获取验证服务实例，首次调用时创建"""
    global _verification_service_instance
    if _verification_service_instance is None:
        _verification_service_instance = VerificationService()
    return _verification_service_instance


def reset_verification_service():
    """丢弃当前实例（测试用）"""
    global _verification_service_instance
    _verification_service_instance = None
