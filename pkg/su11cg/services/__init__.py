"""数值计算服务层"""
