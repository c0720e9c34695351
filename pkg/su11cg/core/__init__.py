"""核心配置与数据模型"""
