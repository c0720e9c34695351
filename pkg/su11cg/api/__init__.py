"""命令行接口层"""
