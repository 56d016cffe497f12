#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
自定义异常模块
定义系统中使用的各种异常类
"""


class DualmonException(Exception):
    """仿真系统基础异常"""

    def __init__(self, message: str, code: str = "SYSTEM_ERROR"):
        self.message = message
        self.code = code
        super().__init__(self.message)


# ==================== 参数与输入异常 ====================

class InvalidParameterException(DualmonException):
    """无效的电路或数值参数"""

    def __init__(self, name: str, reason: str):
        message = f"参数 {name} 无效: {reason}"
        super().__init__(message, "INVALID_PARAMETER")
        self.name = name


class InvalidInputException(DualmonException):
    """无效输入（NaN / Inf 等）"""

    def __init__(self, reason: str):
        super().__init__(f"无效输入: {reason}", "INVALID_INPUT")


class UnsupportedBandException(DualmonException):
    """不支持的能带编号"""

    def __init__(self, band: int):
        message = f"能带 m={band} 没有闭式重整化公式，仅支持 m ∈ {{0, 1}}"
        super().__init__(message, "UNSUPPORTED_BAND")
        self.band = band


class DimensionMismatchException(DualmonException):
    """算符维数不匹配"""

    def __init__(self, expected: int, actual: int):
        message = f"维数不匹配: 期望 {expected}，实际 {actual}"
        super().__init__(message, "DIMENSION_MISMATCH")


class NonHermitianOperatorException(DualmonException):
    """非厄米算符"""

    def __init__(self, deviation: float):
        message = f"算符不是厄米的: ‖M − M†‖∞ = {deviation:.3e}"
        super().__init__(message, "NON_HERMITIAN")
        self.deviation = deviation


# ==================== 数值异常 ====================

class NumericalException(DualmonException):
    """数值计算异常"""

    def __init__(self, message: str, code: str = "NUMERICAL_ERROR"):
        super().__init__(message, code)


class ConvergenceException(NumericalException):
    """收敛失败"""

    def __init__(self, what: str, drift: float, tol: float):
        message = f"{what} 未收敛: 偏差 {drift:.3e} > 容差 {tol:.3e}"
        super().__init__(message, "CONVERGENCE_ERROR")
        self.drift = drift
        self.tol = tol


class NonUniqueSteadyStateException(NumericalException):
    """稳态不唯一"""

    def __init__(self, null_dim: int):
        message = f"Liouvillian 零空间维数为 {null_dim}，稳态不唯一"
        super().__init__(message, "STEADY_STATE_ERROR")
        self.null_dim = null_dim


# ==================== 配置异常 ====================

class ConfigurationException(DualmonException):
    """配置异常"""

    def __init__(self, message: str):
        super().__init__(message, "CONFIGURATION_ERROR")


class MissingConfigException(ConfigurationException):
    """缺少配置异常"""

    def __init__(self, config_key: str):
        message = f"缺少必要配置: {config_key}"
        super().__init__(message)


class InvalidConfigException(ConfigurationException):
    """无效配置异常"""

    def __init__(self, config_key: str, reason: str):
        message = f"配置 {config_key} 无效: {reason}"
        super().__init__(message)


# ==================== 输出异常 ====================

class OutputException(DualmonException):
    """结果写出异常"""

    def __init__(self, path: str, reason: str):
        message = f"无法写出 {path}: {reason}"
        super().__init__(message, "OUTPUT_ERROR")


# ==================== 工具函数 ====================

EXIT_OK = 0
EXIT_OUTPUT_ERROR = 1
EXIT_CONFIG_ERROR = 2
EXIT_CONVERGENCE_ERROR = 3


def handle_exception(exception: Exception) -> tuple[str, int]:
    """
    处理异常，返回单行错误信息和进程退出码

    Args:
        exception: 异常对象

    Returns:
        (错误信息, 退出码)
    """
    if isinstance(exception, NumericalException):
        code = EXIT_CONVERGENCE_ERROR
    elif isinstance(exception, OutputException):
        code = EXIT_OUTPUT_ERROR
    elif isinstance(exception, DualmonException):
        code = EXIT_CONFIG_ERROR
    else:
        return f"未知错误: {str(exception)}".replace("\n", " "), EXIT_OUTPUT_ERROR
    return f"[{exception.code}] {exception.message}".replace("\n", " "), code
