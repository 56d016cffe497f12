#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
网格扫描的并行执行
各格点相互独立，结果按输入顺序返回，线程数不影响输出
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from config.settings import settings

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Sequence[T],
    threads: Optional[int] = None,
    desc: str = "",
    show_progress: Optional[bool] = None,
) -> List[R]:
    """
    按顺序对 items 逐个调用 func

    Args:
        func: 单点计算函数（只读共享输入）
        items: 输入序列
        threads: 线程数，默认 settings.THREADS
        desc: 进度条标题
        show_progress: 是否显示 tqdm 进度条，默认 settings.SHOW_PROGRESS

    Returns:
        与 items 同序的结果列表
    """
    threads = settings.THREADS if threads is None else max(1, int(threads))
    show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress

    if threads == 1:
        iterator = map(func, items)
        if show_progress:
            iterator = tqdm(iterator, total=len(items), desc=desc)
        return list(iterator)

    with ThreadPoolExecutor(max_workers=threads) as executor:
        iterator = executor.map(func, items)
        if show_progress:
            iterator = tqdm(iterator, total=len(items), desc=desc)
        return list(iterator)
