"""Deterministic parallel map over immutable inputs.

Workers only read shared immutable state and results are collected in
input order, so any thread count produces identical output.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

A = TypeVar("A")
B = TypeVar("B")


def map_ordered(fn: Callable[[A], B], items: Iterable[A],
                threads: int = 1) -> list[B]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))
