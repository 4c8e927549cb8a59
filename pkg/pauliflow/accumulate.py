"""
Copyright (c) 2024 The pauliflow authors.

Order-independent floating point sums.
"""
import math
from typing import Dict, Iterable, List, Mapping


class ExactSum:
    """Running sum kept as non-overlapping partials (Shewchuk).

    The partials represent the exact real sum of everything added, so the
    rounded `value` does not depend on the order of `add` / `merge` calls.
    """

    __slots__ = ("_partials",)

    def __init__(self, values: Iterable[float] = ()) -> None:
        self._partials: List[float] = []
        for v in values:
            self.add(v)

    def add(self, x: float) -> None:
        partials = self._partials
        i = 0
        for y in partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                partials[i] = lo
                i += 1
            x = hi
        partials[i:] = [x]

    def merge(self, other: "ExactSum") -> "ExactSum":
        for p in other._partials:
            self.add(p)
        return self

    @property
    def value(self) -> float:
        return math.fsum(self._partials)

    def __float__(self) -> float:
        return self.value


def merge_sums(dst: Dict[int, ExactSum], src: Mapping[int, ExactSum]) -> Dict[int, ExactSum]:
    """Key-wise merge of `src` into `dst`."""
    for key, acc in src.items():
        dst.setdefault(key, ExactSum()).merge(acc)
    return dst
