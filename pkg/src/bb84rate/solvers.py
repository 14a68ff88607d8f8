"""One-dimensional bisection and golden-section search."""

from __future__ import annotations

import math
from typing import Callable

from .config import TOL
from .errors import ConvergenceError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float, width: float = TOL.bisection_width,
           max_iter: int = 200) -> float:
    """Root of ``f`` in ``[lo, hi]``; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(max_iter):
        if hi - lo <= width:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not reach width {width} in {max_iter} steps")


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               width: float = TOL.golden_width, max_iter: int = 200) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``.  Returns ``(x, f(x))``.

    The endpoints are compared against the interior result so that a maximum
    sitting on the boundary is not lost.
    """
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= width:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
    else:
        raise ConvergenceError(f"golden-section search did not reach width {width}")
    # ties go to the smaller abscissa
    best = max([(f(lo), lo), (f1, x1), (f2, x2), (f(hi), hi)], key=lambda t: (t[0], -t[1]))
    return best[1], best[0]
