"""Portable elementary math kept bit-reproducible across implementations.

The engine's relocation pipeline must replay to identical positions in any
runtime that provides IEEE-754 doubles.  Library exp() implementations
differ in the last ulp between platforms, so the Gaussian kernel uses this
fixed-sequence evaluation instead: every step is a single correctly-rounded
double operation, which all conforming runtimes agree on bit-for-bit.
"""

from __future__ import annotations

import numpy as np

_INV_LN2 = 1.4426950408889634074
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10

# 1/i! for i = 13 .. 2; Horner order is part of the contract.
_TAYLOR = (
    1.6059043836821613e-10,
    2.08767569878681e-09,
    2.505210838544172e-08,
    2.7557319223985893e-07,
    2.755731922398589e-06,
    2.48015873015873e-05,
    0.0001984126984126984,
    0.001388888888888889,
    0.008333333333333333,
    0.041666666666666664,
    0.16666666666666666,
    0.5,
)


def exp_neg(x: np.ndarray) -> np.ndarray:
    """exp(x) for x <= 0, evaluated with a fixed operation sequence.

    Accurate to ~1 ulp; values below exp(-708) flush to zero to stay out
    of the subnormal range where scaling strategies could disagree.
    """
    x = np.asarray(x, dtype=np.float64)
    k = np.floor(x * _INV_LN2 + 0.5)
    r = (x - k * _LN2_HI) - k * _LN2_LO
    acc = np.full_like(r, _TAYLOR[0])
    for c in _TAYLOR[1:]:
        acc = acc * r + c
    acc = acc * r + 1.0
    acc = acc * r + 1.0
    out = np.ldexp(acc, k.astype(np.int64))
    return np.where(x < -708.0, 0.0, out)
