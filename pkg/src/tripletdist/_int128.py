"""
Unsigned 128-bit accumulation inside numba kernels.

A count is carried as a pair of uint64 words ``(hi, lo)``.  Terms are
products of non-negative int64 factors; with ``wide=False`` the caller
promises every product fits in 63 bits, otherwise the product is formed
from 32-bit limbs.
"""

import numpy as np
from numba import njit

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ONE = np.uint64(1)

# Beyond this many leaves a single term such as C(a, 2) * b may exceed 2**63.
WIDE_THRESHOLD = 2_097_152


@njit(cache=True, inline="always")
def add(hi, lo, v):
    nlo = lo + v
    if nlo < lo:
        hi = hi + _ONE
    return hi, nlo


@njit(cache=True, inline="always")
def mul_add(hi, lo, a, b, wide):
    """Return ``(hi, lo) + a * b`` for int64 ``a, b >= 0``."""
    if not wide:
        return add(hi, lo, np.uint64(a * b))
    ua = np.uint64(a)
    ub = np.uint64(b)
    a0 = ua & _M32
    a1 = ua >> _S32
    b0 = ub & _M32
    b1 = ub >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> _S32) + (p01 & _M32) + (p10 & _M32)
    plo = (p00 & _M32) | (mid << _S32)
    phi = p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)
    hi, lo = add(hi, lo, plo)
    return hi + phi, lo


@njit(cache=True, inline="always")
def choose2(x):
    return x * (x - 1) // 2


def to_int(hi, lo) -> int:
    return (int(hi) << 64) | int(lo)
