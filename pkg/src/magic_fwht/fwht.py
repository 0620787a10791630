"""Unnormalized Walsh-Hadamard transform over F_2^N.

``F(z) = sum_b (-1)^(z.b) f(b)``, i.e. ``(sqrt(2) H)^{(x)N}`` applied to the
length-``2^N`` vector ``f``. Applying it twice returns ``2^N f``.
"""
from __future__ import annotations

import numpy as np
from numba import njit


def log2_length(n: int) -> int:
    """Return ``k`` with ``n == 2**k`` or raise ``ValueError``."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    return n.bit_length() - 1


@njit(cache=True, nogil=True)
def fwht_kernel(values):
    # lowest bit first; stage order does not change the result
    n = values.shape[0]
    h = 1
    while h < n:
        for start in range(0, n, 2 * h):
            for j in range(start, start + h):
                u = values[j]
                v = values[j + h]
                values[j] = u + v
                values[j + h] = u - v
        h *= 2


def fwht_inplace(values: np.ndarray) -> np.ndarray:
    """Transform a 1-D complex128 or float64 array in place and return it."""
    if values.ndim != 1:
        raise ValueError(f"expected a 1-D buffer, got shape {values.shape}")
    log2_length(values.shape[0])
    if values.dtype not in (np.complex128, np.float64) or not values.flags.c_contiguous:
        raise ValueError("buffer must be a contiguous complex128 or float64 array")
    fwht_kernel(values)
    return values


def fwht(values) -> np.ndarray:
    """Out-of-place convenience wrapper around :func:`fwht_inplace`."""
    arr = np.array(values, dtype=np.complex128)
    return fwht_inplace(arr.reshape(-1))


def parity_table(num_bits: int) -> np.ndarray:
    """``parity[k] = popcount(k) mod 2`` for ``0 <= k < 2**num_bits``."""
    idx = np.arange(1 << num_bits, dtype=np.int64)
    par = np.zeros(idx.size, dtype=np.int64)
    for k in range(num_bits):
        par ^= (idx >> k) & 1
    return par.astype(np.uint8)


def walsh_matrix(num_bits: int) -> np.ndarray:
    """Dense ``(-1)^(z.b)`` sign matrix, row ``z``, column ``b``."""
    idx = np.arange(1 << num_bits, dtype=np.int64)
    par = parity_table(num_bits)
    return 1.0 - 2.0 * par[np.bitwise_and.outer(idx, idx)]


def fwht_naive(values) -> np.ndarray:
    """Explicit ``O(4^N)`` double sum; the test oracle for :func:`fwht_inplace`."""
    arr = np.asarray(values, dtype=np.complex128).reshape(-1)
    n = log2_length(arr.size)
    signs = walsh_matrix(n)
    out = np.empty_like(arr)
    for z in range(arr.size):
        out[z] = np.sum(signs[z] * arr)
    return out
