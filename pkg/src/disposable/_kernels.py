"""Compiled inner loops for square detection and the binary backtracking search.

All kernels take ``int8``/``int64`` numpy arrays and report squares as a
``(start, half)`` pair, with ``(-1, -1)`` meaning "none found".  When several
squares qualify the lexicographically least ``(start, half)`` is reported.
"""

import numpy as np
from numba import njit

NONE = (-1, -1)


@njit(cache=True, nogil=True)
def z_function(s):
    n = s.shape[0]
    z = np.zeros(n, dtype=np.int64)
    left = 0
    right = 0
    for i in range(1, n):
        if i < right:
            z[i] = min(right - i, z[i - left])
        while i + z[i] < n and s[z[i]] == s[i + z[i]]:
            z[i] += 1
        if i + z[i] > right:
            left = i
            right = i + z[i]
    return z


@njit(cache=True, nogil=True)
def _get(z, i):
    if 0 <= i and i < z.shape[0]:
        return z[i]
    return 0


@njit(cache=True, nogil=True)
def _better(pos, half, best_pos, best_half):
    if best_pos < 0:
        return True
    if pos < best_pos:
        return True
    return pos == best_pos and half < best_half


@njit(cache=True, nogil=True)
def crossing_min(s, lo, mid, hi, max_half):
    """Least square of ``s[lo:hi]`` containing both ``mid - 1`` and ``mid``.

    Main-Lorentz crossing step: squares are classified by whether their
    centre lies left or right of ``mid`` and found through four Z-arrays.
    """
    nu = mid - lo
    nv = hi - mid
    best_pos = -1
    best_half = -1
    if nu <= 0 or nv <= 0:
        return best_pos, best_half
    n = nu + nv
    sentinel = np.int8(-1)
    u = s[lo:mid]
    v = s[mid:hi]
    ru = u[::-1].copy()
    rv = v[::-1].copy()

    z1 = z_function(ru)
    t2 = np.empty(nv + 1 + nu, dtype=s.dtype)
    t2[:nv] = v
    t2[nv] = sentinel
    t2[nv + 1:] = u
    z2 = z_function(t2)
    t3 = np.empty(nu + 1 + nv, dtype=s.dtype)
    t3[:nu] = ru
    t3[nu] = sentinel
    t3[nu + 1:] = rv
    z3 = z_function(t3)
    z4 = z_function(v.copy())

    for cntr in range(n):
        if cntr < nu:
            length = nu - cntr
            if length > max_half:
                continue
            k1 = _get(z1, nu - cntr)
            k2 = _get(z2, nv + 1 + cntr)
            left = True
        else:
            length = cntr - nu + 1
            if length > max_half:
                continue
            k1 = _get(z3, nu + 1 + nv - 1 - (cntr - nu))
            k2 = _get(z4, (cntr - nu) + 1)
            left = False
        if k1 + k2 < length:
            continue
        lo1 = max(1, length - k2)
        hi1 = min(length, k1)
        if left and hi1 == length:
            hi1 = length - 1
        if hi1 < lo1:
            continue
        # start position decreases as l1 grows, so the largest l1 is leftmost
        if left:
            pos = cntr - hi1
        else:
            pos = cntr - length - hi1 + 1
        pos += lo
        if _better(pos, length, best_pos, best_half):
            best_pos = pos
            best_half = length
    return best_pos, best_half


@njit(cache=True, nogil=True)
def main_lorentz_min(s, max_half):
    """Least square anywhere in ``s`` with half-length at most ``max_half``."""
    n = s.shape[0]
    best_pos = -1
    best_half = -1
    if n < 2 or max_half < 1:
        return best_pos, best_half
    stack_lo = np.empty(128, dtype=np.int64)
    stack_hi = np.empty(128, dtype=np.int64)
    top = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    top = 1
    reach = 2 * max_half
    while top > 0:
        top -= 1
        lo = stack_lo[top]
        hi = stack_hi[top]
        if hi - lo < 2:
            continue
        mid = lo + (hi - lo) // 2
        wlo = max(lo, mid - reach)
        whi = min(hi, mid + reach)
        pos, half = crossing_min(s, wlo, mid, whi, max_half)
        if pos >= 0 and _better(pos, half, best_pos, best_half):
            best_pos = pos
            best_half = half
        stack_lo[top] = lo
        stack_hi[top] = mid
        top += 1
        stack_lo[top] = mid
        stack_hi[top] = hi
        top += 1
    return best_pos, best_half


@njit(cache=True, nogil=True)
def _square_ending_here(w, n, allowed_flat, allowed_start, allowed_len):
    """True if ``w[:n]`` ends in a square not listed in the allowed table."""
    for h in range(1, n // 2 + 1):
        a = n - 2 * h
        is_square = True
        for t in range(h):
            if w[a + t] != w[a + h + t]:
                is_square = False
                break
        if not is_square:
            continue
        permitted = False
        for r in range(allowed_start.shape[0]):
            if allowed_len[r] != 2 * h:
                continue
            match = True
            off = allowed_start[r]
            for t in range(2 * h):
                if allowed_flat[off + t] != w[a + t]:
                    match = False
                    break
            if match:
                permitted = True
                break
        if not permitted:
            return True
    return False


@njit(cache=True, nogil=True)
def backtrack_extend(w, choice, length, target, floor, alphabet,
                     allowed_flat, allowed_start, allowed_len):
    """Depth-first search for the lexicographically least extension.

    ``w[:length]`` is the current stack and ``choice`` its letters' tried
    values.  Runs until ``length == target`` and returns the new length, or
    ``-1`` if the search would have to backtrack below ``floor``.
    """
    c = 0
    while length < target:
        placed = False
        while c < alphabet:
            w[length] = c
            if not _square_ending_here(w, length + 1, allowed_flat,
                                       allowed_start, allowed_len):
                choice[length] = c
                length += 1
                placed = True
                break
            c += 1
        if placed:
            c = 0
            continue
        if length <= floor:
            return -1
        length -= 1
        c = choice[length] + 1
    return length
