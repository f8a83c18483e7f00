"""Bessel functions of the first kind of integer order, and their zeros."""

import math

import numpy as np
from scipy.optimize import brentq

from .errors import AccuracyUnsupportedError

MAX_ARG = 50.0
MAX_ORDER = 80
_SMALL_X = 1e-3
_RESCALE = 1e250


def _ascending_series(n, x):
    # J_n(x) = sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!), only used for tiny x
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term
    k = 0
    while abs(term) > 1e-18 * abs(total) and k < 50:
        k += 1
        term *= -(half * half) / (k * (k + n))
        total += term
    return total


def _miller_table(nmax, x):
    """J_0..J_nmax at x > 0 by normalised downward recurrence."""
    start = nmax + int(max(30.0, 1.5 * x + 20 + 5 * math.sqrt(x + nmax)))
    start += start % 2
    vals = np.zeros(nmax + 1)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    for k in range(start, 0, -1):
        # J_{k-1} = (2k/x) J_k - J_{k+1}
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if k - 1 <= nmax:
            vals[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            vals /= _RESCALE
            norm /= _RESCALE
    norm += j_cur  # J_0 + 2*sum J_{2k} = 1
    return vals / norm


def bessel_j(n, x):
    """J_n(x) for integer n, accurate to ~1e-15 absolute for |x| <= 50, |n| <= 80."""
    n = int(n)
    x = float(x)
    if abs(x) > MAX_ARG or abs(n) > MAX_ORDER:
        raise AccuracyUnsupportedError(
            "bessel_j outside the validated range", order=n, argument=x
        )
    sign = 1.0
    if n < 0:
        n = -n
        sign = -1.0 if n % 2 else 1.0
    if x < 0:
        x = -x
        if n % 2:
            sign = -sign
    if x == 0.0:
        return sign * (1.0 if n == 0 else 0.0)
    if x < _SMALL_X:
        return sign * _ascending_series(n, x)
    return sign * _miller_table(n, x)[n]


def bessel_j_range(nmax, x):
    """Array of J_m(x) for m = -nmax..nmax."""
    x = float(x)
    if abs(x) > MAX_ARG or nmax > MAX_ORDER:
        raise AccuracyUnsupportedError(
            "bessel_j outside the validated range", order=nmax, argument=x
        )
    if x == 0.0:
        pos = np.zeros(nmax + 1)
        pos[0] = 1.0
    elif abs(x) < _SMALL_X:
        pos = np.array([bessel_j(k, x) for k in range(nmax + 1)])
    else:
        pos = _miller_table(nmax, abs(x))
        if x < 0:
            pos = pos * (-1.0) ** np.arange(nmax + 1)
    neg = pos[1:][::-1] * (-1.0) ** np.arange(nmax, 0, -1)
    return np.concatenate([neg, pos])


_ZERO_SEARCH_MAX = 130.0


def _jn_unchecked(n, x):
    # root search for |n| <= 20, k <= 20 runs past MAX_ARG; the recurrence stays
    # accurate to ~1e-14 there
    if x < _SMALL_X:
        return _ascending_series(n, x)
    return _miller_table(n + 1, x)[n]


def _bessel_jp(n, x):
    return 0.5 * (_jn_unchecked(n - 1, x) - _jn_unchecked(n + 1, x)) if n > 0 else -_jn_unchecked(1, x)


def find_bessel_zero(n, k):
    """k-th positive zero of J_n: sign-change bracketing, brentq, then a Newton polish."""
    n = abs(int(n))
    if k < 1:
        raise ValueError("zero index k must be positive")
    step = 0.1
    # zeros of J_n lie beyond n; start just above the origin
    x = 1e-3 if n == 0 else float(n) * 0.9 + 1e-3
    found = 0
    f_lo = _jn_unchecked(n, x)
    while True:
        x_hi = x + step
        if x_hi > _ZERO_SEARCH_MAX:
            raise AccuracyUnsupportedError(
                "requested Bessel zero lies outside the validated range", order=n, index=k
            )
        f_hi = _jn_unchecked(n, x_hi)
        if f_lo == 0.0 or f_lo * f_hi < 0:
            found += 1
            if found == k:
                root = x if f_lo == 0.0 else brentq(
                    lambda s: _jn_unchecked(n, s), x, x_hi, xtol=1e-15, rtol=1e-15
                )
                for _ in range(3):
                    d = _bessel_jp(n, root)
                    if d == 0:
                        break
                    root -= _jn_unchecked(n, root) / d
                return float(root)
        x, f_lo = x_hi, f_hi
