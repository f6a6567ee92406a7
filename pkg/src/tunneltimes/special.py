"""Stable even kernels used by the amplitude and phase-time formulas.

All functions take w = z**2 instead of z. They are even in z, so they are
single-valued in w and no square-root branch ever has to be chosen by the
caller: negative (or complex) w simply continues sinh into sin. Series
expansions take over near w = 0 where the closed forms lose digits.
"""

from __future__ import annotations

import numpy as np

_SMALL = 0.0625


def _eval(w, series_coeffs, closed):
    w = np.asarray(w)
    scalar = w.ndim == 0
    wc = np.atleast_1d(w).astype(complex)
    out = np.empty_like(wc)
    small = np.abs(wc) < _SMALL
    if np.any(small):
        ws = wc[small]
        acc = np.zeros_like(ws)
        for c in reversed(series_coeffs):
            acc = acc * ws + c
        out[small] = acc
    if np.any(~small):
        out[~small] = closed(wc[~small])
    if np.isrealobj(w):
        out = out.real
    return out[0] if scalar else out


def sinhc_w(w):
    """sinh(z)/z as a function of w = z**2 (equals sin(y)/y for w = -y**2)."""
    return _eval(
        w,
        [1.0, 1 / 6.0, 1 / 120.0, 1 / 5040.0, 1 / 362880.0, 1 / 39916800.0],
        lambda ws: np.sinh(np.sqrt(ws)) / np.sqrt(ws),
    )


def cosh_w(w):
    """cosh(z) as a function of w = z**2."""
    return _eval(
        w,
        [1.0, 1 / 2.0, 1 / 24.0, 1 / 720.0, 1 / 40320.0, 1 / 3628800.0],
        lambda ws: np.cosh(np.sqrt(ws)),
    )


def psi_w(w):
    """(sinh(z)/z - 1)/z**2 as a function of w = z**2; psi_w(0) = 1/6."""
    return _eval(
        w,
        [1 / 6.0, 1 / 120.0, 1 / 5040.0, 1 / 362880.0, 1 / 39916800.0],
        lambda ws: (np.sinh(np.sqrt(ws)) / np.sqrt(ws) - 1.0) / ws,
    )


def chi_w(w):
    """(cosh(z) - sinh(z)/z)/z**2 as a function of w = z**2; chi_w(0) = 1/3."""
    return _eval(
        w,
        [1 / 3.0, 1 / 30.0, 1 / 840.0, 1 / 45360.0, 1 / 3991680.0, 12 / 6227020800.0],
        lambda ws: (np.cosh(np.sqrt(ws)) - np.sinh(np.sqrt(ws)) / np.sqrt(ws)) / ws,
    )
