"""Numpy fallback kernel for the d^j(pi/2) edge-seeded recursion.

Row i holds m = j - i (descending); column i' holds m' = j - i'. For each row
the three-term recurrence in m' runs from the edge column m' = j (where the
true entry is 2^-j * sqrt(C(2j, j+m)) > 0) down to m' = 0 (or 1/2):

    d(m, m'-1) = [-2 m d(m, m') - c+(m') d(m, m'+1)] / c-(m'),
    c+(m') = sqrt((j-m')(j+m'+1)),  c-(m') = sqrt((j+m')(j-m'+1)).

The march from the edge into the oscillatory zone follows the growing
solution, so it is the stable direction; the decaying far side is never
visited - columns m' < 0 come from d(m, -m') = (-1)^{j+m} d(m, m'). Rows are
seeded with 1.0 and fixed up at the end by exact row normalization, which
removes the (possibly sub-denormal) true seed scale entirely. Intermediate
growth is kept in range by occasional power-of-ten rescaling; entries flushed
to zero that way are below double precision relative to the row maximum.
"""

from __future__ import annotations

import numpy as np

_CEIL = 1e120
_SHRINK = 1e-140
_CHECK_EVERY = 4


def dmatrix_pi_half(two_j: int) -> np.ndarray:
    """Full (two_j+1) x (two_j+1) matrix of d^j_{m m'}(pi/2), m and m' descending."""
    n = two_j + 1
    if n == 1:
        return np.ones((1, 1))
    ncols = (n + 1) // 2
    half = np.empty((n, ncols))
    m = (two_j - 2.0 * np.arange(n)) / 2.0
    j = two_j / 2.0
    prev = np.zeros(n)
    curr = np.ones(n)
    half[:, 0] = curr
    for ip in range(1, ncols):
        mp = j - (ip - 1)
        cplus = np.sqrt((j - mp) * (j + mp + 1.0))
        cminus = np.sqrt((j + mp) * (j - mp + 1.0))
        nxt = (-2.0 * m * curr - cplus * prev) / cminus
        half[:, ip] = nxt
        prev, curr = curr, nxt
        if ip % _CHECK_EVERY == 0:
            mask = np.abs(curr) > _CEIL
            if mask.any():
                half[mask, : ip + 1] *= _SHRINK
                prev = prev.copy()
                curr = curr.copy()
                prev[mask] *= _SHRINK
                curr[mask] *= _SHRINK
    if two_j % 2 == 0:
        norm2 = 2.0 * (half[:, :-1] ** 2).sum(axis=1) + half[:, -1] ** 2
    else:
        norm2 = 2.0 * (half**2).sum(axis=1)
    half /= np.sqrt(norm2)[:, None]
    out = np.empty((n, n))
    out[:, :ncols] = half
    signs = np.where((two_j - np.arange(n)) % 2 == 0, 1.0, -1.0)
    for ip in range(ncols):
        tgt = n - 1 - ip
        if tgt != ip:
            out[:, tgt] = signs * out[:, ip]
    return out
