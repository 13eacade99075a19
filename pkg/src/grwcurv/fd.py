"""Second-order central differences on uniform grids.

Every stencil returns an array of the input's shape whose outer layer (one node
per differentiated axis) is NaN, so that composing stencils marks exactly the
nodes that a result is not defined on.
"""
from __future__ import annotations

import numpy as np


def _sl(ndim, axis, s):
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def d1(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.full(f.shape, np.nan)
    nd = f.ndim
    out[_sl(nd, axis, slice(1, -1))] = (
        f[_sl(nd, axis, slice(2, None))] - f[_sl(nd, axis, slice(None, -2))]
    ) / (2.0 * h)
    return out


def d2(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.full(f.shape, np.nan)
    nd = f.ndim
    out[_sl(nd, axis, slice(1, -1))] = (
        f[_sl(nd, axis, slice(2, None))]
        - 2.0 * f[_sl(nd, axis, slice(1, -1))]
        + f[_sl(nd, axis, slice(None, -2))]
    ) / (h * h)
    return out


def gradient(f: np.ndarray, spacing) -> np.ndarray:
    """Stack of first derivatives, shape ``f.shape + (n,)``."""
    return np.stack([d1(f, i, h) for i, h in enumerate(spacing)], axis=-1)


def hessian(f: np.ndarray, spacing) -> np.ndarray:
    """Coordinate second derivatives, shape ``f.shape + (n, n)``.

    Pure terms use the 3-point stencil, mixed terms the 4-point cross stencil
    (the composition of two central first differences).
    """
    n = f.ndim
    out = np.empty(f.shape + (n, n))
    for i in range(n):
        out[..., i, i] = d2(f, i, spacing[i])
        di = d1(f, i, spacing[i])
        for j in range(i + 1, n):
            out[..., i, j] = out[..., j, i] = d1(di, j, spacing[j])
    return out


def field_gradient(F: np.ndarray, spacing) -> np.ndarray:
    """Derivatives of a tensor-valued node field ``(grid..., *comp)``; the new axis is appended last."""
    n = len(spacing)
    return np.stack([d1(F, i, spacing[i]) for i in range(n)], axis=-1)
