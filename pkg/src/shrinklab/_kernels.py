"""Hot per-node kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time.  Set ``SHRINKLAB_NUMBA=0`` to force
the numpy path (also used automatically when numba is not importable).  Both
paths are kept importable as ``*_numpy`` / ``*_numba`` so tests can compare
them directly.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("SHRINKLAB_NUMBA", "1").lower() not in ("0", "false", "no", "off")


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, fastmath=False)(fn)
    return fn


# ---------------------------------------------------------------------------
# pointwise graph geometry: v, H, |A|^2 from Du and D^2u


def graph_pointwise_numpy(p: np.ndarray, q: np.ndarray):
    """``p``: (N, n) gradients, ``q``: (N, n, n) Hessians -> (v, H, |A|^2)."""
    n = p.shape[-1]
    v2 = 1.0 + np.einsum("ki,ki->k", p, p)
    v = np.sqrt(v2)
    ginv = np.eye(n)[None] - p[:, :, None] * p[:, None, :] / v2[:, None, None]
    H = -np.einsum("kij,kij->k", ginv, q) / v
    gq = np.einsum("kij,kjl->kil", ginv, q)
    A2 = np.einsum("kil,kli->k", gq, gq) / v2
    return v, H, A2


def _graph_pointwise_loops(p, q):
    N, n = p.shape
    v = np.empty(N)
    H = np.empty(N)
    A2 = np.empty(N)
    ginv = np.empty((n, n))
    gq = np.empty((n, n))
    for k in range(N):
        s = 1.0
        for i in range(n):
            s += p[k, i] * p[k, i]
        v[k] = np.sqrt(s)
        for i in range(n):
            for j in range(n):
                ginv[i, j] = (1.0 if i == j else 0.0) - p[k, i] * p[k, j] / s
        tr = 0.0
        for i in range(n):
            for j in range(n):
                tr += ginv[i, j] * q[k, i, j]
        H[k] = -tr / v[k]
        for i in range(n):
            for l in range(n):
                acc = 0.0
                for j in range(n):
                    acc += ginv[i, j] * q[k, j, l]
                gq[i, l] = acc
        acc = 0.0
        for i in range(n):
            for l in range(n):
                acc += gq[i, l] * gq[l, i]
        A2[k] = acc / s
    return v, H, A2


graph_pointwise_numba = _njit(_graph_pointwise_loops)


# ---------------------------------------------------------------------------
# graphical mean curvature flow: w_t = (delta_ij - w_i w_j / (1 + |Dw|^2)) w_ij


def mcf_rhs_numpy(w: np.ndarray, h: float) -> np.ndarray:
    """Centered-stencil speed at interior nodes; zero on the boundary."""
    n = w.ndim
    core = (slice(1, -1),) * n
    c = w[core]
    p = []
    q = [[None] * n for _ in range(n)]
    for i in range(n):
        plus = list(core)
        minus = list(core)
        plus[i] = slice(2, None)
        minus[i] = slice(None, -2)
        wp, wm = w[tuple(plus)], w[tuple(minus)]
        p.append((wp - wm) / (2.0 * h))
        q[i][i] = (wp - 2.0 * c + wm) / (h * h)
        for j in range(i + 1, n):
            idx = {}
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                s = list(core)
                s[i] = slice(2, None) if si > 0 else slice(None, -2)
                s[j] = slice(2, None) if sj > 0 else slice(None, -2)
                idx[si, sj] = w[tuple(s)]
            q[i][j] = (idx[1, 1] - idx[1, -1] - idx[-1, 1] + idx[-1, -1]) / (4.0 * h * h)
    v2 = 1.0
    for pi in p:
        v2 = v2 + pi * pi
    speed = np.zeros_like(c)
    for i in range(n):
        speed += q[i][i]
        for j in range(n):
            qij = q[i][j] if j >= i else q[j][i]
            speed -= p[i] * p[j] * qij / v2
    out = np.zeros_like(w)
    out[core] = speed
    return out


def _mcf_rhs_1d(w, h):
    m = w.shape[0]
    out = np.zeros(m)
    for k in range(1, m - 1):
        p = (w[k + 1] - w[k - 1]) / (2.0 * h)
        q = (w[k + 1] - 2.0 * w[k] + w[k - 1]) / (h * h)
        out[k] = q / (1.0 + p * p)
    return out


def _mcf_rhs_2d(w, h):
    m0, m1 = w.shape
    out = np.zeros((m0, m1))
    for a in range(1, m0 - 1):
        for b in range(1, m1 - 1):
            p0 = (w[a + 1, b] - w[a - 1, b]) / (2.0 * h)
            p1 = (w[a, b + 1] - w[a, b - 1]) / (2.0 * h)
            q00 = (w[a + 1, b] - 2.0 * w[a, b] + w[a - 1, b]) / (h * h)
            q11 = (w[a, b + 1] - 2.0 * w[a, b] + w[a, b - 1]) / (h * h)
            q01 = (w[a + 1, b + 1] - w[a + 1, b - 1] - w[a - 1, b + 1] + w[a - 1, b - 1]) / (4.0 * h * h)
            v2 = 1.0 + p0 * p0 + p1 * p1
            out[a, b] = q00 + q11 - (p0 * p0 * q00 + 2.0 * p0 * p1 * q01 + p1 * p1 * q11) / v2
    return out


def _mcf_rhs_3d(w, h):
    m0, m1, m2 = w.shape
    out = np.zeros((m0, m1, m2))
    p = np.empty(3)
    q = np.empty((3, 3))
    for a in range(1, m0 - 1):
        for b in range(1, m1 - 1):
            for c in range(1, m2 - 1):
                x = w[a, b, c]
                p[0] = (w[a + 1, b, c] - w[a - 1, b, c]) / (2.0 * h)
                p[1] = (w[a, b + 1, c] - w[a, b - 1, c]) / (2.0 * h)
                p[2] = (w[a, b, c + 1] - w[a, b, c - 1]) / (2.0 * h)
                q[0, 0] = (w[a + 1, b, c] - 2.0 * x + w[a - 1, b, c]) / (h * h)
                q[1, 1] = (w[a, b + 1, c] - 2.0 * x + w[a, b - 1, c]) / (h * h)
                q[2, 2] = (w[a, b, c + 1] - 2.0 * x + w[a, b, c - 1]) / (h * h)
                q[0, 1] = (w[a + 1, b + 1, c] - w[a + 1, b - 1, c] - w[a - 1, b + 1, c] + w[a - 1, b - 1, c]) / (
                    4.0 * h * h
                )
                q[0, 2] = (w[a + 1, b, c + 1] - w[a + 1, b, c - 1] - w[a - 1, b, c + 1] + w[a - 1, b, c - 1]) / (
                    4.0 * h * h
                )
                q[1, 2] = (w[a, b + 1, c + 1] - w[a, b + 1, c - 1] - w[a, b - 1, c + 1] + w[a, b - 1, c - 1]) / (
                    4.0 * h * h
                )
                q[1, 0] = q[0, 1]
                q[2, 0] = q[0, 2]
                q[2, 1] = q[1, 2]
                v2 = 1.0 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
                s = q[0, 0] + q[1, 1] + q[2, 2]
                for i in range(3):
                    for j in range(3):
                        s -= p[i] * p[j] * q[i, j] / v2
                out[a, b, c] = s
    return out


_mcf_rhs_1d_jit = _njit(_mcf_rhs_1d)
_mcf_rhs_2d_jit = _njit(_mcf_rhs_2d)
_mcf_rhs_3d_jit = _njit(_mcf_rhs_3d)


def mcf_rhs_numba(w: np.ndarray, h: float) -> np.ndarray:
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.ndim == 1:
        return _mcf_rhs_1d_jit(w, float(h))
    if w.ndim == 2:
        return _mcf_rhs_2d_jit(w, float(h))
    return _mcf_rhs_3d_jit(w, float(h))


def graph_pointwise(p: np.ndarray, q: np.ndarray):
    if USE_NUMBA:
        return graph_pointwise_numba(np.ascontiguousarray(p), np.ascontiguousarray(q))
    return graph_pointwise_numpy(p, q)


def mcf_rhs(w: np.ndarray, h: float) -> np.ndarray:
    if USE_NUMBA:
        return mcf_rhs_numba(w, h)
    return mcf_rhs_numpy(w, h)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
