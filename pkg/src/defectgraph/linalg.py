"""Dense small-matrix kernel shared by every other module.

Matrices are numpy arrays: ``complex128`` in float mode, ``object`` arrays of
:class:`~defectgraph.scalars.QQc` in exact mode.  Rank decisions use a
singular-value cutoff in float mode and exact Gaussian elimination in exact
mode; both sit behind the same helpers so callers never branch on the mode.
"""

from __future__ import annotations

import numpy as np

from .scalars import QQc, RunConfig

__all__ = [
    "NumericalRankError", "zeros", "eye", "asmatrix", "to_float", "matnorm",
    "idempotency_residual", "exact_rref", "rank", "solve", "inv",
    "image_basis", "kernel_basis",
]


class NumericalRankError(RuntimeError):
    """Raised when a float-mode rank decision has no well-separated
    singular-value gap at the requested cutoff."""


def zeros(cfg: RunConfig, shape):
    if cfg.exact:
        m = np.empty(shape, dtype=object)
        m[...] = QQc(0)
        return m
    return np.zeros(shape, dtype=np.complex128)


def eye(cfg: RunConfig, n: int):
    m = zeros(cfg, (n, n))
    for i in range(n):
        m[i, i] = cfg.one
    return m


def asmatrix(cfg: RunConfig, rows):
    m = np.array(rows, dtype=cfg.dtype)
    if cfg.exact:
        coerced = np.empty(m.shape, dtype=object)
        flat_in, flat_out = m.reshape(-1), coerced.reshape(-1)
        for i, x in enumerate(flat_in):
            flat_out[i] = QQc.coerce(x)
        return coerced
    return m


def to_float(mat) -> np.ndarray:
    if mat.dtype == object:
        out = np.zeros(mat.shape, dtype=np.complex128)
        flat_in, flat_out = mat.reshape(-1), out.reshape(-1)
        for i, x in enumerate(flat_in):
            flat_out[i] = complex(x)
        return out
    return np.asarray(mat, dtype=np.complex128)


def matnorm(mat) -> float:
    """Max-entry absolute value, always as a float (used for residual
    reports in both modes)."""
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(to_float(mat))))


def idempotency_residual(h) -> float:
    """``max |(h @ h - h)|``; zero for exact projectors."""
    if h.shape[0] != h.shape[1]:
        raise ValueError("idempotency residual needs a square matrix")
    return matnorm(h @ h - h)


def exact_rref(mat):
    """Row-reduce an exact matrix. Returns (rref, pivot_columns)."""
    m = mat.copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i, c] != QQc(0):
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = m[r] * (QQc(1) / m[r, c])
        for i in range(rows):
            if i != r and m[i, c] != QQc(0):
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def _float_rank(mat, cfg: RunConfig, want_gap_check: bool):
    a = to_float(mat)
    if a.size == 0 or min(a.shape) == 0:
        return 0, None
    svals = np.linalg.svd(a, compute_uv=False)
    cutoff = cfg.tol.rank_tol * max(1.0, float(svals[0]) if len(svals) else 1.0)
    r = int(np.sum(svals > cutoff))
    if want_gap_check:
        # a rank decision is trusted only when no singular value sits in a
        # one-order-of-magnitude band around the cutoff
        suspicious = np.sum((svals > 0.2 * cutoff) & (svals < 5.0 * cutoff))
        if suspicious:
            raise NumericalRankError(
                f"singular values {svals} have no clear gap at cutoff {cutoff:g}")
    return r, svals


def rank(mat, cfg: RunConfig, gap_check: bool = False) -> int:
    if cfg.exact:
        if mat.size == 0:
            return 0
        _, pivots = exact_rref(mat)
        return len(pivots)
    r, _ = _float_rank(mat, cfg, gap_check)
    return r


def solve(a, b, cfg: RunConfig):
    """Solve ``a @ x = b`` (a square invertible). Exact Gaussian elimination
    in exact mode, ``numpy.linalg.solve`` otherwise."""
    if not cfg.exact:
        return np.linalg.solve(to_float(a), to_float(b))
    n = a.shape[0]
    b2d = b if b.ndim == 2 else b.reshape(-1, 1)
    aug = np.concatenate([a.copy(), b2d.copy()], axis=1)
    red, pivots = exact_rref(aug)
    if pivots != list(range(n)):
        raise np.linalg.LinAlgError("exact solve: singular matrix")
    x = red[:, n:]
    return x if b.ndim == 2 else x.reshape(-1)


def inv(a, cfg: RunConfig):
    if not cfg.exact:
        return np.linalg.inv(to_float(a))
    return solve(a, eye(cfg, a.shape[0]), cfg)


def image_basis(h, cfg: RunConfig):
    """Extract retract data from an (approximate) idempotent ``h``.

    Returns ``(basis, coords)`` with columns of ``basis`` spanning ``im(h)``,
    ``basis @ coords == h`` and ``coords @ basis == I`` on image coordinates.
    """
    if h.shape[0] != h.shape[1]:
        raise ValueError("image_basis needs a square matrix")
    n = h.shape[0]
    if cfg.exact:
        _, pivots = exact_rref(h)
        basis = h[:, pivots].copy()
        r = len(pivots)
        if r == 0:
            return zeros(cfg, (n, 0)), zeros(cfg, (0, n))
        # coords solves basis @ coords = h; consistent because every column
        # of h lies in the span of the pivot columns
        aug = np.concatenate([basis, h], axis=1)
        red, piv2 = exact_rref(aug)
        if piv2 != list(range(r)):
            raise np.linalg.LinAlgError("image basis columns not independent")
        coords = red[:r, r:]
        return basis, coords
    a = to_float(h)
    if n == 0:
        return zeros(cfg, (n, 0)), zeros(cfg, (0, n))
    u, svals, _ = np.linalg.svd(a)
    cutoff = cfg.tol.rank_tol * max(1.0, float(svals[0]) if len(svals) else 1.0)
    r = int(np.sum(svals > cutoff))
    suspicious = np.sum((svals > 0.2 * cutoff) & (svals < 5.0 * cutoff))
    if suspicious:
        raise NumericalRankError(
            f"image_basis: singular values {svals} not separated at {cutoff:g}")
    basis = u[:, :r]
    coords = basis.conj().T @ a
    return basis, coords


def kernel_basis(a, cfg: RunConfig):
    """Columns spanning the null space of ``a``."""
    rows, cols = a.shape
    if cfg.exact:
        if rows == 0:
            return eye(cfg, cols)
        red, pivots = exact_rref(a)
        free = [c for c in range(cols) if c not in pivots]
        out = zeros(cfg, (cols, len(free)))
        for j, fc in enumerate(free):
            out[fc, j] = cfg.one
            for i, pc in enumerate(pivots):
                out[pc, j] = -red[i, fc]
        return out
    af = to_float(a)
    if rows == 0:
        return np.eye(cols, dtype=np.complex128)
    u, svals, vh = np.linalg.svd(af)
    cutoff = cfg.tol.rank_tol * max(1.0, float(svals[0]) if len(svals) else 1.0)
    r = int(np.sum(svals > cutoff))
    return vh[r:].conj().T
