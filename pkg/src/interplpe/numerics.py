"""Small dense linear algebra, quadrature and a reproducible random source.

The eigen-solver is a cyclic Jacobi iteration that works on stacks of
symmetric matrices at once, so ``min_eigenvalue`` and ``pseudo_inverse``
accept either a single ``(k, k)`` array or a ``(..., k, k)`` stack.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidMatrix, InvalidParameter, QuadratureDiverged

__all__ = [
    "jacobi_eigh",
    "pseudo_inverse",
    "min_eigenvalue",
    "quad_1d",
    "RandomSource",
    "gaussian",
]

_EPS = np.finfo(float).eps


def _check_symmetric(m) -> np.ndarray:
    m = np.array(m, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise InvalidMatrix(f"expected square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has non-finite entries")
    mt = np.swapaxes(m, -1, -2)
    scale = np.max(np.abs(m)) if m.size else 0.0
    if np.any(np.abs(m - mt) > 1e-12 * scale):
        raise InvalidMatrix("matrix is not symmetric")
    return 0.5 * (m + mt)


def jacobi_eigh(m, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvectors of symmetric matrices.

    Parameters
    ----------
    m : array_like, shape (..., k, k)
        Symmetric matrix or stack of matrices.
    max_sweeps : int
        Upper bound on full cyclic sweeps over the off-diagonal pairs.

    Returns
    -------
    w : ndarray, shape (..., k)
    v : ndarray, shape (..., k, k)
        Columns of ``v`` are the eigenvectors, ``m @ v = v * w``.
    """
    m = _check_symmetric(m)
    batch_shape = m.shape[:-2]
    k = m.shape[-1]
    a = m.reshape(-1, k, k).copy()
    v = np.broadcast_to(np.eye(k), a.shape).copy()
    scale = np.sqrt(np.sum(a * a, axis=(1, 2)))
    offmask = ~np.eye(k, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum((a * a)[:, offmask], axis=1)) if k > 1 else np.zeros(len(a))
        if np.all(off <= _EPS * scale):
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[:, p, q]
                active = apq != 0.0
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                # a subnormal a_pq can overflow theta; t = 0 is then the right rotation
                with np.errstate(over="ignore"):
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                sgn = np.where(theta >= 0.0, 1.0, -1.0)
                t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                cp, cq = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c[:, None] * cp - s[:, None] * cq
                a[:, :, q] = s[:, None] * cp + c[:, None] * cq
                rp, rq = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rp - s[:, None] * rq
                a[:, q, :] = s[:, None] * rp + c[:, None] * rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0

                vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = c[:, None] * vp - s[:, None] * vq
                v[:, :, q] = s[:, None] * vp + c[:, None] * vq

    w = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(*batch_shape, k), v.reshape(*batch_shape, k, k)


def pseudo_inverse(m, tol: float = 1e-12) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix.

    Eigenvalues with ``|lambda| <= tol * max|lambda|`` are treated as zero.
    """
    if tol < 0:
        raise InvalidParameter("tol must be nonnegative")
    w, v = jacobi_eigh(m)
    top = np.max(np.abs(w), axis=-1, keepdims=True)
    keep = (np.abs(w) > tol * top) & (top > 0)
    inv_w = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    return (v * inv_w[..., None, :]) @ np.swapaxes(v, -1, -2)


def min_eigenvalue(m):
    """Smallest eigenvalue of a symmetric matrix (or of each matrix in a stack)."""
    w, _ = jacobi_eigh(m)
    lo = w[..., 0]
    return float(lo) if np.ndim(lo) == 0 else lo


# Quadrature ------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)


def _gl(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_X
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    return half * float(np.dot(_GL_W, fx))


def _adaptive(f, a: float, b: float, tol: float, whole: float, depth: int) -> float:
    m = 0.5 * (a + b)
    left, right = _gl(f, a, m), _gl(f, m, b)
    if depth <= 0 or abs(left + right - whole) <= tol or m in (a, b):
        return left + right
    return (_adaptive(f, a, m, 0.5 * tol, left, depth - 1)
            + _adaptive(f, m, b, 0.5 * tol, right, depth - 1))


def _toward(f, near: float, far: float, tol: float, max_pieces: int) -> float:
    """Integrate over the half-open interval between ``far`` and ``near``,
    cutting geometrically shrinking pieces toward ``near``."""
    width = far - near
    total = 0.0
    prev = None
    growing = 0
    for k in range(max_pieces):
        outer = near + width * 2.0 ** (-k)
        inner = near + width * 2.0 ** (-(k + 1))
        if inner == outer or inner == near:
            return total
        lo, hi = min(inner, outer), max(inner, outer)
        piece = _adaptive(f, lo, hi, 0.1 * tol, _gl(f, lo, hi), 40)
        if not math.isfinite(piece):
            raise QuadratureDiverged("integrand produced non-finite values")
        total += piece
        size = abs(piece)
        if prev is not None:
            growing = growing + 1 if size >= prev and size > tol else 0
            if growing >= 8:
                raise QuadratureDiverged("piece contributions do not decay")
            if size < prev:
                ratio = size / prev
                tail = size * ratio / (1.0 - ratio)
                if k >= 3 and tail <= 0.1 * tol and size <= 0.1 * tol:
                    return total + tail
        prev = size
    raise QuadratureDiverged(f"no convergence after {max_pieces} geometric pieces")


def quad_1d(f, lo: float, hi: float, abs_tol: float = 1e-10, max_pieces: int = 200) -> float:
    """Adaptive Gauss-Legendre estimate of the integral of ``f`` over ``(lo, hi)``.

    Each half of the interval is cut into pieces that shrink geometrically
    toward its endpoint, so integrable endpoint singularities converge while
    non-integrable ones exhaust the piece budget.

    ``f`` is called with numpy arrays of nodes and never at ``lo`` or ``hi``.

    Raises
    ------
    QuadratureDiverged
        If the piece contributions fail to decay within ``max_pieces``.
    """
    if not lo < hi:
        raise InvalidParameter("need lo < hi")
    mid = 0.5 * (lo + hi)
    return (_toward(f, lo, mid, 0.5 * abs_tol, max_pieces)
            + _toward(f, hi, mid, 0.5 * abs_tol, max_pieces))


# Random numbers ---------------------------------------------------------------

class RandomSource:
    """Seeded stream of uniform and Gaussian draws.

    Raw 64-bit words come from a PCG64 bit generator; uniforms keep the top
    53 bits and Gaussians use the Box-Muller transform on pairs of uniforms.
    Nothing goes through numpy's distribution samplers, whose output is not
    guaranteed stable across releases.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
        self._bits = np.random.PCG64(self.seed)

    def _unit(self, count: int) -> np.ndarray:
        raw = self._bits.random_raw(count)
        return (raw >> np.uint64(11)).astype(float) * 2.0 ** -53

    def uniform(self, lo: float = 0.0, hi: float = 1.0, size=None):
        count = 1 if size is None else int(np.prod(size))
        u = lo + (hi - lo) * self._unit(count)
        return float(u[0]) if size is None else u.reshape(size)

    def standard_normal(self, size=None):
        count = 1 if size is None else int(np.prod(size))
        pairs = (count + 1) // 2
        u = self._unit(2 * pairs)
        u1 = 1.0 - u[0::2]
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        z = z[:count]
        return float(z[0]) if size is None else z.reshape(size)

    def normal(self, mean: float = 0.0, variance: float = 1.0, size=None):
        if variance < 0:
            raise InvalidParameter("variance must be nonnegative")
        return mean + math.sqrt(variance) * self.standard_normal(size)


def gaussian(rs: RandomSource, mean: float, variance: float) -> float:
    """One Gaussian draw with the given mean and variance."""
    return rs.normal(mean, variance)
