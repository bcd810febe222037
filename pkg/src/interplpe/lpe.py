"""Local polynomial estimators of order ``l`` with possibly singular kernels.

At a point ``x`` the estimate is ``sum_i Y_i W_i(x)`` with

    W_i(x) = U(0)^T B_x^+ U(u_i) K(u_i) / (n h^d),   u_i = (X_i - x) / h,
    B_x    = sum_i U(u_i) U(u_i)^T K(u_i) / (n h^d).

With a singular kernel the estimator at a design point ``X_j`` is defined
as its limit there, which is ``Y_j``; ``predict`` returns it directly when
``x`` equals ``X_j`` coordinate for coordinate.

Weights are computed in batches.  ``B_x`` is first rescaled to unit
diagonal; if the smallest eigenvalue of the rescaled matrix exceeds
``PINV_TOL`` times the largest, ``B_x`` is treated as invertible and the
weights are solved in the rescaled coordinates, by Cholesky when well
conditioned and by QR or SVD of the rescaled features otherwise.  A
degenerate ``B_x`` gets its Moore-Penrose inverse, through an SVD of the
square-root-weighted feature matrix ``A`` with ``B_x ~ A^T A`` and the same
relative eigenvalue cutoff.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataPointCoincidence, DuplicateDesignPoints, InvalidData, InvalidParameter
from .kernels import Kernel
from .numerics import min_eigenvalue, pseudo_inverse
from .poly_basis import Basis, u_vector

PINV_TOL = 1e-12
# reciprocal condition number of the equilibrated Gram matrix above which the
# direct solve is used
WELL_CONDITIONED = 1e-6
_CHUNK_ELEMENTS = 200_000


@dataclass(frozen=True)
class Dataset:
    """Design points ``x`` (shape ``(n, d)``) and responses ``y`` (shape ``(n,)``)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.ndim != 2 or len(x) != len(y) or len(y) == 0:
            raise InvalidData(f"incompatible shapes x{x.shape} y{y.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidData("non-finite values in dataset")
        if len(np.unique(x, axis=0)) != len(x):
            raise DuplicateDesignPoints("design points must be pairwise distinct")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.x[idx], self.y[idx])


@dataclass(frozen=True)
class LpeModel:
    data: Dataset
    order: int
    bandwidth: float
    kernel: Kernel
    basis: Basis = field(init=False, repr=False)

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise InvalidParameter("bandwidth must be positive")
        if self.order < 0:
            raise InvalidParameter("order must be nonnegative")
        object.__setattr__(self, "basis", Basis(int(self.order), self.data.d))

    def predict(self, x):
        return predict(self, x)

    def weights(self, x):
        return weights(self, x)


def as_points(x, d: int) -> tuple[np.ndarray, bool]:
    """Normalise ``x`` to shape ``(m, d)``; the flag says whether it was a single point.

    For ``d == 1`` a flat array is a list of points on the line; for larger
    ``d`` a flat array of length ``d`` is one point.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1), True
    if x.ndim == 1:
        if d == 1:
            return x[:, None], False
        if len(x) == d:
            return x[None, :], True
    if x.ndim == 2 and x.shape[1] == d:
        return x, False
    raise InvalidParameter(f"cannot read points of dimension {d} from shape {x.shape}")


def _local_weights(basis: Basis, diff: np.ndarray, kv: np.ndarray) -> np.ndarray:
    """Weights for a batch of evaluation points.

    diff : (c, k, d) scaled offsets ``(X_i - x) / h``
    kv   : (c, k) finite kernel values
    """
    c, k = kv.shape
    if k == 0:
        return np.zeros((c, 0))
    feats = u_vector(basis, diff)                       # (c, k, C)
    root = np.sqrt(kv)
    a = feats * root[..., None]
    gram = np.swapaxes(a, 1, 2) @ a                     # (c, C, C)
    dg = np.sqrt(np.diagonal(gram, axis1=1, axis2=2))
    usable = np.all(dg > 0, axis=1)
    dsafe = np.where(dg > 0, dg, 1.0)
    eq = gram / (dsafe[:, :, None] * dsafe[:, None, :])
    C = eq.shape[-1]
    # fewer than C points in the window: rank deficient for sure
    usable &= (kv > 0).sum(axis=1) >= C

    out = np.zeros((c, k))
    good = np.zeros(c, dtype=bool)
    cand = np.nonzero(usable)[0]
    if len(cand):
        inv_row0 = np.zeros((len(cand), C))
        try:
            chol = np.linalg.cholesky(eq[cand])
            linv = np.linalg.inv(chol)
            inv = np.swapaxes(linv, 1, 2) @ linv
            # 1-norm condition number bounds the 2-norm one within a factor C
            kappa = (np.abs(eq[cand]).sum(axis=1).max(axis=1)
                     * np.abs(inv).sum(axis=1).max(axis=1))
            ok = np.isfinite(kappa) & (kappa * C < 1.0 / WELL_CONDITIONED)
            inv_row0 = inv[:, 0, :]
        except np.linalg.LinAlgError:
            w, v = np.linalg.eigh(eq[cand])
            ok = w[:, 0] > WELL_CONDITIONED * w[:, -1]
            safe_w = np.where(ok[:, None], w, 1.0)
            inv_row0 = np.einsum("bj,bkj->bk", v[:, 0, :] / safe_w, v)
        sel = cand[ok]
        good[sel] = True
        coef = inv_row0[ok] / dsafe[sel, :1] / dsafe[sel]
        out[sel] = np.einsum("bkc,bc->bk", feats[sel], coef) * kv[sel]

    rest = np.nonzero(~good & usable)[0]
    if len(rest):
        # badly scaled: QR of the equilibrated features where the 1-norm
        # estimate already proves invertibility, SVD for the rest
        at = a[rest] / dsafe[rest, None, :]
        q, r = np.linalg.qr(at)
        try:
            rinv = np.linalg.inv(r)
            kappa = (np.abs(r).sum(axis=1).max(axis=1) * np.abs(rinv).sum(axis=1).max(axis=1))
            ok = np.isfinite(kappa) & (kappa * C < PINV_TOL ** -0.5)
        except np.linalg.LinAlgError:
            ok = np.zeros(len(rest), dtype=bool)
        if np.any(ok):
            sel = rest[ok]
            out[sel] = (np.einsum("bkc,bc->bk", q[ok], rinv[ok][:, 0, :])
                        / dsafe[sel, :1] * root[sel])
            good[sel] = True
            rest, at = rest[~ok], at[~ok]
    if len(rest):
        p, s, qt = np.linalg.svd(at, full_matrices=False)
        ratio = (s[:, -1] / s[:, 0]) ** 2 if s.shape[1] == a.shape[2] else np.zeros(len(rest))
        inv = ratio > PINV_TOL
        if np.any(inv):
            sel = rest[inv]
            scaled = qt[inv][:, :, 0] / s[inv] / dsafe[sel, :1]
            out[sel] = np.einsum("bkr,br->bk", p[inv], scaled) * root[sel]
        good[rest[inv]] = True

    bad = np.nonzero(~good)[0]
    if len(bad):
        # degenerate: Moore-Penrose inverse of B itself
        p, s, qt = np.linalg.svd(a[bad], full_matrices=False)
        smax = s[:, :1]
        keep = (s > np.sqrt(PINV_TOL) * smax) & (smax > 0)
        scaled = np.where(keep, qt[:, :, 0] / np.where(keep, s, 1.0), 0.0)
        out[bad] = np.einsum("bkr,br->bk", p, scaled) * root[bad]
    return out


def _weight_rows(model: LpeModel, pts: np.ndarray, strict: bool):
    """Weight matrix ``(m, n)`` and, per row, the index of a coincident design
    point (or -1).  Coincident rows of singular kernels are unit vectors."""
    data, h, kern = model.data, model.bandwidth, model.kernel
    X = data.x
    m, n = len(pts), data.n
    out = np.zeros((m, n))
    hit = np.full(m, -1, dtype=np.int64)
    step = max(1, _CHUNK_ELEMENTS // max(n, 1))
    for s0 in range(0, m, step):
        p = pts[s0:s0 + step]
        raw = X[None, :, :] - p[:, None, :]
        diff = raw / h
        r = np.abs(diff[..., 0]) if data.d == 1 else np.linalg.norm(diff, axis=-1)
        kv = np.zeros_like(r)
        inside = r <= kern.support_radius
        if kern.singular:
            same = np.all(raw == 0.0, axis=-1)
            rows = np.nonzero(same.any(axis=1))[0]
            if len(rows):
                if strict:
                    raise DataPointCoincidence("singular kernel evaluated at a design point")
                j = np.argmax(same[rows], axis=1)
                hit[s0 + rows] = j
            inside &= ~same
        kv[inside] = kern.radial(r[inside])
        nz = kv > 0
        counts = nz.sum(axis=1)
        kmax = int(counts.max()) if len(counts) else 0
        if kmax == 0:
            continue
        if kmax < n:
            idx = np.argsort(~nz, axis=1, kind="stable")[:, :kmax]
            kc = np.take_along_axis(kv, idx, axis=1)
            dc = np.take_along_axis(diff, idx[..., None], axis=1)
            block = np.zeros((len(p), n))
            np.put_along_axis(block, idx, _local_weights(model.basis, dc, kc), axis=1)
            out[s0:s0 + step] = block
        else:
            out[s0:s0 + step] = _local_weights(model.basis, diff, kv)
    rows = np.nonzero(hit >= 0)[0]
    if len(rows):
        out[rows] = 0.0
        out[rows, hit[rows]] = 1.0
    return out, hit


def weight_matrix(model: LpeModel, x) -> np.ndarray:
    """Weights at many points, with unit rows at design points for singular kernels."""
    pts, _ = as_points(x, model.data.d)
    return _weight_rows(model, pts, strict=False)[0]


def weights(model: LpeModel, x) -> np.ndarray:
    """The ``n`` weights ``W_i(x)`` (shape ``(n,)`` for one point, ``(m, n)`` for many).

    Raises
    ------
    DataPointCoincidence
        If the kernel is singular and ``x`` is a design point.
    """
    pts, single = as_points(x, model.data.d)
    w, _ = _weight_rows(model, pts, strict=True)
    return w[0] if single else w


def predict(model: LpeModel, x):
    pts, single = as_points(x, model.data.d)
    w, hit = _weight_rows(model, pts, strict=False)
    f = w @ model.data.y
    rows = hit >= 0
    f[rows] = model.data.y[hit[rows]]
    return float(f[0]) if single else f


def truncation_level(model: LpeModel, L0: float) -> float:
    if not L0 > 0:
        raise InvalidParameter("L0 must be positive")
    return max(float(L0), float(np.max(np.abs(model.data.y))))


def predict_truncated(model: LpeModel, x, L0: float):
    """Prediction clipped to ``[-mu, mu]`` with ``mu = max(L0, max |Y_i|)``."""
    mu = truncation_level(model, L0)
    f = np.clip(predict(model, x), -mu, mu)
    return float(f) if np.ndim(f) == 0 else f


@dataclass(frozen=True)
class TruncatedLpe:
    """An LPE together with its truncation level ``mu``."""

    model: LpeModel
    L0: float
    mu: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mu", truncation_level(self.model, self.L0))

    def predict(self, x):
        f = np.clip(predict(self.model, x), -self.mu, self.mu)
        return float(f) if np.ndim(f) == 0 else f

    __call__ = predict


def design_matrix(model: LpeModel, x) -> np.ndarray:
    """``B_x`` at a single point ``x``."""
    pts, _ = as_points(x, model.data.d)
    if len(pts) != 1:
        raise InvalidParameter("design_matrix takes a single point")
    data, h, kern = model.data, model.bandwidth, model.kernel
    raw = data.x - pts[0]
    if kern.singular and np.any(np.all(raw == 0.0, axis=1)):
        raise DataPointCoincidence("singular kernel evaluated at a design point")
    diff = raw / h
    kv = kern(diff)
    feats = u_vector(model.basis, diff)
    return (feats * kv[:, None]).T @ feats / (data.n * h ** data.d)


def weights_by_formula(model: LpeModel, x) -> np.ndarray:
    """Weights from the literal formula with the Jacobi pseudo-inverse of ``B_x``.

    Slow and only accurate for mildly conditioned ``B_x``; kept as an
    independent route for checking ``weights``.
    """
    pts, _ = as_points(x, model.data.d)
    data, h = model.data, model.bandwidth
    b = design_matrix(model, pts[0])
    diff = (data.x - pts[0]) / h
    feats = u_vector(model.basis, diff)
    kv = model.kernel(diff)
    row0 = pseudo_inverse(b, PINV_TOL)[0]
    return feats @ row0 * kv / (data.n * h ** data.d)


def indicator_design_matrices(model: LpeModel, delta: float, grid) -> np.ndarray:
    """Stack of window matrices with the kernel replaced by ``1(||u|| <= delta)``."""
    data, h = model.data, model.bandwidth
    pts, _ = as_points(grid, data.d)
    diff = (data.x[None, :, :] - pts[:, None, :]) / h
    ind = (np.linalg.norm(diff, axis=-1) <= delta).astype(float)
    feats = u_vector(model.basis, diff)
    return np.swapaxes(feats * ind[..., None], 1, 2) @ feats / (data.n * h ** data.d)


def min_eigen_over_support(model: LpeModel, delta: float, grid) -> float:
    """Smallest eigenvalue of the indicator-window matrix over the grid points."""
    if not delta > 0:
        raise InvalidParameter("delta must be positive")
    mats = indicator_design_matrices(model, delta, grid)
    if len(mats) == 0:
        raise InvalidParameter("grid must be non-empty")
    return float(np.min(min_eigenvalue(mats)))


def interpolation_limit_check(model: LpeModel, j: int, radii) -> list[tuple[float, float]]:
    """Largest deviation ``|f_n(X_j +- r e_k) - Y_j|`` over the axis probes at each radius."""
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(np.diff(radii) >= 0):
        raise InvalidParameter("radii must be positive and strictly decreasing")
    data = model.data
    xj, yj = data.x[j], data.y[j]
    eye = np.eye(data.d)
    probes = np.concatenate([xj + r * sgn * eye for r in radii for sgn in (1.0, -1.0)])
    dev = np.abs(predict(model, probes) - yj).reshape(len(radii), -1).max(axis=1)
    return [(float(r), float(e)) for r, e in zip(radii, dev)]
