"""Smoothness-adaptive interpolating estimator by least-squares selection.

The sample is split into halves D1 and D2.  On each half a family of
truncated LPEs indexed by a grid of smoothness values is fitted, and the
member with the smallest squared error on the other half is kept.  The two
selected estimators are blended with a weight that tends to 1 near D1 and
to 0 near D2, so the blend interpolates the whole sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SampleTooSmall
from .kernels import Kernel
from .lpe import Dataset, LpeModel, TruncatedLpe, as_points
from .numerics import RandomSource


def strict_floor(beta: float) -> int:
    """Largest integer strictly below ``beta`` (so ``strict_floor(2.0) == 1``)."""
    return int(math.ceil(beta)) - 1


@dataclass(frozen=True)
class BetaGrid:
    n: int
    beta_max: float
    M: int
    M_max: int
    betas: tuple[float, ...]

    @property
    def exponents(self) -> range:
        return range(-self.M, self.M_max + 1)

    def __len__(self) -> int:
        return len(self.betas)


def build_beta_grid(n: int, beta_max: float) -> BetaGrid:
    """Geometric grid ``(1 + 1/log n)**j`` for ``j = -M .. M_max``."""
    if n < 3:
        raise InvalidParameter("need n >= 3")
    if not beta_max > 1:
        raise InvalidParameter("need beta_max > 1")
    ln = math.log(n)
    M = 2 * math.floor(ln * math.log(ln))
    M_max = min(M, math.floor(ln * math.log(beta_max)))
    ratio = 1.0 + 1.0 / ln
    betas = tuple(ratio ** j for j in range(-M, M_max + 1))
    return BetaGrid(n, float(beta_max), M, M_max, betas)


def candidate_bandwidth(alpha: float, n: int, beta: float, d: int) -> float:
    return alpha * n ** (-1.0 / (2.0 * beta + d))


def fit_candidates(half: Dataset, grid: BetaGrid, kernel: Kernel, alpha: float,
                   L0: float) -> list[TruncatedLpe]:
    """One truncated LP(strict_floor(beta)) estimator per grid value, in grid order.

    Bandwidths use the full sample size ``grid.n``; the truncation level is
    taken from the training half.
    """
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    return [
        TruncatedLpe(LpeModel(half, strict_floor(b), candidate_bandwidth(alpha, grid.n, b, half.d),
                              kernel), L0)
        for b in grid.betas
    ]


def holdout_sse(candidates: list[TruncatedLpe], holdout: Dataset) -> np.ndarray:
    return np.array([np.sum((holdout.y - c.predict(holdout.x)) ** 2) for c in candidates])


def select(candidates: list[TruncatedLpe], holdout: Dataset) -> int:
    """Index of the candidate with the least squared error on ``holdout``.

    Ties go to the earliest candidate, i.e. the smallest smoothness value.
    """
    if not candidates:
        raise InvalidParameter("no candidates")
    return int(np.argmin(holdout_sse(candidates, holdout)))


def _distance(pts: np.ndarray, sample: np.ndarray) -> np.ndarray:
    out = np.empty(len(pts))
    step = max(1, 200_000 // len(sample))
    for s in range(0, len(pts), step):
        diff = pts[s:s + step, None, :] - sample[None, :, :]
        out[s:s + step] = np.sqrt(np.min(np.sum(diff * diff, axis=-1), axis=1))
    return out


def blend_weight(x, d1: Dataset, d2: Dataset):
    """``(2/pi) arctan(dist(x, D2) / dist(x, D1))``, equal to 1 on D1 and 0 on D2."""
    pts, single = as_points(x, d1.d)
    r1 = _distance(pts, d1.x)
    r2 = _distance(pts, d2.x)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (2.0 / np.pi) * np.arctan(r2 / r1)
    lam = np.where((r1 == 0) & (r2 > 0), 1.0, lam)
    lam = np.where((r2 == 0) & (r1 > 0), 0.0, lam)
    lam = np.where((r1 == 0) & (r2 == 0), 0.5, lam)
    lam = np.clip(lam, 0.0, 1.0)
    return float(lam[0]) if single else lam


@dataclass(frozen=True)
class AggregateEstimator:
    f_tilde: TruncatedLpe
    g_tilde: TruncatedLpe
    d1: Dataset
    d2: Dataset
    grid: BetaGrid
    j_f: int
    j_g: int
    sse_f: np.ndarray
    sse_g: np.ndarray
    L0: float
    dropped_last: bool = False

    @property
    def beta_f(self) -> float:
        return self.grid.betas[self.j_f]

    @property
    def beta_g(self) -> float:
        return self.grid.betas[self.j_g]

    def predict(self, x):
        pts, single = as_points(x, self.d1.d)
        lam = blend_weight(pts, self.d1, self.d2)
        f = self.f_tilde.predict(pts)
        g = self.g_tilde.predict(pts)
        out = lam * f + (1.0 - lam) * g
        # exact values where one blend weight vanishes
        out = np.where(lam == 1.0, f, np.where(lam == 0.0, g, out))
        return float(out[0]) if single else out

    __call__ = predict


def fit_adaptive(data: Dataset, kernel: Kernel, alpha: float = 1.0, L0: float = 1.0,
                 beta_max: float = 8.0, seed: int | None = None) -> AggregateEstimator:
    """Split, fit both candidate families, select on the opposite halves and blend.

    With ``seed`` given the sample is shuffled before the index split.  An
    odd-sized sample loses its last observation.
    """
    n = data.n
    if n // 2 < 3:
        raise SampleTooSmall(f"need at least 6 observations, got {n}")
    order = np.arange(n)
    if seed is not None:
        rs = RandomSource(seed)
        order = np.argsort(rs.uniform(size=n), kind="stable")
    dropped = n % 2 == 1
    if dropped:
        order = order[:-1]
        n -= 1
    half = n // 2
    d1 = data.subset(order[:half])
    d2 = data.subset(order[half:])
    grid = build_beta_grid(n, beta_max)

    cand_1 = fit_candidates(d1, grid, kernel, alpha, L0)
    sse_f = holdout_sse(cand_1, d2)
    j_f = int(np.argmin(sse_f))
    cand_2 = fit_candidates(d2, grid, kernel, alpha, L0)
    sse_g = holdout_sse(cand_2, d1)
    j_g = int(np.argmin(sse_g))
    return AggregateEstimator(cand_1[j_f], cand_2[j_g], d1, d2, grid, j_f, j_g,
                              sse_f, sse_g, float(L0), dropped)
