"""Monte Carlo harness: data generation, MSE tables, rate and adaptivity studies.

Replicate ``r`` of any study draws from ``RandomSource(seed + r)``, and
per-replicate results are reduced in replicate order, so a study is a
deterministic function of its configuration.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import adaptive
from .errors import InvalidParameter
from .kernels import Kernel, make_builtin, singularity_bound
from .lpe import Dataset, LpeModel, TruncatedLpe, min_eigen_over_support, weight_matrix
from .numerics import RandomSource


def target_f(x):
    """``x**3 - x``"""
    x = np.asarray(x, dtype=float)
    return x ** 3 - x


def target_g(x):
    """``x + cos(3x)``"""
    x = np.asarray(x, dtype=float)
    return x + np.cos(3.0 * x)


TARGETS: dict[str, Callable] = {"f": target_f, "g": target_g}
TABLE_KERNELS = ("k1", "k2", "k3")


def default_bandwidths() -> tuple[float, ...]:
    """40 log-spaced values in ``[0.05, 20]``.

    High polynomial orders on 80 points need bandwidths well beyond the
    width of the design interval, so the grid reaches past it.
    """
    return tuple(float(h) for h in np.geomspace(0.05, 20.0, 40))


@dataclass(frozen=True)
class SimulationConfig:
    n: int = 80
    x_range: tuple[float, float] = (-2.0, 2.0)
    noise_variance: float = 0.5
    target: str = "f"
    kernel: str = "k1"
    a: float = 0.2
    order: int = 7
    bandwidths: tuple[float, ...] = field(default_factory=default_bandwidths)
    seed: int = 0
    replications: int = 100
    grid_size: int = 1001
    window: int = 7

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameter("n must be at least 2")
        if self.noise_variance < 0:
            raise InvalidParameter("noise variance must be nonnegative")
        lo, hi = self.x_range
        if not lo < hi:
            raise InvalidParameter("x_range must satisfy lo < hi")
        h = np.asarray(self.bandwidths, dtype=float)
        if len(h) == 0 or np.any(h <= 0) or np.any(np.diff(h) <= 0):
            raise InvalidParameter("bandwidths must be positive and strictly increasing")
        if self.target not in TARGETS:
            raise InvalidParameter(f"unknown target {self.target!r}")
        if self.replications < 1 or self.grid_size < 2:
            raise InvalidParameter("need replications >= 1 and grid_size >= 2")
        if self.window < 1 or self.window % 2 == 0:
            raise InvalidParameter("window must be odd and positive")

    def make_kernel(self, name: str | None = None) -> Kernel:
        return make_builtin(name or self.kernel, self.a)


def replicate_seed(base: int, r: int) -> int:
    return base + r


def eval_grid(x_range, grid_size: int) -> np.ndarray:
    return np.linspace(x_range[0], x_range[1], grid_size)


def _draw(n: int, x_range, noise_variance: float, rs: RandomSource):
    lo, hi = x_range
    while True:
        x = rs.uniform(lo, hi, size=n)
        if len(np.unique(x)) == n:
            break
    eps = rs.normal(0.0, noise_variance, size=n)
    return x, eps


def generate(config: SimulationConfig, rs: RandomSource) -> Dataset:
    """Uniform design on ``x_range`` with Gaussian noise of the given variance."""
    x, eps = _draw(config.n, config.x_range, config.noise_variance, rs)
    return Dataset(x, TARGETS[config.target](x) + eps)


def mse(estimator, truth, x_range, grid_size: int = 1001) -> float:
    """Mean squared difference over an equispaced grid on ``x_range``."""
    if grid_size < 2:
        raise InvalidParameter("grid_size must be at least 2")
    g = eval_grid(x_range, grid_size)
    return float(np.mean((np.asarray(estimator(g)) - np.asarray(truth(g))) ** 2))


def running_median(values, window: int) -> np.ndarray:
    """Centered running median; windows are truncated at the ends."""
    values = np.asarray(values, dtype=float)
    if window < 1 or window % 2 == 0:
        raise InvalidParameter("window must be an odd positive integer")
    if window > len(values):
        raise InvalidParameter("window longer than the sequence")
    w = window // 2
    if w == 0:
        return values.copy()
    padded = np.concatenate([np.full(w, np.nan), values, np.full(w, np.nan)])
    views = np.lib.stride_tricks.sliding_window_view(padded, window)
    return np.nanmedian(views, axis=1)


# Bandwidth tuning -------------------------------------------------------------

@dataclass(frozen=True)
class TuneResult:
    h: float
    mse: float
    bandwidths: tuple[float, ...]
    mean_mse: tuple[float, ...]


def tune_bandwidth(config: SimulationConfig, candidate_h=None) -> TuneResult:
    """Bandwidth with the least replicate-averaged MSE (ties to the smaller one).

    Every candidate sees the same replicate datasets.
    """
    hs = tuple(sorted(float(h) for h in (candidate_h if candidate_h is not None
                                         else config.bandwidths)))
    if not hs:
        raise InvalidParameter("no candidate bandwidths")
    truth = TARGETS[config.target]
    kernel = config.make_kernel()
    grid = eval_grid(config.x_range, config.grid_size)
    ft = truth(grid)
    errs = np.zeros((config.replications, len(hs)))
    for r in range(config.replications):
        data = generate(config, RandomSource(replicate_seed(config.seed, r)))
        for k, h in enumerate(hs):
            w = weight_matrix(LpeModel(data, config.order, h, kernel), grid)
            errs[r, k] = np.mean((w @ data.y - ft) ** 2)
    means = errs.mean(axis=0)
    best = int(np.argmin(means))
    return TuneResult(hs[best], float(means[best]), hs, tuple(float(m) for m in means))


# Table experiment -------------------------------------------------------------

@dataclass(frozen=True)
class TableRecord:
    kernel: str
    target: str
    h: float
    mse_raw: float
    se_raw: float
    mse_smooth: float
    se_smooth: float
    h_rect: float
    mse_rect: float
    se_rect: float
    smooth_below_raw: float


@dataclass
class ExperimentReport:
    config: dict
    records: list[TableRecord] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"config": self.config, "seeds": self.seeds,
                "records": [asdict(r) for r in self.records]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def record(self, kernel: str, target: str) -> TableRecord:
        for rec in self.records:
            if rec.kernel == kernel and rec.target == target:
                return rec
        raise KeyError((kernel, target))


def _se(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0


def run_table_experiment(config: SimulationConfig, kernels=TABLE_KERNELS,
                         targets=("f", "g")) -> ExperimentReport:
    """MSE of raw, median-smoothed and rectangular-kernel LPEs at tuned bandwidths.

    The estimators are plain, untruncated LPEs.  For every kernel and
    target the bandwidth minimising the mean raw MSE is chosen; the smoothed
    estimator is the running median of the raw one on the evaluation grid.
    The rectangular kernel is tuned separately.
    """
    hs = np.asarray(config.bandwidths, dtype=float)
    grid = eval_grid(config.x_range, config.grid_size)
    truths = {t: TARGETS[t](grid) for t in targets}
    names = tuple(kernels) + ("rect",)
    kobj = {k: config.make_kernel(k) for k in names}
    R, H = config.replications, len(hs)
    raw = {(k, t): np.zeros((R, H)) for k in names for t in targets}
    smooth = {(k, t): np.zeros((R, H)) for k in names for t in targets}
    seeds = [replicate_seed(config.seed, r) for r in range(R)]

    for r, seed in enumerate(seeds):
        x, eps = _draw(config.n, config.x_range, config.noise_variance, RandomSource(seed))
        ys = {t: TARGETS[t](x) + eps for t in targets}
        base = Dataset(x, ys[targets[0]])
        for k in names:
            for i, h in enumerate(hs):
                w = weight_matrix(LpeModel(base, config.order, float(h), kobj[k]), grid)
                for t in targets:
                    fit = w @ ys[t]
                    raw[k, t][r, i] = np.mean((fit - truths[t]) ** 2)
                    sm = running_median(fit, config.window)
                    smooth[k, t][r, i] = np.mean((sm - truths[t]) ** 2)

    report = ExperimentReport(config=_config_dict(config), seeds=seeds)
    for t in targets:
        jr = int(np.argmin(raw["rect", t].mean(axis=0)))
        rect = raw["rect", t][:, jr]
        for k in kernels:
            j = int(np.argmin(raw[k, t].mean(axis=0)))
            e_raw, e_sm = raw[k, t][:, j], smooth[k, t][:, j]
            report.records.append(TableRecord(
                kernel=k, target=t, h=float(hs[j]),
                mse_raw=float(e_raw.mean()), se_raw=_se(e_raw),
                mse_smooth=float(e_sm.mean()), se_smooth=_se(e_sm),
                h_rect=float(hs[jr]), mse_rect=float(rect.mean()), se_rect=_se(rect),
                smooth_below_raw=float(np.mean(e_sm <= e_raw)),
            ))
    return report


def _config_dict(config: SimulationConfig) -> dict:
    d = asdict(config)
    d["x_range"] = list(config.x_range)
    d["bandwidths"] = list(config.bandwidths)
    return d


# Rate study -------------------------------------------------------------------

def fit_loglog_slope(n_list, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(n)``."""
    ln = np.log(np.asarray(n_list, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(ln, lv, 1)[0])


@dataclass(frozen=True)
class RateResult:
    n_list: tuple[int, ...]
    mean_mse: tuple[float, ...]
    se_mse: tuple[float, ...]
    slope: float
    beta: float
    order: int
    alpha: float
    kernel: str
    expected_slope: float


def rate_study(target: Callable = target_f, beta_nominal: float = 2.0,
               n_list=(100, 200, 400, 800, 1600, 3200), replications: int = 50,
               kernel: Kernel | str = "k2", alpha: float = 1.0, a: float = 0.2,
               x_range=(-2.0, 2.0), noise_variance: float = 0.5, grid_size: int = 1001,
               seed: int = 0, L0: float = 1.0) -> RateResult:
    """Log-log slope of the mean MSE of LP(l) estimators with rate-optimal bandwidth.

    The order is the largest integer below ``beta_nominal`` and the bandwidth
    ``alpha * n ** (-1 / (2 beta + 1))``.
    """
    n_list = tuple(int(n) for n in n_list)
    if len(n_list) < 4 or np.any(np.diff(n_list) <= 0):
        raise InvalidParameter("need at least 4 increasing sample sizes")
    if replications < 20:
        raise InvalidParameter("need at least 20 replications")
    kern = make_builtin(kernel, a) if isinstance(kernel, str) else kernel
    order = adaptive.strict_floor(beta_nominal)
    grid = eval_grid(x_range, grid_size)
    ft = target(grid)
    means, ses = [], []
    for i, n in enumerate(n_list):
        h = adaptive.candidate_bandwidth(alpha, n, beta_nominal, 1)
        errs = np.empty(replications)
        for r in range(replications):
            rs = RandomSource(replicate_seed(seed + 1_000_003 * i, r))
            x, eps = _draw(n, x_range, noise_variance, rs)
            est = TruncatedLpe(LpeModel(Dataset(x, target(x) + eps), order, h, kern), L0)
            errs[r] = np.mean((est.predict(grid) - ft) ** 2)
        means.append(float(errs.mean()))
        ses.append(_se(errs))
    slope = fit_loglog_slope(n_list, means)
    expected = -2.0 * beta_nominal / (2.0 * beta_nominal + 1.0)
    return RateResult(n_list, tuple(means), tuple(ses), slope, float(beta_nominal), order,
                      float(alpha), kern.name, expected)


# Adaptive study ---------------------------------------------------------------

@dataclass(frozen=True)
class AdaptiveStudy:
    n: int
    adaptive_mse: tuple[float, ...]
    candidate_mse: np.ndarray          # (replications, grid length)
    interpolates: tuple[bool, ...]
    diagnostics_pass: tuple[bool, ...]
    selected_beta: tuple[tuple[float, float], ...]

    @property
    def mean_adaptive(self) -> float:
        return float(np.mean(self.adaptive_mse))

    @property
    def best_candidate(self) -> tuple[int, float]:
        means = self.candidate_mse.mean(axis=0)
        j = int(np.argmin(means))
        return j, float(means[j])


def _diagnostic(est: TruncatedLpe, delta: float) -> bool:
    m = est.model
    return min_eigen_over_support(m, delta, m.data.x) > 0.0


def adaptive_study(n: int = 200, target: str = "g", kernel: str = "k2", a: float = 0.2,
                   alpha: float = 1.0, L0: float = 1.0, beta_max: float = 8.0,
                   replications: int = 50, x_range=(-2.0, 2.0), noise_variance: float = 0.5,
                   grid_size: int = 1001, seed: int = 0) -> AdaptiveStudy:
    """Compare the aggregated estimator with every single grid candidate.

    Candidates are the D1-trained members of the family, evaluated on the
    full grid, so the comparison is against the best fixed smoothness.
    """
    truth = TARGETS[target]
    kern = make_builtin(kernel, a)
    delta = singularity_bound(kern).delta
    grid = eval_grid(x_range, grid_size)
    ft = truth(grid)
    ad, cands, interp, diag, sel = [], [], [], [], []
    for r in range(replications):
        x, eps = _draw(n, x_range, noise_variance, RandomSource(replicate_seed(seed, r)))
        data = Dataset(x, truth(x) + eps)
        est = adaptive.fit_adaptive(data, kern, alpha=alpha, L0=L0, beta_max=beta_max)
        ad.append(float(np.mean((est.predict(grid) - ft) ** 2)))
        family = adaptive.fit_candidates(est.d1, est.grid, kern, alpha, L0)
        cands.append([np.mean((c.predict(grid) - ft) ** 2) for c in family])
        used = Dataset(np.concatenate([est.d1.x, est.d2.x]), np.concatenate([est.d1.y, est.d2.y]))
        interp.append(bool(np.array_equal(est.predict(used.x), used.y)))
        diag.append(_diagnostic(est.f_tilde, delta) and _diagnostic(est.g_tilde, delta))
        sel.append((est.beta_f, est.beta_g))
    return AdaptiveStudy(n, tuple(ad), np.array(cands), tuple(interp), tuple(diag), tuple(sel))


def curve_samples(estimator, truth, x_range, grid_size: int):
    """Rows ``(x, estimate, truth)`` on the evaluation grid."""
    g = eval_grid(x_range, grid_size)
    return np.column_stack([g, estimator(g), truth(g)])
