"""Radial kernels used by the local polynomial estimators.

Built-ins (``r = ||u||``, exponent ``a``):

* ``k1``   : ``r**-a * 1(r <= 1)``
* ``k2``   : ``r**-a * (1 - r)_+**2``
* ``k3``   : ``r**-a * cos(pi r / 2)**2 * 1(r <= 1)``
* ``rect`` : ``1(r <= 1)``
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidExponent, InvalidParameter, NoLowerBound, QuadratureDiverged
from .numerics import quad_1d


@dataclass(frozen=True)
class Kernel:
    """A nonnegative radial kernel ``K(u) = profile(||u||)``.

    ``profile`` receives an array of radii; for singular kernels it may
    return ``inf`` at zero.  Values beyond ``support_radius`` are forced to 0.
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    singular: bool
    a: float = 0.0
    support_radius: float = 1.0
    continuous_off_origin: bool = True

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.asarray(self.profile(r), dtype=float)
        val = np.where(r <= self.support_radius, val, 0.0)
        if self.singular:
            val = np.where(r == 0.0, np.inf, val)
        return val

    def __call__(self, u):
        """Evaluate at points whose coordinates lie on the last axis of ``u``.

        A scalar or 0-d array is read as a point of the real line.
        """
        u = np.asarray(u, dtype=float)
        r = np.abs(u) if u.ndim == 0 else np.linalg.norm(u, axis=-1)
        return self.radial(r)


_NAMES = {"k1": "k1", "k2": "k2", "k3": "k3", "rect": "rect", "krect": "rect"}


def kernel_names() -> list[str]:
    return ["k1", "k2", "k3", "rect"]


def make_builtin(name: str, a: float = 0.2, d: int = 1, strict: bool = True) -> Kernel:
    """One of the four experiment kernels.

    ``strict`` enforces ``0 <= a < d/2`` for the power kernels, the range in
    which ``K**2`` is integrable.  ``rect`` ignores ``a``.
    """
    key = _NAMES.get(name.lower())
    if key is None:
        raise InvalidParameter(f"unknown kernel {name!r}; choose from {kernel_names()}")
    if key == "rect":
        return Kernel("rect", lambda r: np.ones_like(r), singular=False, a=0.0,
                      continuous_off_origin=False)
    a = float(a)
    if strict and not 0.0 <= a < d / 2:
        raise InvalidExponent(f"exponent a={a} outside [0, {d / 2})")
    if a < 0:
        raise InvalidExponent("exponent must be nonnegative")
    singular = a > 0
    if key == "k1":
        return Kernel("k1", lambda r: r ** -a, singular, a, continuous_off_origin=False)
    if key == "k2":
        return Kernel("k2", lambda r: r ** -a * np.clip(1.0 - r, 0.0, None) ** 2, singular, a)
    return Kernel("k3", lambda r: r ** -a * np.cos(0.5 * np.pi * r) ** 2, singular, a)


class SquareIntegrability(NamedTuple):
    finite: bool
    value: float | None


def check_square_integrable(k: Kernel, d: int, abs_tol: float = 1e-9) -> SquareIntegrability:
    """Integral of ``K**2`` over ``R^d`` in polar coordinates."""
    if not math.isfinite(k.support_radius):
        raise InvalidParameter("kernel support must be bounded")
    sphere = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)

    def integrand(r):
        return k.radial(r) ** 2 * r ** (d - 1)

    try:
        value = quad_1d(integrand, 0.0, k.support_radius, abs_tol=abs_tol)
    except QuadratureDiverged:
        return SquareIntegrability(False, None)
    return SquareIntegrability(True, sphere * value)


class SingularityBound(NamedTuple):
    c0: float
    delta: float


def singularity_bound(k: Kernel, points: int = 20_000) -> SingularityBound:
    """Constants with ``K(u) >= c0`` whenever ``||u|| <= delta``.

    ``delta`` is half the support radius and ``c0`` the minimum of the
    profile on a uniform radial grid over ``(0, delta]``.
    """
    if not k.support_radius > 0 or not math.isfinite(k.support_radius):
        raise InvalidParameter("need a bounded positive support radius")
    delta = 0.5 * k.support_radius
    r = delta * np.arange(1, points + 1) / points
    c0 = float(np.min(k.radial(r)))
    if not c0 > 0:
        raise NoLowerBound(f"kernel {k.name} vanishes near the origin")
    return SingularityBound(c0, delta)
