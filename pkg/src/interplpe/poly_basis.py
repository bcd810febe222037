"""Multi-indices, the scaled monomial feature vector and Taylor polynomials."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import IncompleteDerivatives, InvalidParameter

MultiIndex = tuple[int, ...]


def _indices(order: int, dim: int) -> tuple[MultiIndex, ...]:
    out: list[MultiIndex] = []
    for total in range(order + 1):
        level = [s for s in itertools.product(range(total + 1), repeat=dim) if sum(s) == total]
        out.extend(sorted(level, reverse=True))
    return tuple(out)


@dataclass(frozen=True)
class Basis:
    """All multi-indices ``s`` with ``|s| <= order`` in ``dim`` variables.

    Indices are sorted by total degree; within a degree, lexicographically
    descending, so ``(1, 0)`` precedes ``(0, 1)``.
    """

    order: int
    dim: int
    indices: tuple[MultiIndex, ...] = field(init=False)
    exponents: np.ndarray = field(init=False, repr=False, compare=False)
    inv_factorials: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 0 or self.dim < 1:
            raise InvalidParameter("need order >= 0 and dim >= 1")
        idx = _indices(self.order, self.dim)
        fact = [math.factorial(k) for k in range(self.order + 1)]
        # exact integer products, converted to float once
        inv = np.array([1.0 / float(math.prod(fact[c] for c in s)) for s in idx])
        exps = np.array(idx, dtype=np.int64).reshape(len(idx), self.dim)
        exps.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "inv_factorials", inv)

    def __len__(self) -> int:
        return len(self.indices)


def enumerate_basis(order: int, dim: int) -> Basis:
    return Basis(order, dim)


def u_vector(basis: Basis, u) -> np.ndarray:
    """Feature vector ``(u**s / s!)`` over the basis indices.

    ``u`` has the coordinates on its last axis (a scalar is a point in one
    dimension), so a stack of points of shape ``(..., d)`` gives ``(..., C)``.
    """
    u = np.asarray(u, dtype=float)
    if basis.dim == 1 and (u.ndim == 0 or u.shape[-1] != 1):
        u = u[..., None]
    if u.shape[-1] != basis.dim:
        raise InvalidParameter(f"point dimension {u.shape[-1]} != basis dim {basis.dim}")
    # powers[..., k, p] = u_k ** p by repeated multiplication
    powers = np.empty(u.shape + (basis.order + 1,))
    powers[..., 0] = 1.0
    for p in range(1, basis.order + 1):
        powers[..., p] = powers[..., p - 1] * u
    if basis.dim == 1:
        mono = powers[..., 0, :]
    else:
        mono = np.prod(powers[..., np.arange(basis.dim), basis.exponents], axis=-1)
    return mono * basis.inv_factorials


def taylor_eval(derivs: Mapping[MultiIndex, float], y, x, order: int) -> float:
    """Degree-``order`` Taylor polynomial built at ``y``, evaluated at ``x``.

    ``derivs[s]`` must hold the partial derivative ``D^s f(y)`` for every
    multi-index with ``|s| <= order``.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    basis = Basis(order, len(y))
    feats = u_vector(basis, x - y)
    total = 0.0
    for s, phi in zip(basis.indices, feats):
        key = s if s in derivs else (s[0] if len(s) == 1 and s[0] in derivs else None)
        if key is None:
            raise IncompleteDerivatives(s)
        total += float(phi) * float(derivs[key])
    return total
