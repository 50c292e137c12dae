"""EPOSIC channels ``Phi_{m,n,h}: End(P_r) -> End(P_m)`` with ``r = m + n - 2h``.

The Kraus operators are

    T_j = sum_i eps_i^j f^m_{i-j+h} (f^r_i)^*,    0 <= j <= n,

with the coefficients ``eps_i^j = sum_s beta_{i,s,j}`` built from integer
binomials. Tables are cached per ``(m, n, h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .channels import KrausChannel, apply, projector
from .su2 import GroupElement, rep_matrix

NONZERO_TOL = 1e-12


@dataclass(frozen=True, order=True)
class EposicParams:
    m: int
    n: int
    h: int

    def __post_init__(self):
        for name in ("m", "n", "h"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.h > min(self.m, self.n):
            raise ValueError(f"need h <= min(m, n), got (m, n, h) = ({self.m}, {self.n}, {self.h})")

    @property
    def r(self) -> int:
        return self.m + self.n - 2 * self.h

    @property
    def in_dim(self) -> int:
        return self.r + 1

    @property
    def out_dim(self) -> int:
        return self.m + 1

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.h)

    def __str__(self) -> str:
        return f"Phi_{{{self.m},{self.n},{self.h}}}"


def _params(p) -> EposicParams:
    return p if isinstance(p, EposicParams) else EposicParams(*p)


def _comb(n: int, k: int) -> int:
    if k < 0 or k > n or n < 0:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def _normaliser(m: int, n: int, h: int) -> Fraction:
    """``sum_k C(h,k)^2 / (C(m,h-k) C(n,k))`` as an exact rational."""
    return sum((Fraction(_comb(h, k) ** 2, _comb(m, h - k) * _comb(n, k)) for k in range(h + 1)),
               Fraction(0))


def _beta_exact(p: EposicParams, i: int, s: int, j: int) -> tuple[int, Fraction]:
    """Numerator and squared denominator of ``beta``; numerator 0 outside the support."""
    m, n, h, r = p.m, p.n, p.h, p.r
    num = (-1) ** s * _comb(h, s) * _comb(n - h, j - s) * _comb(m - h, i - j + s)
    den_sq = _comb(r, i) * _comb(m, i - j + h) * _comb(n, j) * _normaliser(m, n, h)
    if den_sq == 0:
        return 0, Fraction(1)
    return num, den_sq


def beta(params, i: int, s: int, j: int) -> float:
    """The summand ``beta_{i,s,j}^{m,n,h}``; zero for out-of-range indices."""
    p = _params(params)
    num, den_sq = _beta_exact(p, i, s, j)
    if num == 0:
        return 0.0
    return num / math.sqrt(den_sq)


def _s_range(p: EposicParams, i: int, j: int) -> range:
    lo = max(0, j - i, j + p.h - p.n)
    hi = min(p.h, j, j + p.m - i - p.h)
    return range(lo, hi + 1)


def epsilon(params, i: int, j: int) -> float:
    """``eps_i^j(m, n, h)``.

    The denominator of ``beta`` does not depend on ``s``, so the alternating
    sum over ``s`` is done in exact integers and the square root is taken once.
    """
    p = _params(params)
    if not (0 <= i <= p.r and 0 <= j <= p.n):
        raise IndexError(f"(i, j) = ({i}, {j}) outside 0..{p.r} x 0..{p.n}")
    total = 0
    den_sq = None
    for s in _s_range(p, i, j):
        num, d = _beta_exact(p, i, s, j)
        if num:
            total += num
            den_sq = d
    if total == 0:
        return 0.0
    return total / math.sqrt(den_sq)


@dataclass(frozen=True)
class EpsilonTable:
    """All coefficients ``eps_i^j`` of one channel, indexed ``values[i, j]``."""

    params: EposicParams
    values: np.ndarray

    def row_norm_defect(self) -> float:
        return float(np.max(np.abs(np.sum(self.values ** 2, axis=1) - 1.0)))

    def support_violation(self) -> float:
        """Largest ``|eps_i^j|`` at an ``(i, j)`` where ``l_ij = i - j + h`` leaves ``0..m``."""
        p = self.params
        i, j = np.indices(self.values.shape)
        l = i - j + p.h
        outside = (l < 0) | (l > p.m)
        return float(np.max(np.abs(self.values[outside]), initial=0.0))


@lru_cache(maxsize=None)
def epsilon_table(params) -> EpsilonTable:
    p = _params(params)
    vals = np.zeros((p.r + 1, p.n + 1))
    for i in range(p.r + 1):
        for j in range(p.n + 1):
            vals[i, j] = epsilon(p, i, j)
    vals.setflags(write=False)
    return EpsilonTable(p, vals)


def kraus_operators(params) -> list[np.ndarray]:
    p = _params(params)
    eps = epsilon_table(p).values
    ops = []
    for j in range(p.n + 1):
        t = np.zeros((p.m + 1, p.r + 1), dtype=complex)
        for i in range(max(0, j - p.h), min(p.r, p.m - p.h + j) + 1):
            t[i - j + p.h, i] = eps[i, j]
        ops.append(t)
    return ops


@lru_cache(maxsize=None)
def eposic_channel(params) -> KrausChannel:
    """The EPOSIC channel ``Phi_{m,n,h}`` as ``n + 1`` Kraus operators."""
    return KrausChannel(kraus_operators(_params(params)))


def basis_action_range(params, i: int) -> range:
    """The ``j`` range printed with the closed-form basis action."""
    p = _params(params)
    return range(max(0, i + p.h - p.m), min(i + p.h, p.n) + 1)


def apply_to_basis(params, i: int) -> np.ndarray:
    """``Phi(f_i f_i^*)`` from the closed form ``sum_j (eps_i^j)^2 f_l f_l^*``."""
    p = _params(params)
    if not 0 <= i <= p.r:
        raise IndexError(f"basis index {i} outside 0..{p.r}")
    eps = epsilon_table(p).values
    out = np.zeros((p.m + 1, p.m + 1), dtype=complex)
    for j in basis_action_range(p, i):
        l = i - j + p.h
        out[l, l] += eps[i, j] ** 2
    return out


def apply_to_basis_direct(params, i: int) -> np.ndarray:
    p = _params(params)
    e = np.zeros(p.r + 1, dtype=complex)
    e[i] = 1.0
    return apply(eposic_channel(p), projector(e))


def nonzero_pair_witness(params, i: int) -> tuple[int, int]:
    """Indices ``j1 < j2`` with ``eps_i^{j1}`` and ``eps_i^{j2}`` both nonzero (needs h > 0)."""
    p = _params(params)
    if p.h == 0:
        raise ValueError("a nonzero pair only exists for h > 0")
    if not 0 <= i <= p.r:
        raise IndexError(f"basis index {i} outside 0..{p.r}")
    j1 = 0 if i <= p.m - p.h else i - p.m + p.h
    j2 = i + p.h if i <= p.n - p.h else p.n
    eps = epsilon_table(p).values
    assert j1 < j2, (p, i, j1, j2)
    assert abs(eps[i, j1]) > NONZERO_TOL and abs(eps[i, j2]) > NONZERO_TOL, (p, i, j1, j2)
    return j1, j2


def covariance_defect(ch: KrausChannel, g: GroupElement, a: np.ndarray,
                      in_degree: int | None = None, out_degree: int | None = None) -> float:
    """``||Phi(rho_r(g) A rho_r(g)^*) - rho_m(g) Phi(A) rho_m(g)^*||_F``.

    ``ch`` may also be an ``EposicParams`` (or ``(m, n, h)`` tuple). Degrees
    default to ``dim - 1`` on each side.
    """
    if not isinstance(ch, KrausChannel):
        ch = eposic_channel(_params(ch))
    r = ch.in_dim - 1 if in_degree is None else in_degree
    m = ch.out_dim - 1 if out_degree is None else out_degree
    u_in = rep_matrix(r, g)
    u_out = rep_matrix(m, g)
    lhs = apply(ch, u_in @ a @ u_in.conj().T)
    rhs = u_out @ apply(ch, a) @ u_out.conj().T
    return float(np.linalg.norm(lhs - rhs))


def all_params(max_sum: int) -> list[EposicParams]:
    """Every valid ``(m, n, h)`` with ``m + n <= max_sum``, sorted."""
    return [EposicParams(m, n, h)
            for m in range(max_sum + 1)
            for n in range(max_sum - m + 1)
            for h in range(min(m, n) + 1)]
