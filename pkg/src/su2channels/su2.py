"""Irreducible representations of SU(2) on homogeneous polynomials.

The space ``P_m`` of degree-``m`` homogeneous polynomials in ``x1, x2`` carries
the irreducible representation ``rho_m``. We always work in the orthonormal
standard basis ``f_l = x1**l * x2**(m-l) / sqrt(l! (m-l)!)`` with ``l = 0..m``
in ascending order (0-based labels).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Largest degree for which ``rep_matrix`` is documented to be accurate.
MAX_ACCURATE_DEGREE = 40


@dataclass(frozen=True)
class RepSpace:
    """Bookkeeping for ``P_m`` and its standard basis."""

    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"degree must be nonnegative, got {self.m}")

    @property
    def dim(self) -> int:
        return self.m + 1

    @property
    def labels(self) -> range:
        return range(self.m + 1)

    def norm_factor(self, l: int) -> float:
        """The coefficient ``a_m^l = 1/sqrt(l!(m-l)!)`` of ``f_l``."""
        return math.exp(-0.5 * _log_fact_pair(self.m, l))

    def basis_vector(self, l: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[l] = 1.0
        return e


@dataclass(frozen=True)
class GroupElement:
    """The SU(2) element ``[[a, b], [-conj(b), conj(a)]]``."""

    a: complex
    b: complex

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")

    @classmethod
    def identity(cls) -> GroupElement:
        return cls(1.0 + 0j, 0j)

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> GroupElement:
        g = np.asarray(g, dtype=complex)
        if g.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        if not (np.isclose(g[1, 0], -np.conj(g[0, 1]), atol=1e-12)
                and np.isclose(g[1, 1], np.conj(g[0, 0]), atol=1e-12)):
            raise ValueError("matrix is not of SU(2) form [[a, b], [-b*, a*]]")
        return cls(complex(g[0, 0]), complex(g[0, 1]))

    def matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-np.conj(b), np.conj(a)]], dtype=complex)

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return GroupElement.from_matrix(self.matrix() @ other.matrix())

    def inverse(self) -> GroupElement:
        return GroupElement(np.conj(self.a), -self.b)


def _log_fact_pair(m: int, l: int) -> float:
    return math.lgamma(l + 1) + math.lgamma(m - l + 1)


def random_group_element(seed: int | np.random.Generator) -> GroupElement:
    """Haar-random SU(2) element.

    Four standard normals are normalised to a point on the 3-sphere, which is
    exactly the Haar measure on SU(2). Passing an int makes the draw
    deterministic; a ``Generator`` is consumed in place.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    a = complex(x[0], x[1])
    b = complex(x[2], x[3])
    # renormalise in complex arithmetic so the 1e-12 invariant holds exactly
    s = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    return GroupElement(a / s, b / s)


def rep_matrix(m: int, g: GroupElement) -> np.ndarray:
    """Matrix of ``rho_m(g)`` in the standard basis of ``P_m``.

    ``(rho_m(g) f)(x1, x2) = f(a x1 - conj(b) x2, b x1 + conj(a) x2)``.
    Column ``l`` holds the expansion of ``rho_m(g) f_l``: the monomial
    coefficients of ``(a x1 - b* x2)**l (b x1 + a* x2)**(m-l)`` rescaled by
    ``a_m^l / a_m^i``.
    """
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    a, b = complex(g.a), complex(g.b)
    ac, bc = a.conjugate(), b.conjugate()
    log_norm = np.array([_log_fact_pair(m, i) for i in range(m + 1)])
    out = np.zeros((m + 1, m + 1), dtype=complex)
    for l in range(m + 1):
        # coefficient of x1**p in (a x1 - b* x2)**l
        first = np.array([math.comb(l, p) * a ** p * (-bc) ** (l - p) for p in range(l + 1)])
        # coefficient of x1**q in (b x1 + a* x2)**(m-l)
        second = np.array([math.comb(m - l, q) * b ** q * ac ** (m - l - q)
                           for q in range(m - l + 1)])
        monomial = np.convolve(first, second)
        # f-basis coefficient i = monomial_i / a_m^i, times a_m^l from f_l itself
        scale = np.exp(0.5 * (log_norm - log_norm[l]))
        out[:, l] = monomial * scale
    return out


def ladder_operators(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(Jz, Jplus, Jminus)`` on ``P_m``.

    ``Jz f_l = (l - m/2) f_l``, ``Jplus f_l = sqrt((l+1)(m-l)) f_{l+1}`` and
    ``Jminus = Jplus^T``. With these conventions the derivative of
    ``rep_matrix`` at the identity is ``2i Jz`` along ``diag(i, -i)`` and
    ``Jplus - Jminus`` along ``[[0, 1], [-1, 0]]``.
    """
    if m < 0:
        raise ValueError(f"degree must be nonnegative, got {m}")
    l = np.arange(m + 1)
    jz = np.diag(l - m / 2).astype(complex)
    jp = np.zeros((m + 1, m + 1), dtype=complex)
    for k in range(m):
        jp[k + 1, k] = math.sqrt((k + 1) * (m - k))
    return jz, jp, jp.T.copy()
