"""Minimal output entropy: multi-start search over pure inputs and closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channels import (KrausChannel, apply, convex_combination, entropy_of_spectrum,
                       output_vectors, projector, random_pure_state, vector_to_json,
                       von_neumann_entropy)
from .eposic import eposic_channel

DEFAULT_RESTARTS = 32
MAX_EVALS = 20000
STALL_ITERS = 50
STALL_TOL = 1e-10
AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class MoeResult:
    value: float
    minimizer: np.ndarray
    restarts_used: int
    best_restart_seed: int
    converged: bool
    restart_values: tuple[float, ...] = ()

    def to_json(self) -> dict:
        return {
            "value_bits": self.value,
            "minimizer": vector_to_json(self.minimizer),
            "restarts_used": self.restarts_used,
            "best_restart_seed": self.best_restart_seed,
            "converged": self.converged,
        }


def output_entropy(ch: KrausChannel, w: np.ndarray) -> float:
    """``S(Phi(w w^*))`` for a (not necessarily normalised) vector ``w``.

    Uses the Gram matrix of the vectors ``T_j w`` when that is the smaller of
    the two matrices sharing the nonzero spectrum.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    w = w / np.linalg.norm(w)
    u = ch.stack @ w
    if u.shape[0] < u.shape[1]:
        gram = u.conj() @ u.T
    else:
        gram = u.T @ u.conj()
    return entropy_of_spectrum(np.linalg.eigvalsh(gram))


def _local_search(ch: KrausChannel, w0: np.ndarray, max_evals: int) -> tuple[float, np.ndarray]:
    d = ch.in_dim
    best = [math.inf, w0]
    history: list[float] = []

    def objective(x):
        w = x[:d] + 1j * x[d:]
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return math.log2(ch.out_dim) + 1.0
        w = w / nrm
        val = output_entropy(ch, w)
        if val < best[0]:
            best[0], best[1] = val, w
        return val

    def callback(intermediate_result):
        history.append(best[0])
        if len(history) > STALL_ITERS and history[-STALL_ITERS - 1] - history[-1] < STALL_TOL:
            raise StopIteration

    # a collapsed simplex can stall away from the minimum; rebuild it around
    # the incumbent until a fresh simplex no longer helps
    used = 0
    while used < max_evals:
        start = best[0]
        w = best[1]
        history.clear()
        res = minimize(objective, np.concatenate([w.real, w.imag]), method="Nelder-Mead",
                       callback=callback,
                       options={"maxfev": max_evals - used, "xatol": 1e-14, "fatol": 1e-14,
                                "adaptive": 2 * d > 10})
        used += res.nfev
        if start - best[0] < STALL_TOL:
            break
    return best[0], best[1]


def moe_numeric(ch: KrausChannel, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                max_evals: int = MAX_EVALS) -> MoeResult:
    """Minimise ``S(Phi(w w^*))`` over unit vectors ``w``.

    Each restart draws a uniform starting vector from its own generator
    seeded with ``seed ^ restart_index`` and runs a Nelder-Mead simplex over
    the ``2 * in_dim`` real coordinates, normalising every proposal. The
    lowest value wins, ties going to the lowest restart index.
    """
    if restarts < 1:
        raise ValueError("need at least one restart")
    values = []
    vectors = []
    for idx in range(restarts):
        rng = np.random.default_rng(seed ^ idx)
        w0 = random_pure_state(ch.in_dim, rng)
        if ch.in_dim == 1:
            val, w = output_entropy(ch, w0), w0
        else:
            val, w = _local_search(ch, w0, max_evals)
        values.append(val)
        vectors.append(w)
    best = int(np.argmin(values))
    w = vectors[best] / np.linalg.norm(vectors[best])
    value = von_neumann_entropy(apply(ch, projector(w)))
    ordered = sorted(values)
    converged = len(ordered) < 2 or ordered[1] - ordered[0] <= AGREEMENT_TOL
    return MoeResult(value=value, minimizer=w, restarts_used=restarts,
                     best_restart_seed=seed ^ best, converged=converged,
                     restart_values=tuple(values))


def moe_exact_m11(m: int) -> float:
    """Closed form for ``Phi_{m,1,1}``: the entropy of ``(1/(m+1), m/(m+1))``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    a = 1.0 / (m + 1)
    b = m / (m + 1)
    return -(a * math.log2(a) + b * math.log2(b))


def pair_overlap_R(m: int, w: np.ndarray) -> float:
    """``R = |u0|^2 |u1|^2 - |<u0|u1>|^2`` for the two Kraus images under ``Phi_{m,1,1}``.

    Computed as ``det G / (tr G)**2`` for the Gram matrix ``G`` of ``u0, u1``.
    For a unit ``w`` the trace is 1, so this is the same quantity, but the
    ratio cancels the rounding in ``|w|``; near ``R = 1/4`` that rounding
    would otherwise be amplified by the square root in :func:`eigenvalues_m11`.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.shape[0] != m:
        raise ValueError(f"input of Phi_{{{m},1,1}} has dimension {m}, got {w.shape[0]}")
    u0, u1 = output_vectors(eposic_channel((m, 1, 1)), w)
    n0 = np.vdot(u0, u0).real
    n1 = np.vdot(u1, u1).real
    return float((n0 * n1 - abs(np.vdot(u0, u1)) ** 2) / (n0 + n1) ** 2)


def eigenvalues_m11(R: float) -> tuple[float, float]:
    """Nonzero output eigenvalues ``(1 +- sqrt(1 - 4R)) / 2`` of ``Phi_{m,1,1}``."""
    if R < -1e-12 or R > 0.25 + 1e-12:
        raise ValueError(f"R = {R!r} outside [0, 1/4]")
    disc = math.sqrt(max(0.0, 1.0 - 4.0 * R))
    return (1 + disc) / 2, (1 - disc) / 2


def spectrum_E11_extreme(m: int, which: str) -> list[float]:
    """Spectrum of ``Phi(E_11)`` for the two EPOSIC channels ``P_1 -> P_m``.

    ``upper`` is ``Phi_{m,m+1,m}``; ``lower`` is ``Phi_{m,m-1,m-1}`` with an
    explicit trailing zero so both lists have ``m + 1`` entries.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if which == "upper":
        return [2 * (m - j + 1) / ((m + 1) * (m + 2)) for j in range(m + 1)]
    if which == "lower":
        return [2 * (j + 1) / (m * (m + 1)) for j in range(m)] + [0.0]
    raise ValueError(f"which must be 'upper' or 'lower', got {which!r}")


def covariant_1_to_m_spectrum(m: int, p: float) -> np.ndarray:
    """Eigenvalues of ``(p Phi_{m,m+1,m} + (1-p) Phi_{m,m-1,m-1})(E_11)``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p!r} outside [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    j = np.arange(m + 1)
    return 2 * (m - j + 1) * p / ((m + 1) * (m + 2)) + 2 * j * (1 - p) / (m * (m + 1))


def moe_covariant_1_to_m(m: int, p: float) -> float:
    return entropy_of_spectrum(covariant_1_to_m_spectrum(m, p))


def covariant_1_to_m_channel(m: int, p: float) -> KrausChannel:
    """``p Phi_{m,m+1,m} + (1-p) Phi_{m,m-1,m-1}`` as one Kraus family."""
    return convex_combination([eposic_channel((m, m + 1, m)), eposic_channel((m, m - 1, m - 1))],
                              [p, 1.0 - p])


def moe_exact_upper(m: int) -> float:
    """Closed form for ``Phi_{m,m+1,m}``."""
    c = (m + 1) * (m + 2)
    return -sum(2 * j / c * math.log2(2 * j / c) for j in range(1, m + 2))


def moe_exact_lower(m: int) -> float:
    """Closed form for ``Phi_{m,m-1,m-1}``."""
    c = m * (m + 1)
    return -sum(2 * j / c * math.log2(2 * j / c) for j in range(1, m + 1))


def moe_lower_bound(m: int) -> float:
    """Lower bound on ``S_min`` for every covariant ``P_1 -> P_m`` channel, ``m >= 5``.

    Returns ``((m-2) / (2m(m+1)))**2 / (4 ln 2)``, the constant the argument
    actually reaches. See :func:`lower_bound_report` for the variant with
    denominator ``16 m (m+1)**2``.
    """
    if m < 5:
        raise ValueError("the bound is only established for m >= 5")
    return (m - 2) ** 2 / (16 * m ** 2 * (m + 1) ** 2) / math.log(2)


def moe_lower_bound_stated(m: int) -> float:
    """The variant ``(m-2)**2 / (16 m (m+1)**2 ln 2)`` (larger by a factor ``m``)."""
    if m < 5:
        raise ValueError("the bound is only established for m >= 5")
    return (m - 2) ** 2 / (16 * m * (m + 1) ** 2) / math.log(2)


def lower_bound_report(m: int) -> dict:
    proof = moe_lower_bound(m)
    stated = moe_lower_bound_stated(m)
    return {
        "m": m,
        "bound_bits": proof,
        "bound_proof_form": proof,
        "bound_stated_form": stated,
        "ratio_stated_over_proof": stated / proof,
        "discrepancy": not math.isclose(proof, stated, rel_tol=1e-12),
    }
