"""Kraus-form channels and the linear algebra around them.

Conventions
-----------
* Kraus operators are ``out_dim x in_dim`` complex matrices.
* The Choi matrix is ``sum_ij Phi(E_ij) kron E_ij``: the output factor comes
  first, the input factor second.
* Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

COMPLETENESS_TOL = 1e-10
STATE_TOL = 1e-10
EIGEN_CLAMP = 1e-12
RANK_RTOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive map ``A -> sum_j T_j A T_j^dagger``.

    With ``trace_preserving=True`` (the default) the completeness relation
    ``sum_j T_j^dagger T_j = I`` is checked at construction. Duals of channels
    are stored with ``trace_preserving=False``.
    """

    ops: tuple[np.ndarray, ...]
    trace_preserving: bool = True
    _stack: np.ndarray = field(init=False, repr=False, compare=False)

    def __init__(self, ops: Iterable[np.ndarray], trace_preserving: bool = True):
        ops = tuple(np.array(t, dtype=complex) for t in ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(t.shape != shape for t in ops):
            raise ValueError("Kraus operators must be 2-d matrices of equal shape")
        stack = np.stack(ops)
        stack.setflags(write=False)
        for t in ops:
            t.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "trace_preserving", trace_preserving)
        object.__setattr__(self, "_stack", stack)
        if trace_preserving:
            defect = completeness_defect(self)
            if defect > COMPLETENESS_TOL:
                raise ValueError(f"Kraus operators are not complete (defect {defect:.3e})")

    @property
    def in_dim(self) -> int:
        return self.ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.ops[0].shape[0]

    @property
    def stack(self) -> np.ndarray:
        """Kraus operators as one read-only array of shape ``(k, out, in)``."""
        return self._stack

    def __len__(self) -> int:
        return len(self.ops)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply(self, rho)


def completeness_defect(ch: KrausChannel) -> float:
    """Frobenius norm of ``sum_j T_j^dagger T_j - I_in``."""
    k = ch.stack
    s = np.einsum("jki,jkl->il", k.conj(), k)
    return float(np.linalg.norm(s - np.eye(ch.in_dim)))


def unitality_defect(ch: KrausChannel) -> float:
    """Frobenius norm of ``sum_j T_j T_j^dagger - I_out``."""
    k = ch.stack
    s = np.einsum("jik,jlk->il", k, k.conj())
    return float(np.linalg.norm(s - np.eye(ch.out_dim)))


def check_density_matrix(rho: np.ndarray, tol: float = STATE_TOL) -> np.ndarray:
    """Validate ``rho`` as a state and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def check_pure_state(w: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    w = np.asarray(w, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(w) - 1) > tol:
        raise ValueError("state vector is not normalised")
    return w


def projector(w: np.ndarray) -> np.ndarray:
    """``w w^dagger`` for a vector ``w``."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    return np.outer(w, w.conj())


def apply(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.in_dim, ch.in_dim):
        raise ValueError(f"input has shape {rho.shape}, channel expects {ch.in_dim}x{ch.in_dim}")
    k = ch.stack
    return np.einsum("jab,bc,jdc->ad", k, rho, k.conj())


def output_vectors(ch: KrausChannel, w: np.ndarray) -> list[np.ndarray]:
    """The vectors ``u_j = T_j w`` in Kraus order."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.shape[0] != ch.in_dim:
        raise ValueError(f"vector has length {w.shape[0]}, channel expects {ch.in_dim}")
    return list(ch.stack @ w)


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def choi(ch: KrausChannel) -> np.ndarray:
    """``C = sum_ij Phi(E_ij) kron E_ij`` (output factor first)."""
    k = ch.stack
    # C[(a,i),(b,j)] = sum_t T[t,a,i] conj(T[t,b,j])
    c = np.einsum("tai,tbj->aibj", k, k.conj())
    n = ch.out_dim * ch.in_dim
    return c.reshape(n, n)


def numerical_rank(mat: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Count singular values above ``rtol * s_max * max(shape)``."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0] * max(mat.shape)))


def kraus_span_rank(ch: KrausChannel) -> int:
    """Dimension of the span of the vectorised Kraus operators."""
    return numerical_rank(ch.stack.reshape(len(ch), -1))


def dual(ch: KrausChannel) -> KrausChannel:
    """Adjoint map with Kraus operators ``T_j^dagger`` (unital, not TP)."""
    return KrausChannel([t.conj().T for t in ch.ops], trace_preserving=False)


def tensor(ch1: KrausChannel, ch2: KrausChannel) -> KrausChannel:
    return KrausChannel([np.kron(t, s) for t in ch1.ops for s in ch2.ops],
                        trace_preserving=ch1.trace_preserving and ch2.trace_preserving)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """``outer o inner`` as a Kraus channel."""
    if outer.in_dim != inner.out_dim:
        raise ValueError("dimension mismatch in composition")
    return KrausChannel([s @ t for s in outer.ops for t in inner.ops],
                        trace_preserving=outer.trace_preserving and inner.trace_preserving)


def convex_combination(channels: Sequence[KrausChannel], weights: Sequence[float]) -> KrausChannel:
    """``sum_i p_i Phi_i`` realised by the Kraus family ``sqrt(p_i) T``."""
    if len(channels) != len(weights):
        raise ValueError("need one weight per channel")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise ValueError("weights must form a probability vector")
    ops = [np.sqrt(p) * t for ch, p in zip(channels, w) if p > 0 for t in ch.ops]
    return KrausChannel(ops)


def partial_trace(mat: np.ndarray, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Partial trace of an operator on ``A kron B``.

    ``keep="A"`` traces out ``B`` and vice versa. For Choi matrices built by
    :func:`choi`, ``A`` is the output factor and ``B`` the input factor.
    """
    mat = np.asarray(mat)
    if mat.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(f"matrix of shape {mat.shape} does not act on {dim_a}x{dim_b}")
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(mat: np.ndarray, dim_a: int, dim_b: int, sys: str = "B") -> np.ndarray:
    mat = np.asarray(mat)
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if sys == "B":
        t = t.transpose(0, 3, 2, 1)
    elif sys == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"sys must be 'A' or 'B', got {sys!r}")
    return t.reshape(dim_a * dim_b, dim_a * dim_b)


def entropy_of_spectrum(eigs: np.ndarray) -> float:
    """Shannon entropy in bits, after clamping to ``[0, 1]`` and zeroing tiny values."""
    p = np.clip(np.asarray(eigs, dtype=float), 0.0, 1.0)
    p = p[p > EIGEN_CLAMP]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """``-tr(rho log2 rho)``."""
    rho = np.asarray(rho)
    return entropy_of_spectrum(np.linalg.eigvalsh((rho + rho.conj().T) / 2))


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vector in ``C^dim`` (normalised complex Gaussian)."""
    w = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return w / np.linalg.norm(w)


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# JSON interchange: matrices are nested row-major lists of [re, im] pairs.

def matrix_to_json(mat: np.ndarray) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(mat)]


def matrix_from_json(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("expected nested rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_json(vec: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=complex).reshape(-1)]


def vector_from_json(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[-1] != 2:
        raise ValueError("expected a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]
