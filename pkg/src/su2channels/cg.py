"""Clebsch-Gordan splitting of ``P_{m1} (x) P_{m2}`` and tensor-product MOE bounds.

``P_{m1} (x) P_{m2} = W_0 + ... + W_L`` with ``W_l ~ P_{m1+m2-2l}`` and
``L = min(m1, m2)``. Each block is built from its highest-weight vector,
the kernel of the total raising operator on the weight space
``(m1+m2)/2 - l``, by repeated lowering. Column ``k`` of the isometry ``B_l``
is the image of the standard basis vector ``f_k`` of ``P_{m1+m2-2l}``, so
``B_l`` intertwines ``rho_{m1+m2-2l}`` with ``rho_{m1} (x) rho_{m2}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import KrausChannel, apply, compose, tensor
from .moe import DEFAULT_RESTARTS, moe_numeric
from .su2 import GroupElement, ladder_operators, rep_matrix


@dataclass(frozen=True)
class CGBlock:
    l: int
    isometry: np.ndarray
    projector: np.ndarray

    @property
    def degree(self) -> int:
        return self.isometry.shape[1] - 1


@dataclass(frozen=True)
class CGDecomposition:
    m1: int
    m2: int
    blocks: tuple[CGBlock, ...]

    @property
    def dim(self) -> int:
        return (self.m1 + 1) * (self.m2 + 1)

    @property
    def projectors(self) -> list[np.ndarray]:
        return [b.projector for b in self.blocks]

    def residuals(self) -> dict[str, float]:
        """Isometry, orthogonality and resolution-of-identity defects (max abs entry)."""
        iso = max(np.abs(b.isometry.conj().T @ b.isometry - np.eye(b.degree + 1)).max()
                  for b in self.blocks)
        orth = 0.0
        for a in self.blocks:
            for b in self.blocks:
                target = a.projector if a.l == b.l else 0.0
                orth = max(orth, np.abs(a.projector @ b.projector - target).max())
        total = sum(self.projectors)
        ident = np.abs(total - np.eye(self.dim)).max()
        return {"isometry": float(iso), "orthogonality": float(orth), "identity": float(ident)}

    def equivariance_defect(self, g: GroupElement) -> float:
        u = tensor_rep(self.m1, self.m2, g)
        worst = 0.0
        for b in self.blocks:
            worst = max(worst, np.abs(u @ b.projector - b.projector @ u).max())
            v = rep_matrix(b.degree, g)
            worst = max(worst, np.abs(u @ b.isometry - b.isometry @ v).max())
        return float(worst)


def tensor_rep(m1: int, m2: int, g: GroupElement) -> np.ndarray:
    return np.kron(rep_matrix(m1, g), rep_matrix(m2, g))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > 1e-10 * np.abs(v).max())[0]
    return v * (abs(v[idx]) / v[idx])


@lru_cache(maxsize=None)
def cg_decompose(m1: int, m2: int) -> CGDecomposition:
    if m1 < 0 or m2 < 0:
        raise ValueError("degrees must be nonnegative")
    _, jp1, _ = ladder_operators(m1)
    _, jp2, _ = ladder_operators(m2)
    i1 = np.eye(m1 + 1)
    i2 = np.eye(m2 + 1)
    raise_op = np.kron(jp1, i2) + np.kron(i1, jp2)
    lower_op = raise_op.T
    # basis index of f_a (x) f_b is a * (m2 + 1) + b; weight index is a + b
    idx_sum = np.add.outer(np.arange(m1 + 1), np.arange(m2 + 1)).reshape(-1)
    blocks = []
    for l in range(min(m1, m2) + 1):
        cols = np.flatnonzero(idx_sum == m1 + m2 - l)
        _, s, vh = np.linalg.svd(raise_op[:, cols])
        # the weight space has l + 1 vectors and the kernel is one-dimensional
        null = vh[-1].conj()
        if len(s) == len(cols) and s[-1] > 1e-8:
            raise RuntimeError(f"no highest-weight vector found for block {l}")
        hw = np.zeros(len(idx_sum), dtype=complex)
        hw[cols] = null
        hw = _fix_phase(hw / np.linalg.norm(hw))
        deg = m1 + m2 - 2 * l
        iso = np.zeros((len(idx_sum), deg + 1), dtype=complex)
        iso[:, deg] = hw
        v = hw
        for k in range(deg, 0, -1):
            v = lower_op @ v
            v = v / np.linalg.norm(v)
            iso[:, k - 1] = v
        iso.setflags(write=False)
        proj = iso @ iso.conj().T
        proj.setflags(write=False)
        blocks.append(CGBlock(l, iso, proj))
    return CGDecomposition(m1, m2, tuple(blocks))


def pinching_channel(decomp: CGDecomposition) -> KrausChannel:
    """``A -> sum_l q_l A q_l`` onto the irreducible blocks."""
    return KrausChannel(decomp.projectors)


def _degree(dim: int) -> int:
    return dim - 1


def restricted_channel(ch1: KrausChannel, ch2: KrausChannel, k: int) -> KrausChannel:
    """``Phi1 (x) Phi2`` restricted to the input block ``V_k ~ P_{r1+r2-2k}``."""
    r1, r2 = _degree(ch1.in_dim), _degree(ch2.in_dim)
    if not 0 <= k <= min(r1, r2):
        raise ValueError(f"block index {k} outside 0..{min(r1, r2)}")
    b = cg_decompose(r1, r2).blocks[k].isometry
    return KrausChannel([np.kron(t, s) @ b for t in ch1.ops for s in ch2.ops])


def pinched_restricted_channel(ch1: KrausChannel, ch2: KrausChannel, k: int) -> KrausChannel:
    """``E_P o (Phi1 (x) Phi2)|_{V_k}`` with ``E_P`` pinching onto the output blocks."""
    out = cg_decompose(_degree(ch1.out_dim), _degree(ch2.out_dim))
    return compose(pinching_channel(out), restricted_channel(ch1, ch2, k))


def lambda_weights(ch1: KrausChannel, ch2: KrausChannel, k: int,
                   state: np.ndarray | None = None) -> np.ndarray:
    """Block weights ``tr(q_l (Phi1 (x) Phi2)(B_k rho B_k^*) q_l)`` over ``l``.

    ``rho`` defaults to the maximally mixed state on ``V_k``; by covariance
    the weights do not depend on it.
    """
    r1, r2 = _degree(ch1.in_dim), _degree(ch2.in_dim)
    if not 0 <= k <= min(r1, r2):
        raise ValueError(f"block index {k} outside 0..{min(r1, r2)}")
    b = cg_decompose(r1, r2).blocks[k].isometry
    if state is None:
        state = np.eye(b.shape[1]) / b.shape[1]
    out = apply(tensor(ch1, ch2), b @ state @ b.conj().T)
    dec = cg_decompose(_degree(ch1.out_dim), _degree(ch2.out_dim))
    return np.array([np.trace(q @ out @ q).real for q in dec.projectors])


def restricted_covariance_defect(ch: KrausChannel, in_degree: int, m1: int, m2: int,
                                 g: GroupElement, a: np.ndarray) -> float:
    """Covariance of a channel ``End(P_r) -> End(P_{m1} (x) P_{m2})``."""
    u_in = rep_matrix(in_degree, g)
    u_out = tensor_rep(m1, m2, g)
    lhs = apply(ch, u_in @ a @ u_in.conj().T)
    rhs = u_out @ apply(ch, a) @ u_out.conj().T
    return float(np.linalg.norm(lhs - rhs))


@dataclass(frozen=True)
class TensorBound:
    per_k: tuple[float, ...]
    best: float
    best_k: int
    weights: tuple[tuple[float, ...], ...]

    def to_json(self) -> dict:
        return {"per_k": list(self.per_k), "best": self.best, "best_k": self.best_k,
                "weights": [list(w) for w in self.weights]}


def tensor_moe_bound(ch1: KrausChannel, ch2: KrausChannel, restarts: int = DEFAULT_RESTARTS,
                     seed: int = 0) -> TensorBound:
    """Upper bounds on ``S_min(Phi1 (x) Phi2)``, one per input block ``V_k``.

    Each bound is the numerical MOE of the pinched restricted channel, which
    equals the block-weighted combination of irreducibly covariant channels.
    """
    kmax = min(_degree(ch1.in_dim), _degree(ch2.in_dim))
    per_k = []
    weights = []
    for k in range(kmax + 1):
        per_k.append(moe_numeric(pinched_restricted_channel(ch1, ch2, k), restarts, seed).value)
        weights.append(tuple(float(x) for x in lambda_weights(ch1, ch2, k)))
    best_k = int(np.argmin(per_k))
    return TensorBound(tuple(per_k), per_k[best_k], best_k, tuple(weights))
