"""Entanglement-breaking (EBT) tests for Kraus channels.

Only sufficient certificates and necessary-condition obstructions are
implemented, so a verdict can be ``UNKNOWN``:

* every Kraus operator of rank one (channel or its dual)  -> EBT
* Choi rank below the rank of a marginal                  -> not EBT
* fewer Kraus operators than the input dimension           -> not EBT
* negative partial transpose of the Choi matrix            -> not EBT
* PPT Choi matrix on a 2x2, 2x3 or 1xd system              -> EBT
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .channels import (KrausChannel, choi, dual, numerical_rank, partial_trace,
                       partial_transpose)
from .eposic import EposicParams, all_params, eposic_channel

PPT_TOL = 1e-9
PPT_SUFFICIENT_MAX_DIM = 6


class Status(str, enum.Enum):
    EBT = "EBT"
    NOT_EBT = "NOT_EBT"
    UNKNOWN = "UNKNOWN"


class Reason(str, enum.Enum):
    RANK_ONE_KRAUS = "RANK_ONE_KRAUS"
    DUAL_RANK_ONE = "DUAL_RANK_ONE"
    CHOI_RANK_CRITERION = "CHOI_RANK_CRITERION"
    KRAUS_COUNT = "KRAUS_COUNT"
    PPT_VIOLATION = "PPT_VIOLATION"
    PPT_SUFFICIENT_DIM = "PPT_SUFFICIENT_DIM"
    INCONCLUSIVE = "INCONCLUSIVE"


_CERTIFY = {Reason.RANK_ONE_KRAUS, Reason.DUAL_RANK_ONE, Reason.PPT_SUFFICIENT_DIM}
_OBSTRUCT = {Reason.CHOI_RANK_CRITERION, Reason.KRAUS_COUNT, Reason.PPT_VIOLATION}


@dataclass(frozen=True)
class EbtVerdict:
    status: Status
    reason: Reason
    witness: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        expected = (Status.EBT if self.reason in _CERTIFY
                    else Status.NOT_EBT if self.reason in _OBSTRUCT
                    else Status.UNKNOWN)
        if self.status != expected:
            raise ValueError(f"reason {self.reason.value} is incompatible with {self.status.value}")

    @property
    def conclusive(self) -> bool:
        return self.status != Status.UNKNOWN

    def to_json(self) -> dict:
        return {"status": self.status.value, "reason": self.reason.value, "witness": self.witness}


UNKNOWN = EbtVerdict(Status.UNKNOWN, Reason.INCONCLUSIVE)


def kraus_second_singular_values(ch: KrausChannel) -> list[float]:
    out = []
    for t in ch.ops:
        s = np.linalg.svd(t, compute_uv=False)
        out.append(float(s[1]) if len(s) > 1 else 0.0)
    return out


def rank_one_kraus_certificate(ch: KrausChannel) -> bool:
    """True iff every stored Kraus operator has numerical rank at most one.

    A ``True`` proves the channel is entanglement breaking; ``False`` proves
    nothing, since another Kraus family might still be rank one.
    """
    return all(numerical_rank(t) <= 1 for t in ch.ops)


def _ranks(ch: KrausChannel) -> dict[str, int]:
    c = choi(ch)
    return {
        "choi_rank": numerical_rank(c),
        "input_marginal_rank": numerical_rank(partial_trace(c, ch.out_dim, ch.in_dim, keep="B")),
        "output_marginal_rank": numerical_rank(partial_trace(c, ch.out_dim, ch.in_dim, keep="A")),
        "d_in": ch.in_dim,
    }


def choi_rank_test(ch: KrausChannel) -> EbtVerdict | None:
    """Not EBT when ``rank C < max(rank of either marginal)``; otherwise ``None``.

    A separable state has rank at least that of each of its marginals. The
    input marginal of a channel's Choi matrix is the identity (rank
    ``d_in``) and the output marginal is ``Phi(I)``.
    """
    ranks = _ranks(ch)
    if ranks["choi_rank"] < max(ranks["input_marginal_rank"], ranks["output_marginal_rank"]):
        return EbtVerdict(Status.NOT_EBT, Reason.CHOI_RANK_CRITERION, ranks)
    return None


def kraus_count_test(ch: KrausChannel) -> EbtVerdict | None:
    """Not EBT when the minimal number of Kraus operators (the Choi rank) is below ``d_in``.

    For maps that are not trace preserving (duals) the input marginal of the
    Choi matrix need not be full rank, so its rank replaces ``d_in``.
    """
    ranks = _ranks(ch)
    bound = ch.in_dim if ch.trace_preserving else ranks["input_marginal_rank"]
    if ranks["choi_rank"] < bound:
        return EbtVerdict(Status.NOT_EBT, Reason.KRAUS_COUNT,
                          {"kraus_number": ranks["choi_rank"], "d_in": ch.in_dim,
                           "input_marginal_rank": ranks["input_marginal_rank"]})
    return None


def ppt_min_eigenvalue(ch: KrausChannel) -> float:
    pt = partial_transpose(choi(ch), ch.out_dim, ch.in_dim, sys="B")
    return float(np.linalg.eigvalsh((pt + pt.conj().T) / 2).min())


def ppt_test(ch: KrausChannel) -> EbtVerdict | None:
    lam = ppt_min_eigenvalue(ch)
    if lam < -PPT_TOL:
        return EbtVerdict(Status.NOT_EBT, Reason.PPT_VIOLATION, {"min_eigenvalue": lam})
    dims = (ch.out_dim, ch.in_dim)
    if min(dims) == 1 or dims[0] * dims[1] <= PPT_SUFFICIENT_MAX_DIM:
        return EbtVerdict(Status.EBT, Reason.PPT_SUFFICIENT_DIM,
                          {"min_eigenvalue": lam, "dims": list(dims)})
    return None


def _tag(verdict: EbtVerdict | None, route: str) -> EbtVerdict | None:
    if verdict is None:
        return None
    return EbtVerdict(verdict.status, verdict.reason, {**verdict.witness, "route": route})


def evidence(ch: KrausChannel) -> list[EbtVerdict]:
    """Every conclusive test outcome, in the order :func:`classify_channel` tries them."""
    found: list[EbtVerdict] = []
    adj = dual(ch)
    if rank_one_kraus_certificate(ch):
        found.append(EbtVerdict(Status.EBT, Reason.RANK_ONE_KRAUS,
                                {"route": "primal", "max_second_singular_value":
                                 max(kraus_second_singular_values(ch))}))
    if rank_one_kraus_certificate(adj):
        found.append(EbtVerdict(Status.EBT, Reason.DUAL_RANK_ONE,
                                {"route": "dual", "max_second_singular_value":
                                 max(kraus_second_singular_values(adj))}))
    tests = [
        _tag(kraus_count_test(ch), "primal"),
        _tag(choi_rank_test(ch), "primal"),
        _tag(kraus_count_test(adj), "dual"),
        _tag(choi_rank_test(adj), "dual"),
        _tag(ppt_test(ch), "primal"),
    ]
    found.extend(v for v in tests if v is not None)
    return found


def classify_channel(ch: KrausChannel) -> EbtVerdict:
    """First conclusive outcome of rank-one, Kraus-count, Choi-rank, dual and PPT tests."""
    for v in evidence(ch):
        return v
    return UNKNOWN


def classify_eposic(params) -> EbtVerdict:
    p = params if isinstance(params, EposicParams) else EposicParams(*params)
    return classify_channel(eposic_channel(p))


def classify_dual_eposic(params) -> EbtVerdict:
    """Verdict reached from the dual family ``T_j^dagger`` alone."""
    p = params if isinstance(params, EposicParams) else EposicParams(*params)
    return classify_channel(dual(eposic_channel(p)))


def known_status(params) -> Status | None:
    """Status settled by the published classification, or ``None`` if open.

    ``Phi_{m,m,m}`` and ``Phi_{0,m,0}`` are EBT; ``Phi_{m,n,h}`` is not EBT
    when ``n >= 2h, m > 2h`` or ``n <= 2h, m > n`` (hence whenever ``m > n``).
    """
    p = params if isinstance(params, EposicParams) else EposicParams(*params)
    m, n, h = p.as_tuple()
    if (m == n == h) or (m == 0 and h == 0):
        return Status.EBT
    if (n >= 2 * h and m > 2 * h) or (n <= 2 * h and m > n):
        return Status.NOT_EBT
    return None


@dataclass(frozen=True)
class SweepRow:
    params: EposicParams
    verdict: EbtVerdict
    dual_verdict: EbtVerdict
    known: Status | None
    contradiction: bool

    def to_json(self) -> dict:
        m, n, h = self.params.as_tuple()
        return {"m": m, "n": n, "h": h, **self.verdict.to_json(),
                "dual_status": self.dual_verdict.status.value,
                "known_status": self.known.value if self.known else None,
                "contradiction": self.contradiction}


def ebt_sweep(max_sum: int) -> list[SweepRow]:
    """Classify every EPOSIC channel with ``m + n <= max_sum``, sorted by ``(m, n, h)``.

    A row is a contradiction when the primal evidence contains both an EBT
    certificate and an obstruction, when primal and dual verdicts are
    conclusive and disagree, or when the verdict disagrees with the known
    classification.
    """
    rows = []
    for p in all_params(max_sum):
        ch = eposic_channel(p)
        statuses = {v.status for v in evidence(ch)}
        verdict = classify_channel(ch)
        dual_verdict = classify_dual_eposic(p)
        known = known_status(p)
        bad = len(statuses) > 1
        if verdict.conclusive and dual_verdict.conclusive and verdict.status != dual_verdict.status:
            bad = True
        if known is not None and verdict.status != known:
            bad = True
        rows.append(SweepRow(p, verdict, dual_verdict, known, bad))
    return rows
