import numpy as np
import pytest

from su2channels.channels import KrausChannel, dual
from su2channels.eposic import EposicParams, all_params, eposic_channel
from su2channels.ebt import (EbtVerdict, Reason, Status, choi_rank_test, classify_channel,
                             classify_dual_eposic, classify_eposic, ebt_sweep, evidence,
                             known_status, kraus_count_test, kraus_second_singular_values,
                             ppt_min_eigenvalue, ppt_test, rank_one_kraus_certificate)


def identity_channel(d):
    return KrausChannel([np.eye(d)])


@pytest.fixture(scope="module")
def sweep():
    return ebt_sweep(12)


def test_rank_one_certificate_examples():
    for m in range(1, 6):
        assert rank_one_kraus_certificate(eposic_channel((m, m, m)))
        assert rank_one_kraus_certificate(dual(eposic_channel((m, m, m))))
        assert rank_one_kraus_certificate(eposic_channel((0, m, 0)))
    assert not rank_one_kraus_certificate(identity_channel(2))


def test_choi_rank_test_examples():
    for p in [(3, 1, 1), (5, 2, 2), (2, 0, 0), (4, 3, 1)]:
        v = choi_rank_test(eposic_channel(p))
        assert v.status is Status.NOT_EBT and v.reason is Reason.CHOI_RANK_CRITERION
        assert v.witness["choi_rank"] == p[1] + 1
        assert v.witness["input_marginal_rank"] == EposicParams(*p).r + 1
    assert choi_rank_test(eposic_channel((0, 3, 0))) is None
    v = choi_rank_test(identity_channel(3))
    assert v.status is Status.NOT_EBT and v.witness["choi_rank"] == 1


def test_kraus_count_test_examples():
    v = kraus_count_test(eposic_channel((3, 1, 1)))
    assert v.reason is Reason.KRAUS_COUNT and v.witness == {
        "kraus_number": 2, "d_in": 3, "input_marginal_rank": 3}
    assert kraus_count_test(eposic_channel((3, 3, 3))) is None
    assert kraus_count_test(eposic_channel((2, 2, 1))) is None


def test_ppt_examples():
    v = ppt_test(identity_channel(2))
    assert v.status is Status.NOT_EBT
    assert v.witness["min_eigenvalue"] == pytest.approx(-1.0, abs=1e-12)
    for p in [(1, 1, 1), (2, 2, 2)]:
        v = ppt_test(eposic_channel(p))
        assert v.status is Status.EBT and v.reason is Reason.PPT_SUFFICIENT_DIM
    assert ppt_test(eposic_channel((2, 2, 1))).reason is Reason.PPT_VIOLATION
    # PPT on a 2x4 system is necessary only
    assert ppt_min_eigenvalue(eposic_channel((1, 4, 1))) >= -1e-9
    assert ppt_test(eposic_channel((1, 4, 1))) is None
    assert classify_eposic((1, 4, 1)).status is Status.UNKNOWN


def test_verdict_rejects_inconsistent_reason():
    with pytest.raises(ValueError):
        EbtVerdict(Status.EBT, Reason.KRAUS_COUNT)
    with pytest.raises(ValueError):
        EbtVerdict(Status.UNKNOWN, Reason.RANK_ONE_KRAUS)


@pytest.mark.parametrize("m", range(1, 6))
def test_classify_settled_families(m):
    v = classify_eposic((m, m, m))
    assert (v.status, v.reason) == (Status.EBT, Reason.RANK_ONE_KRAUS)
    assert classify_eposic((0, m, 0)).status is Status.EBT
    for h in range(m):
        assert classify_eposic((m, h, h)).status is Status.NOT_EBT
    for n in range(m):
        for h in range(n + 1):
            assert classify_eposic((m, n, h)).status is Status.NOT_EBT


def test_classify_identity():
    assert classify_channel(identity_channel(3)).status is Status.NOT_EBT


def test_verdict_json():
    data = classify_eposic((3, 3, 3)).to_json()
    assert data["status"] == "EBT" and data["reason"] == "RANK_ONE_KRAUS"
    assert data["witness"]["route"] == "primal"


def test_known_status():
    assert known_status((4, 4, 4)) is Status.EBT
    assert known_status((0, 4, 0)) is Status.EBT
    assert known_status((5, 2, 2)) is Status.NOT_EBT
    assert known_status((5, 6, 2)) is Status.NOT_EBT
    assert known_status((2, 5, 2)) is None


def test_sweep_sorted_and_complete(sweep):
    keys = [r.params.as_tuple() for r in sweep]
    assert keys == sorted(keys)
    assert len(keys) == len(all_params(12))


def test_sweep_has_no_contradictions(sweep):
    assert not [r.params for r in sweep if r.contradiction]
    for r in sweep:
        statuses = {v.status for v in evidence(eposic_channel(r.params))}
        assert len(statuses) <= 1
        if r.known is not None:
            assert r.verdict.status is r.known


def test_dual_route_agrees(sweep):
    for r in sweep:
        if r.verdict.conclusive and r.dual_verdict.conclusive:
            assert r.verdict.status is r.dual_verdict.status


def test_dual_route_settles_second_case():
    for p in all_params(12):
        if p.n <= 2 * p.h and p.m > p.n:
            assert classify_dual_eposic(p).status is Status.NOT_EBT, p


def test_witness_invariants(sweep):
    for r in sweep:
        v = r.verdict
        if v.reason is Reason.PPT_VIOLATION:
            assert v.witness["min_eigenvalue"] < -1e-9
        if v.reason is Reason.RANK_ONE_KRAUS:
            assert max(kraus_second_singular_values(eposic_channel(r.params))) < 1e-10
