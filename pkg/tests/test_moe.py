import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su2channels.channels import (apply, matrix_unit, projector, random_pure_state,
                                  von_neumann_entropy)
from su2channels.eposic import eposic_channel
from su2channels.moe import (covariant_1_to_m_channel, covariant_1_to_m_spectrum, eigenvalues_m11,
                             lower_bound_report, moe_covariant_1_to_m, moe_exact_lower,
                             moe_exact_m11, moe_exact_upper, moe_lower_bound,
                             moe_lower_bound_stated, moe_numeric, output_entropy, pair_overlap_R,
                             spectrum_E11_extreme)


def binary_entropy(p):
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def top_state(d):
    w = np.zeros(d)
    w[0] = 1
    return w


@pytest.mark.parametrize("p", [(1, 1, 0), (2, 1, 0), (1, 3, 0), (3, 2, 0)])
def test_moe_zero_for_h0(p):
    res = moe_numeric(eposic_channel(p), restarts=8, seed=0)
    assert res.value <= 1e-6


def test_moe_phi111():
    res = moe_numeric(eposic_channel((1, 1, 1)), restarts=4, seed=0)
    assert res.value == pytest.approx(1.0, abs=1e-4)
    assert res.converged


@pytest.mark.parametrize("m", [2, 3, 4])
def test_moe_m11_matches_closed_form(m):
    res = moe_numeric(eposic_channel((m, 1, 1)), restarts=8, seed=1)
    assert res.value == pytest.approx(moe_exact_m11(m), abs=1e-4)


def test_moe_result_record():
    ch = eposic_channel((2, 1, 1))
    res = moe_numeric(ch, restarts=5, seed=11)
    assert res.restarts_used == 5 == len(res.restart_values)
    assert abs(np.linalg.norm(res.minimizer) - 1) < 1e-12
    assert res.value == pytest.approx(output_entropy(ch, res.minimizer), abs=1e-12)
    assert res.value <= min(res.restart_values) + 1e-12
    best = int(np.argmin(res.restart_values))
    assert res.best_restart_seed == 11 ^ best
    data = res.to_json()
    assert set(data) == {"value_bits", "minimizer", "restarts_used", "best_restart_seed", "converged"}
    json.dumps(data)


def test_moe_deterministic():
    ch = eposic_channel((3, 2, 1))
    a = moe_numeric(ch, restarts=3, seed=5)
    b = moe_numeric(ch, restarts=3, seed=5)
    assert a.value == b.value
    np.testing.assert_array_equal(a.minimizer, b.minimizer)


def test_moe_is_below_probe_states(rng):
    ch = eposic_channel((3, 2, 1))
    res = moe_numeric(ch, restarts=4, seed=0)
    probes = [output_entropy(ch, random_pure_state(ch.in_dim, rng)) for _ in range(1000)]
    assert res.value <= min(probes) + 1e-12


def test_moe_rejects_zero_restarts():
    with pytest.raises(ValueError):
        moe_numeric(eposic_channel((1, 1, 1)), restarts=0)


def test_moe_trivial_input_dimension():
    res = moe_numeric(eposic_channel((2, 2, 2)), restarts=2)
    assert res.value == pytest.approx(math.log2(3), abs=1e-12)


def test_output_entropy_matches_direct(rng):
    for p in [(2, 1, 1), (1, 4, 1), (4, 1, 0)]:
        ch = eposic_channel(p)
        w = random_pure_state(ch.in_dim, rng)
        assert output_entropy(ch, w) == pytest.approx(von_neumann_entropy(apply(ch, projector(w))),
                                                      abs=1e-10)
        assert output_entropy(ch, 3 * w) == pytest.approx(output_entropy(ch, w), abs=1e-12)


def test_exact_m11_values():
    assert moe_exact_m11(1) == pytest.approx(1.0, abs=1e-15)
    assert moe_exact_m11(2) == pytest.approx(binary_entropy(1 / 3), abs=1e-15)
    assert moe_exact_m11(2) == pytest.approx(0.9182958340544896, abs=1e-14)
    vals = [moe_exact_m11(m) for m in range(1, 21)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        moe_exact_m11(0)


@pytest.mark.parametrize("m", range(1, 8))
def test_top_state_attains_closed_form(m):
    ch = eposic_channel((m, 1, 1))
    assert output_entropy(ch, top_state(m)) == pytest.approx(moe_exact_m11(m), abs=1e-10)
    assert pair_overlap_R(m, top_state(m)) == pytest.approx(m / (m + 1) ** 2, abs=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 6])
def test_pair_overlap_bounds(m, rng):
    for _ in range(300):
        r = pair_overlap_R(m, random_pure_state(m, rng))
        assert r >= m / (m + 1) ** 2 - 1e-10
        assert -1e-12 <= 1 - 4 * r <= 1 + 1e-12


def test_pair_overlap_dimension_check():
    with pytest.raises(ValueError):
        pair_overlap_R(3, np.ones(2))


def test_eigenvalues_m11_examples():
    assert eigenvalues_m11(0.25) == pytest.approx((0.5, 0.5))
    assert eigenvalues_m11(0.0) == pytest.approx((1.0, 0.0))
    for m in range(1, 10):
        assert eigenvalues_m11(m / (m + 1) ** 2) == pytest.approx((m / (m + 1), 1 / (m + 1)), abs=1e-12)
    for bad in (-0.1, 0.3):
        with pytest.raises(ValueError):
            eigenvalues_m11(bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_eigenvalues_match_output_spectrum(m, seed):
    w = random_pure_state(m, np.random.default_rng(seed))
    spectrum = np.sort(np.linalg.eigvalsh(apply(eposic_channel((m, 1, 1)), projector(w))))[::-1]
    lam = eigenvalues_m11(pair_overlap_R(m, w))
    np.testing.assert_allclose(spectrum[:2], lam, atol=1e-9)
    assert np.abs(spectrum[2:]).max(initial=0) < 1e-9


def test_spectrum_extreme_examples():
    assert spectrum_E11_extreme(1, "upper") == pytest.approx([2 / 3, 1 / 3])
    assert spectrum_E11_extreme(1, "lower") == pytest.approx([1.0, 0.0])
    assert spectrum_E11_extreme(3, "upper") == pytest.approx([0.4, 0.3, 0.2, 0.1])
    with pytest.raises(ValueError):
        spectrum_E11_extreme(2, "middle")


@pytest.mark.parametrize("m", range(1, 9))
def test_spectrum_extreme_matches_channels(m):
    e11 = matrix_unit(2, 0, 0)
    for which, p in (("upper", (m, m + 1, m)), ("lower", (m, m - 1, m - 1))):
        listed = spectrum_E11_extreme(m, which)
        assert len(listed) == m + 1
        assert sum(listed) == pytest.approx(1.0, abs=1e-12)
        direct = np.sort(np.linalg.eigvalsh(apply(eposic_channel(p), e11)))
        np.testing.assert_allclose(direct, np.sort(listed), atol=1e-10)


@pytest.mark.parametrize("m", range(1, 7))
def test_covariant_endpoints(m):
    assert moe_covariant_1_to_m(m, 1.0) == pytest.approx(moe_exact_upper(m), abs=1e-12)
    assert moe_covariant_1_to_m(m, 0.0) == pytest.approx(moe_exact_lower(m), abs=1e-12)
    c = (m + 1) * (m + 2)
    assert moe_exact_upper(m) == pytest.approx(
        -sum(2 * j / c * math.log2(2 * j / c) for j in range(1, m + 2)))


def test_covariant_spectrum_matches_mixture(rng):
    e11 = matrix_unit(2, 0, 0)
    for m in range(1, 7):
        for p in rng.uniform(size=5):
            mix = (p * apply(eposic_channel((m, m + 1, m)), e11)
                   + (1 - p) * apply(eposic_channel((m, m - 1, m - 1)), e11))
            assert moe_covariant_1_to_m(m, p) == pytest.approx(von_neumann_entropy(mix), abs=1e-10)
            np.testing.assert_allclose(np.sort(covariant_1_to_m_spectrum(m, p)),
                                       np.sort(np.linalg.eigvalsh(mix)), atol=1e-10)


def test_covariant_numeric_matches_closed_form():
    for m, p in [(2, 0.3), (3, 0.8)]:
        res = moe_numeric(covariant_1_to_m_channel(m, p), restarts=4, seed=2)
        assert res.value == pytest.approx(moe_covariant_1_to_m(m, p), abs=1e-4)


def test_covariant_same_spectrum_for_all_inputs(rng):
    for m, p in [(2, 0.4), (4, 0.9)]:
        ch = covariant_1_to_m_channel(m, p)
        ref = np.sort(covariant_1_to_m_spectrum(m, p))
        for _ in range(100):
            spectrum = np.sort(np.linalg.eigvalsh(apply(ch, projector(random_pure_state(2, rng)))))
            np.testing.assert_allclose(spectrum, ref, atol=1e-9)


def test_covariant_rejects_bad_p():
    with pytest.raises(ValueError):
        moe_covariant_1_to_m(3, 1.5)


def test_lower_bound_value():
    assert moe_lower_bound(5) == pytest.approx(9 / (14400 * math.log(2)), rel=1e-14)
    assert moe_lower_bound(5) == pytest.approx(9.016e-4, abs=1e-6)
    with pytest.raises(ValueError):
        moe_lower_bound(4)


def test_lower_bound_decreases():
    vals = [moe_lower_bound(m) for m in range(5, 101)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_lower_bound_holds(rng):
    for m in range(5, 13):
        bound = moe_lower_bound(m)
        for p in rng.uniform(size=50):
            assert moe_covariant_1_to_m(m, p) >= bound


def test_lower_bound_report_flags_discrepancy():
    rep = lower_bound_report(6)
    assert rep["discrepancy"] is True
    assert rep["bound_bits"] == rep["bound_proof_form"]
    assert rep["bound_stated_form"] == pytest.approx(moe_lower_bound_stated(6))
    assert rep["ratio_stated_over_proof"] == pytest.approx(6.0)
