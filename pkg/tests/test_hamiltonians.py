import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsiib.collective import build_collective_state, truncation_report
from lsiib.core import DriveParams
from lsiib.hamiltonians import (
    COLLECTIVE_SIX_BASIS,
    build_collective_six,
    build_five_level,
    build_full_ensemble,
    product_basis_labels,
)

BASELINE = DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0)

rabi = st.one_of(st.just(0.0), st.floats(1e-6, 5))
drives = st.builds(
    DriveParams.from_detunings,
    rabi,
    rabi,
    st.floats(-50, 50),
    st.floats(-2, 2),
    st.integers(3, 6),
)


def kron_full_ensemble(p):
    """Independent oracle: explicit sum of identity-embedded single-atom terms."""
    n = p.n_atoms
    e_a = p.big_delta / (2 * n)
    single = np.array(
        [
            [e_a, p.omega1 / 2, 0.0],
            [p.omega1 / 2, e_a - p.delta - p.big_delta / 2, p.omega2 / 2],
            [0.0, p.omega2 / 2, e_a - p.big_delta],
        ]
    )
    total = np.zeros((3 ** n, 3 ** n))
    for j in range(n):
        term = np.eye(1)
        for k in range(n):
            term = np.kron(term, single if k == j else np.eye(3))
        total += term
    return total


def test_five_level_baseline_values():
    h = build_five_level(BASELINE).entries
    assert np.array_equal(np.diag(h), [0.0, -10.0, 0.0, -10.0, 0.0])
    assert h[0, 1] == h[2, 3] == 0.5
    assert h[1, 2] == h[3, 4] == 0.05
    assert h[0, 2] == h[0, 4] == h[1, 3] == 0.0


def test_five_level_zero_drive_is_zero():
    h = build_five_level(DriveParams(0.0, 0.0, 0.0, 0.0))
    assert not np.any(h.entries)


@given(drives)
def test_builders_are_exactly_symmetric_and_tridiagonal(p):
    for h in (build_five_level(p), build_collective_six(p)):
        a = np.asarray(h.entries)
        assert np.array_equal(a, a.T)
        assert np.array_equal(a, np.triu(np.tril(a, 1), -1))


def test_five_level_diagonal_general():
    p = DriveParams.from_detunings(0.3, 0.7, 12.0, 0.4)
    assert np.allclose(np.diag(build_five_level(p).entries), [0.2, -12.0, -0.2, -12.4, -0.6], atol=1e-15)


def test_collective_six_n100_couplings():
    h = build_collective_six(BASELINE.replace(n_atoms=100)).entries
    assert h[0, 1] == pytest.approx(5.0)
    assert h[1, 2] == pytest.approx(0.05)
    assert h[2, 3] == pytest.approx(math.sqrt(99) / 2)
    assert h[2, 3] == pytest.approx(4.9749, abs=1e-4)
    assert h[3, 4] == pytest.approx(0.07071, abs=1e-5)
    assert h[4, 5] == pytest.approx(4.9497, abs=1e-4)


def test_collective_six_diagonal():
    p = DriveParams.from_detunings(1.0, 0.1, 10.0, 0.2, n_atoms=5)
    assert np.allclose(
        np.diag(build_collective_six(p).entries), [0.1, -10.0, -0.1, -10.2, -0.3, -10.4], atol=1e-14
    )


def test_collective_six_rejects_small_ensembles():
    with pytest.raises(ValueError, match="n_atoms >= 3"):
        build_collective_six(BASELINE.replace(n_atoms=2))


def test_collective_six_zero_drive_diagonal():
    h = build_collective_six(DriveParams.from_detunings(0, 0, 10.0, 0.0, n_atoms=3)).entries
    assert np.array_equal(h, np.diag(np.diag(h)))


@pytest.mark.parametrize("n", [3, 5, 9, 40])
def test_g1_c1_coupling_does_not_scale_with_n(n):
    h = build_collective_six(BASELINE.replace(n_atoms=n))
    assert h.element("G1", "C1") == 0.05


def test_full_ensemble_single_atom():
    p = DriveParams.from_detunings(1.0, 0.1, 10.0, 0.3, n_atoms=1)
    h = build_full_ensemble(p).entries
    expected = np.array([[0.15, 0.5, 0.0], [0.5, -10.0, 0.05], [0.0, 0.05, -0.15]])
    assert np.allclose(h, expected, atol=1e-15)
    assert build_full_ensemble(p).basis_labels == ("a", "g", "c")


def test_full_ensemble_no_drive_eigenvalues_are_sums():
    p = DriveParams.from_detunings(0.0, 0.0, 10.0, 0.3, n_atoms=3)
    h = build_full_ensemble(p).entries
    assert np.array_equal(h, np.diag(np.diag(h)))
    e = [0.3 / 6, 0.3 / 6 - 10.0 - 0.15, 0.3 / 6 - 0.3]
    expected = sorted(sum(c) for c in itertools.product(e, repeat=3))
    assert np.allclose(sorted(np.diag(h)), expected)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_full_ensemble_matches_kron_oracle(n):
    p = DriveParams.from_detunings(0.8, 0.3, 7.0, 0.25, n_atoms=n)
    assert np.allclose(build_full_ensemble(p).entries, kron_full_ensemble(p), atol=1e-13)


def test_product_basis_order():
    assert product_basis_labels(2) == ("aa", "ag", "ac", "ga", "gg", "gc", "ca", "cg", "cc")


def test_full_ensemble_cap():
    with pytest.raises(ValueError, match="cap"):
        build_full_ensemble(BASELINE.replace(n_atoms=9))


def test_full_ensemble_g1_a_element_n4():
    p = BASELINE.replace(n_atoms=4)
    h = build_full_ensemble(p).entries
    a = build_collective_state("A", 4).amplitudes
    g1 = build_collective_state("G1", 4).amplitudes
    assert g1 @ h @ a == pytest.approx(math.sqrt(4) * 1.0 / 2, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(drives)
def test_block_consistency_with_truncated_ladder(p):
    report = truncation_report(p)
    assert np.allclose(report.block.entries, build_collective_six(p).entries, atol=1e-10)
    # couplings to the dropped G2 / G21 states are reported, not zeroed
    if p.omega1 > 0:
        assert ("G1", "G2") in report.dropped_couplings
        assert ("G11", "G21") in report.dropped_couplings
        assert report.dropped_couplings[("G1", "G2")] == pytest.approx(
            math.sqrt(2 * (p.n_atoms - 1)) * p.omega1 / 2, rel=1e-10
        )


@pytest.mark.parametrize("n", [7, 8])
def test_block_consistency_large_n(n):
    p = DriveParams.from_detunings(1.0, 0.1, 10.0, 0.01, n_atoms=n)
    report = truncation_report(p)
    assert np.allclose(report.block.entries, build_collective_six(p).entries, atol=1e-10)
    assert report.block.basis_labels == COLLECTIVE_SIX_BASIS


def test_sqrt_reading_of_dicke_factors():
    """The brute-force element selects sqrt(N-1), not sqrt(N)-1."""
    n = 5
    p = BASELINE.replace(n_atoms=n)
    h = build_full_ensemble(p).entries
    c1 = build_collective_state("C1", n).amplitudes
    g11 = build_collective_state("G11", n).amplitudes
    c2 = build_collective_state("C2", n).amplitudes
    g12 = build_collective_state("G12", n).amplitudes
    brute_1 = g11 @ h @ c1
    brute_2 = g12 @ h @ c2
    assert brute_1 == pytest.approx(math.sqrt(n - 1) / 2, abs=1e-12)  # 1.0
    assert brute_1 != pytest.approx((math.sqrt(n) - 1) / 2, abs=1e-3)  # 0.618...
    assert brute_2 == pytest.approx(math.sqrt(n - 2) / 2, abs=1e-12)  # 0.866...
    assert brute_2 != pytest.approx((math.sqrt(n) - 2) / 2, abs=1e-3)  # 0.118...
