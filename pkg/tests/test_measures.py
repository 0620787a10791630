import json
import math

import numpy as np
import pytest

from magic_fwht import statevector as sv
from magic_fwht.clifford import SIX_STATES, apply_circuit, build_brickwall, random_stabilizer_product_state
from magic_fwht.experiments import t_product_state, t_state
from magic_fwht.measures import (
    MagicReport,
    brute_force_magic,
    exact_magic,
    partial_moment,
    partial_moments,
)
from magic_fwht.pauli import family_correlators, single_correlator

LOG43 = math.log2(4 / 3)


def enumerate_all(state, alpha, eps=1e-7):
    """Pure-Python enumeration of all 4^N correlators."""
    n, d = state.num_qubits, state.dim
    total = 0.0
    count = 0
    for x in range(d):
        for z in range(d):
            c = abs(single_correlator(state, (x, z)))
            total += c ** (2 * alpha) / d**alpha
            count += abs(c - 1) < eps
    return math.log2(total) / (1 - alpha) - n, n - math.log2(count)


def single_qubit_magic(alpha, abs_corrs):
    """M_alpha of one qubit from |<I>|, |<X>|, |<Y>|, |<Z>|."""
    return math.log2(sum(c ** (2 * alpha) for c in abs_corrs) / 2**alpha) / (1 - alpha) - 1


def test_partial_moment_basis_state():
    psi = sv.make_basis_state(2, "00")
    pm = partial_moment(psi, 0, 2.0, 1e-7)
    assert pm.m_alpha_x == pytest.approx(0.25, abs=1e-15)
    assert pm.nullity_hits == 4
    for x in (1, 2, 3):
        pm = partial_moment(psi, x)
        assert pm.m_alpha_x == 0 and pm.nullity_hits == 0


def test_partial_moment_matches_direct_sum():
    psi = sv.make_haar_random_state(5, 11)
    for x in range(32):
        direct = sum(abs(single_correlator(psi, (x, z))) ** 4 for z in range(32)) / 32**2
        assert partial_moment(psi, x).m_alpha_x == pytest.approx(direct, abs=1e-12)


def test_partial_moments_vector_matches_scalar():
    psi = sv.make_haar_random_state(4, 5)
    m, hits = partial_moments(psi, [3, 0, 9], 3.0)
    for i, x in enumerate([3, 0, 9]):
        pm = partial_moment(psi, x, 3.0)
        assert m[i] == pm.m_alpha_x and hits[i] == pm.nullity_hits
    with pytest.raises(ValueError):
        partial_moments(psi, [16])


@pytest.mark.parametrize("alpha", [0.0, -1.0, 1.0, float("nan")])
def test_invalid_alpha(alpha):
    psi = sv.make_basis_state(1, 0)
    with pytest.raises(ValueError):
        partial_moment(psi, 0, alpha)
    with pytest.raises(ValueError):
        exact_magic(psi, alpha)


@pytest.mark.parametrize("eps", [0.0, 0.5, -1e-3])
def test_invalid_eps(eps):
    with pytest.raises(ValueError):
        exact_magic(sv.make_basis_state(1, 0), 2.0, eps)


@pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0, 4.5])
def test_single_t_state_all_orders(alpha):
    # |<I>|=1, |<X>|=|<Y>|=1/sqrt2, |<Z>|=0
    expected = single_qubit_magic(alpha, [1, 2**-0.5, 2**-0.5, 0])
    r = exact_magic(sv.StateVector(1, t_state()), alpha)
    assert r.M_alpha == pytest.approx(expected, abs=1e-12)
    assert r.nullity == 1 and r.stabilizer_count == 1


def test_t_state_m2_is_log_four_thirds():
    assert exact_magic(sv.StateVector(1, t_state())).M_alpha == pytest.approx(LOG43, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_t_product_closed_form(n):
    nt = n // 2
    r = exact_magic(t_product_state(n))
    assert r.M_alpha == pytest.approx(nt * LOG43, abs=1e-9)
    assert r.nullity == nt
    assert r.stabilizer_count == 2 ** (n - nt)
    assert r.std_error == 0 and r.method == "exact"


def test_zero_state_counts():
    r = brute_force_magic(sv.make_basis_state(3, 0))
    assert r.stabilizer_count == 8 and r.nullity == 0 and abs(r.M_alpha) < 1e-12


@pytest.mark.parametrize("k", range(6))
def test_six_single_qubit_stabilizer_states(k):
    r = exact_magic(sv.StateVector(1, SIX_STATES[k]))
    assert abs(r.M_alpha) < 1e-12 and r.nullity == 0


def test_products_of_six_states_are_free():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        r = exact_magic(random_stabilizer_product_state(n, rng))
        assert abs(r.M_alpha) < 1e-9 and r.nullity == 0


def test_brickwall_clifford_output_is_stabilizer():
    rng = np.random.default_rng(8)
    psi = apply_circuit(sv.make_basis_state(7, 0), build_brickwall(7, 14, rng=rng))
    r = exact_magic(psi)
    assert abs(r.M_alpha) < 1e-9 and r.nullity == 0


@pytest.mark.parametrize("alpha", [2.0, 3.0, 0.5])
def test_exact_equals_python_enumeration_n6(alpha):
    psi = sv.make_haar_random_state(6, 77)
    m_ref, nu_ref = enumerate_all(psi, alpha)
    r = exact_magic(psi, alpha)
    assert r.M_alpha == pytest.approx(m_ref, abs=1e-9)
    assert r.nullity == nu_ref


def test_brute_force_agrees_with_exact_200_states():
    rng = np.random.default_rng(2024)
    for i in range(200):
        n = 2 + i % 5
        psi = sv.make_haar_random_state(n, rng)
        if i % 4 == 0:
            # mix in states with non-trivial stabilizer groups
            psi = apply_circuit(t_product_state(n), build_brickwall(n, 2 * n, rng=rng))
        a, b = exact_magic(psi), brute_force_magic(psi)
        assert abs(a.M_alpha - b.M_alpha) < 1e-9
        assert a.stabilizer_count == b.stabilizer_count


def test_brute_force_refuses_above_cap():
    psi = sv.make_haar_random_state(11, 0)
    with pytest.raises(ValueError, match="cap"):
        brute_force_magic(psi)
    with pytest.raises(ValueError):
        brute_force_magic(sv.make_haar_random_state(4, 0), max_qubits=3)


def test_clifford_invariance():
    rng = np.random.default_rng(10)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        psi = sv.make_haar_random_state(n, rng) if rng.random() < 0.5 else t_product_state(n)
        before = exact_magic(psi)
        after = exact_magic(apply_circuit(psi.copy(), build_brickwall(n, 3 * n, rng=rng)))
        assert abs(after.M_alpha - before.M_alpha) < 1e-8
        assert after.nullity == before.nullity
        before3 = exact_magic(psi, 3.0).M_alpha
        after3 = exact_magic(apply_circuit(psi.copy(), build_brickwall(n, 3 * n, rng=rng)), 3.0).M_alpha
        assert abs(after3 - before3) < 1e-8


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_additivity(alpha):
    a = sv.make_haar_random_state(3, 1)
    b = sv.make_haar_random_state(4, 2)
    joint = exact_magic(a.tensor(b), alpha).M_alpha
    assert joint == pytest.approx(exact_magic(a, alpha).M_alpha + exact_magic(b, alpha).M_alpha, abs=1e-8)


def test_moment_normalization():
    psi = sv.make_haar_random_state(6, 3)
    total = sum(np.sum(np.abs(family_correlators(psi, x).values) ** 2) for x in range(64)) / 64
    assert total == pytest.approx(1.0, abs=1e-8)


def test_nullity_integrality_on_structured_states():
    rng = np.random.default_rng(12)
    for n in range(2, 8):
        nt = int(rng.integers(0, n + 1))
        psi = apply_circuit(t_product_state(n, nt), build_brickwall(n, 2 * n, rng=rng))
        r = exact_magic(psi)
        assert abs(math.log2(r.stabilizer_count) - round(math.log2(r.stabilizer_count))) < 1e-6
        assert r.nullity == nt
        assert 0 <= r.nullity <= n and r.M_alpha >= -1e-9


def test_exact_is_bit_reproducible():
    psi = sv.make_haar_random_state(9, 5)
    assert exact_magic(psi).M_alpha == exact_magic(psi.copy()).M_alpha


def test_report_serialization():
    r = exact_magic(t_product_state(4))
    data = json.loads(r.to_json())
    assert data["method"] == "exact" and data["stabilizer_count"] == 4
    assert set(data) == set(MagicReport.csv_header())
    assert MagicReport.from_dict(data) == r
    lines = r.to_csv().strip().splitlines()
    assert lines[0].split(",") == MagicReport.csv_header()
    assert len(lines) == 2
