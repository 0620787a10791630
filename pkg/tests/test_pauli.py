import numpy as np
import pytest

from magic_fwht import statevector as sv
from magic_fwht.experiments import t_state
from magic_fwht.pauli import PauliLabel, family_correlators, pauli_matrix, single_correlator

S2 = 1 / np.sqrt(2)


def dense_correlator(state, label):
    return np.vdot(state.amplitudes, pauli_matrix(label) @ state.amplitudes)


def t_ket():
    return sv.StateVector(1, t_state())


def test_label_text_form():
    lab = PauliLabel.from_string("IXYZ")
    assert (lab.x, lab.z) == (0b0110, 0b0011)
    assert str(lab) == "IXYZ"
    assert str(PauliLabel(0, 0, 3)) == "III"
    assert PauliLabel(0, 0, 3).is_identity
    with pytest.raises(ValueError):
        PauliLabel.from_string("XQ")
    with pytest.raises(ValueError):
        PauliLabel(4, 0, 2)


def test_pauli_matrix_conventions():
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    np.testing.assert_array_equal(pauli_matrix(PauliLabel.from_string("X")), X)
    np.testing.assert_array_equal(pauli_matrix(PauliLabel.from_string("Z")), Z)
    # (x, z) = (1, 1) is Z X = i Y under the fixed phase
    np.testing.assert_array_equal(pauli_matrix(PauliLabel.from_string("Y")), Z @ X)
    np.testing.assert_array_equal(pauli_matrix(PauliLabel.from_string("XZ")), np.kron(X, Z))


def test_t_state_correlators():
    # |T> = (|0> + e^{i pi/4}|1>)/sqrt2: <X> = cos(pi/4), <Z> = 0
    assert single_correlator(t_ket(), (1, 0)) == pytest.approx(S2, abs=1e-15)
    assert single_correlator(t_ket(), (0, 1)) == pytest.approx(0, abs=1e-15)
    assert abs(single_correlator(t_ket(), (1, 1))) == pytest.approx(S2, abs=1e-15)


def test_identity_correlator_is_one():
    psi = sv.make_haar_random_state(5, 0)
    assert single_correlator(psi, PauliLabel(0, 0, 5)) == pytest.approx(1, abs=1e-12)


def test_basis_state_families():
    psi = sv.make_basis_state(4, 0)
    np.testing.assert_allclose(family_correlators(psi, 0).values, np.ones(16), atol=1e-15)
    for x in range(1, 16):
        np.testing.assert_array_equal(family_correlators(psi, x).values, np.zeros(16))


def test_family_matches_dense_oracle_every_x():
    psi = sv.make_haar_random_state(6, 42)
    for x in range(64):
        fam = family_correlators(psi, x).values
        for z in range(0, 64, 7):
            assert abs(fam[z] - dense_correlator(psi, PauliLabel(x, z, 6))) < 1e-10


@pytest.mark.parametrize("n", range(1, 7))
def test_family_equals_single_correlator(n):
    psi = sv.make_haar_random_state(n, 100 + n)
    for x in range(1 << n):
        fam = family_correlators(psi, x)
        direct = np.array([single_correlator(psi, (x, z)) for z in range(1 << n)])
        np.testing.assert_allclose(fam.values, direct, atol=1e-10)
        assert np.all(np.abs(fam.values) <= 1 + 1e-9)


def test_single_correlator_matches_dense_matrix():
    psi = sv.make_haar_random_state(4, 7)
    for text in ["IIII", "XYZI", "ZZZZ", "YYXX", "IXIZ"]:
        lab = PauliLabel.from_string(text)
        assert abs(single_correlator(psi, lab) - dense_correlator(psi, lab)) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 5, 7])
def test_pauli_parseval(n):
    psi = sv.make_haar_random_state(n, n)
    total = sum(np.sum(np.abs(family_correlators(psi, x).values) ** 2) for x in range(1 << n))
    assert total == pytest.approx(2**n, rel=1e-8)


def test_scratch_buffer_reuse_and_validation():
    psi = sv.make_haar_random_state(3, 1)
    buf = np.empty(8, dtype=np.complex128)
    fam = family_correlators(psi, 5, out=buf)
    assert fam.values is buf
    assert fam.label(3) == PauliLabel(5, 3, 3)
    with pytest.raises(ValueError):
        family_correlators(psi, 5, out=np.empty(4, dtype=np.complex128))
    with pytest.raises(ValueError):
        family_correlators(psi, 8)
    with pytest.raises(ValueError):
        single_correlator(psi, PauliLabel(0, 0, 2))
