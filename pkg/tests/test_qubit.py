import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmthermo.errors import DegenerateHamiltonian, NotAState
from nmthermo.qubit import (
    SIGMA_MINUS, SIGMA_X, SIGMA_Z, BlochState, FieldVector, LindbladTerm,
    bloch_from_density, density_from_bloch, energy_eigenbasis, hamiltonian,
    is_incoherent_sufficient, is_unital_sufficient,
)


def random_states(rng, n):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.uniform(0, 1, n)[:, None] ** (1 / 3)


def test_density_examples():
    np.testing.assert_allclose(density_from_bloch((0, 0, 0)), 0.5 * np.eye(2))
    np.testing.assert_allclose(density_from_bloch((0, 0, 1)), [[1, 0], [0, 0]])
    np.testing.assert_allclose(density_from_bloch((0.5, 0, 0.5)), [[0.75, 0.25], [0.25, 0.25]])


def test_bloch_examples():
    assert bloch_from_density(0.5 * np.eye(2)) == (0, 0, 0)
    assert bloch_from_density(np.diag([1.0, 0.0])) == (0, 0, 1)
    np.testing.assert_allclose(bloch_from_density([[0.75, 0.25], [0.25, 0.25]]), (0.5, 0, 0.5))


def test_round_trip_and_spectrum():
    rng = np.random.default_rng(1)
    for r in random_states(rng, 1000):
        rho = density_from_bloch(r)
        np.testing.assert_allclose(bloch_from_density(rho), r, atol=1e-12)
        ev = np.linalg.eigvalsh(rho)
        n = np.linalg.norm(r)
        np.testing.assert_allclose(ev, [(1 - n) / 2, (1 + n) / 2], atol=1e-12)


def test_bloch_from_density_rejects():
    with pytest.raises(NotAState):
        bloch_from_density(np.eye(2))
    with pytest.raises(NotAState):
        bloch_from_density([[0.5, 0.1], [0.3, 0.5]])
    with pytest.raises(NotAState):
        bloch_from_density(np.eye(3) / 3)


def test_validated_state():
    assert BlochState.validated((0.6, 0, 0.8)).r == pytest.approx(1.0)
    with pytest.raises(NotAState):
        BlochState.validated((1, 1, 0))
    with pytest.raises(NotAState):
        BlochState.validated((np.nan, 0, 0))


def test_hamiltonian_convention():
    np.testing.assert_allclose(hamiltonian(FieldVector.along_z(2.0)), 2.0 * SIGMA_Z)


def test_eigenbasis_order_and_phase():
    basis = energy_eigenbasis((0.3, -0.2, 0.9))
    h = hamiltonian((0.3, -0.2, 0.9))
    e = np.real(np.diag(basis.conj().T @ h @ basis))
    assert e[0] < e[1]
    for k in range(2):
        lead = basis[np.argmax(np.abs(basis[:, k]) > 1e-12), k]
        assert abs(lead.imag) < 1e-14 and lead.real > 0
    with pytest.raises(DegenerateHamiltonian):
        energy_eigenbasis((0, 0, 0))


def test_unital_examples():
    assert is_unital_sufficient([LindbladTerm(SIGMA_X)])
    assert is_unital_sufficient([LindbladTerm(SIGMA_Z)])
    assert not is_unital_sufficient([LindbladTerm(SIGMA_MINUS)])


def test_incoherent_examples():
    field = FieldVector.along_z(1.0)
    assert is_incoherent_sufficient([LindbladTerm(SIGMA_X)], field)
    assert is_incoherent_sufficient([LindbladTerm(SIGMA_Z)], field)
    hadamard = (SIGMA_X + SIGMA_Z) / np.sqrt(2)
    assert not is_incoherent_sufficient([LindbladTerm(hadamard)], field)
    with pytest.raises(DegenerateHamiltonian):
        is_incoherent_sufficient([LindbladTerm(SIGMA_X)], (0, 0, 0))


def test_empty_terms_rejected():
    with pytest.raises(ValueError):
        is_unital_sufficient([])


complex_entry = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(complex_entry, min_size=4, max_size=4),
       st.floats(1e-3, 1e3), st.sampled_from([SIGMA_X, SIGMA_Z, SIGMA_MINUS, None]))
def test_checkers_scale_invariant(entries, c, preset):
    a = np.array(entries).reshape(2, 2) if preset is None else preset
    field = (0.2, 0.1, -1.0)
    assert is_unital_sufficient([LindbladTerm(a)]) == is_unital_sufficient([LindbladTerm(c * a)])
    assert (is_incoherent_sufficient([LindbladTerm(a)], field)
            == is_incoherent_sufficient([LindbladTerm(c * a)], field))


def test_callable_rate():
    term = LindbladTerm(SIGMA_Z, lambda t: -t)
    assert term.rate_at(2.0) == -2.0
    with pytest.raises(ValueError):
        LindbladTerm(np.eye(3))
