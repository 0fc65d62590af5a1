"""End-to-end checks of the python surface against known values."""

import numpy as np
import pytest

import blockflip as bf

QUBITS = bf.BipartiteDims(2, 2)


def test_bell_reference_negativity():
    rho = bf.bell_reference(bf.BellDiagonalParams([0.7, 0.1, 0.1, 0.1]))
    rep = bf.ppt_check(rho, QUBITS)
    assert not rep.is_ppt
    assert abs(rep.negativity - 0.2) < 1e-12


def test_conditional_expectation_is_unital():
    params = bf.BellDiagonalParams([0.4, 0.3, 0.2, 0.1])
    model = bf.build_model(bf.bell_reference(params), QUBITS)
    eye = np.eye(4, dtype=complex)
    assert np.abs(bf.cond_expectation(model, eye) - eye).max() < 1e-12


def test_dual_map_produces_entanglement():
    params = bf.BellDiagonalParams([0.7, 0.1, 0.1, 0.1])
    model = bf.build_model(bf.bell_reference(params), QUBITS)
    sigma = np.kron(np.eye(2) / 2, np.diag([0.9, 0.1])).astype(complex)
    out = bf.dual_map(model, bf.DensityMatrix.from_matrix(sigma))
    rep = bf.ppt_check(out, QUBITS)
    assert not rep.is_ppt
    assert abs(rep.negativity - 0.21048349392520038) < 1e-11

    cfd = bf.closed_form_dual(params, 0.9)
    assert np.abs(cfd.reconstruct() - out.matrix).max() < 1e-12


def test_invariant_state_under_the_dual_semigroup():
    params = bf.BellDiagonalParams([0.4, 0.3, 0.2, 0.1])
    rho = bf.bell_reference(params)
    model = bf.build_model(rho, QUBITS)
    evolved = bf.schrodinger_semigroup(model, rho, 1.0)
    assert np.abs(evolved.matrix - rho.matrix).max() < 1e-10


def test_factorization_criterion_on_products_and_bell():
    prod = np.kron(np.diag([0.7, 0.3]), np.diag([0.6, 0.4])).astype(complex)
    assert bf.factorization_criterion(prod, QUBITS) < 1e-12

    bell = bf.bell_reference(bf.BellDiagonalParams([0.4, 0.3, 0.2, 0.1]))
    assert abs(bf.factorization_criterion(bell.matrix, QUBITS) - 0.025) < 1e-10


def test_perturbation_pipeline():
    dec = bf.random_separable(QUBITS, 1, 5)
    out = bf.perturb_nonfactorizable(dec, 0.01)
    residual = bf.factorization_criterion(out.assemble(), QUBITS)
    assert residual > 1e-8
    assert abs(np.trace(out.assemble()) - 1.0) < 1e-12


def test_density_experiment_small_run():
    stats = bf.density_experiment(QUBITS, 9, 1e-2, 3)
    assert stats.trials == 9
    assert stats.fraction == 1.0


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        bf.BellDiagonalParams([0.5, 0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        bf.DensityMatrix.from_matrix(np.eye(4, dtype=complex))
