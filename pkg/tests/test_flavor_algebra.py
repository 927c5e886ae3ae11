import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from njl import fock
from njl.flavor_algebra import (gell_mann, generators, global_charge, imaginary_generators, n_generators,
                                pauli, real_generators, s_current, structure_constant, structure_constants,
                                verify_su_algebra)
from njl.hamiltonian import ModelParams, build_total
from njl.lattice import LatticeSpec, sites


def test_generators_match_typed_tables():
    assert np.allclose(np.array([gell_mann(a) for a in range(1, 9)]), oracle.gell_mann())
    assert np.allclose(np.array([pauli(a) for a in range(1, 4)]), oracle.pauli())


@pytest.mark.parametrize("F", [2, 3])
def test_trace_normalization(F):
    lam = generators(F)
    gram = np.einsum("aij,bji->ab", lam, lam)
    assert np.allclose(gram, 2 * np.eye(n_generators(F)))


def test_imaginary_and_real_sets():
    assert list(imaginary_generators(3)) == [2, 5, 7]
    assert list(real_generators(3)) == [1, 3, 4, 6, 8]
    assert list(imaginary_generators(2)) == [2]


def test_structure_constant_values():
    assert structure_constant(1, 2, 3) == pytest.approx(2.0)
    assert structure_constant(1, 4, 7) == pytest.approx(1.0)
    assert structure_constant(1, 5, 6) == pytest.approx(-1.0)
    assert structure_constant(4, 5, 8) == pytest.approx(np.sqrt(3))
    assert structure_constant(6, 7, 8) == pytest.approx(np.sqrt(3))
    assert structure_constant(1, 2, 3, flavors=2) == pytest.approx(2.0)


def test_sum_of_squared_f3():
    # sum_{a,b} f_{3ab}^2 sets the 24 (SU(3)) and 16 (SU(2)) prefactors
    assert np.sum(structure_constants(3)[2] ** 2) == pytest.approx(12.0)
    assert np.sum(structure_constants(2)[2] ** 2) == pytest.approx(8.0)


@given(st.sampled_from([2, 3]), st.data())
def test_commutators_close(F, data):
    n = n_generators(F)
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    lam = generators(F)
    f = structure_constants(F)
    lhs = lam[a] @ lam[b] - lam[b] @ lam[a]
    assert np.allclose(lhs, 1j * np.einsum("c,cij->ij", f[a, b], lam), atol=1e-12)


@pytest.mark.parametrize("F", [2, 3])
def test_currents_match_dense_oracle(F):
    spec = LatticeSpec(nu=1, L=1, flavors=F)
    model = oracle.DenseModel(1, 1, F)
    for x, a in itertools.product(sites(spec), range(1, n_generators(F) + 1)):
        assert np.allclose(s_current(spec, x, a).toarray(), model.current(x, a), atol=1e-14)


@pytest.mark.parametrize("F", [2, 3])
def test_algebra_suite_passes(F):
    reports = verify_su_algebra(LatticeSpec(nu=1, L=1, flavors=F))
    assert all(r.passed for r in reports)


def test_global_charges_commute_with_massless_hamiltonian():
    spec = LatticeSpec(nu=1, L=2, flavors=3)
    H = build_total(spec, ModelParams(kappa=0.4, g=1.3))
    for a in range(1, 9):
        assert fock.max_abs(fock.commutator(global_charge(spec, a), H)) < 1e-12


def test_mass_term_breaks_all_but_charge_2_and_7():
    spec = LatticeSpec(nu=1, L=1, flavors=3)
    H = build_total(spec, ModelParams(kappa=0.4, g=1.3, m=0.5))
    # [Q^a, O] vanishes exactly when f_{a2c} = 0 for all c
    f = structure_constants(3)
    for a in range(1, 9):
        comm = fock.max_abs(fock.commutator(global_charge(spec, a), H))
        assert (comm < 1e-12) == (np.max(np.abs(f[a - 1, 1])) == 0)


def test_invalid_generator_index():
    with pytest.raises(ValueError):
        s_current(LatticeSpec(nu=1, L=1, flavors=2), (0,), 4)
