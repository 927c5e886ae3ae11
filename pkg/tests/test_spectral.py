import numpy as np
import pytest
import scipy.linalg as la
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

import oracle
from njl import fock
from njl.flavor_algebra import s_current
from njl.hamiltonian import ModelParams, build_total
from njl.lattice import LatticeSpec, sites
from njl.spectral import (DenseCapError, DiagonalShiftFamily, SpectralFilter, Spectrum, double_commutator_expectation,
                          ground_only, smooth_step)

SPEC = LatticeSpec(nu=1, L=1, flavors=3)
PARAMS = ModelParams(kappa=0.3, g=1.1, m=0.4)
H = build_total(SPEC, PARAMS)
HD = H.toarray()
SPECTRUM = Spectrum(H)


def test_log_partition_matches_dense():
    for beta in (0.0, 0.5, 3.0):
        assert SPECTRUM.log_partition(beta) == pytest.approx(oracle.log_partition(HD, beta), abs=1e-10)


def test_energies_match_dense():
    assert np.allclose(SPECTRUM.energies, la.eigvalsh(HD), atol=1e-11)


def test_expectation_matches_dense():
    A = s_current(SPEC, (0,), 3) @ s_current(SPEC, (1,), 3)
    for beta in (0.4, 2.0):
        ref = oracle.thermal_expectation(HD, A.toarray(), beta)
        assert SPECTRUM.thermal(beta).expectation(A) == pytest.approx(ref, abs=1e-11)


@pytest.mark.parametrize("a,b", [(1, 1), (3, 3), (1, 4), (2, 2)])
def test_duhamel_matches_quadrature(a, b):
    A = s_current(SPEC, (0,), a)
    B = s_current(SPEC, (1,), b)
    beta = 1.3
    ref = oracle.duhamel_quadrature(HD, A.toarray(), B.toarray(), beta)
    assert SPECTRUM.thermal(beta).duhamel(A, B) == pytest.approx(ref, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 4.0))
def test_duhamel_bounds(seed, beta):
    rng = np.random.default_rng(seed)
    A = sum(complex(*rng.normal(size=2)) * s_current(SPEC, x, a)
            for x in sites(SPEC) for a in rng.choice(np.arange(1, 9), size=2, replace=False))
    Ad = fock.adjoint(A)
    state = SPECTRUM.thermal(beta)
    d = state.duhamel(Ad, A)
    upper = 0.5 * state.expectation(Ad @ A + A @ Ad)
    assert abs(d.imag) < 1e-10
    assert -1e-12 <= d.real <= upper.real + 1e-10


def test_ground_space_matches_dense_and_sparse_solver():
    g = SPECTRUM.ground()
    e = la.eigvalsh(HD)
    assert g.E0 == pytest.approx(e[0], abs=1e-11)
    d = int(np.sum(e - e[0] < 1e-8))
    assert g.d == d
    g2 = ground_only(H)
    assert g2.E0 == pytest.approx(g.E0, abs=1e-10)
    assert g2.d == g.d
    P1, P2 = g.projector().toarray(), g2.projector().toarray()
    assert np.allclose(P1, P2, atol=1e-8)
    assert g.gap == pytest.approx(g2.gap, abs=1e-9)


def test_ground_limit_of_thermal_state():
    A = s_current(SPEC, (0,), 3) @ s_current(SPEC, (1,), 3)
    g = SPECTRUM.ground()
    beta = 60.0 / g.gap
    assert SPECTRUM.thermal(beta).expectation(A) == pytest.approx(g.expectation(A), abs=1e-9)


def test_double_commutator_is_nonnegative():
    B = s_current(SPEC, (0,), 3) - s_current(SPEC, (1,), 3)
    val = double_commutator_expectation(B, H, SPECTRUM.thermal(1.0))
    assert val.real >= -1e-12 and abs(val.imag) < 1e-12


def test_diagonal_shift_family_matches_spectrum():
    rng = np.random.default_rng(1)
    fam = DiagonalShiftFamily(H)
    v = rng.normal(size=H.shape[0])
    direct = Spectrum(H + sp.diags_array(v))
    assert np.allclose(np.sort(fam.energies(v)), direct.energies, atol=1e-11)
    assert fam.log_partitions(v, [1.5])[0] == pytest.approx(direct.log_partition(1.5), abs=1e-10)


def test_block_sizes_on_twelve_modes():
    spec = LatticeSpec(nu=2, L=1, flavors=3)
    massless = Spectrum(build_total(spec, ModelParams(kappa=0.3, g=1.1)))
    massive = Spectrum(build_total(spec, PARAMS))
    assert max(len(b.idx) for b in massless.blocks) == 216
    assert max(len(b.idx) for b in massive.blocks) == 420


def test_dense_cap_enforced(monkeypatch):
    monkeypatch.setenv("NJL_DENSE_CAP", "10")
    with pytest.raises(DenseCapError):
        Spectrum(H)
    with pytest.raises(DenseCapError):
        DiagonalShiftFamily(H)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        Spectrum(fock.creation(fock.FockSpace(3), 0))


def test_negative_beta_rejected():
    with pytest.raises(ValueError):
        SPECTRUM.thermal(-1.0)


def test_smooth_step_limits():
    t = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    s = smooth_step(t)
    assert s[0] == 0.0 and s[1] == 0.0 and s[3] == 1.0 and s[4] == 1.0
    assert s[2] == pytest.approx(0.5)
    assert np.all(np.diff(smooth_step(np.linspace(-0.5, 1.5, 200))) >= 0)


@given(st.floats(-10, 20))
def test_filter_support(s):
    f = SpectralFilter(delta=0.05, r=4.0, epsilon=0.2)
    val = float(f(s))
    if s <= 0.05 or s >= 8.0:
        assert val == 0.0
    assert 0.0 <= val <= max(s, 0.0) ** 0.1 + 1e-15


def test_filter_validation():
    with pytest.raises(ValueError):
        SpectralFilter(delta=1.0, r=0.4, epsilon=0.2)
    with pytest.raises(ValueError):
        SpectralFilter(delta=0.1, r=1.0, epsilon=0.0)
