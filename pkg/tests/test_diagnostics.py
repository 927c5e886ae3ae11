import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from njl import diagnostics, fock
from njl.hamiltonian import ModelParams, SourceField, build_total
from njl.lattice import LatticeSpec, site_rank, sites
from njl.spectral import SpectralFilter, Spectrum

SU2_CHAIN = LatticeSpec(nu=1, L=2, flavors=2)
SU3_PAIR = LatticeSpec(nu=1, L=1, flavors=3)
FILTER = SpectralFilter(delta=0.05, r=4.0, epsilon=0.2)
MASSLESS = ModelParams(kappa=0.2, g=1.3)


def _ok(reports):
    bad = [(r.name, r.lhs, r.rhs) for r in reports if not r.passed]
    assert not bad, bad


def test_zero_source_is_equality():
    rep = diagnostics.gaussian_domination(SU2_CHAIN, MASSLESS, 1.0, SourceField(SU2_CHAIN))
    assert rep.lhs == pytest.approx(rep.rhs, abs=1e-12)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 3.0))
def test_gaussian_domination_random_fields(seed, beta):
    h = SourceField.random(SU2_CHAIN, np.random.default_rng(seed), scale=2.0)
    assert diagnostics.gaussian_domination(SU2_CHAIN, MASSLESS, beta, h).passed


def test_gaussian_domination_log_partition_against_oracle():
    # at zero field the sourced partition function is the plain one
    spec = LatticeSpec(nu=1, L=1, flavors=2)
    params = ModelParams(kappa=0.3, g=1.1, m=0.4)
    rep = diagnostics.gaussian_domination(spec, params, 2.0, SourceField(spec))
    H = oracle.DenseModel(1, 1, 2).hamiltonian(0.3, 1.1, 0.4)
    assert rep.rhs == pytest.approx(oracle.log_partition(H, 2.0), abs=1e-9)


@pytest.mark.parametrize("channel", [4, 7])
def test_gaussian_domination_other_channels(channel):
    reports = diagnostics.gaussian_domination_scan(SU3_PAIR, MASSLESS, [1.0], n_samples=4, channel=channel)
    _ok(reports)


def test_infrared_bound_su2_and_coupling_dependence():
    _ok(diagnostics.infrared_bound(SU2_CHAIN, MASSLESS, 2.0))
    weak = diagnostics.infrared_bound(SU2_CHAIN, ModelParams(kappa=0.2, g=0.5), 2.0)
    strong = diagnostics.infrared_bound(SU2_CHAIN, ModelParams(kappa=0.2, g=2.0), 2.0)
    assert [r.rhs for r in strong] < [r.rhs for r in weak]
    with pytest.raises(ValueError):
        diagnostics.infrared_bound(SU2_CHAIN, ModelParams(kappa=0.2), 2.0)


def test_sum_rule_free_fermions():
    _ok(diagnostics.sum_rule(SU2_CHAIN, ModelParams(kappa=0.5), 1.0))


def test_dls_bound_and_double_commutators():
    reports = []
    for n in [(0,), (1,), (2,), (3,)]:
        reports += diagnostics.dls_bound(SU2_CHAIN, MASSLESS, 1.5, n)
    reports += diagnostics.double_commutator_checks(SU2_CHAIN, MASSLESS, 1.5)
    _ok(reports)
    inter = [r for r in reports if r.name == "interaction_double_commutator"]
    assert inter and all(r.asserted and r.extra["prefactor"] == 16.0 for r in inter)


def test_double_commutator_identity_is_only_recorded_with_mass():
    reports = diagnostics.double_commutator_checks(SU2_CHAIN, ModelParams(kappa=0.2, g=1.3, m=0.4), 1.5)
    inter = [r for r in reports if r.name == "interaction_double_commutator"]
    assert inter and not any(r.asserted for r in inter)


def test_su2_neel_bond_values():
    reports = diagnostics.neel_bounds(SU2_CHAIN, ModelParams(kappa=0.1, g=2.0), 3.0)
    _ok(reports)
    bonds = next(r for r in reports if r.name == "neel_bond_values")
    assert bonds.extra["values"] == pytest.approx([0.0, 0.0, -1.0])


def test_neel_state_is_normalized_product_state():
    v = diagnostics.neel_state(SU3_PAIR)
    assert np.count_nonzero(v) == 1 and np.linalg.norm(v) == pytest.approx(1.0)
    occ = int(np.flatnonzero(v)[0])
    F = SU3_PAIR.flavors
    for x in sites(SU3_PAIR):
        r = site_rank(SU3_PAIR, x)
        bits = [(occ >> (r * F + i)) & 1 for i in range(F)]
        assert bits == ([1, 1, 0] if x[0] % 2 else [0, 0, 1])


def test_lro_quantities_are_consistent():
    res = diagnostics.lro_diagnostics(SU2_CHAIN, MASSLESS, 2.0)
    _ok(res.reports)
    assert res.m_lro_sq * SU2_CHAIN.n_sites == pytest.approx(res.sq_structure, rel=1e-10)
    assert set(res.to_dict()) >= {"m_lro_sq", "sq_structure", "nn_correlator"}


def test_staggered_magnetization_vanishes_at_zero_mass_and_flips():
    ms0, _ = diagnostics.staggered_magnetization(SU2_CHAIN, MASSLESS)
    assert abs(ms0) < 1e-10
    params = ModelParams(kappa=0.2, g=1.3, m=0.3)
    ms, reports = diagnostics.staggered_magnetization(SU2_CHAIN, params)
    _ok(reports)
    assert ms < 0
    assert diagnostics.staggered_magnetization_flipped(SU2_CHAIN, params) == pytest.approx(-ms, abs=1e-10)
    gap = diagnostics.model_spectrum(SU2_CHAIN, params).gap
    cold, _ = diagnostics.staggered_magnetization(SU2_CHAIN, params, beta=60.0 / gap)
    assert cold == pytest.approx(ms, abs=1e-9)


@pytest.mark.parametrize("R", [1, 2])
def test_trial_operator_norm(R):
    spec = LatticeSpec(nu=1, L=2, flavors=3)
    A = diagnostics.trial_operator(spec, R)
    assert fock.op_norm(A) <= 2.0 + 1e-12
    with pytest.raises(ValueError):
        diagnostics.trial_operator(spec, 3)


def test_profile_current_warns_on_wrapping_support():
    spec = LatticeSpec(nu=1, L=2, flavors=2)
    with pytest.warns(UserWarning):
        diagnostics.profile_current(spec, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        diagnostics.profile_current(spec, 1)


def test_ng_numerator_trivial_model():
    reports = diagnostics.ng_trial_energy(SU3_PAIR, ModelParams(), FILTER, 1)
    num = next(r for r in reports if r.name == "ng_numerator_identity")
    assert num.passed


def test_ng_mode_gram_structure():
    G, reports = diagnostics.ng_mode_gram(SU3_PAIR, ModelParams(kappa=0.3, g=1.1, m=0.2), FILTER)
    _ok(reports)
    assert G.shape == (6, 6)
    assert np.allclose(G, G.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(G)) >= -1e-12
    with pytest.raises(ValueError):
        diagnostics.ng_mode_gram(SU2_CHAIN, MASSLESS, FILTER)


def test_kls_and_ground_bounds():
    params = ModelParams(kappa=0.1, g=2.0, m=0.1)
    reports = diagnostics.kls_inequality(SU2_CHAIN, params, FILTER, 1)
    _ok(reports)
    assert not next(r for r in reports if r.name == "kls_inequality").asserted
    _ok(diagnostics.duhamel_ground_limit(SU2_CHAIN, params, 1))


def test_model_spectrum_matches_direct():
    params = ModelParams(kappa=0.3, g=1.1, m=0.4)
    s = diagnostics.model_spectrum(SU2_CHAIN, params)
    assert s.E0 == pytest.approx(Spectrum(build_total(SU2_CHAIN, params)).E0)


def test_dc_scaling_record_fits_two_constants():
    spec = LatticeSpec(nu=1, L=4, flavors=2)
    reports = diagnostics.dc_scaling_record(spec, ModelParams(kappa=0.2, g=1.0, m=0.1), [1, 2])
    assert [r.name for r in reports].count("source_double_commutator_norm") == 2
    assert any(r.name == "source_double_commutator_fit_C1" for r in reports)
