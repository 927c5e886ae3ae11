import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from njl import integrals
from njl.lattice import LatticeSpec

# finite-lattice momentum sums for nu = 3, evaluated by direct summation
FROZEN_SUMS = {
    4: (0.6340372355767141, 0.3237283166681375),
    8: (0.6414627292233549, 0.3435223433069085),
    16: (0.6433303053491097, 0.34831589519940975),
}


def test_I3_matches_watson_closed_form():
    res = integrals.compute_I(3, cross_check=False)
    assert res.value == pytest.approx(oracle.watson_constant(), abs=1e-8)


@pytest.mark.parametrize("name,nu", [("I", 1), ("I", 2), ("J", 1), ("K", 1)])
def test_divergent_cases_raise(name, nu):
    with pytest.raises(integrals.DivergentIntegralError):
        integrals.compute(name, nu)


def test_unknown_name():
    with pytest.raises(ValueError):
        integrals.integrand("X", np.zeros(3))


@settings(max_examples=50)
@given(st.sampled_from(["I", "J", "K"]),
       st.lists(st.floats(0.05, np.pi), min_size=3, max_size=3), st.permutations([0, 1, 2]),
       st.lists(st.booleans(), min_size=3, max_size=3))
def test_integrand_symmetries(name, p, perm, flips):
    p = np.array(p)
    q = np.where(flips, -p, p)[list(perm)]
    assert integrals.integrand(name, q) == pytest.approx(integrals.integrand(name, p), rel=1e-12)


@given(st.lists(st.floats(-np.pi, np.pi), min_size=3, max_size=5))
def test_K_integrand_vanishes_on_positive_cosine_sum(p):
    p = np.array(p)
    if np.sum(np.cos(p)) >= 0:
        assert integrals.integrand("K", p) == 0.0


@pytest.mark.parametrize("L", sorted(FROZEN_SUMS))
def test_frozen_finite_lattice_sums(L):
    j, k = integrals.finite_lattice_sums_fast(3, L)
    assert (j, k) == pytest.approx(FROZEN_SUMS[L], abs=1e-12)


def test_finite_lattice_sums_approach_the_integrals():
    K3 = integrals.compute_K(3, cross_check=False).value
    J3 = integrals.compute_J(3, cross_check=False).value
    gaps_k = [K3 - FROZEN_SUMS[L][1] for L in sorted(FROZEN_SUMS)]
    gaps_j = [J3 - FROZEN_SUMS[L][0] for L in sorted(FROZEN_SUMS)]
    assert all(g > 0 for g in gaps_k + gaps_j)
    assert gaps_k == sorted(gaps_k, reverse=True)
    assert gaps_j == sorted(gaps_j, reverse=True)


@pytest.mark.parametrize("nu,L", [(1, 3), (2, 2), (3, 2)])
def test_loop_and_vectorized_sums_agree(nu, L):
    slow = integrals.finite_lattice_sums(LatticeSpec(nu=nu, L=L))
    fast = integrals.finite_lattice_sums_fast(nu, L)
    assert np.allclose(slow, fast, atol=1e-13)


@pytest.mark.parametrize("name,nu", [("J", 3), ("K", 3), ("K", 5)])
def test_refinement_within_error_estimate(name, nu):
    res = integrals.compute(name, nu, cross_check=False)
    assert integrals.refinement_change(name, nu) <= max(res.error_estimate, 1e-12)


def test_cross_check_agreement_small_sample():
    res = integrals.compute("J", 3, qmc_log2=14, qmc_replicates=8)
    assert res.agreement <= 3
    assert res.to_dict()["check_method"].startswith("sobol")


def test_two_dimensional_values_are_finite():
    assert integrals.compute_J(2, cross_check=False).value == pytest.approx(0.9091728, abs=1e-6)
    assert integrals.compute_K(2, cross_check=False).value == pytest.approx(0.6468025, abs=1e-6)


def test_threshold_report_modes():
    reports = integrals.lro_threshold_report("SU2", k_values={3: 0.35, 4: 0.25})
    assert reports[0].name == "lro_threshold_su2" and reports[0].passed
    with pytest.raises(ValueError):
        integrals.lro_threshold_report("SU4", k_values={5: 0.2})
    bad = integrals.lro_threshold_report("SU3", k_values={4: 0.2, 5: 0.3})
    assert not next(r for r in bad if r.name == "K_monotone_decrease").passed
