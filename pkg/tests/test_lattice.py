import numpy as np
import pytest
from hypothesis import given, strategies as st

from njl.lattice import (LatticeSpec, dispersion, momenta, momentum_vector, neighbor, parity, shift_by_q,
                         site_rank, sites, staggered_phase, theta, window)

specs = st.builds(LatticeSpec, nu=st.integers(1, 3), L=st.integers(1, 3), flavors=st.sampled_from([2, 3]))


def test_sites_are_lexicographic():
    spec = LatticeSpec(nu=2, L=1)
    assert sites(spec) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert spec.n_sites == 4 and spec.n_modes == 12


@given(specs)
def test_site_rank_is_position_in_order(spec):
    for r, x in enumerate(sites(spec)):
        assert site_rank(spec, x) == r


@given(specs, st.data())
def test_neighbor_steps_invert(spec, data):
    x = data.draw(st.sampled_from(sites(spec)))
    mu = data.draw(st.integers(1, spec.nu))
    assert neighbor(spec, neighbor(spec, x, mu), mu, -1) == x
    assert neighbor(spec, x, mu, spec.side) == x


def test_theta_definition():
    spec = LatticeSpec(nu=3, L=2)
    assert theta(spec, (2, 0, 0), 1) == 1
    assert theta(spec, (1, 0, 0), 1) == 0
    assert theta(spec, (1, 2, 0), 2) == 1 + 1
    assert theta(spec, (1, -1, 2), 3) == 0 + 1
    assert staggered_phase(spec, (1, -1, 2), 3) == -1


def test_parity_and_momenta():
    spec = LatticeSpec(nu=2, L=2)
    assert parity((1, 0)) == -1 and parity((1, 1)) == 1
    ns = momenta(spec)
    assert len(ns) == spec.n_sites
    assert shift_by_q(spec, (0, 0)) == (2, 2)
    assert shift_by_q(spec, (2, -1)) == (0, 1)
    assert dispersion(momentum_vector(spec, (0, 0))) == 0.0
    assert dispersion(momentum_vector(spec, (2, 2))) == pytest.approx(4.0)


def test_window_sizes():
    spec = LatticeSpec(nu=2, L=3)
    assert len(window(spec, 1)) == 4
    assert len(window(spec, 2)) == 16
    assert len(window(spec, 3)) == spec.n_sites


@pytest.mark.parametrize("kw", [dict(nu=0, L=1), dict(nu=1, L=0), dict(nu=1, L=1, flavors=4)])
def test_invalid_spec(kw):
    with pytest.raises(ValueError):
        LatticeSpec(**kw)


def test_invalid_site_and_direction():
    spec = LatticeSpec(nu=1, L=1)
    with pytest.raises(ValueError):
        site_rank(spec, (2,))
    with pytest.raises(ValueError):
        neighbor(spec, (0,), 2)


def test_coords_match_sites():
    spec = LatticeSpec(nu=2, L=2)
    assert np.array_equal(spec.coords, np.array(sites(spec)))
