"""Hypercubic lattice geometry.

The lattice is {-L+1, ..., L}^nu with periodic wrap.  Sites are ordered
lexicographically (first coordinate most significant), and this order fixes
the fermionic mode ordering used everywhere else.  Directions ``mu`` are
1-based.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    nu: int
    L: int
    flavors: int = 3

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError(f"nu must be >= 1, got {self.nu}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.flavors not in (2, 3):
            raise ValueError(f"flavors must be 2 or 3, got {self.flavors}")

    @property
    def side(self):
        return 2 * self.L

    @property
    def n_sites(self):
        return self.side**self.nu

    @property
    def n_modes(self):
        return self.flavors * self.n_sites

    @cached_property
    def coords(self):
        """(n_sites, nu) integer array of site coordinates in canonical order."""
        return np.array(sites(self), dtype=np.int64).reshape(self.n_sites, self.nu)


def sites(spec):
    rng = range(-spec.L + 1, spec.L + 1)
    return [tuple(x) for x in itertools.product(rng, repeat=spec.nu)]


def _check_site(spec, x):
    x = tuple(int(c) for c in x)
    if len(x) != spec.nu or any(c < -spec.L + 1 or c > spec.L for c in x):
        raise ValueError(f"site {x} is not in the lattice {spec}")
    return x


def _check_direction(spec, mu):
    if not 1 <= mu <= spec.nu:
        raise ValueError(f"direction mu={mu} out of range 1..{spec.nu}")


def site_rank(spec, x):
    x = _check_site(spec, x)
    r = 0
    for c in x:
        r = r * spec.side + (c + spec.L - 1)
    return r


def theta(spec, x, mu):
    """Exponent of the staggered hopping sign in direction mu."""
    _check_direction(spec, mu)
    x = _check_site(spec, x)
    t = sum(x[: mu - 1])
    if x[mu - 1] == spec.L:
        t += 1
    return t


def staggered_phase(spec, x, mu):
    return -1 if theta(spec, x, mu) % 2 else 1


def neighbor(spec, x, mu, steps=1):
    _check_direction(spec, mu)
    x = list(_check_site(spec, x))
    c = x[mu - 1] + steps
    x[mu - 1] = (c + spec.L - 1) % spec.side - spec.L + 1
    return tuple(x)


def parity(x):
    return -1 if sum(x) % 2 else 1


def momenta(spec):
    """Integer labels n with p = pi * n / L, n in {-L+1, ..., L} per direction."""
    rng = range(-spec.L + 1, spec.L + 1)
    return [tuple(n) for n in itertools.product(rng, repeat=spec.nu)]


def momentum_vector(spec, n):
    return np.pi * np.asarray(n, dtype=float) / spec.L


def shift_by_q(spec, n):
    """Label of p + Q folded back into the canonical window."""
    return tuple((k + spec.L + spec.L - 1) % spec.side - spec.L + 1 for k in n)


def dispersion(p):
    p = np.asarray(p, dtype=float)
    return float(np.sum(1.0 - np.cos(p)))


def plane_wave(spec, n):
    """e^{i p.x} over all sites, for p labelled by n."""
    p = momentum_vector(spec, n)
    return np.exp(1j * spec.coords @ p)


def linf_norm(x):
    return max(abs(c) for c in x)


def window(spec, R):
    """Sites of Omega_R = [-R+1, R]^nu intersected with the lattice."""
    return [x for x in sites(spec) if all(-R + 1 <= c <= R for c in x)]
