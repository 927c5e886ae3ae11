"""Hamiltonians of the lattice NJL model.

    H(m) = H_K + m O + H_int
    H_K   = i kappa sum_x sum_mu (-1)^theta_mu(x) [Psi^dag(x) Psi(x+e_mu) - h.c.]
    H_int = g sum_x sum_mu sum_a S^a(x) S^a(x+e_mu)
    O     = sum_x (-1)^{x_1+...+x_nu} S^2(x)

Sums run over every site, wrap bonds included, so for L = 1 each bond
appears twice.  The source-deformed interaction H_int(h) is the
completed-square rewrite in which the staggered field h^mu(x) sits inside the
square of one real channel.
"""

from dataclasses import dataclass

import numpy as np

from . import fock
from .flavor_algebra import n_generators, s_current, space_for
from .lattice import neighbor, parity, plane_wave, site_rank, sites, staggered_phase


@dataclass(frozen=True)
class ModelParams:
    kappa: float = 0.0
    g: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")
        if self.m < 0:
            raise ValueError(f"mass m must be >= 0, got {self.m}")


class SourceField:
    """Real field h^(mu)(x), stored as a (nu, n_sites) array in site order."""

    def __init__(self, spec, values=None):
        shape = (spec.nu, spec.n_sites)
        if values is None:
            values = np.zeros(shape)
        values = np.array(values, dtype=float)
        if values.shape != shape:
            raise ValueError(f"source field must have shape {shape}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("source field must be finite")
        self.spec = spec
        self.values = values

    @classmethod
    def random(cls, spec, rng, scale=1.0):
        return cls(spec, rng.uniform(-scale, scale, size=(spec.nu, spec.n_sites)))

    @classmethod
    def staggered(cls, spec, hprime):
        """h^(1) = parity * h', other components zero."""
        vals = np.zeros((spec.nu, spec.n_sites))
        vals[0] = parity_array(spec) * np.asarray(hprime, dtype=float)
        return cls(spec, vals)

    def __call__(self, mu, x):
        return self.values[mu - 1, site_rank(self.spec, x)]

    def norm_sq(self):
        return float(np.sum(self.values**2))

    @property
    def is_zero(self):
        return not np.any(self.values)


def parity_array(spec):
    return np.array([parity(x) for x in sites(spec)], dtype=float)


def trapezoid_profile(spec, R):
    """h'(x): 1 on Omega_{R+1}, linear ramp to 0 across Omega_{2R}, 0 outside.

    Membership in Omega_k = [-k+1, k]^nu is tested on the lattice coordinates;
    the ramp uses |x|_inf as written.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    out = np.zeros(spec.n_sites)
    for r, x in enumerate(sites(spec)):
        if _in_window(x, R + 1):
            out[r] = 1.0
        elif _in_window(x, 2 * R):
            out[r] = 1.0 - (max(abs(c) for c in x) - (R + 1)) / R
    return out


def _in_window(x, k):
    return all(-k + 1 <= c <= k for c in x)


def tilde_profile(spec, hprime):
    """h~'(x) = h'(x) + h'(x - e_1) with periodic wrap."""
    hprime = np.asarray(hprime, dtype=float)
    out = np.empty(spec.n_sites)
    for r, x in enumerate(sites(spec)):
        out[r] = hprime[r] + hprime[site_rank(spec, neighbor(spec, x, 1, -1))]
    return out


# -- builders -----------------------------------------------------------------

def hopping_from_phases(spec, kappa, phase, n_particles=None):
    """i kappa sum_{x,mu} phase(x,mu) sum_i [psi^dag_i(x) psi_i(x+e_mu) - h.c.]."""
    space = space_for(spec, n_particles)
    F = spec.flavors
    out = fock.zero(space)
    if kappa == 0:
        return out
    for x in sites(spec):
        for mu in range(1, spec.nu + 1):
            s = phase(x, mu)
            if s == 0:
                continue
            rx, ry = site_rank(spec, x), site_rank(spec, neighbor(spec, x, mu))
            for i in range(F):
                fwd = fock.bilinear(space, rx * F + i, ry * F + i)
                bwd = fock.bilinear(space, ry * F + i, rx * F + i)
                out = out + (1j * kappa * s) * (fwd - bwd)
    return out.tocsr()


def build_hopping(spec, kappa, n_particles=None):
    return hopping_from_phases(spec, kappa, lambda x, mu: staggered_phase(spec, x, mu), n_particles)


def bonds(spec):
    """All (x, x + e_mu, mu) pairs, one per site and direction."""
    return [(x, neighbor(spec, x, mu), mu) for x in sites(spec) for mu in range(1, spec.nu + 1)]


def build_interaction(spec, g, n_particles=None):
    space = space_for(spec, n_particles)
    out = fock.zero(space)
    if g == 0:
        return out
    n = n_generators(spec.flavors)
    for x, y, _ in bonds(spec):
        for a in range(1, n + 1):
            out = out + s_current(spec, x, a, n_particles) @ s_current(spec, y, a, n_particles)
    return (g * out).tocsr()


def build_order_parameter(spec, n_particles=None):
    return smeared_current(spec, 2, parity_array(spec), n_particles)


def build_total(spec, params, n_particles=None):
    h = build_hopping(spec, params.kappa, n_particles) + build_interaction(spec, params.g, n_particles)
    if params.m:
        h = h + params.m * build_order_parameter(spec, n_particles)
    return h.tocsr()


def smeared_current(spec, a, weight, n_particles=None, basis=None):
    """sum_x weight(x) S^(a)(x); ``weight`` is an array in site order."""
    weight = np.asarray(weight)
    out = fock.zero(space_for(spec, n_particles))
    for r, x in enumerate(sites(spec)):
        if weight[r] != 0:
            out = out + weight[r] * s_current(spec, x, a, n_particles, basis)
    return out.tocsr()


def momentum_current(spec, a, n, n_particles=None):
    """S~^(a)_p = |Lambda|^{-1/2} sum_x S^(a)(x) e^{i p.x}, p = pi n / L."""
    w = plane_wave(spec, n) / np.sqrt(spec.n_sites)
    return smeared_current(spec, a, w, n_particles)


def _channel_groups(spec, channel, basis):
    """Split generators into real and imaginary ones in the given frame."""
    from .flavor_algebra import generators

    lam = generators(spec.flavors)
    if basis is not None:
        lam = np.einsum("ji,ajk,kl->ail", basis.conj(), lam, basis)
    real, imag = [], []
    for a, mat in enumerate(lam, start=1):
        if np.max(np.abs(mat.imag)) < 1e-12:
            real.append(a)
        elif np.max(np.abs(mat.real)) < 1e-12:
            imag.append(a)
        else:
            raise ValueError(f"generator {a} is neither real nor imaginary in this frame")
    if channel not in real:
        raise ValueError(f"source channel {channel} must be a real generator in this frame")
    return [a for a in real if a != channel], imag


def completed_square_interaction(spec, g, h, channel, n_particles=None, basis=None):
    """H_int(h) with the staggered source attached to ``channel``.

      (g/2) sum_{x,mu} [S^c(x) + S^c(x+e) + par(x) h^mu(x)]^2
    + (g/2) sum_{x,mu} sum_{b real, b != c} [S^b(x) + S^b(x+e)]^2
    - (g/2) sum_{x,mu} sum_{b imag} [S^b(x) - S^b(x+e)]^2
    - g nu sum_x sum_{a real} S^a(x)^2 + g nu sum_x sum_{b imag} S^b(x)^2

    Squares are expanded before lifting: (A + B + c)^2 = A^2 + B^2 + 2AB
    + 2c(A + B) + c^2, using that currents on distinct sites commute.
    """
    plus, minus = _channel_groups(spec, channel, basis)
    space = space_for(spec, n_particles)
    one = fock.identity(space)
    par = parity_array(spec)

    def cur(x, a):
        return s_current(spec, x, a, n_particles, basis)

    out = fock.zero(space)
    for x, y, mu in bonds(spec):
        c = par[site_rank(spec, x)] * h.values[mu - 1, site_rank(spec, x)]
        sx, sy = cur(x, channel), cur(y, channel)
        sq = sx @ sx + sy @ sy + 2 * (sx @ sy)
        if c:
            sq = sq + 2 * c * (sx + sy) + c * c * one
        out = out + 0.5 * g * sq
        for b in plus:
            sx, sy = cur(x, b), cur(y, b)
            out = out + 0.5 * g * (sx @ sx + sy @ sy + 2 * (sx @ sy))
        for b in minus:
            sx, sy = cur(x, b), cur(y, b)
            out = out - 0.5 * g * (sx @ sx + sy @ sy - 2 * (sx @ sy))
    for x in sites(spec):
        for b in [channel] + plus:
            s = cur(x, b)
            out = out - g * spec.nu * (s @ s)
        for b in minus:
            s = cur(x, b)
            out = out + g * spec.nu * (s @ s)
    return out.tocsr()


def build_sourced(spec, params, h, channel=3, n_particles=None):
    """H(m, h) = H_K + H_int(h) + m O with the source in channel 3 or 4."""
    if channel not in (3, 4):
        raise ValueError("build_sourced supports channels 3 and 4; use build_sourced_channel7")
    if spec.flavors == 2 and channel != 3:
        raise ValueError("SU(2) has no channel 4")
    hint = completed_square_interaction(spec, params.g, h, channel, n_particles)
    out = build_hopping(spec, params.kappa, n_particles) + hint
    if params.m:
        out = out + params.m * build_order_parameter(spec, n_particles)
    return out.tocsr()


def build_sourced_channel7(spec, params, h, n_particles=None):
    """H_7(m, h) = H_K + V~ H~_int,7(h) V~^dag + m O (rotated spin-1 frame)."""
    from .symmetry import V_MATRIX, v_transform

    if spec.flavors != 3:
        raise ValueError("channel 7 requires SU(3)")
    _, vt = v_transform(spec, n_particles)
    hint = completed_square_interaction(spec, params.g, h, 7, n_particles, basis=V_MATRIX)
    out = build_hopping(spec, params.kappa, n_particles) + vt.op @ hint @ vt.dag
    if params.m:
        out = out + params.m * build_order_parameter(spec, n_particles)
    return out.tocsr()


class SourcedFamily:
    """H(m, h) = H(m, 0) + sum_{x,mu} h^mu(x) D_{x,mu} + (g/2)|h|^2.

    Linear in h, so the base operator and the source couplings
    D_{x,mu} = g par(x) [S^c(x) + S^c(x+e_mu)] are built once.  For channel 3
    the couplings are diagonal in the occupation basis and are kept as
    vectors.
    """

    def __init__(self, spec, params, channel=3, n_particles=None):
        self.spec, self.params, self.channel = spec, params, channel
        self.n_particles = n_particles
        zero = SourceField(spec)
        if channel == 7:
            self.base = build_sourced_channel7(spec, params, zero, n_particles)
        else:
            self.base = build_sourced(spec, params, zero, channel, n_particles)
        par = parity_array(spec)
        self.couplings = np.empty((spec.nu, spec.n_sites), dtype=object)
        for x, y, mu in bonds(spec):
            r = site_rank(spec, x)
            d = params.g * par[r] * (s_current(spec, x, channel, n_particles)
                                     + s_current(spec, y, channel, n_particles))
            self.couplings[mu - 1, r] = d.tocsr()
        self.diagonal = all(_is_diagonal(d) for d in self.couplings.ravel())
        if self.diagonal:
            self.diag_couplings = np.array([d.diagonal().real for d in self.couplings.ravel()])

    def constant(self, h):
        return 0.5 * self.params.g * h.norm_sq()

    def shift_diagonal(self, h):
        """Diagonal of H(m,h) - H(m,0), available when the couplings are diagonal."""
        if not self.diagonal:
            raise ValueError("source couplings are not diagonal for this channel")
        return h.values.ravel() @ self.diag_couplings + self.constant(h)

    def operator(self, h):
        out = self.base + self.constant(h) * fock.identity(space_for(self.spec, self.n_particles))
        for (k, r), d in np.ndenumerate(self.couplings):
            if h.values[k, r]:
                out = out + h.values[k, r] * d
        return out.tocsr()


def _is_diagonal(op):
    coo = op.tocoo()
    return bool(np.all(coo.row[coo.data != 0] == coo.col[coo.data != 0]))
