"""Lattice Green-function constants and their finite-lattice analogues.

    I_nu = (2 pi)^-nu int dp / E_p
    J_nu = (2 pi)^-nu int dp / sqrt(E_p)
    K_nu = (2 pi)^-nu int dp (1/nu) sqrt(E_p / E_{p+Q}) (-sum_mu cos p_mu)_+

with E_p = sum_mu (1 - cos p_mu) over [-pi, pi]^nu.  Each integrand has one
point singularity (p = 0 for I and J, p = Q for K).  After the shift q = p - s
to the singular point the integrands are even in every q_mu and symmetric
under permutations, so the integral reduces to nu copies of the pyramid
{q_1 = max q_mu} in [0, pi]^nu.  The Duffy map q = pi t (1, u_2, ..., u_nu)
puts the singularity at t = 0 with Jacobian pi^nu t^(nu-1), which cancels it.

For K the positive part (sum cos q)_+ vanishes beyond the root t*(u) of
sum_mu cos(pi t u_mu) along each ray; the t-integral stops there, so the
kink never sits inside a Gauss panel.

The cross-check is scrambled Sobol sampling of the bounded pyramid
integrand over the unit cube, with replicate scrambles for the error bar.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .lattice import dispersion, momenta, momentum_vector
from .reports import BoundReport

REFERENCE_K = {3: 0.3498, 5: 0.2069}


class DivergentIntegralError(ValueError):
    pass


@dataclass
class IntegralResult:
    name: str
    value: float
    error_estimate: float
    method: str
    nu: int
    check_value: float = float("nan")
    check_error: float = float("nan")
    check_method: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def agreement(self):
        """|quadrature - sampling| in units of the combined error."""
        return abs(self.value - self.check_value) / np.hypot(self.error_estimate, self.check_error)

    def to_dict(self):
        return {
            "name": self.name, "nu": self.nu, "value": self.value,
            "error_estimate": self.error_estimate, "method": self.method,
            "check_value": self.check_value, "check_error": self.check_error,
            "check_method": self.check_method, "agreement": self.agreement, **self.extra,
        }


# -- integrands in shifted coordinates q = p - s, q in [0, pi]^nu ----------------

def _half_sin_sq(q):
    """sum_mu (1 - cos q_mu), computed as 2 sum sin^2(q/2) to keep precision near 0."""
    return 2.0 * np.sum(np.sin(q / 2) ** 2, axis=-1)


def _f_I(q):
    return 1.0 / _half_sin_sq(q)


def _f_J(q):
    return 1.0 / np.sqrt(_half_sin_sq(q))


def _f_K(q):
    nu = q.shape[-1]
    c = np.sum(np.cos(q), axis=-1)
    e_p = nu + c
    return np.sqrt(e_p / _half_sin_sq(q)) * np.maximum(c, 0.0) / nu


INTEGRANDS = {"I": _f_I, "J": _f_J, "K": _f_K}
# Smallest dimension at which the singularity is integrable.
MIN_NU = {"I": 3, "J": 2, "K": 2}


def _check_nu(name, nu):
    if name not in INTEGRANDS:
        raise ValueError(f"unknown integral {name!r}")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if nu < MIN_NU[name]:
        raise DivergentIntegralError(f"{name}_nu diverges for nu={nu} (finite for nu >= {MIN_NU[name]})")


# -- Duffy quadrature -------------------------------------------------------------

def _gauss(n, a=0.0, b=1.0):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _composite(n, panels):
    xs, ws = [], []
    for k in range(panels):
        x, w = _gauss(n, k / panels, (k + 1) / panels)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _ray_root(u):
    """t* in (0, 1]: first zero of sum_mu cos(pi t u_mu) along each ray (u_1 = 1)."""
    def g(t):
        return np.sum(np.cos(np.pi * t[:, None] * u), axis=1)

    lo = np.zeros(len(u))
    hi = np.ones(len(u))
    inside = g(hi) >= 0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        pos = g(mid) >= 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return np.where(inside, 1.0, 0.5 * (lo + hi))


def _u_grid(nu, n, panels):
    x, w = _composite(n, panels)
    if nu == 1:
        return np.ones((1, 1)), np.ones(1)
    mesh = np.meshgrid(*([x] * (nu - 1)), indexing="ij")
    wmesh = np.meshgrid(*([w] * (nu - 1)), indexing="ij")
    u = np.column_stack([np.ones(mesh[0].size)] + [m.ravel() for m in mesh])
    wu = np.prod(np.column_stack([m.ravel() for m in wmesh]), axis=1)
    return u, wu


def duffy_quadrature(name, nu, n_u=12, panels=2, n_t=24, t_split=None, chunk=200_000):
    """nu * int du int_0^{t_end(u)} dt t^(nu-1) F(pi t u) with Gauss rules."""
    f = INTEGRANDS[name]
    u, wu = _u_grid(nu, n_u, panels)
    xt, wt = _gauss(n_t)
    total = 0.0
    for s in range(0, len(u), chunk):
        uc, wc = u[s:s + chunk], wu[s:s + chunk]
        t_end = _ray_root(uc) if name == "K" else np.ones(len(uc))
        pieces = [(0.0, 1.0)] if t_split is None else [(0.0, t_split), (t_split, 1.0)]
        acc = np.zeros(len(uc))
        for a, b in pieces:
            t = t_end[:, None] * (a + (b - a) * xt[None, :])
            wt_eff = t_end[:, None] * (b - a) * wt[None, :]
            q = np.pi * t[:, :, None] * uc[:, None, :]
            acc += np.sum(wt_eff * t ** (nu - 1) * f(q), axis=1)
        total += float(np.sum(wc * acc))
    return nu * total


# Orders per dimension: (n_u, panels, n_t) for the fine rule; the coarse rule
# used for the error estimate lowers n_u and n_t.
ORDERS = {1: (1, 1, 40), 2: (24, 4, 40), 3: (20, 4, 32), 4: (12, 3, 28),
          5: (8, 3, 24), 6: (6, 2, 20), 7: (5, 2, 16)}


def _orders(nu):
    return ORDERS.get(nu, (4, 2, 16))


# -- quasi-Monte Carlo --------------------------------------------------------------

def _sobol_mean(g, nu, log2_points, replicates, seed):
    """Mean of g over [0, 1]^nu from independently scrambled Sobol sets."""
    n = 2**log2_points
    block = min(n, 2**18)
    means = []
    for r in range(replicates):
        eng = qmc.Sobol(d=nu, scramble=True, seed=np.random.default_rng([seed, r]))
        acc = 0.0
        for _ in range(n // block):
            acc += float(np.sum(g(eng.random(block))))
        means.append(acc / n)
    means = np.array(means)
    return float(means.mean()), float(means.std(ddof=1) / np.sqrt(replicates))


def _qmc_raw(name, nu, log2_points, replicates, seed):
    f = INTEGRANDS[name]
    return _sobol_mean(lambda x: f(np.pi * x), nu, log2_points, replicates, seed)


def _qmc_pyramid(name, nu, log2_points, replicates, seed):
    f = INTEGRANDS[name]

    def g(x):
        t = x[:, 0]
        u = np.column_stack([np.ones(len(x)), x[:, 1:]])
        return nu * t ** (nu - 1) * f(np.pi * t[:, None] * u)

    return _sobol_mean(g, nu, log2_points, replicates, seed)


def _square_integrable(name, nu):
    """The raw integrand behaves like |q|^-2 (I) or |q|^-1 (J, K) at its singularity."""
    power = 2 if name == "I" else 1
    return 2 * power < nu


# -- public API ------------------------------------------------------------------

def compute(name, nu, qmc_log2=20, qmc_replicates=16, seed=12345, cross_check=True, raw_check=False):
    """Duffy-Gauss value with a Sobol cross-check in pyramid coordinates.

    The sampled integrand nu t^(nu-1) F is bounded but is not integrated by
    the Gauss rule's panel layout (no root finding for K), so the two methods
    share only the change of variables.  ``raw_check`` adds sampling in the
    original coordinates, available when the integrand is square integrable.
    """
    _check_nu(name, nu)
    n_u, panels, n_t = _orders(nu)
    fine = duffy_quadrature(name, nu, n_u, panels, n_t)
    coarse = duffy_quadrature(name, nu, max(n_u - 2, 2), panels, max(n_t - 8, 8))
    err = max(abs(fine - coarse), 1e-10 * max(1.0, abs(fine)))
    res = IntegralResult(name, fine, err, f"duffy-gauss(n_u={n_u}x{panels},n_t={n_t})", nu)
    if cross_check:
        val, e = _qmc_pyramid(name, nu, qmc_log2, qmc_replicates, seed)
        res.check_value, res.check_error = val, e
        res.check_method = f"sobol-pyramid(2^{qmc_log2}x{qmc_replicates},seed={seed})"
    if raw_check and _square_integrable(name, nu):
        val, e = _qmc_raw(name, nu, qmc_log2, qmc_replicates, seed)
        res.extra.update(raw_value=val, raw_error=e,
                         raw_method=f"sobol-raw(2^{qmc_log2}x{qmc_replicates},seed={seed})")
    return res


def compute_I(nu, **kw):
    return compute("I", nu, **kw)


def compute_J(nu, **kw):
    return compute("J", nu, **kw)


def compute_K(nu, **kw):
    return compute("K", nu, **kw)


def refinement_change(name, nu):
    """Change in the quadrature value when the t-range is split at half the ray."""
    n_u, panels, n_t = _orders(nu)
    base = duffy_quadrature(name, nu, n_u, panels, n_t)
    split = duffy_quadrature(name, nu, n_u, panels, n_t, t_split=0.5)
    return abs(split - base)


# -- direct integrand in p (for symmetry and consistency checks) --------------------

def integrand(name, p):
    """Integrand at momenta p (shape (..., nu)) in the original coordinates."""
    p = np.asarray(p, dtype=float)
    nu = p.shape[-1]
    e_p = np.sum(1 - np.cos(p), axis=-1)
    if name == "I":
        return 1.0 / e_p
    if name == "J":
        return 1.0 / np.sqrt(e_p)
    if name == "K":
        e_pq = np.sum(1 + np.cos(p), axis=-1)
        return np.sqrt(e_p / e_pq) * np.maximum(-np.sum(np.cos(p), axis=-1), 0.0) / nu
    raise ValueError(f"unknown integral {name!r}")


def finite_lattice_sums(spec):
    """(J^(Lambda), K^(Lambda)) as momentum sums over p != Q."""
    Q = tuple(spec.L for _ in range(spec.nu))
    j = k = 0.0
    for n in momenta(spec):
        if n == Q:
            continue
        p = momentum_vector(spec, n)
        ep, epq = dispersion(p), dispersion(p + np.pi)
        j += 1.0 / np.sqrt(epq)
        k += np.sqrt(ep / epq) * max(-np.sum(np.cos(p)) / spec.nu, 0.0)
    return j / spec.n_sites, k / spec.n_sites


def finite_lattice_sums_fast(nu, L):
    """Vectorized finite_lattice_sums for large L (flavor-independent)."""
    n = np.arange(-L + 1, L + 1)
    grids = np.meshgrid(*([np.pi * n / L] * nu), indexing="ij")
    p = np.stack([g.ravel() for g in grids], axis=1)
    keep = ~np.all(np.isclose(p, np.pi), axis=1)
    p = p[keep]
    ep = np.sum(1 - np.cos(p), axis=1)
    epq = np.sum(1 + np.cos(p), axis=1)
    c = -np.sum(np.cos(p), axis=1) / nu
    size = (2 * L) ** nu
    return float(np.sum(1 / np.sqrt(epq)) / size), float(np.sum(np.sqrt(ep / epq) * np.maximum(c, 0)) / size)


def lro_threshold_report(mode="SU3", k_values=None, nus=(3, 4, 5, 6, 7)):
    """Threshold comparison for long-range order plus monotonicity of K_nu."""
    if k_values is None:
        k_values = {nu: compute_K(nu, cross_check=False) for nu in nus}
    ks = {nu: (r.value if isinstance(r, IntegralResult) else float(r)) for nu, r in k_values.items()}
    reports = []
    mode = mode.upper()
    if mode == "SU3":
        k5 = ks[5]
        reports.append(BoundReport.inequality("lro_threshold_su3", np.sqrt(3) * k5, 1 / np.sqrt(6), 0.0,
                                              {"nu": 5, "K": k5}, anchor="lro-threshold/su3"))
    elif mode == "SU2":
        k3 = ks[3]
        reports.append(BoundReport.inequality("lro_threshold_su2", np.sqrt(6) * k3, 1.0, 0.0,
                                              {"nu": 3, "K": k3}, anchor="lro-threshold/su2"))
    else:
        raise ValueError(f"mode must be SU2 or SU3, got {mode!r}")
    order = sorted(ks)
    for nu in order:
        reports.append(BoundReport.record("K_nu", ks[nu], {"nu": nu}, anchor="lro-threshold/K"))
    for a, b in zip(order, order[1:]):
        reports.append(BoundReport.inequality("K_monotone_decrease", ks[b], ks[a], -1e-12,
                                              {"nu": a, "nu_next": b}, anchor="lro-threshold/K"))
    return reports


def integral_table(nus=(3, 4, 5), names=("I", "J", "K"), **kw):
    out = []
    for nu in nus:
        for name in names:
            try:
                out.append(compute(name, nu, **kw))
            except DivergentIntegralError:
                continue
    return out


__all__ = ["DivergentIntegralError", "IntegralResult", "compute", "compute_I", "compute_J", "compute_K",
           "finite_lattice_sums", "finite_lattice_sums_fast", "integrand", "lro_threshold_report",
           "refinement_change", "integral_table", "REFERENCE_K"]
