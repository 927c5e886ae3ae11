"""Unitary and antilinear symmetry operations as Fock-space matrices.

Conventions: ``UnitaryOp.conj(A)`` returns U^dag A U.  Maps that do not
conserve particle number (particle-hole, U_odd, Majoranas, the reflection)
live on the full Fock space only.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from . import fock
from .flavor_algebra import (current_from_matrix, generators, imaginary_generators, n_generators,
                             s_current, space_for)
from .lattice import neighbor, parity, site_rank, sites

V_MATRIX = -1j / np.sqrt(2) * np.array([[1, 0, -1], [1j, 0, 1j], [0, np.sqrt(2), 0]])

_R2 = 1 / np.sqrt(2)
# V^dag lambda^(a) V as tabulated for the spin-1 frame
V_TABLE = {
    1: np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]]),
    2: np.diag([1, 0, -1]).astype(complex),
    3: np.array([[0, 0, -1], [0, 0, 0], [-1, 0, 0]], dtype=complex),
    4: _R2 * np.array([[0, 1, 0], [1, 0, -1], [0, -1, 0]], dtype=complex),
    5: _R2 * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]]),
    6: _R2 * np.array([[0, -1j, 0], [1j, 0, 1j], [0, -1j, 0]]),
    7: _R2 * np.array([[0, -1, 0], [-1, 0, -1], [0, -1, 0]], dtype=complex),
    8: np.diag([1, -2, 1]).astype(complex) / np.sqrt(3),
}


@dataclass
class UnitaryOp:
    op: sp.csr_array
    label: str

    @property
    def dag(self):
        return fock.adjoint(self.op)

    def conj(self, a):
        """U^dag a U."""
        return (self.dag @ a @ self.op).tocsr()

    def unitarity_residual(self):
        return fock.residual(self.dag @ self.op, fock.identity_like(self.op))

    def __matmul__(self, other):
        return UnitaryOp((self.op @ other.op).tocsr(), f"{self.label}*{other.label}")


def _modes_of(spec, xs):
    F = spec.flavors
    return [site_rank(spec, x) * F + i for x in xs for i in range(F)]


def phase_on_sites(spec, xs, phi, n_particles=None, label="phase"):
    """prod_{x in xs} prod_k exp(i phi n_k(x)), diagonal in the occupation basis."""
    space = space_for(spec, n_particles)
    mask = 0
    for k in _modes_of(spec, xs):
        mask |= 1 << k
    counts = fock.popcount(space.states & np.int64(mask))
    return UnitaryOp(sp.diags_array(np.exp(1j * phi * counts), format="csr"), label)


# -- particle-hole and friends -------------------------------------------------

def u_mode(space, k):
    """u_k = [prod_{l != k} (-1)^{n_l}] (psi^dag_k + psi_k)."""
    others = [l for l in range(space.n_modes) if l != k]
    return (fock.parity_string(space, others) @ fock.majorana_xi(space, k)).tocsr()


def _u_product(spec, modes, label):
    space = space_for(spec)
    out = fock.identity(space)
    for k in modes:
        out = out @ u_mode(space, k)
    return UnitaryOp(out.tocsr(), label)


def particle_hole(spec):
    return _u_product(spec, range(spec.n_modes), "U_PH")


def u_odd(spec):
    odd = [x for x in sites(spec) if parity(x) < 0]
    return _u_product(spec, _modes_of(spec, odd), "U_odd")


def u1_factor(spec, j, n_particles=None):
    if not 2 <= j <= spec.nu:
        raise ValueError(f"U_1 factor direction must be in 2..{spec.nu}")
    even = [x for x in sites(spec) if x[j - 1] % 2 == 0]
    return phase_on_sites(spec, even, np.pi / 2, n_particles, f"U_1,{j}")


def u1(spec, n_particles=None):
    out = UnitaryOp(fock.identity(space_for(spec, n_particles)), "U_1")
    for j in range(2, spec.nu + 1):
        out = out @ u1_factor(spec, j, n_particles)
    out.label = "U_1"
    return out


def u1_tilde(spec):
    out = u1(spec) @ u_odd(spec)
    out.label = "U~_1"
    return out


def gauge_pair(spec, i, j, n_particles=None):
    xs = [x for x in sites(spec) if x[i - 1] % 2 and x[j - 1] % 2]
    return phase_on_sites(spec, xs, np.pi, n_particles, f"U_HA({i},{j})")


def gauge_equivalence(spec, j, n_particles=None):
    """U_HA(j -> 1) = U_HA(j, j-1) ... U_HA(j, 1)."""
    if not 2 <= j <= spec.nu:
        raise ValueError(f"gauge direction j must be in 2..{spec.nu}")
    out = UnitaryOp(fock.identity(space_for(spec, n_particles)), "")
    for l in range(j - 1, 0, -1):
        out = out @ gauge_pair(spec, j, l, n_particles)
    out.label = f"U_HA({j}->1)"
    return out


def gauged_theta(spec, j, x, mu):
    """Hopping exponent after U_HA(j -> 1), written out independently."""
    x = tuple(x)
    edge = 1 if x[mu - 1] == spec.L else 0
    if mu == j:
        return edge
    if mu > j:
        return (sum(x[: mu - 1]) if mu > 1 else 0) + edge
    return sum(x[: mu - 1]) + x[j - 1] + edge


def boundary_shift(spec, i, l, n_particles=None):
    """U_BC,i(L -> l): psi(x) -> -psi(x) for l <= x^(i) <= L."""
    if not 1 <= i <= spec.nu:
        raise ValueError(f"direction {i} out of range")
    if not -spec.L + 2 <= l <= spec.L:
        raise ValueError(f"cut position l={l} must lie in {-spec.L + 2}..{spec.L}")
    xs = [x for x in sites(spec) if l <= x[i - 1] <= spec.L]
    return phase_on_sites(spec, xs, np.pi, n_particles, f"U_BC,{i}({spec.L}->{l})")


# -- one-body rotations --------------------------------------------------------

def local_fock_unitary(flavors, A):
    """exp(i Psi^dag A Psi) on the 2^F-dimensional single-site Fock space."""
    loc = fock.FockSpace(flavors)
    K = current_from_matrix(loc, 0, A).toarray()
    return la.expm(1j * K)


def lift_generator(spec, A, n_particles=None, label="lift"):
    """prod_x exp(i Psi^dag(x) A Psi(x)) for a hermitian F x F matrix A."""
    A = np.asarray(A, dtype=complex)
    if np.max(np.abs(A - A.conj().T)) > 1e-12:
        raise ValueError("generator must be hermitian")
    loc = local_fock_unitary(spec.flavors, A)
    space = space_for(spec, n_particles)
    out = fock.identity(space)
    for r in range(spec.n_sites):
        out = out @ fock.embed_local(space, r * spec.flavors, loc)
    return UnitaryOp(out.tocsr(), label)


def global_rotation(spec, a, theta, n_particles=None):
    """U^(a)(theta) = prod_x exp(i theta S^(a)(x))."""
    lam = generators(spec.flavors)[a - 1]
    return lift_generator(spec, theta * lam, n_particles, f"U^({a})({theta:g})")


def hermitian_log(U):
    """Hermitian A with exp(iA) = U for unitary U."""
    T, Z = la.schur(np.asarray(U, dtype=complex), output="complex")
    A = Z @ np.diag(np.angle(np.diag(T))) @ Z.conj().T
    return 0.5 * (A + A.conj().T)


def v_transform(spec, n_particles=None):
    """(V, V~) with V~^dag Psi(x) V~ = V Psi(x) on every site."""
    if spec.flavors != 3:
        raise ValueError("the spin-1 frame exists only for SU(3)")
    return V_MATRIX.copy(), lift_generator(spec, hermitian_log(V_MATRIX), n_particles, "V~")


# -- permutations, shifts, reflection ------------------------------------------

def mode_permutation(space, perm):
    """Unitary T with T psi^dag_k T^dag = psi^dag_{perm[k]}."""
    perm = np.asarray(perm, dtype=np.int64)
    M = space.n_modes
    states = space.states
    occ = ((states[:, None] >> np.arange(M)) & 1).astype(bool)
    new = np.zeros_like(states)
    for k in range(M):
        new |= occ[:, k].astype(np.int64) << perm[k]
    inv = np.zeros(len(states), dtype=np.int64)
    for a in range(M):
        for b in range(a + 1, M):
            if perm[a] > perm[b]:
                inv += occ[:, a] & occ[:, b]
    sign = 1 - 2 * (inv & 1)
    rows = space.index(new)
    cols = np.arange(space.dim)
    return sp.csr_array((sign.astype(complex), (rows, cols)), shape=(space.dim, space.dim))


def lattice_shift(spec, mu, steps=1, n_particles=None):
    """T psi_i(x) T^dag = psi_i(x + steps e_mu)."""
    F = spec.flavors
    perm = np.empty(spec.n_modes, dtype=np.int64)
    for x in sites(spec):
        r, r2 = site_rank(spec, x), site_rank(spec, neighbor(spec, x, mu, steps))
        perm[r * F:(r + 1) * F] = np.arange(r2 * F, (r2 + 1) * F)
    op = mode_permutation(space_for(spec, n_particles), perm)
    return UnitaryOp(op, f"T_{mu}^{steps}")


def reflect_site(x):
    return (1 - x[0],) + tuple(x[1:])


class Reflection:
    """Antilinear reflection across the x^(1) = 1/2 hyperplane.

    theta(A) = R conj(A) R^dag with R the mode permutation x -> r(x) and
    conj the entrywise complex conjugate in the occupation basis.  Ladder
    operators are real matrices, so theta(psi(x)) = psi(r(x)).
    """

    def __init__(self, spec):
        self.spec = spec
        F = spec.flavors
        perm = np.empty(spec.n_modes, dtype=np.int64)
        for x in sites(spec):
            r, r2 = site_rank(spec, x), site_rank(spec, reflect_site(x))
            perm[r * F:(r + 1) * F] = np.arange(r2 * F, (r2 + 1) * F)
        self.perm = perm
        self.R = mode_permutation(space_for(spec), perm)

    def minus_sites(self):
        return [x for x in sites(self.spec) if x[0] <= 0]

    def minus_modes(self):
        return _modes_of(self.spec, self.minus_sites())

    def __call__(self, a):
        return (self.R @ a.conj() @ fock.adjoint(self.R)).tocsr()


def reflection(spec):
    return Reflection(spec)


def random_even_operator(space, modes, rng, n_terms=6):
    """Random even polynomial in psi^dag psi, psi psi, psi^dag psi^dag on ``modes``."""
    blocks = []
    for i in modes:
        for j in modes:
            blocks.append(fock.ladder_product(space, [(i, True), (j, False)]))
            if i < j:
                blocks.append(fock.ladder_product(space, [(i, False), (j, False)]))
                blocks.append(fock.ladder_product(space, [(i, True), (j, True)]))

    def coeff():
        return complex(rng.normal(), rng.normal())

    out = coeff() * fock.identity(space)
    for b in blocks:
        out = out + coeff() * b
    for _ in range(n_terms):
        i, j = rng.choice(len(blocks), size=2)
        out = out + coeff() * (blocks[i] @ blocks[j])
    for _ in range(n_terms // 2):
        i, j, k = rng.choice(len(blocks), size=3)
        out = out + coeff() * (blocks[i] @ blocks[j] @ blocks[k])
    return out.tocsr()


def rp_check(spec, trials=100, seed=0, tol=1e-9):
    """min over random even A on Lambda_- of Tr(A theta(A)) must be >= -tol."""
    from .reports import BoundReport

    refl = Reflection(spec)
    space = space_for(spec)
    rng = np.random.default_rng(seed)
    modes = refl.minus_modes()
    values = []
    worst_imag = 0.0
    for _ in range(trials):
        A = random_even_operator(space, modes, rng)
        t = complex((A @ refl(A)).trace())
        values.append(t.real)
        worst_imag = max(worst_imag, abs(t.imag) / max(1.0, abs(t.real)))
    ctx = {"nu": spec.nu, "L": spec.L, "flavors": spec.flavors, "trials": trials, "seed": seed}
    vmin = min(values)
    return BoundReport.inequality("reflection_positivity", -vmin, 0.0, tol, ctx,
                                  anchor="reflection-positivity/trace",
                                  min_trace=vmin, max_rel_imag=worst_imag)


# -- identity suites -------------------------------------------------------------

def _rot_site_ops(spec, x):
    """S^(a)(x) and a single-site rotation U_x^(a)(theta) on the full space."""
    cur = {a: s_current(spec, x, a) for a in range(1, n_generators(spec.flavors) + 1)}
    space = space_for(spec)
    first = site_rank(spec, x) * spec.flavors

    def U(a, th):
        loc = local_fock_unitary(spec.flavors, th * generators(spec.flavors)[a - 1])
        return fock.embed_local(space, first, loc)

    return cur, U


def rotation_identity_suite(spec, thetas=(0.0, 0.3, np.pi / 2, 1.1), tol=1e-10):
    """Single-site conjugation identities for the SU(3) generators."""
    from .reports import BoundReport

    if spec.flavors != 3:
        raise ValueError("the rotation identities are stated for SU(3)")
    x = sites(spec)[0]
    S, U = _rot_site_ops(spec, x)
    adj = fock.adjoint
    r3 = np.sqrt(3)
    cases = {
        "rot_7_on_1": lambda t: (adj(U(7, t)) @ S[1] @ U(7, t),
                                 S[1] * np.cos(t) + S[4] * np.sin(t)),
        "rot_2_on_1": lambda t: (U(2, t / 2) @ S[1] @ adj(U(2, t / 2)),
                                 S[1] * np.cos(t) + S[3] * np.sin(t)),
        "rot_2_on_3": lambda t: (U(2, t / 2) @ S[3] @ adj(U(2, t / 2)),
                                 S[3] * np.cos(t) - S[1] * np.sin(t)),
        "rot_3_on_1": lambda t: (adj(U(3, t / 2)) @ S[1] @ U(3, t / 2),
                                 S[1] * np.cos(t) + S[2] * np.sin(t)),
        "rot_2_on_4": lambda t: (adj(U(2, t)) @ S[4] @ U(2, t),
                                 S[4] * np.cos(t) + S[6] * np.sin(t)),
        "rot_2_on_6": lambda t: (adj(U(2, t)) @ S[6] @ U(2, t),
                                 S[6] * np.cos(t) - S[4] * np.sin(t)),
        "rot_2_on_5": lambda t: (adj(U(2, t)) @ S[5] @ U(2, t),
                                 S[5] * np.cos(t) + S[7] * np.sin(t)),
        "rot_2_on_7": lambda t: (adj(U(2, t)) @ S[7] @ U(2, t),
                                 S[7] * np.cos(t) - S[5] * np.sin(t)),
        "rot_7_on_2": lambda t: (adj(U(7, t)) @ S[2] @ U(7, t),
                                 S[2] * np.cos(t) + S[5] * np.sin(t)),
        "rot_7_on_3": lambda t: (adj(U(7, t)) @ S[3] @ U(7, t),
                                 S[3] * np.cos(t) ** 2 + 0.5 * (S[3] + r3 * S[8]) * np.sin(t) ** 2
                                 - S[6] * np.sin(t) * np.cos(t)),
    }
    ctx = {"nu": spec.nu, "L": spec.L, "flavors": 3, "thetas": list(thetas)}
    reports = []
    for name, case in cases.items():
        worst = 0.0
        for t in thetas:
            lhs, rhs = case(t)
            worst = max(worst, fock.residual(lhs, rhs))
        reports.append(BoundReport.identity(name, worst, tol, ctx, anchor=f"rotation-identity/{name}"))
    # U S U^dag ordering for the four U^(2)(theta) rotations: opposite sign of
    # the sine term, kept as a record of the discrepancy
    for a, b, sgn in ((4, 6, 1), (6, 4, -1), (5, 7, 1), (7, 5, -1)):
        worst = 0.0
        for t in thetas:
            lhs = U(2, t) @ S[a] @ adj(U(2, t))
            worst = max(worst, fock.residual(lhs, S[a] * np.cos(t) + sgn * S[b] * np.sin(t)))
        reports.append(BoundReport.record(f"rot_2_on_{a}_conjugate_order", worst, ctx,
                                          anchor=f"rotation-identity/rot_2_on_{a}"))
    return reports


def symmetry_suite(spec, tol=1e-10, params=None):
    """Operator identities behind the particle-hole, gauge and rotation symmetries."""
    from .hamiltonian import (ModelParams, build_hopping, build_order_parameter, build_total,
                              hopping_from_phases)
    from .reports import BoundReport

    if params is None:
        params = ModelParams(kappa=0.3, g=1.1, m=0.4)
    space = space_for(spec)
    F = spec.flavors
    n = n_generators(F)
    imag = imaginary_generators(F)
    ctx = {"nu": spec.nu, "L": spec.L, "flavors": F,
           "kappa": params.kappa, "g": params.g, "m": params.m}
    reports = []

    def add(name, value, anchor):
        reports.append(BoundReport.identity(name, value, tol, ctx, anchor=anchor))

    ann = [fock.annihilation(space, k) for k in range(spec.n_modes)]
    cre = [fock.adjoint(a) for a in ann]
    cur = {(x, a): s_current(spec, x, a) for x in sites(spec) for a in range(1, n + 1)}

    # particle-hole
    uph = particle_hole(spec)
    add("particle_hole_unitary", uph.unitarity_residual(), "particle-hole/unitary")
    add("particle_hole_on_psi",
        max(fock.residual(uph.conj(ann[k]), cre[k]) for k in range(spec.n_modes)),
        "particle-hole/psi")
    add("particle_hole_on_currents",
        max(fock.residual(uph.conj(cur[x, a]), cur[x, a] if a in imag else -cur[x, a])
            for (x, a) in cur), "particle-hole/currents")
    H = build_total(spec, params)
    add("particle_hole_hamiltonian", fock.residual(uph.conj(H), H), "particle-hole/hamiltonian")

    # global rotations commute with H(0)
    H0 = build_total(spec, ModelParams(kappa=params.kappa, g=params.g))
    worst = 0.0
    for a in range(1, n + 1):
        for th in (0.3, np.pi / 2):
            U = global_rotation(spec, a, th).op
            worst = max(worst, fock.max_abs(fock.commutator(U, H0)))
    add("global_rotation_commutes", worst, "rotation/invariance")
    Q2 = sum(cur[x, 2] for x in sites(spec))
    add("charge2_commutes_with_H", fock.max_abs(fock.commutator(Q2, H)), "rotation/charge2")
    if F == 3:
        Q8 = sum(cur[x, 8] for x in sites(spec))
        add("charge8_commutes_with_H", fock.max_abs(fock.commutator(Q8, H)), "rotation/charge8")
        reports.extend(rotation_identity_suite(spec, tol=tol))

    # U_odd and U_1
    uo = u_odd(spec)
    add("u_odd_unitary", uo.unitarity_residual(), "u-odd/unitary")
    odd_modes = set(_modes_of(spec, [x for x in sites(spec) if parity(x) < 0]))
    add("u_odd_on_psi",
        max(fock.residual(uo.conj(ann[k]), cre[k] if k in odd_modes else ann[k])
            for k in range(spec.n_modes)), "u-odd/psi")
    add("u_odd_on_currents",
        max(fock.residual(uo.conj(cur[x, a]),
                          -cur[x, a] if (parity(x) < 0 and a not in imag) else cur[x, a])
            for (x, a) in cur), "u-odd/currents")
    add("u_odd_staggers_s3",
        max(fock.residual(uo.conj(cur[x, 3]), parity(x) * cur[x, 3]) for x in sites(spec)),
        "u-odd/s3")
    xi = [fock.majorana_xi(space, k) for k in range(spec.n_modes)]
    eta = [fock.majorana_eta(space, k) for k in range(spec.n_modes)]
    add("u_odd_on_majoranas",
        max(max(fock.residual(uo.conj(xi[k]), xi[k]),
                fock.residual(uo.conj(eta[k]), -eta[k] if k in odd_modes else eta[k]))
            for k in range(spec.n_modes)), "u-odd/majoranas")

    # direction-1 hopping in Majorana form after U~_1 = U_1 U_odd
    ut = u1_tilde(spec)
    add("u1_tilde_unitary", ut.unitarity_residual(), "u1/unitary")
    H1 = hopping_from_phases(spec, params.kappa,
                             lambda x, mu: (1 if x[0] != spec.L else -1) if mu == 1 else 0)
    maj = fock.zero(space)
    for x in sites(spec):
        y = neighbor(spec, x, 1)
        s = 1 if x[0] != spec.L else -1
        for i in range(F):
            k, l = site_rank(spec, x) * F + i, site_rank(spec, y) * F + i
            maj = maj + (0.5j * params.kappa * s) * (xi[k] @ xi[l] - eta[k] @ eta[l])
    add("u1_tilde_hopping_majorana", fock.residual(ut.conj(H1), maj), "u1/majorana-hopping")

    if spec.nu >= 2:
        u = u1(spec)
        add("u1_unitary", u.unitarity_residual(), "u1/unitary")
        worst = 0.0
        for j in range(2, spec.nu + 1):
            uj = u1_factor(spec, j)
            for x in sites(spec):
                for i in range(F):
                    k = site_rank(spec, x) * F + i
                    want = 1j * ann[k] if x[j - 1] % 2 == 0 else ann[k]
                    worst = max(worst, fock.residual(uj.conj(ann[k]), want))
        add("u1_on_psi", worst, "u1/psi")
        add("u1_on_currents", max(fock.residual(u.conj(cur[k]), cur[k]) for k in cur),
            "u1/currents")
        worst = 0.0
        for mu in range(2, spec.nu + 1):
            Hmu = hopping_from_phases(spec, params.kappa,
                                      lambda x, d, mu=mu: (1 - 2 * (_theta(spec, x, d) % 2))
                                      if d == mu else 0)
            want = _real_hopping(spec, params.kappa, mu)
            worst = max(worst, fock.residual(u1_factor(spec, mu).conj(Hmu), want))
        add("u1_direction_hopping", worst, "u1/hopping")

        # gauge equivalence across directions
        HK = build_hopping(spec, params.kappa)
        worst, inv = 0.0, 0.0
        for j in range(2, spec.nu + 1):
            g = gauge_equivalence(spec, j)
            want = hopping_from_phases(
                spec, params.kappa, lambda x, mu, j=j: 1 - 2 * (gauged_theta(spec, j, x, mu) % 2))
            worst = max(worst, fock.residual(g.conj(HK), want), g.unitarity_residual())
            inv = max(inv, max(fock.residual(g.conj(cur[k]), cur[k]) for k in cur))
        add("gauge_equivalence_hopping", worst, "gauge/hopping")
        add("gauge_equivalence_currents", inv, "gauge/currents")

    # boundary shifts
    HK = build_hopping(spec, params.kappa)
    worst = 0.0
    for i in range(1, spec.nu + 1):
        for l in range(-spec.L + 2, spec.L + 1):
            b = boundary_shift(spec, i, l)
            worst = max(worst, b.unitarity_residual(),
                        fock.residual(b.op @ b.op, fock.identity(space)))
            for x in sites(spec):
                for f in range(F):
                    k = site_rank(spec, x) * F + f
                    want = -ann[k] if l <= x[i - 1] <= spec.L else ann[k]
                    worst = max(worst, fock.residual(b.conj(ann[k]), want))
            want = hopping_from_phases(spec, params.kappa,
                                       lambda x, mu, i=i, l=l: _shifted_phase(spec, x, mu, i, l))
            worst = max(worst, fock.residual(b.conj(HK), want))
            worst = max(worst, max(fock.residual(b.conj(cur[x, 2]), cur[x, 2]) for x in sites(spec)))
    add("boundary_shift", worst, "gauge/boundary-shift")

    # lattice shifts
    O = build_order_parameter(spec)
    worst = 0.0
    for mu in range(1, spec.nu + 1):
        T = lattice_shift(spec, mu)
        full = lattice_shift(spec, mu, spec.side)
        worst = max(worst, T.unitarity_residual(),
                    fock.residual(full.op, fock.identity(space)),
                    fock.residual(T.op @ O @ T.dag, -O))
        for x in sites(spec):
            for f in range(F):
                k = site_rank(spec, x) * F + f
                k2 = site_rank(spec, neighbor(spec, x, mu)) * F + f
                worst = max(worst, fock.residual(T.op @ ann[k] @ T.dag, ann[k2]))
    add("lattice_shift", worst, "translation/shift")

    # reflection
    refl = Reflection(spec)
    worst = 0.0
    for x in sites(spec):
        rx = reflect_site(x)
        for f in range(F):
            k, k2 = site_rank(spec, x) * F + f, site_rank(spec, rx) * F + f
            worst = max(worst, fock.residual(refl(ann[k]), ann[k2]),
                        fock.residual(refl(xi[k]), xi[k2]),
                        fock.residual(refl(eta[k]), -eta[k2]))
        for a in range(1, n + 1):
            sgn = -1 if a in imag else 1
            worst = max(worst, fock.residual(refl(cur[x, a]), sgn * cur[rx, a]))
    add("reflection_on_generators", worst, "reflection/generators")

    if F == 3:
        V, vt = v_transform(spec)
        lam = generators(3)
        worst = max(float(np.max(np.abs(V.conj().T @ lam[a - 1] @ V - V_TABLE[a])))
                    for a in range(1, 9))
        worst = max(worst, float(np.max(np.abs(V.conj().T @ V - np.eye(3)))),
                    float(np.max(np.abs((V.conj().T @ lam[6] @ V).imag))))
        add("v_table", worst, "spin-one-frame/table")
        worst = vt.unitarity_residual()
        for x in sites(spec):
            base = site_rank(spec, x) * 3
            for k in range(3):
                want = sum(V[k, j] * ann[base + j] for j in range(3))
                worst = max(worst, fock.residual(vt.conj(ann[base + k]), want))
            for a in range(1, 9):
                worst = max(worst, fock.residual(vt.conj(cur[x, a]), s_current(spec, x, a, basis=V)))
        add("v_tilde_conjugation", worst, "spin-one-frame/fock-lift")
    return reports


def _theta(spec, x, mu):
    from .lattice import theta
    return theta(spec, x, mu)


def _real_hopping(spec, kappa, mu):
    """kappa sum_x s(x) [psi^dag(x) psi(x+e_mu) + h.c.], s = (-1)^{x1+..+x_mu} (-1)^{[x_mu = L]}."""
    space = space_for(spec)
    F = spec.flavors
    out = fock.zero(space)
    for x in sites(spec):
        y = neighbor(spec, x, mu)
        s = (-1) ** (sum(x[:mu]) % 2) * (-1 if x[mu - 1] == spec.L else 1)
        for i in range(F):
            k, l = site_rank(spec, x) * F + i, site_rank(spec, y) * F + i
            out = out + kappa * s * (fock.bilinear(space, k, l) + fock.bilinear(space, l, k))
    return out.tocsr()


def _shifted_phase(spec, x, mu, i, l):
    """Staggered sign with the antiperiodic bond moved from the wrap to (l-1, l)."""
    from .lattice import staggered_phase
    s = staggered_phase(spec, x, mu)
    if mu == i and x[i - 1] in (l - 1, spec.L):
        s = -s
    return s
