"""Flavor generators, structure constants and on-site currents.

Normalization: [lambda_a, lambda_b] = i sum_c f_abc lambda_c with f_123 = 2,
i.e. twice the textbook SU(3) constants.  All downstream prefactors rely on
this, so it is never rescaled.  SU(2) uses Pauli matrices with f = 2 eps.
"""

from functools import lru_cache

import numpy as np

from . import fock
from .lattice import site_rank

S3 = np.sqrt(3.0)


def _gell_mann_table():
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / S3
    return lam


def _pauli_table():
    return np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


_GELL_MANN = _gell_mann_table()
_PAULI = _pauli_table()


def gell_mann(a):
    if not 1 <= a <= 8:
        raise ValueError(f"Gell-Mann index {a} out of range 1..8")
    return _GELL_MANN[a - 1].copy()


def pauli(a):
    if not 1 <= a <= 3:
        raise ValueError(f"Pauli index {a} out of range 1..3")
    return _PAULI[a - 1].copy()


def generators(flavors):
    """Generator matrices lambda^(1..n), as an (n, F, F) array."""
    if flavors == 3:
        return _GELL_MANN.copy()
    if flavors == 2:
        return _PAULI.copy()
    raise ValueError(f"unsupported flavor count {flavors}")


def n_generators(flavors):
    return {2: 3, 3: 8}[flavors]


def imaginary_generators(flavors):
    """1-based indices of the purely imaginary generators."""
    return {3: (2, 5, 7), 2: (2,)}[flavors]


def real_generators(flavors):
    imag = imaginary_generators(flavors)
    return tuple(a for a in range(1, n_generators(flavors) + 1) if a not in imag)


def _su3_structure():
    f = np.zeros((8, 8, 8))
    entries = {
        (1, 2, 3): 2.0,
        (1, 4, 7): 1.0, (2, 4, 6): 1.0, (2, 5, 7): 1.0, (3, 4, 5): 1.0,
        (1, 5, 6): -1.0, (3, 6, 7): -1.0,
        (4, 5, 8): S3, (6, 7, 8): S3,
    }
    for (a, b, c), v in entries.items():
        a, b, c = a - 1, b - 1, c - 1
        for (i, j, k), s in (((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
                             ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)):
            f[i, j, k] = s * v
    return f


def _su2_structure():
    f = np.zeros((3, 3, 3))
    for (i, j, k), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                         ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1)):
        f[i, j, k] = 2.0 * s
    return f


_F = {3: _su3_structure(), 2: _su2_structure()}


def structure_constants(flavors=3):
    return _F[flavors].copy()


def structure_constant(a, b, c, flavors=3):
    n = n_generators(flavors)
    for i in (a, b, c):
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} out of range 1..{n}")
    return float(_F[flavors][a - 1, b - 1, c - 1])


# -- Fock-space currents ----------------------------------------------------

def current_from_matrix(space, first_mode, matrix):
    """Psi^dag M Psi on the F consecutive modes starting at first_mode."""
    matrix = np.asarray(matrix)
    out = fock.zero(space)
    for i, j in zip(*np.nonzero(matrix)):
        out = out + matrix[i, j] * fock.bilinear(space, first_mode + int(i), first_mode + int(j))
    return out.tocsr()


@lru_cache(maxsize=None)
def _cached_current(spec, n_particles, rank, a, basis):
    space = _space(spec.n_modes, n_particles)
    mat = generators(spec.flavors)[a - 1]
    if basis is not None:
        mat = basis.m.conj().T @ mat @ basis.m
    op = current_from_matrix(space, rank * spec.flavors, mat)
    op.sort_indices()
    return op


@lru_cache(maxsize=None)
def _space(n_modes, n_particles):
    return fock.FockSpace(n_modes, n_particles)


def space_for(spec, n_particles=None):
    """Shared FockSpace instance for a lattice (full space by default)."""
    return _space(spec.n_modes, n_particles)


class _Frozen:
    """Hashable wrapper so a basis-change matrix can key the current cache."""

    def __init__(self, m):
        self.m = np.asarray(m, dtype=complex)
        self._key = self.m.tobytes()

    def __hash__(self):
        return hash(self._key)

    def __eq__(self, other):
        return isinstance(other, _Frozen) and self._key == other._key


def s_current(spec, x, a, n_particles=None, basis=None):
    """S^(a)(x) = Psi^dag(x) lambda^(a) Psi(x).

    With ``basis`` = V this is the rotated current Psi^dag V^dag lambda V Psi.
    """
    n = n_generators(spec.flavors)
    if not 1 <= a <= n:
        raise ValueError(f"generator index {a} out of range 1..{n}")
    rank = site_rank(spec, x)
    key = None if basis is None else _Frozen(basis)
    return _cached_current(spec, n_particles, rank, a, key).copy()


def global_charge(spec, a, n_particles=None):
    from .lattice import sites
    out = fock.zero(space_for(spec, n_particles))
    for x in sites(spec):
        out = out + s_current(spec, x, a, n_particles)
    return out.tocsr()


def verify_su_algebra(spec, tol=1e-12):
    """Matrix- and Fock-level commutation relations plus bond invariance."""
    from .lattice import neighbor, sites
    from .reports import BoundReport

    F = spec.flavors
    n = n_generators(F)
    lam = generators(F)
    f = _F[F]
    ctx = {"nu": spec.nu, "L": spec.L, "flavors": F}
    reports = []

    worst = 0.0
    for a in range(n):
        for b in range(n):
            lhs = lam[a] @ lam[b] - lam[b] @ lam[a]
            rhs = 1j * np.einsum("c,cij->ij", f[a, b], lam)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    reports.append(BoundReport.identity("generator_commutators", worst, tol, ctx,
                                        anchor="flavor-algebra/matrix-commutators"))

    herm = max(float(np.max(np.abs(m - m.conj().T))) for m in lam)
    trace = max(abs(complex(np.trace(m))) for m in lam)
    reports.append(BoundReport.identity("generators_hermitian_traceless", max(herm, trace), tol,
                                        ctx, anchor="flavor-algebra/generators"))

    antisym = max(float(np.max(np.abs(f + f.transpose(1, 0, 2)))),
                  float(np.max(np.abs(f + f.transpose(0, 2, 1)))))
    reports.append(BoundReport.identity("structure_constants_antisymmetric", antisym, tol, ctx,
                                        anchor="flavor-algebra/structure-constants"))

    worst = 0.0
    for x in sites(spec):
        cur = [s_current(spec, x, a) for a in range(1, n + 1)]
        for a in range(n):
            for b in range(a + 1, n):
                lhs = fock.commutator(cur[a], cur[b])
                rhs = fock.zero(space_for(spec))
                for c in np.flatnonzero(f[a, b]):
                    rhs = rhs + 1j * f[a, b, c] * cur[c]
                worst = max(worst, fock.residual(lhs, rhs))
    reports.append(BoundReport.identity("current_commutators", worst, tol, ctx,
                                        anchor="flavor-algebra/current-commutators"))

    worst = 0.0
    for x in sites(spec):
        for mu in range(1, spec.nu + 1):
            y = neighbor(spec, x, mu)
            cx = [s_current(spec, x, a) for a in range(1, n + 1)]
            cy = [s_current(spec, y, a) for a in range(1, n + 1)]
            bond = fock.zero(space_for(spec))
            for a in range(n):
                bond = bond + cx[a] @ cy[a]
            for b in range(n):
                worst = max(worst, fock.max_abs(fock.commutator(bond, cx[b] + cy[b])))
    reports.append(BoundReport.identity("bond_invariance", worst, tol, ctx,
                                        anchor="flavor-algebra/bond-invariance"))
    return reports
