"""Fermionic Fock space in the occupation-number basis.

A basis state is an integer whose bit ``k`` is the occupation of mode ``k``.
Modes are ordered site-major, flavor-minor:

    mode = site_rank * flavors + (flavor - 1)

Jordan-Wigner convention: a ladder operator on mode ``k`` picks up the sign
(-1)^(number of occupied modes below k).  Equivalently

    |n> = psi^dag_{k1} psi^dag_{k2} ... psi^dag_{kN} |0>,   k1 < k2 < ... < kN.

Operators are ``scipy.sparse.csr_array`` matrices over a ``FockSpace``, which is
either the full space (dimension 2^M) or a single particle-number sector.
"""

import os
from math import comb

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .lattice import site_rank

DEFAULT_DENSE_CAP = 4096


def dense_cap():
    return int(os.environ.get("NJL_DENSE_CAP", DEFAULT_DENSE_CAP))


def popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


class FockSpace:
    """Occupation basis over ``n_modes`` modes, optionally fixed particle number."""

    def __init__(self, n_modes, n_particles=None):
        if n_modes > 30:
            raise ValueError(f"{n_modes} modes exceed the bit-packed basis limit")
        self.n_modes = n_modes
        self.n_particles = n_particles
        if n_particles is None:
            self.states = np.arange(2**n_modes, dtype=np.int64)
        else:
            if not 0 <= n_particles <= n_modes:
                raise ValueError(f"particle number {n_particles} out of range")
            allstates = np.arange(2**n_modes, dtype=np.int64)
            self.states = allstates[popcount(allstates) == n_particles]
        self.dim = len(self.states)

    @property
    def is_full(self):
        return self.n_particles is None

    def index(self, states):
        states = np.asarray(states, dtype=np.int64)
        if self.is_full:
            return states
        idx = np.searchsorted(self.states, states)
        idx = np.minimum(idx, self.dim - 1)
        if not np.all(self.states[idx] == states):
            raise ValueError("operator leaves the particle-number sector")
        return idx

    def particle_numbers(self):
        return popcount(self.states)

    def __repr__(self):
        return f"FockSpace(n_modes={self.n_modes}, n_particles={self.n_particles})"


def mode_index(spec, x, flavor):
    if not 1 <= flavor <= spec.flavors:
        raise ValueError(f"flavor {flavor} out of range 1..{spec.flavors}")
    return site_rank(spec, x) * spec.flavors + (flavor - 1)


def full_space(spec):
    return FockSpace(spec.n_modes)


def ladder_product(space, ops, coeff=1.0):
    """Matrix of coeff * op_1 op_2 ... op_k; ``ops`` is a list of (mode, dagger).

    The rightmost operator acts first, as in the written product.
    """
    cur = space.states.copy()
    amp = np.full(space.dim, coeff, dtype=complex)
    valid = np.ones(space.dim, dtype=bool)
    for mode, dagger in reversed(ops):
        if not 0 <= mode < space.n_modes:
            raise ValueError(f"mode {mode} out of range")
        bit = np.int64(1) << mode
        occupied = (cur & bit) != 0
        valid &= ~occupied if dagger else occupied
        amp *= 1 - 2 * (popcount(cur & (bit - 1)) & 1)
        cur ^= bit
    cols = np.flatnonzero(valid)
    rows = space.index(cur[valid])
    return sp.csr_array((amp[valid], (rows, cols)), shape=(space.dim, space.dim))


def _require_full(space):
    if not space.is_full:
        raise ValueError("operator changes particle number; use the full Fock space")


def creation(space, mode):
    _require_full(space)
    return ladder_product(space, [(mode, True)])


def annihilation(space, mode):
    _require_full(space)
    return ladder_product(space, [(mode, False)])


def bilinear(space, i, j):
    """psi^dag_i psi_j."""
    return ladder_product(space, [(i, True), (j, False)])


def number_op(space, mode):
    occ = ((space.states >> mode) & 1).astype(complex)
    return sp.diags_array(occ, format="csr")


def total_number_op(space):
    return sp.diags_array(space.particle_numbers().astype(complex), format="csr")


def identity(space):
    return sp.eye_array(space.dim, dtype=complex, format="csr")


def zero(space):
    return sp.csr_array((space.dim, space.dim), dtype=complex)


def majorana_xi(space, mode):
    return creation(space, mode) + annihilation(space, mode)


def majorana_eta(space, mode):
    return 1j * (creation(space, mode) - annihilation(space, mode))


def parity_string(space, modes):
    """Diagonal operator prod_{k in modes} (-1)^{n_k}."""
    mask = 0
    for k in modes:
        mask |= 1 << k
    signs = 1 - 2 * (popcount(space.states & np.int64(mask)) & 1)
    return sp.diags_array(signs.astype(complex), format="csr")


def fermion_parity(space):
    return parity_string(space, range(space.n_modes))


def embed_local(space, first_mode, local):
    """Lift an even operator on modes first_mode .. first_mode+k-1 (k = log2 dim).

    ``local`` is a dense 2^k x 2^k matrix in the occupation basis of those k
    modes with the same bit order.  Because the block of modes is contiguous
    and the operator is even, Jordan-Wigner strings from outside cancel.
    """
    local = np.asarray(local, dtype=complex)
    k = int(round(np.log2(local.shape[0])))
    mask = np.int64((1 << k) - 1) << first_mode
    rest = space.states & ~mask
    loc = (space.states & mask) >> first_mode
    rows, cols, vals = [], [], []
    for new in range(2**k):
        col_amp = local[new, loc]
        nz = np.flatnonzero(col_amp)
        if len(nz) == 0:
            continue
        target = rest[nz] | (np.int64(new) << first_mode)
        rows.append(space.index(target))
        cols.append(nz)
        vals.append(col_amp[nz])
    if not rows:
        return zero(space)
    rows, cols, vals = map(np.concatenate, (rows, cols, vals))
    return sp.csr_array((vals, (rows, cols)), shape=(space.dim, space.dim))


# -- operator algebra -------------------------------------------------------

def adjoint(a):
    return a.conj().T.tocsr()


def commutator(a, b):
    _check_shapes(a, b)
    return (a @ b - b @ a).tocsr()


def anticommutator(a, b):
    _check_shapes(a, b)
    return (a @ b + b @ a).tocsr()


def _check_shapes(a, b):
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")


def max_abs(a):
    """Largest absolute matrix element (0 for the zero operator)."""
    if sp.issparse(a):
        a = a.tocsr()
        return float(np.max(np.abs(a.data))) if a.nnz else 0.0
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def residual(a, b):
    _check_shapes(a, b)
    return max_abs(a - b)


def is_hermitian(a, tol=1e-12):
    return residual(a, adjoint(a)) <= tol * max(1.0, max_abs(a))


def block_partition(a):
    """Connected components of the nonzero pattern of ``a`` (symmetrized).

    ``a`` is block diagonal after permuting basis states by component label.
    """
    a = sp.csr_array(a)
    pattern = (abs(a) + abs(a).T).tocsr()
    pattern.eliminate_zeros()
    n, labels = connected_components(pattern, directed=False)
    return n, labels


def op_norm(a):
    """Spectral norm, computed block by block over the sparsity pattern."""
    a = sp.csr_array(a)
    if a.nnz == 0:
        return 0.0
    n, labels = block_partition(a)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n + 1))
    best = 0.0
    cap = dense_cap()
    for b in range(n):
        idx = order[bounds[b]:bounds[b + 1]]
        blk = a[idx][:, idx]
        if blk.nnz == 0:
            continue
        if len(idx) <= cap:
            val = np.linalg.norm(blk.toarray(), 2)
        else:
            from scipy.sparse.linalg import svds
            val = svds(blk, k=1, return_singular_vectors=False)[0]
        best = max(best, float(val))
    return best


def sector_decompose(op, space, tol=0.0):
    """Per-particle-number blocks {N: block} of a number-conserving operator."""
    op = sp.csr_array(op)
    numbers = space.particle_numbers()
    coo = op.tocoo()
    leak = numbers[coo.row] != numbers[coo.col]
    if np.any(np.abs(coo.data[leak]) > tol):
        raise ValueError("operator connects different particle-number sectors")
    blocks = {}
    for n in range(space.n_modes + 1):
        idx = np.flatnonzero(numbers == n)
        if len(idx):
            blocks[n] = op[idx][:, idx]
    return blocks


def sector_dims(n_modes):
    return [comb(n_modes, n) for n in range(n_modes + 1)]


def identity_like(a):
    return sp.eye_array(a.shape[0], dtype=complex, format="csr")
