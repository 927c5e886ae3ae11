"""Eigendecompositions, thermal and ground-state expectations, Duhamel sums.

Hamiltonians here are block diagonal after permuting basis states by the
connected components of their sparsity pattern (particle-number and flavor
sectors, usually finer).  Every block is diagonalized on its own, and
operators are only ever transformed between pairs of blocks they actually
connect.

Energies are shifted by the ground energy E0 inside all Boltzmann factors, so
large beta never overflows; log Z is carried instead of Z.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh
from scipy.special import logsumexp

from . import fock


class DenseCapError(ValueError):
    """A block is too large for full diagonalization under the dense cap."""


def degeneracy_threshold(norm):
    return 1e-8 * max(1.0, norm)


@dataclass
class Block:
    idx: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray = None  # None means the identity (diagonal block)

    def to_eig(self, m, side):
        """V^dag m for side 'left', m V for side 'right'."""
        if self.vectors is None:
            return m
        if side == "left":
            return self.vectors.conj().T @ m
        return m @ self.vectors


def _components(H):
    n, labels = fock.block_partition(H)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n + 1))
    return [order[bounds[b]:bounds[b + 1]] for b in range(n)]


def _split_blocks(H):
    """Component index arrays, with all 1x1 components merged into one block."""
    comps = _components(H)
    single = [c for c in comps if len(c) == 1]
    multi = [np.sort(c) for c in comps if len(c) > 1]
    singles = np.sort(np.concatenate(single)) if single else None
    return multi, singles


def _check_hermitian(H):
    if not fock.is_hermitian(H, tol=1e-10):
        raise ValueError("operator is not hermitian")


class Spectrum:
    """Full eigendecomposition of a hermitian sparse operator, block by block."""

    def __init__(self, H, check=True):
        H = sp.csr_array(H)
        if check:
            _check_hermitian(H)
        self.dim = H.shape[0]
        cap = fock.dense_cap()
        multi, singles = _split_blocks(H)
        self.blocks = []
        if singles is not None:
            self.blocks.append(Block(singles, H.diagonal()[singles].real.copy()))
        for idx in multi:
            if len(idx) > cap:
                raise DenseCapError(f"block of dimension {len(idx)} exceeds the dense cap {cap}")
            e, v = la.eigh(H[idx][:, idx].toarray())
            self.blocks.append(Block(idx, e, v))
        self.block_of = np.empty(self.dim, dtype=np.int64)
        for b, blk in enumerate(self.blocks):
            self.block_of[blk.idx] = b
        self.energies = np.sort(np.concatenate([b.energies for b in self.blocks]))
        self.E0 = float(self.energies[0])
        self.norm = float(np.max(np.abs(self.energies)))
        self._H = H

    # -- partition function -------------------------------------------------

    def log_partition(self, beta):
        return -beta * self.E0 + float(logsumexp(-beta * (self.energies - self.E0)))

    def thermal(self, beta):
        return ThermalState(self, beta)

    # -- ground space -------------------------------------------------------

    def ground(self, threshold=None):
        thr = degeneracy_threshold(self.norm) if threshold is None else threshold
        cols = []
        for blk in self.blocks:
            sel = np.flatnonzero(blk.energies - self.E0 <= thr)
            for j in sel:
                v = np.zeros(self.dim, dtype=complex)
                if blk.vectors is None:
                    v[blk.idx[j]] = 1.0
                else:
                    v[blk.idx] = blk.vectors[:, j]
                cols.append(v)
        above = self.energies[self.energies - self.E0 > thr]
        gap = float(above[0] - self.E0) if len(above) else np.inf
        return GroundSpace(self.E0, np.column_stack(cols), gap, thr)

    @property
    def gap(self):
        return self.ground().gap

    # -- functions of the shifted Hamiltonian -------------------------------

    def apply(self, fn, vecs):
        """fn(H - E0) applied to the columns of ``vecs``."""
        vecs = np.asarray(vecs, dtype=complex)
        one = vecs.ndim == 1
        if one:
            vecs = vecs[:, None]
        out = np.zeros_like(vecs)
        for blk in self.blocks:
            c = blk.to_eig(vecs[blk.idx], "left")
            c = np.asarray(fn(blk.energies - self.E0))[:, None] * c
            out[blk.idx] = c if blk.vectors is None else blk.vectors @ c
        return out[:, 0] if one else out

    def eig_block(self, A, I, J):
        """Matrix of A between blocks I and J in their eigenbases."""
        bi, bj = self.blocks[I], self.blocks[J]
        m = A[bi.idx][:, bj.idx].toarray()
        return bj.to_eig(bi.to_eig(m, "left"), "right")

    def connected_pairs(self, A):
        """Block pairs (I, J) on which A has nonzero entries."""
        coo = sp.coo_array(A)
        keep = coo.data != 0
        nb = len(self.blocks)
        keys = np.unique(self.block_of[coo.row[keep]] * nb + self.block_of[coo.col[keep]])
        return [(int(k // nb), int(k % nb)) for k in keys]

    def residuals(self):
        """(max |Hv - Ev| / max(1, |H|), max orthonormality defect) over blocks."""
        res, orth = 0.0, 0.0
        for blk in self.blocks:
            if blk.vectors is None:
                continue
            h = self._H[blk.idx][:, blk.idx]
            r = h @ blk.vectors - blk.vectors * blk.energies
            res = max(res, float(np.max(np.abs(r))))
            g = blk.vectors.conj().T @ blk.vectors
            orth = max(orth, float(np.max(np.abs(g - np.eye(len(g))))))
        return res / max(1.0, self.norm), orth


def _phi(beta, ej, ek):
    """int_0^1 ds exp(-s beta ej - (1-s) beta ek) for shifted energies ej, ek >= 0."""
    lo = np.minimum(ej, ek)
    x = beta * np.abs(ej - ek)
    safe = np.where(x > 1e-12, x, 1.0)
    ratio = np.where(x > 1e-12, -np.expm1(-safe) / safe, 1.0 - x / 2)
    return np.exp(-beta * lo) * ratio


class ThermalState:
    """Gibbs state exp(-beta H)/Z over a full Spectrum."""

    def __init__(self, spectrum, beta):
        if beta < 0:
            raise ValueError("beta must be >= 0")
        self.spectrum = spectrum
        self.beta = float(beta)
        s = spectrum
        self._zs = float(np.sum(np.exp(-beta * (s.energies - s.E0))))
        self.log_Z = -beta * s.E0 + np.log(self._zs)

    def weights(self, blk):
        return np.exp(-self.beta * (blk.energies - self.spectrum.E0)) / self._zs

    def expectation(self, A):
        A = sp.csr_array(A)
        total = 0.0 + 0.0j
        for blk in self.spectrum.blocks:
            w = self.weights(blk)
            a = A[blk.idx][:, blk.idx]
            if blk.vectors is None:
                total += np.sum(w * a.diagonal())
            else:
                d = np.einsum("ij,ij->j", blk.vectors.conj(), a @ blk.vectors)
                total += np.sum(w * d)
        return complex(total)

    def duhamel(self, A, B):
        """(A, B) = Z^-1 int_0^1 ds Tr[e^{-s beta H} A e^{-(1-s) beta H} B]."""
        A, B = sp.csr_array(A), sp.csr_array(B)
        s = self.spectrum
        b_pairs = set(s.connected_pairs(B))
        total = 0.0 + 0.0j
        for I, J in s.connected_pairs(A):
            if (J, I) not in b_pairs:
                continue
            a = s.eig_block(A, I, J)
            b = s.eig_block(B, J, I)
            ej = s.blocks[I].energies - s.E0
            ek = s.blocks[J].energies - s.E0
            phi = _phi(self.beta, ej[:, None], ek[None, :])
            total += np.sum(a * b.T * phi)
        return complex(total / self._zs)


class GroundSpace:
    """Ground multiplet: energy E0, orthonormal columns ``vectors``, gap."""

    def __init__(self, E0, vectors, gap, threshold):
        self.E0 = float(E0)
        self.vectors = np.asarray(vectors, dtype=complex)
        self.gap = gap
        self.threshold = threshold

    @property
    def d(self):
        return self.vectors.shape[1]

    def expectation(self, A):
        W = self.vectors
        return complex(np.trace(W.conj().T @ (A @ W)) / self.d)

    def project(self, v):
        return self.vectors @ (self.vectors.conj().T @ v)

    def projector(self):
        W = self.vectors
        support = np.flatnonzero(np.any(np.abs(W) > 0, axis=1))
        Ws = W[support]
        blk = sp.coo_array(Ws @ Ws.conj().T)
        n = W.shape[0]
        return sp.csr_array((blk.data, (support[blk.row], support[blk.col])), shape=(n, n))

    def align(self, Q):
        """Rotate the ground basis to eigenvectors of Q restricted to it."""
        W = self.vectors
        q, u = la.eigh(W.conj().T @ (Q @ W))
        self.vectors = W @ u
        return q


def ground_only(H, k=6, check=True):
    """Ground multiplet via a sparse extremal solver on each block."""
    H = sp.csr_array(H)
    if check:
        _check_hermitian(H)
    multi, singles = _split_blocks(H)
    found = []  # (energy, block index array, vector on block)
    if singles is not None:
        diag = H.diagonal()[singles].real
        for j in np.argsort(diag)[:k]:
            found.append((diag[j], singles[j:j + 1], np.ones(1, dtype=complex)))
    norm_est = fock.max_abs(H) * max(1, int(np.max(np.diff(H.indptr), initial=1)))
    thr = degeneracy_threshold(norm_est)
    for idx in multi:
        h = H[idx][:, idx]
        n = len(idx)
        kk = min(k, n)
        while True:
            if n <= max(64, 2 * kk + 1):
                e, v = la.eigh(h.toarray(), subset_by_index=[0, kk - 1])
            else:
                v0 = np.random.default_rng(0).normal(size=n)
                e, v = eigsh(h, k=kk, which="SA", v0=v0, tol=1e-12)
                order = np.argsort(e)
                e, v = e[order], v[:, order]
            if kk >= n or e[-1] - e[0] > thr:
                break
            kk = min(2 * kk, n)
        for j in range(len(e)):
            found.append((e[j], idx, v[:, j]))
    energies = np.array([f[0] for f in found])
    E0 = float(np.min(energies))
    cols = []
    for e, idx, vec in found:
        if e - E0 <= thr:
            w = np.zeros(H.shape[0], dtype=complex)
            w[idx] = vec
            cols.append(w)
    above = np.sort(energies[energies - E0 > thr])
    gap = float(above[0] - E0) if len(above) else np.inf
    W = np.column_stack(cols)
    W, _ = np.linalg.qr(W)
    return GroundSpace(E0, W, gap, thr)


def diagonalize(H, mode="full"):
    """Spectrum (mode 'full') or GroundSpace (mode 'ground')."""
    if mode == "full":
        return Spectrum(H)
    if mode == "ground":
        return ground_only(H)
    raise ValueError(f"unknown mode {mode!r}")


def thermal_expectation(A, state):
    return state.expectation(A)


def ground_expectation(A, ground):
    return ground.expectation(A)


def duhamel(A, B, state):
    return state.duhamel(A, B)


def double_commutator_expectation(B, H, state):
    """<[B, [H, B^dag]]> in ``state`` (thermal or ground)."""
    Bd = fock.adjoint(B)
    inner = fock.commutator(H, Bd)
    return state.expectation(fock.commutator(B, inner))


# -- energy filters --------------------------------------------------------------

def _bump_exp(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    a = _bump_exp(t)
    b = _bump_exp(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class SpectralFilter:
    """f(s) = g(s) eta(s) f1(s) with supp f in (delta, 2r).

    eta(s) = s^(eps/2) for s >= 0; f1 = 1 below r and 0 above 2r; g = 0 below
    delta and 1 above 2 delta.
    """

    delta: float
    r: float
    epsilon: float

    def __post_init__(self):
        if not 0 < self.delta < 2 * self.r:
            raise ValueError("filter needs 0 < delta < 2r")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")

    def eta(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s > 0, np.abs(s) ** (self.epsilon / 2), 0.0)

    def f1(self, s):
        return smooth_step((2 * self.r - np.asarray(s, dtype=float)) / self.r)

    def g(self, s):
        return smooth_step((np.asarray(s, dtype=float) - self.delta) / self.delta)

    def __call__(self, s):
        return self.g(s) * self.eta(s) * self.f1(s)


def filtered_state(A, filt, ground, spectrum):
    """Columns f(H - E0) A Psi_j for the ground vectors Psi_j."""
    return spectrum.apply(filt, A @ ground.vectors)


class DiagonalShiftFamily:
    """log Z for H0 + diag(v) over many shifts v, reusing the block structure.

    The sparsity pattern (hence the block partition) of H0 + diag(v) does not
    depend on v, so dense blocks of H0 are extracted once and blocks of equal
    size are diagonalized as one stacked batch.
    """

    def __init__(self, H0):
        H0 = sp.csr_array(H0)
        _check_hermitian(H0)
        multi, singles = _split_blocks(H0)
        cap = fock.dense_cap()
        self.singles = singles
        self.single_diag = None if singles is None else H0.diagonal()[singles].real
        by_size = {}
        for idx in multi:
            if len(idx) > cap:
                raise DenseCapError(f"block of dimension {len(idx)} exceeds the dense cap {cap}")
            by_size.setdefault(len(idx), []).append(idx)
        self.groups = []
        for n in sorted(by_size):
            idx = np.array(by_size[n])
            mats = np.stack([H0[i][:, i].toarray() for i in idx])
            self.groups.append((idx, mats))

    def energies(self, v):
        v = np.asarray(v, dtype=float)
        parts = []
        if self.singles is not None:
            parts.append(self.single_diag + v[self.singles])
        for idx, mats in self.groups:
            hb = mats.copy()
            n = idx.shape[1]
            hb[:, np.arange(n), np.arange(n)] += v[idx]
            parts.append(np.linalg.eigvalsh(hb).ravel())
        return np.concatenate(parts)

    def log_partitions(self, v, betas):
        e = self.energies(v)
        return [float(logsumexp(-b * e)) for b in betas]
