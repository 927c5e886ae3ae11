"""Independent dense reference implementations used by the tests.

Nothing here imports the package's Fock, flavor or Hamiltonian code: ladder
operators are Kronecker products of Pauli matrices (Jordan-Wigner strings),
generator matrices are typed in again, and staggered signs are rebuilt from
their definition.
"""

import itertools

import numpy as np
import scipy.linalg as la

SZ = np.diag([1.0, -1.0])
LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1| in the (|0>, |1>) basis
I2 = np.eye(2)


def annihilators(n_modes):
    """Dense c_k on 2^n with mode 0 the least significant bit of the basis index."""
    ops = []
    for k in range(n_modes):
        # Kronecker order: most significant bit first, so mode n-1 comes first
        factors = []
        for j in reversed(range(n_modes)):
            if j == k:
                factors.append(LOWER)
            elif j < k:
                factors.append(SZ)
            else:
                factors.append(I2)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        ops.append(op)
    return ops


def gell_mann():
    s3 = np.sqrt(3)
    l = np.zeros((8, 3, 3), dtype=complex)
    l[0][0, 1] = l[0][1, 0] = 1
    l[1][0, 1], l[1][1, 0] = -1j, 1j
    l[2][0, 0], l[2][1, 1] = 1, -1
    l[3][0, 2] = l[3][2, 0] = 1
    l[4][0, 2], l[4][2, 0] = -1j, 1j
    l[5][1, 2] = l[5][2, 1] = 1
    l[6][1, 2], l[6][2, 1] = -1j, 1j
    l[7] = np.diag([1, 1, -2]) / s3
    return l


def pauli():
    return np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def lattice_sites(nu, L):
    return list(itertools.product(range(-L + 1, L + 1), repeat=nu))


def wrap(c, L):
    return (c + L - 1) % (2 * L) - L + 1


class DenseModel:
    """Dense operators of the lattice model on a small lattice."""

    def __init__(self, nu, L, flavors):
        self.nu, self.L, self.F = nu, L, flavors
        self.sites = lattice_sites(nu, L)
        self.rank = {x: r for r, x in enumerate(self.sites)}
        self.c = annihilators(flavors * len(self.sites))
        self.lam = gell_mann() if flavors == 3 else pauli()
        self.dim = 2 ** (flavors * len(self.sites))

    def psi(self, x, i):
        return self.c[self.rank[x] * self.F + i]

    def step(self, x, mu):
        y = list(x)
        y[mu] = wrap(y[mu] + 1, self.L)
        return tuple(y)

    def theta(self, x, mu):
        t = sum(x[:mu])
        return t + (1 if x[mu] == self.L else 0)

    def current(self, x, a):
        out = np.zeros((self.dim, self.dim), dtype=complex)
        lam = self.lam[a - 1]
        for i in range(self.F):
            for j in range(self.F):
                if lam[i, j] != 0:
                    out += lam[i, j] * self.psi(x, i).conj().T @ self.psi(x, j)
        return out

    def hopping(self, kappa):
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for x in self.sites:
            for mu in range(self.nu):
                y = self.step(x, mu)
                sign = (-1) ** self.theta(x, mu)
                for i in range(self.F):
                    t = self.psi(x, i).conj().T @ self.psi(y, i)
                    out += 1j * kappa * sign * (t - t.conj().T)
        return out

    def interaction(self, g):
        n = len(self.lam)
        cur = {(x, a): self.current(x, a) for x in self.sites for a in range(1, n + 1)}
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for x in self.sites:
            for mu in range(self.nu):
                y = self.step(x, mu)
                for a in range(1, n + 1):
                    out += g * cur[x, a] @ cur[y, a]
        return out

    def order_parameter(self):
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for x in self.sites:
            out += (-1) ** sum(x) * self.current(x, 2)
        return out

    def hamiltonian(self, kappa, g, m):
        return self.hopping(kappa) + self.interaction(g) + m * self.order_parameter()


def log_partition(H, beta):
    e = la.eigvalsh(H)
    return float(-beta * e[0] + np.log(np.sum(np.exp(-beta * (e - e[0])))))


def thermal_expectation(H, A, beta):
    rho = la.expm(-beta * (H - la.eigvalsh(H)[0] * np.eye(len(H))))
    return complex(np.trace(rho @ A) / np.trace(rho))


def duhamel_quadrature(H, A, B, beta, n=64):
    """(A, B) by Gauss-Legendre in s of Tr[e^{-s b H} A e^{-(1-s) b H} B] / Z."""
    e, v = la.eigh(H)
    e = e - e[0]
    a = v.conj().T @ A @ v
    b = v.conj().T @ B @ v
    z = np.sum(np.exp(-beta * e))
    xs, ws = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (xs + 1)
    w = 0.5 * ws
    total = 0.0
    for sk, wk in zip(s, w):
        d1 = np.exp(-sk * beta * e)
        d2 = np.exp(-(1 - sk) * beta * e)
        total += wk * np.sum(d1[:, None] * a * d2[None, :] * b.T)
    return complex(total / z)


def watson_constant():
    """(1/pi^3) int_{[0,pi]^3} dp / (3 - sum cos p) in closed form.

    Watson's value W = (sqrt 6 / 32 pi^3) G(1/24) G(5/24) G(7/24) G(11/24)
    is the average of 1 / (1 - sum cos / 3), hence the factor 1/3.
    """
    from scipy.special import gamma

    w = np.sqrt(6) / (32 * np.pi**3) * gamma(1 / 24) * gamma(5 / 24) * gamma(7 / 24) * gamma(11 / 24)
    return float(w / 3)
