"""Independent reference computations for the test-suite.

Nothing here imports the package's numerical internals: density matrices
are built by hand, Hermitian spectra come from a cyclic Jacobi sweep and
the Choi matrix is assembled term by term from ``e_jk``.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMAS = (SX, SY, SZ)


def density(r):
    r = np.asarray(r, float)
    return 0.5 * (I2 + r[0] * SX + r[1] * SY + r[2] * SZ)


def bloch_of(rho):
    return np.array([np.trace(rho @ s).real for s in SIGMAS])


def act(t, E, op):
    """Linear extension of ``r -> E r + t`` to any 2x2 operator."""
    t = np.asarray(t, float)
    E = np.asarray(E, float)
    tr = np.trace(op)
    c = np.array([np.trace(op @ s) for s in SIGMAS])
    out = 0.5 * tr * (I2 + sum(t[a] * SIGMAS[a] for a in range(3)))
    out = out + 0.5 * sum(sum(E[b, a] * c[a] for a in range(3)) * SIGMAS[b] for b in range(3))
    return out


def choi_oracle(t, E):
    """``1/2 sum_jk E[e_jk] (x) e_jk``."""
    omega = np.zeros((4, 4), dtype=complex)
    for j in range(2):
        for k in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[j, k] = 1.0
            omega += 0.5 * np.kron(act(t, E, e), e)
    return omega


def jacobi_eigvalsh(H, tol=1e-13, max_sweeps=100):
    """Eigenvalues of a complex Hermitian matrix via cyclic Jacobi on its real embedding."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    A = np.block([[H.real, -H.imag], [H.imag, H.real]])
    m = 2 * n
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(A**2) - np.sum(np.diag(A) ** 2))
        if off < tol:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if abs(A[p, q]) < 1e-300:
                    continue
                tau = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = np.sign(tau) / (abs(tau) + np.sqrt(1 + tau * tau)) if tau != 0 else 1.0
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                J = np.eye(m)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
    ev = np.sort(np.diag(A))
    return ev[::2]  # every eigenvalue appears twice in the embedding


def random_kraus(rng, rank=None):
    """Kraus operators of a random channel, from a Haar-ish isometry ``C^2 -> C^(2r)``."""
    rank = rank or int(rng.integers(1, 5))
    G = rng.standard_normal((2 * rank, 2)) + 1j * rng.standard_normal((2 * rank, 2))
    Q, _ = np.linalg.qr(G)
    return [Q[2 * k : 2 * k + 2, :] for k in range(rank)]


def affine_oracle(kraus):
    """``(t, E)`` of ``rho -> sum A rho A^dagger`` probed with the six axis states."""

    def channel(rho):
        return sum(a @ rho @ a.conj().T for a in kraus)

    t = bloch_of(channel(density((0, 0, 0))))
    E = np.zeros((3, 3))
    for a in range(3):
        e = np.zeros(3)
        e[a] = 1.0
        E[:, a] = 0.5 * (bloch_of(channel(density(e))) - bloch_of(channel(density(-e))))
    return t, E


def random_state(rng, pure=False):
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v if pure else v * rng.random() ** (1 / 3)


def random_rotation(rng):
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def trace_norm(A):
    return float(np.sum(np.abs(np.linalg.eigvalsh(A))))


def uhlmann_margin(r1, r2, s1, s2, t):
    """``Tr|rho1 - t rho2| - Tr|rho1' - t rho2'|`` from explicit 2x2 matrices."""
    return trace_norm(density(r1) - t * density(r2)) - trace_norm(density(s1) - t * density(s2))


def uhlmann_fidelity(r, s):
    """``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` via matrix square roots."""

    def sqrtm(A):
        w, V = np.linalg.eigh(A)
        return V @ np.diag(np.sqrt(np.clip(w, 0, None))) @ V.conj().T

    a = sqrtm(density(r))
    return float(np.trace(sqrtm(a @ density(s) @ a)).real)


def min_eig_oracle(t, E):
    return float(jacobi_eigvalsh(choi_oracle(t, E))[0])


def grid_min_shift(build_ad_and_check, xs, ys, ks):
    """Smallest ``sqrt(x^2 + y^2)`` over a grid where ``build_ad_and_check(x, y, k)`` is true for some ``k``."""
    best = np.inf
    for x in xs:
        for y in ys:
            s = np.hypot(x, y)
            if s >= best:
                continue
            if any(build_ad_and_check(x, y, k) for k in ks):
                best = s
    return best


def capacity_oracle(E, n=200_000, seed=1):
    """``1 - H((1 + max_n |E n|) / 2)`` from a dense random scan of unit inputs."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    mu = np.max(np.linalg.norm(v @ np.asarray(E).T, axis=1))
    p = 0.5 * (1 + mu)
    h = -sum(q * np.log2(q) for q in (p, 1 - p) if q > 0)
    return 1 - h
