"""Complete positivity of qubit channels.

Choi convention: ``Omega = (E (x) I)[P+] = 1/2 sum_jk E[e_jk] (x) e_jk`` with the
channel acting on the first tensor factor. Equivalently

    Omega = 1/4 (I(x)I + sum_a t_a s_a (x) I + sum_ab E_ab s_a (x) s_b^T),

which is what :func:`choi_from_affine` evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EPS_NUM, AffineChannel, check_state, singular_decompose
from .errors import NotCompletelyPositiveError, NotTracePreservingError

EPS_CP = 1e-9
EPS_HERM = 1e-12

I2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# 4x4 basis for the 12 affine parameters: t_a first, then E_ab row-major
_T_BASIS = np.array([np.kron(s, I2) for s in PAULI])
_E_BASIS = np.array([np.kron(sa, sb.T) for sa in PAULI for sb in PAULI])
_CHOI_BASIS = np.concatenate([_T_BASIS, _E_BASIS]) / 4.0
_CHOI_OFFSET = np.eye(4, dtype=complex) / 4.0


def choi_from_affine(ch: AffineChannel) -> np.ndarray:
    coeffs = np.concatenate([ch.t, ch.E.ravel()])
    return _CHOI_OFFSET + np.tensordot(coeffs, _CHOI_BASIS, axes=1)


def partial_trace_first(omega: np.ndarray) -> np.ndarray:
    """Trace out the first (channel-output) factor of a 4x4 operator."""
    return np.einsum("ijil->jl", np.asarray(omega).reshape(2, 2, 2, 2))


def affine_from_choi(omega: np.ndarray) -> AffineChannel:
    """Recover ``(t, E)`` from a Choi matrix.

    ``t_a = Tr[Omega (s_a (x) I)]`` and ``E_ab = Tr[Omega (s_a (x) s_b^T)]``.
    Raises :class:`NotTracePreservingError` unless ``Tr_1 Omega = I/2``.
    """
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (4, 4):
        raise ValueError(f"Choi matrix must be 4x4, got {omega.shape}")
    herm = np.abs(omega - omega.conj().T).max()
    if herm > EPS_HERM:
        raise ValueError(f"Choi matrix is not Hermitian (error {herm:.3g})")
    residual = np.abs(partial_trace_first(omega) - I2 / 2).max()
    if residual > EPS_NUM:
        raise NotTracePreservingError(f"Tr_1 Omega differs from I/2 by {residual:.3g}")
    flat = np.einsum("kij,ji->k", np.concatenate([_T_BASIS, _E_BASIS]), omega).real
    return AffineChannel(flat[:3], flat[3:].reshape(3, 3))


def min_choi_eigenvalue(ch: AffineChannel) -> float:
    return float(np.linalg.eigvalsh(choi_from_affine(ch))[0])


@dataclass(frozen=True)
class CpCertificate:
    """Outcome of :func:`certify_cp`.

    ``fa_margins`` holds, in order, the slacks of the Fujiwara-Algoet
    inequalities ``(1 + l3)^2 - t3^2 - (l1 + l2)^2`` and
    ``(1 - l3)^2 - t3^2 - (l1 - l2)^2``, followed by the same two slacks with
    ``t3`` dropped (the unital form). Signed ``l`` come from
    :func:`singular_decompose`; ``t3`` is the third entry of ``R_U.T @ t``.
    """

    is_cp: bool
    min_choi_eigenvalue: float
    fa_margins: tuple[float, float, float, float]
    trace_preserving_residual: float
    choi_eigenvalues: tuple[float, float, float, float]
    tolerance: float = EPS_CP

    @property
    def fa_necessary_ok(self) -> bool:
        return min(self.fa_margins[:2]) >= -self.tolerance

    def to_dict(self) -> dict:
        return {
            "is_cp": self.is_cp,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "choi_eigenvalues": list(self.choi_eigenvalues),
            "fa_margins": list(self.fa_margins),
            "trace_preserving_residual": self.trace_preserving_residual,
            "tolerance": self.tolerance,
        }


def fa_margins(ch: AffineChannel) -> tuple[float, float, float, float]:
    sd = singular_decompose(ch)
    l1, l2, l3 = (float(v) for v in sd.lambdas)
    t3 = float((sd.R_U.T @ ch.t)[2])
    plus = (1 + l3) ** 2 - (l1 + l2) ** 2
    minus = (1 - l3) ** 2 - (l1 - l2) ** 2
    return (plus - t3 * t3, minus - t3 * t3, plus, minus)


def certify_cp(ch: AffineChannel, tol: float = EPS_CP) -> CpCertificate:
    omega = choi_from_affine(ch)
    evals = np.linalg.eigvalsh(omega)
    residual = float(np.abs(partial_trace_first(omega) - I2 / 2).max())
    return CpCertificate(
        is_cp=bool(evals[0] >= -tol),
        min_choi_eigenvalue=float(evals[0]),
        fa_margins=fa_margins(ch),
        trace_preserving_residual=residual,
        choi_eigenvalues=tuple(float(v) for v in evals),
        tolerance=tol,
    )


def kraus_from_choi(omega: np.ndarray, tol: float = EPS_CP) -> list[np.ndarray]:
    """Kraus operators ``A_k = sqrt(2 mu_k) reshape(v_k)`` from the eigenpairs of ``omega``.

    Eigenvectors are reshaped row-major (channel on the first factor).
    Eigenvalues in ``[-tol, tol]`` are dropped; anything below ``-tol``
    raises :class:`NotCompletelyPositiveError`.
    """
    omega = np.asarray(omega, dtype=complex)
    evals, evecs = np.linalg.eigh((omega + omega.conj().T) / 2)
    if evals[0] < -tol:
        raise NotCompletelyPositiveError(f"Choi matrix has eigenvalue {evals[0]:.3g} < 0")
    ops = [np.sqrt(2 * mu) * evecs[:, k].reshape(2, 2) for k, mu in enumerate(evals) if mu > tol]
    return ops[::-1]


def kraus_from_affine(ch: AffineChannel, tol: float = EPS_CP) -> list[np.ndarray]:
    return kraus_from_choi(choi_from_affine(ch), tol)


def affine_from_kraus(ops) -> AffineChannel:
    """Affine form of ``rho -> sum_k A_k rho A_k^dagger``."""
    ops = [np.asarray(a, dtype=complex) for a in ops]

    def image(op):
        return sum(a @ op @ a.conj().T for a in ops)

    out_identity = image(I2)
    t = np.array([0.5 * np.trace(out_identity @ s).real for s in PAULI])
    E = np.array([[0.5 * np.trace(image(sb) @ sa).real for sb in PAULI] for sa in PAULI])
    return AffineChannel(t, E)


def kraus_completeness_error(ops) -> float:
    total = sum(np.asarray(a).conj().T @ np.asarray(a) for a in ops)
    return float(np.abs(total - I2).max())


def uhlmann_default_grid() -> np.ndarray:
    return np.unique(np.append(np.logspace(-3, 3, 200), 1.0))


@dataclass(frozen=True)
class UhlmannResult:
    compatible: bool
    worst_margin: float
    worst_t: float

    def __bool__(self) -> bool:
        return self.compatible


def _trace_norm_diff(r, s, t):
    """Tr|rho_r - t rho_s| over an array of ``t``: eigenvalues are ((1-t) +- |r - t s|)/2."""
    n = np.linalg.norm(r[None, :] - t[:, None] * s[None, :], axis=1)
    lp = 0.5 * ((1 - t) + n)
    lm = 0.5 * ((1 - t) - n)
    return np.abs(lp) + np.abs(lm)


def uhlmann_compatible(records, t_grid=None, tol: float = EPS_NUM) -> UhlmannResult:
    """Grid screen of D(rho1, t rho2) >= D(rho1', t rho2') for two records.

    This is a necessary-condition check on finitely many ``t`` only.
    """
    if len(records) != 2:
        raise ValueError("uhlmann_compatible takes exactly two records")
    t = uhlmann_default_grid() if t_grid is None else np.asarray(t_grid, float).ravel()
    if t.size == 0:
        raise ValueError("t_grid is empty")
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise ValueError("t_grid must contain positive finite values only")
    r1, r2 = (check_state(rec.input, "record input") for rec in records)
    s1, s2 = (check_state(rec.output, "record output") for rec in records)
    margin = _trace_norm_diff(r1, r2, t) - _trace_norm_diff(s1, s2, t)
    i = int(np.argmin(margin))
    worst = float(margin[i])
    return UhlmannResult(worst >= -tol, worst, float(t[i]))
