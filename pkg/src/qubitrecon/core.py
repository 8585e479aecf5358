"""Bloch-vector and affine-channel algebra for a single qubit.

States are real 3-vectors ``r`` with ``rho = (I + r . sigma) / 2``. A
trace-preserving qubit map is stored in affine form, ``r -> E r + t``; the
first row ``(1, 0, 0, 0)`` of the 4x4 matrix is implicit, so trace
preservation holds by construction.

All functions here are pure; arrays handed out are read-only copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import FrameError, InvalidStateError

EPS_STATE = 1e-9
EPS_FRAME = 1e-12
EPS_NUM = 1e-10

Slot = Literal["x", "y", "z"]


def _frozen(a, shape) -> np.ndarray:
    out = np.array(a, dtype=float).reshape(shape)
    if not np.all(np.isfinite(out)):
        raise ValueError(f"non-finite entries in {out.tolist()}")
    out.setflags(write=False)
    return out


def bloch(v) -> np.ndarray:
    """Return ``v`` as a read-only float vector of length 3."""
    return _frozen(v, (3,))


def check_state(r, name: str = "state") -> np.ndarray:
    """Validate that ``r`` is a physical Bloch vector (norm <= 1 + EPS_STATE)."""
    r = bloch(r)
    n = float(np.linalg.norm(r))
    if n > 1.0 + EPS_STATE:
        raise InvalidStateError(f"{name} has Bloch norm {n:.12g} > 1")
    return r


def is_pure(r) -> bool:
    return abs(float(np.linalg.norm(r)) - 1.0) <= EPS_STATE


@dataclass(frozen=True)
class AffineChannel:
    """Qubit map ``r -> E @ r + t`` in the sigma basis."""

    t: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen(self.t, (3,)))
        object.__setattr__(self, "E", _frozen(self.E, (3, 3)))

    @classmethod
    def identity(cls) -> "AffineChannel":
        return cls(np.zeros(3), np.eye(3))

    @classmethod
    def total_contraction(cls) -> "AffineChannel":
        """The map sending every state to I/2."""
        return cls(np.zeros(3), np.zeros((3, 3)))

    @classmethod
    def from_matrix(cls, m) -> "AffineChannel":
        """Build from the full 4x4 affine matrix; the first row must be (1,0,0,0)."""
        m = _frozen(m, (4, 4))
        if not np.array_equal(m[0], [1.0, 0.0, 0.0, 0.0]):
            raise ValueError(f"first row of the affine matrix must be (1, 0, 0, 0), got {m[0].tolist()}")
        return cls(m[1:, 0], m[1:, 1:])

    @property
    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        m[1:, 0] = self.t
        m[1:, 1:] = self.E
        return m

    @property
    def is_unital(self) -> bool:
        return float(np.linalg.norm(self.t)) < EPS_NUM

    def __call__(self, r) -> np.ndarray:
        return apply(self, r)


def apply(ch: AffineChannel, r) -> np.ndarray:
    """Image of a Bloch vector (or a stack of them, shape ``(..., 3)``)."""
    r = np.asarray(r, dtype=float)
    return r @ ch.E.T + ch.t


def compose(a: AffineChannel, b: AffineChannel) -> AffineChannel:
    """Channel that applies ``b`` first and then ``a``."""
    return AffineChannel(a.E @ b.t + a.t, a.E @ b.E)


def trace_distance(r, s) -> float:
    """Tr|rho - sigma| for qubits, i.e. the Euclidean distance of Bloch vectors."""
    return float(np.linalg.norm(np.asarray(r, float) - np.asarray(s, float)))


def fidelity_to_mixture(r) -> float:
    """Root fidelity between the state ``r`` and I/2."""
    n = float(np.linalg.norm(check_state(r)))
    n = min(n, 1.0)
    return 0.5 * (np.sqrt(1.0 + n) + np.sqrt(1.0 - n))


def fidelity(r, s) -> float:
    """Uhlmann root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)) of two qubit states.

    Uses the two-level closed form
    ``sqrt((1 + r.s + sqrt((1 - |r|^2)(1 - |s|^2))) / 2)``.
    """
    r = check_state(r, "first state")
    s = check_state(s, "second state")
    mixed = max(0.0, 1.0 - r @ r) * max(0.0, 1.0 - s @ s)
    inner = 0.5 * (1.0 + r @ s + np.sqrt(mixed))
    return float(np.sqrt(min(max(inner, 0.0), 1.0)))


@dataclass(frozen=True)
class SingularData:
    """Signed decomposition ``E = R_U @ diag(lambdas) @ R_V``.

    ``R_U`` and ``R_V`` are proper rotations (determinant +1); the sign of
    ``det E`` is carried by ``lambdas[2]``. ``lambdas`` is ordered by
    decreasing magnitude.
    """

    lambdas: np.ndarray
    R_U: np.ndarray
    R_V: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.lambdas)


def singular_decompose(ch: AffineChannel | np.ndarray) -> SingularData:
    E = ch.E if isinstance(ch, AffineChannel) else np.asarray(ch, float)
    U, sv, Vt = np.linalg.svd(E)
    U = U.copy()
    Vt = Vt.copy()
    lam = sv.copy()
    # fold improper parts into the smallest singular value
    if np.linalg.det(U) < 0:
        U[:, 2] *= -1.0
        lam[2] *= -1.0
    if np.linalg.det(Vt) < 0:
        Vt[2, :] *= -1.0
        lam[2] *= -1.0
    return SingularData(bloch(lam), _frozen(U, (3, 3)), _frozen(Vt, (3, 3)))


@dataclass(frozen=True)
class Frame:
    """Orthonormal Bloch-space axes; ``matrix`` has the axes as rows."""

    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray

    def __post_init__(self):
        for name in ("ex", "ey", "ez"):
            object.__setattr__(self, name, bloch(getattr(self, name)))
        m = self.matrix
        gram_err = np.abs(m @ m.T - np.eye(3)).max()
        if gram_err > EPS_FRAME * 10:
            raise FrameError(f"frame axes are not orthonormal (Gram error {gram_err:.3g})")

    @classmethod
    def sigma(cls) -> "Frame":
        return cls(*np.eye(3))

    @classmethod
    def from_matrix(cls, m) -> "Frame":
        m = np.asarray(m, float)
        return cls(m[0], m[1], m[2])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([self.ex, self.ey, self.ez])

    @property
    def orientation(self) -> int:
        return 1 if np.linalg.det(self.matrix) > 0 else -1

    def coords(self, r) -> np.ndarray:
        """Coordinates of a sigma-basis vector in this frame."""
        return self.matrix @ np.asarray(r, float)

    def vector(self, c) -> np.ndarray:
        """Sigma-basis vector with frame coordinates ``c``."""
        return self.matrix.T @ np.asarray(c, float)


_SLOT_ORDER = {"x": (0, 1, 2), "y": (2, 0, 1), "z": (1, 2, 0)}


def _unit(v, what: str) -> np.ndarray:
    v = np.asarray(v, float)
    n = float(np.linalg.norm(v))
    if not np.isfinite(n) or n <= EPS_FRAME:
        raise FrameError(f"{what} is too short to define an axis (norm {n:.3g})")
    return v / n


def complete_frame(axis, orientation: int = 1, slot: Slot = "z") -> Frame:
    """Orthonormal frame with ``axis / |axis|`` placed in ``slot``.

    The companion axis comes from the coordinate axis least aligned with
    ``axis`` (first one on ties), Gram-Schmidt-ed against it; the third is
    their cross product, negated when ``orientation`` is -1.
    """
    u = _unit(axis, "frame axis")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    e = np.eye(3)[int(np.argmin(np.abs(u)))]
    v = e - (e @ u) * u
    v /= np.linalg.norm(v)
    w = np.cross(u, v) * orientation
    triple = (u, v, w)
    i, j, k = _SLOT_ORDER[slot]
    return Frame(triple[i], triple[j], triple[k])


def frame_from_pair(first, second, eps: float = 1e-12) -> Frame:
    """Right-handed frame with ``ex`` along ``first`` and ``ey`` in the span of both.

    Either vector may be (numerically) zero or the two may be parallel; the
    missing axes are then completed deterministically.
    """
    first = np.asarray(first, float)
    second = np.asarray(second, float)
    if np.linalg.norm(first) > eps:
        ex = first / np.linalg.norm(first)
        rest = second - (second @ ex) * ex
        if np.linalg.norm(rest) <= eps:
            return complete_frame(ex, slot="x")
        ey = rest / np.linalg.norm(rest)
        return Frame(ex, ey, np.cross(ex, ey))
    if np.linalg.norm(second) > eps:
        return complete_frame(second, slot="y")
    return Frame.sigma()


def rebase(ch_ad: AffineChannel, in_frame: Frame, out_frame: Frame) -> AffineChannel:
    """Express an adaptable-basis channel in the fixed sigma basis.

    ``ch_ad`` maps ``in_frame`` coordinates to ``out_frame`` coordinates.
    With ``X`` and ``Y`` the frame matrices (axes as rows) the result is
    ``E = Y.T @ E_ad @ X`` and ``t = Y.T @ t_ad``.
    """
    if not isinstance(in_frame, Frame) or not isinstance(out_frame, Frame):
        raise FrameError("rebase needs Frame instances")
    X = in_frame.matrix
    Y = out_frame.matrix
    return AffineChannel(Y.T @ ch_ad.t, Y.T @ ch_ad.E @ X)


def adapt(ch: AffineChannel, in_frame: Frame, out_frame: Frame) -> AffineChannel:
    """Inverse of :func:`rebase`: sigma-basis channel in frame coordinates."""
    X = in_frame.matrix
    Y = out_frame.matrix
    return AffineChannel(Y @ ch.t, Y @ ch.E @ X.T)
