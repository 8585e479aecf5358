"""Conservative channel estimates from 0-4 known state transformations.

The estimate is the CP map that fits every record exactly, keeps the image
of I/2 as close to the centre as CP allows, and then keeps the images of
the unconstrained directions as close to that image as possible.

Geometry is handled in an *adaptable basis*: the input frame has ``ex``
along a pure combination ``xi1`` of two input states and ``ey`` along the
Bloch-orthogonal combination ``xi2``; the output frame has ``ex`` along
``xi1'`` and ``ey`` in the plane of ``xi1'`` and ``xi2'``. In these frames

    xi1 = (1, 0, 0)  ->  (alpha, 0, 0)
    xi2 = (0, b, 0)  ->  (beta sin(theta), beta cos(theta), 0)

and the most general fitting channel has six free entries
``x, y, z`` (image of I/2) and ``m, n, k`` (image of the third axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Literal, Sequence

import numpy as np

from .core import (
    EPS_NUM,
    EPS_STATE,
    AffineChannel,
    Frame,
    adapt,
    apply,
    check_state,
    complete_frame,
    frame_from_pair,
    rebase,
)
from .cp import EPS_CP, CpCertificate, certify_cp, uhlmann_compatible
from .errors import (
    DegenerateDataError,
    DegenerateGeometryError,
    InconsistentDataError,
    InfeasibleSearchError,
    NoPureCombinationError,
    QubitReconError,
)
from .search import EPS_LEX, RESTARTS, SearchResult, constrained_search

EPS_FIT = 1e-8
EPS_SPAN = 1e-9

RootChoice = Literal["near", "far"]


class Branch(str, Enum):
    NONE = "none"
    SINGLE_MIXTURE = "single_mixture"
    SINGLE_PURE = "single_pure"
    SINGLE_MIXED_SHIFT = "single_mixed_shift"
    SINGLE_MIXED_NOSHIFT = "single_mixed_noshift"
    TWO_WITH_MIXTURE = "two_with_mixture"
    TWO_UNITAL = "two_unital"
    TWO_NONUNITAL = "two_nonunital"
    THREE_WITH_MIXTURE = "three_with_mixture"
    THREE_GENERAL = "three_general"
    COMPLETE = "complete"


@dataclass(frozen=True)
class TransformationRecord:
    """One known input -> output pair of Bloch vectors."""

    input: np.ndarray
    output: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "input", check_state(self.input, "record input"))
        object.__setattr__(self, "output", check_state(self.output, "record output"))


def as_records(records) -> list[TransformationRecord]:
    out = []
    for rec in records:
        if isinstance(rec, TransformationRecord):
            out.append(rec)
        else:
            inp, outp = rec
            out.append(TransformationRecord(inp, outp))
    return out


@dataclass(frozen=True)
class ReconstructionOptions:
    seed: int = 0
    restarts: int = RESTARTS
    tol: float = EPS_CP
    refine6: bool = False
    root_choice: RootChoice = "near"
    uhlmann_grid: Sequence[float] | None = None


@dataclass(frozen=True)
class CanonicalPair:
    """Two records re-expressed through the pure combination ``xi1`` and its orthogonal partner ``xi2``.

    ``xi2`` has unit trace but may lie outside the ball. ``weights`` are the
    line parameters ``s`` with ``xi = v1 + s (v2 - v1)`` for ``xi1`` and
    ``xi2``. When the record line passes through the centre, ``xi2`` is
    I/2 itself, ``b == 0`` and ``contains_mixture`` is set.
    """

    xi1: np.ndarray
    xi2: np.ndarray
    xi1_out: np.ndarray
    xi2_out: np.ndarray
    b: float
    alpha: float
    beta: float
    theta: float
    in_frame: Frame
    out_frame: Frame
    root_choice: RootChoice
    weights: tuple[float, float]
    contains_mixture: bool

    def to_dict(self) -> dict:
        return {
            "xi1": self.xi1.tolist(),
            "xi2": self.xi2.tolist(),
            "xi1_out": self.xi1_out.tolist(),
            "xi2_out": self.xi2_out.tolist(),
            "b": self.b,
            "alpha": self.alpha,
            "beta": self.beta,
            "theta": self.theta,
            "root_choice": self.root_choice,
            "contains_mixture": self.contains_mixture,
        }


@dataclass(frozen=True)
class OptimizerVariables:
    """Free adaptable-basis entries: image of I/2 ``(x, y, z)`` and of the third axis ``(m, n, k)``."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    m: float = 0.0
    n: float = 0.0
    k: float = 0.0

    @property
    def shift(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    @property
    def third_distance(self) -> float:
        return float(np.sqrt(self.m**2 + self.n**2 + self.k**2))

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in "xyzmnk"}


@dataclass(frozen=True)
class ReconstructionReport:
    estimate: AffineChannel
    estimate_adaptable: AffineChannel
    in_frame: Frame
    out_frame: Frame
    strategy_branch: Branch
    cp_certificate: CpCertificate
    records: tuple[TransformationRecord, ...] = ()
    variables: OptimizerVariables | None = None
    canonical: CanonicalPair | None = None
    optimizer_trace: SearchResult | None = None
    notes: tuple[str, ...] = ()
    refinement: dict | None = None

    @property
    def fit_residual(self) -> float:
        if not self.records:
            return 0.0
        return max(float(np.linalg.norm(apply(self.estimate, r.input) - r.output)) for r in self.records)

    def to_dict(self) -> dict:
        return {
            "strategy_branch": self.strategy_branch.value,
            "estimate": {"t": self.estimate.t.tolist(), "E": self.estimate.E.tolist()},
            "estimate_adaptable": {
                "t": self.estimate_adaptable.t.tolist(),
                "E": self.estimate_adaptable.E.tolist(),
            },
            "in_frame": self.in_frame.matrix.tolist(),
            "out_frame": self.out_frame.matrix.tolist(),
            "fit_residual": self.fit_residual,
            "cp_certificate": self.cp_certificate.to_dict(),
            "variables": None if self.variables is None else self.variables.to_dict(),
            "canonical": None if self.canonical is None else self.canonical.to_dict(),
            "optimizer_trace": None if self.optimizer_trace is None else self.optimizer_trace.to_dict(),
            "refinement": self.refinement,
            "notes": list(self.notes),
        }


# ----------------------------------------------------------------------------
# helpers


def _finish(
    ch_ad: AffineChannel,
    in_frame: Frame,
    out_frame: Frame,
    branch: Branch,
    records: Sequence[TransformationRecord],
    opts: ReconstructionOptions,
    **extra,
) -> ReconstructionReport:
    est = rebase(ch_ad, in_frame, out_frame)
    cert = certify_cp(est, opts.tol)
    report = ReconstructionReport(
        estimate=est,
        estimate_adaptable=ch_ad,
        in_frame=in_frame,
        out_frame=out_frame,
        strategy_branch=branch,
        cp_certificate=cert,
        records=tuple(records),
        **extra,
    )
    if not cert.is_cp:
        raise InfeasibleSearchError(
            f"{branch.value} estimate is not CP (min Choi eigenvalue {cert.min_choi_eigenvalue:.3g})",
            -cert.min_choi_eigenvalue,
        )
    if report.fit_residual > EPS_FIT:
        raise QubitReconError(f"{branch.value} estimate misses a record by {report.fit_residual:.3g}")
    return report


def _check_independent(records: Sequence[TransformationRecord]) -> None:
    if len(records) < 2:
        return
    M = np.array([np.r_[1.0, r.input] for r in records])
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= EPS_SPAN * max(1.0, sv[0]):
        raise DegenerateDataError(
            f"the {len(records)} input states are not affinely independent (smallest singular value {sv[-1]:.3g})"
        )


def _affine_weights(points: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Weights ``w`` (summing to one) with ``sum w_j points_j`` closest to ``target``."""
    A = np.vstack([np.ones(len(points)), points.T])
    w, *_ = np.linalg.lstsq(A, np.r_[1.0, target], rcond=None)
    return w


def mixture_in_span(inputs) -> tuple[bool, float]:
    """Whether I/2 lies in the affine hull of the input Bloch vectors, and its distance from it."""
    pts = np.asarray(inputs, float).reshape(-1, 3)
    if len(pts) == 0:
        return False, np.inf
    if len(pts) == 1:
        d = float(np.linalg.norm(pts[0]))
    else:
        w = _affine_weights(pts, np.zeros(3))
        d = float(np.linalg.norm(w @ pts))
    return d <= EPS_SPAN, d


def _check_pairs_uhlmann(records, opts: ReconstructionOptions) -> None:
    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            res = uhlmann_compatible([records[i], records[j]], opts.uhlmann_grid)
            if not res.compatible:
                raise InconsistentDataError(
                    f"records {i} and {j} admit no CP map: Uhlmann margin {res.worst_margin:.3g} at t={res.worst_t:.6g}"
                )


# ----------------------------------------------------------------------------
# canonical pair


def canonicalize_pair(
    r1: TransformationRecord, r2: TransformationRecord, root_choice: RootChoice = "near"
) -> CanonicalPair:
    v1, v2 = r1.input, r2.input
    w1, w2 = r1.output, r2.output
    d = v2 - v1
    dd = float(d @ d)
    if dd <= EPS_SPAN**2:
        raise DegenerateDataError("the two input states coincide")
    half_b = float(v1 @ d)
    disc = half_b * half_b - dd * (float(v1 @ v1) - 1.0)
    if disc < 0:
        raise NoPureCombinationError("the line through the input states misses the Bloch sphere")
    root = np.sqrt(disc)
    roots = sorted([(-half_b + root) / dd, (-half_b - root) / dd], key=lambda s: (abs(s), -s))
    if root_choice == "near":
        s1 = roots[0]
    elif root_choice == "far":
        s1 = roots[1]
    else:
        raise ValueError(f"root_choice must be 'near' or 'far', got {root_choice!r}")
    xi1 = v1 + s1 * d
    denom = float(xi1 @ d)
    if abs(denom) <= 1e-12:
        raise DegenerateGeometryError("the record line is tangent to the sphere at the pure combination")
    s2 = -float(xi1 @ v1) / denom
    xi2 = v1 + s2 * d
    dw = w2 - w1
    xi1_out = w1 + s1 * dw
    xi2_out = w1 + s2 * dw

    b = float(np.linalg.norm(xi2))
    contains = b <= EPS_SPAN
    alpha = float(np.linalg.norm(xi1_out))
    beta = float(np.linalg.norm(xi2_out))
    in_frame = complete_frame(xi1, slot="x") if contains else frame_from_pair(xi1, xi2)
    out_frame = frame_from_pair(xi1_out, xi2_out)
    if beta > 1e-12:
        theta = float(np.arctan2(xi2_out @ out_frame.ex, xi2_out @ out_frame.ey))
    else:
        theta = 0.0
    return CanonicalPair(
        xi1=xi1,
        xi2=xi2,
        xi1_out=xi1_out,
        xi2_out=xi2_out,
        b=0.0 if contains else b,
        alpha=alpha,
        beta=beta,
        theta=theta,
        in_frame=in_frame,
        out_frame=out_frame,
        root_choice=root_choice,
        weights=(float(s1), float(s2)),
        contains_mixture=contains,
    )


def pair_adaptable(cp: CanonicalPair, v: OptimizerVariables | Sequence[float]) -> AffineChannel:
    """General adaptable-basis channel fitting a (non-mixture) canonical pair."""
    if not isinstance(v, OptimizerVariables):
        v = OptimizerVariables(*v)
    a, b = cp.alpha, cp.b
    bs, bc = cp.beta * np.sin(cp.theta), cp.beta * np.cos(cp.theta)
    E = np.array(
        [
            [a - v.x, (bs - v.x) / b, v.m],
            [-v.y, (bc - v.y) / b, v.n],
            [-v.z, -v.z / b, v.k],
        ]
    )
    return AffineChannel([v.x, v.y, v.z], E)


def unital_k_interval(cp: CanonicalPair) -> tuple[float, float]:
    """Range of ``k`` for which the unital ``m = n = 0`` estimate is CP.

    From the two smallest Choi eigenvalues
    ``(1 +- k - sqrt(alpha^2 + q^2 +- 2 alpha q cos(theta))) / 4`` with
    ``q = beta / b``. The interval is empty exactly when the unital
    feasibility condition ``q^2 <= (1 - alpha^2) / (1 - alpha^2 cos^2 theta)``
    fails.
    """
    a = cp.alpha
    q = cp.beta / cp.b
    c = np.cos(cp.theta)
    a_plus = np.sqrt(max(0.0, a * a + q * q + 2 * a * q * c))
    a_minus = np.sqrt(max(0.0, a * a + q * q - 2 * a * q * c))
    return float(a_plus - 1.0), float(1.0 - a_minus)


def unital_condition_margin(cp: CanonicalPair) -> float:
    """``(1 - alpha^2) - q^2 (1 - alpha^2 cos^2 theta)``; non-negative iff a unital estimate exists."""
    a2 = cp.alpha**2
    q2 = (cp.beta / cp.b) ** 2
    return float((1 - a2) - q2 * (1 - a2 * np.cos(cp.theta) ** 2))


def boundary_unital_k(cp: CanonicalPair) -> float:
    """Closed-form ``k = alpha cos(theta) sqrt((1 - alpha^2) / (1 - alpha^2 cos^2 theta))``.

    This is the unique CP value on the boundary of the unital feasibility
    condition; in the interior it need not be CP or of least magnitude,
    so the estimator uses :func:`unital_k_interval` instead.
    """
    a, c = cp.alpha, np.cos(cp.theta)
    return float(a * c * np.sqrt((1 - a * a) / (1 - a * a * c * c)))


# ----------------------------------------------------------------------------
# estimators


def estimate_none(options: ReconstructionOptions | None = None) -> ReconstructionReport:
    opts = options or ReconstructionOptions()
    sigma = Frame.sigma()
    return _finish(AffineChannel.total_contraction(), sigma, sigma, Branch.NONE, (), opts)


def estimate_one(rec: TransformationRecord, options: ReconstructionOptions | None = None) -> ReconstructionReport:
    opts = options or ReconstructionOptions()
    rec = as_records([rec])[0]
    v, w = rec.input, rec.output
    r = float(np.linalg.norm(v))
    rp = float(np.linalg.norm(w))

    if r <= EPS_STATE:
        out_frame = complete_frame(w, slot="x") if rp > EPS_STATE else Frame.sigma()
        ch = AffineChannel(w, np.zeros((3, 3)))
        sigma = Frame.sigma()
        return _finish(adapt(ch, sigma, out_frame), sigma, out_frame, Branch.SINGLE_MIXTURE, [rec], opts)

    in_frame = complete_frame(v, slot="x")
    out_frame = complete_frame(w, slot="x") if rp > EPS_STATE else in_frame
    E = np.zeros((3, 3))
    t = np.zeros(3)
    if abs(r - 1.0) <= EPS_STATE:
        E[0, 0] = rp
        branch = Branch.SINGLE_PURE
    else:
        shift = max((rp - r) / (1.0 - r), 0.0)
        E[0, 0] = min(rp / r, 1.0) - shift
        t[0] = shift
        branch = Branch.SINGLE_MIXED_SHIFT if rp - r > EPS_NUM else Branch.SINGLE_MIXED_NOSHIFT
    ch_ad = AffineChannel(t, E)
    variables = OptimizerVariables(x=t[0], k=E[0, 0])
    return _finish(ch_ad, in_frame, out_frame, branch, [rec], opts, variables=variables)


def _two_with_mixture(cp, records, opts) -> ReconstructionReport:
    mix_ad = cp.out_frame.coords(cp.xi2_out)
    col = np.array([cp.alpha, 0.0, 0.0]) - mix_ad
    E = np.zeros((3, 3))
    E[:, 0] = col
    ch_ad = AffineChannel(mix_ad, E)
    if certify_cp(rebase(ch_ad, cp.in_frame, cp.out_frame), opts.tol).is_cp:
        return _finish(ch_ad, cp.in_frame, cp.out_frame, Branch.TWO_WITH_MIXTURE, records, opts, canonical=cp)

    def build_ad(p):
        Ep = E.copy()
        Ep[:, 1] = p[:3]
        Ep[:, 2] = p[3:]
        return AffineChannel(mix_ad, Ep)

    def build(p):
        return rebase(build_ad(p), cp.in_frame, cp.out_frame)

    res = constrained_search(
        [lambda p: float(np.linalg.norm(p))],
        np.zeros(6),
        build,
        names=("ey_x", "ey_y", "ey_z", "m", "n", "k"),
        restarts=opts.restarts,
        seed=opts.seed,
        tol=opts.tol,
    )
    return _finish(
        build_ad(res.values),
        cp.in_frame,
        cp.out_frame,
        Branch.TWO_WITH_MIXTURE,
        records,
        opts,
        canonical=cp,
        optimizer_trace=res,
        notes=("line contraction is not CP; unknown axes searched with the mixture image fixed",),
    )


def _lex_better(a: OptimizerVariables, b: OptimizerVariables) -> bool:
    """``a`` strictly improves on ``b`` in the (shift, third distance) order."""
    if a.shift < b.shift - EPS_LEX:
        return True
    return abs(a.shift - b.shift) <= EPS_LEX and a.third_distance < b.third_distance - EPS_LEX


def _pair_search(cp, names, start, opts, to_vars):
    def build(p):
        return rebase(pair_adaptable(cp, to_vars(p)), cp.in_frame, cp.out_frame)

    res = constrained_search(
        [lambda p: to_vars(p).shift, lambda p: to_vars(p).third_distance],
        start,
        build,
        names=names,
        restarts=opts.restarts,
        seed=opts.seed,
        tol=opts.tol,
    )
    return to_vars(res.values), res


def _six(p):
    return OptimizerVariables(*p)


def estimate_two(r1, r2, options: ReconstructionOptions | None = None) -> ReconstructionReport:
    opts = options or ReconstructionOptions()
    records = as_records([r1, r2])
    _check_independent(records)
    _check_pairs_uhlmann(records, opts)
    cp = canonicalize_pair(*records, root_choice=opts.root_choice)
    if cp.contains_mixture:
        return _two_with_mixture(cp, records, opts)

    if unital_condition_margin(cp) >= -EPS_NUM:
        lo, hi = unital_k_interval(cp)
        k = min(max(0.0, lo), hi) if lo <= hi else 0.5 * (lo + hi)
        v = OptimizerVariables(k=k)
        ch_ad = pair_adaptable(cp, v)
        if certify_cp(rebase(ch_ad, cp.in_frame, cp.out_frame), opts.tol).is_cp:
            return _finish(ch_ad, cp.in_frame, cp.out_frame, Branch.TWO_UNITAL, records, opts, variables=v, canonical=cp)

    notes = []
    try:
        v, res = _pair_search(cp, ("x", "y", "k"), np.zeros(3), opts, lambda p: OptimizerVariables(x=p[0], y=p[1], k=p[2]))
    except InfeasibleSearchError:
        notes.append("m = n = z = 0 ansatz infeasible; used the six-parameter search")
        v, res = _pair_search(cp, tuple("xyzmnk"), np.zeros(6), opts, _six)

    refinement = None
    if opts.refine6 and not notes:
        v6, res6 = _pair_search(cp, tuple("xyzmnk"), np.array([v.x, v.y, v.z, v.m, v.n, v.k]), opts, _six)
        better = _lex_better(v6, v)
        refinement = {"variables": v6.to_dict(), "improved": better, "trace": res6.to_dict()}
        if better:
            notes.append("six-parameter refinement improved on the m = n = z = 0 ansatz")
            v, res = v6, res6
    return _finish(
        pair_adaptable(cp, v),
        cp.in_frame,
        cp.out_frame,
        Branch.TWO_NONUNITAL,
        records,
        opts,
        variables=v,
        canonical=cp,
        optimizer_trace=res,
        notes=tuple(notes),
        refinement=refinement,
    )


def _plane_pair(records, opts) -> CanonicalPair:
    """Canonical pair from the first record pair whose line avoids the centre."""
    last_error = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        try:
            cp = canonicalize_pair(records[i], records[j], root_choice=opts.root_choice)
        except DegenerateDataError as exc:
            last_error = exc
            continue
        if not cp.contains_mixture:
            return cp
    raise DegenerateGeometryError(f"no record pair gives a usable canonical pair ({last_error})")


def _third_axis_solver(cp: CanonicalPair, rec: TransformationRecord):
    """Map ``(x, y, z)`` to the full variables fitting a third record off the pair's plane."""
    a = cp.in_frame.coords(rec.input)
    target = cp.out_frame.coords(rec.output)
    if abs(a[2]) <= EPS_SPAN:
        raise DegenerateGeometryError("third record lies in the plane of the canonical pair")

    def solve(x, y, z):
        ch = pair_adaptable(cp, OptimizerVariables(x, y, z))
        col3 = (target - ch.t - ch.E[:, 0] * a[0] - ch.E[:, 1] * a[1]) / a[2]
        return OptimizerVariables(x, y, z, *col3)

    return solve


def estimate_three(r1, r2, r3, options: ReconstructionOptions | None = None) -> ReconstructionReport:
    opts = options or ReconstructionOptions()
    records = as_records([r1, r2, r3])
    _check_independent(records)
    _check_pairs_uhlmann(records, opts)
    inputs = np.array([r.input for r in records])
    outputs = np.array([r.output for r in records])
    contains, _ = mixture_in_span(inputs)
    cp = _plane_pair(records, opts)

    if contains:
        mix_image = _affine_weights(inputs, np.zeros(3)) @ outputs
        x, y, z = cp.out_frame.coords(mix_image)

        def to_vars(p):
            return OptimizerVariables(x, y, z, *p)

        def build(p):
            return rebase(pair_adaptable(cp, to_vars(p)), cp.in_frame, cp.out_frame)

        res = constrained_search(
            [lambda p: to_vars(p).third_distance],
            np.zeros(3),
            build,
            names=("m", "n", "k"),
            restarts=opts.restarts,
            seed=opts.seed,
            tol=opts.tol,
        )
        v = to_vars(res.values)
        return _finish(
            pair_adaptable(cp, v),
            cp.in_frame,
            cp.out_frame,
            Branch.THREE_WITH_MIXTURE,
            records,
            opts,
            variables=v,
            canonical=cp,
            optimizer_trace=res,
        )

    third = next(r for r in records if not any(r is q for q in _pair_members(cp, records)))
    solve = _third_axis_solver(cp, third)
    notes = []
    try:
        v, res = _pair_search(cp, ("x", "y"), np.zeros(2), opts, lambda p: solve(p[0], p[1], 0.0))
    except InfeasibleSearchError:
        notes.append("z = 0 ansatz infeasible; searched the full image of I/2")
        v, res = _pair_search(cp, ("x", "y", "z"), np.zeros(3), opts, lambda p: solve(*p))

    refinement = None
    if opts.refine6 and not notes:
        v3, res3 = _pair_search(cp, ("x", "y", "z"), np.array([v.x, v.y, 0.0]), opts, lambda p: solve(*p))
        better = _lex_better(v3, v)
        refinement = {"variables": v3.to_dict(), "improved": better, "trace": res3.to_dict()}
        if better:
            notes.append("unrestricted refinement improved on the z = 0 ansatz")
            v, res = v3, res3
    return _finish(
        pair_adaptable(cp, v),
        cp.in_frame,
        cp.out_frame,
        Branch.THREE_GENERAL,
        records,
        opts,
        variables=v,
        canonical=cp,
        optimizer_trace=res,
        notes=tuple(notes),
        refinement=refinement,
    )


def _pair_members(cp: CanonicalPair, records) -> tuple[TransformationRecord, TransformationRecord]:
    """The two records a canonical pair was built from (found by reproducing ``xi1``)."""
    for i, j in ((0, 1), (0, 2), (1, 2)):
        d = records[j].input - records[i].input
        if np.allclose(records[i].input + cp.weights[0] * d, cp.xi1, atol=1e-12):
            return records[i], records[j]
    raise QubitReconError("canonical pair does not match any record pair")


def estimate_four(r1, r2, r3, r4, options: ReconstructionOptions | None = None) -> ReconstructionReport:
    """Direct solve of the affine map from four affinely independent records."""
    opts = options or ReconstructionOptions()
    records = as_records([r1, r2, r3, r4])
    _check_independent(records)
    M = np.array([np.r_[1.0, r.input] for r in records])
    W = np.linalg.solve(M, np.array([r.output for r in records]))
    ch = AffineChannel(W[0], W[1:].T)
    sigma = Frame.sigma()
    try:
        return _finish(ch, sigma, sigma, Branch.COMPLETE, records, opts)
    except InfeasibleSearchError as exc:
        raise InconsistentDataError(f"the four records define a map that is not CP: {exc}") from exc


def estimate(records, options: ReconstructionOptions | None = None) -> ReconstructionReport:
    """Estimate a channel from 0-4 records, dispatching on their number."""
    opts = options or ReconstructionOptions()
    records = as_records(records)
    n = len(records)
    if n == 0:
        return estimate_none(opts)
    if n == 1:
        return estimate_one(records[0], opts)
    if n == 2:
        return estimate_two(*records, options=opts)
    if n == 3:
        return estimate_three(*records, options=opts)
    if n == 4:
        return estimate_four(*records, options=opts)
    raise ValueError(f"at most four records are supported, got {n}")


def with_options(opts: ReconstructionOptions | None, **changes) -> ReconstructionOptions:
    return replace(opts or ReconstructionOptions(), **changes)
