"""Lexicographic, CP-penalised simplex search over a few real parameters.

Each objective is minimised in turn with the earlier ones held within
``EPS_LEX`` of their optimum. Infeasibility ``v = max(0, -min Choi
eigenvalue)`` enters as ``P * v**2``. Every stage runs Nelder-Mead from a
fixed, seed-derived list of starting points at ``P = 1e6``; the best point
is then re-polished at ``P = 1e9`` and ``P = 1e12`` so extremal solutions
land on the CP boundary to within ~1e-12 instead of ~1e-6. If the simplex
stalls just outside the cone, a few Newton steps on the smallest Choi
eigenvalue push the point back inside; such moves are ~1e-9, far below
``EPS_LEX``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import AffineChannel
from .cp import EPS_CP, min_choi_eigenvalue
from .errors import InfeasibleSearchError

EPS_LEX = 1e-6
PENALTY = 1e6
POLISH_PENALTIES = (1e9, 1e12)
SIMPLEX_TOL = 1e-10
RESTARTS = 8
START_SCALE = 0.3
MAX_ITER = 20000
RESTORE_TARGET = 1e-12

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SearchResult:
    names: tuple[str, ...]
    values: np.ndarray
    objective_values: tuple[float, ...]
    min_choi_eigenvalue: float
    iterations: int
    evaluations: int
    restarts: int

    @property
    def variables(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.values)}

    def to_dict(self) -> dict:
        return {
            "variables": self.variables,
            "objective_values": list(self.objective_values),
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "restarts": self.restarts,
        }


@dataclass
class _Counter:
    iterations: int = 0
    evaluations: int = 0
    starts: list = field(default_factory=list)


def start_points(x0: np.ndarray, restarts: int, seed: int) -> list[np.ndarray]:
    """``x0`` followed by ``restarts - 1`` Gaussian perturbations, one generator per restart."""
    pts = [np.array(x0, float)]
    for i in range(1, restarts):
        rng = np.random.default_rng([seed, i])
        pts.append(pts[0] + START_SCALE * rng.standard_normal(pts[0].size))
    return pts


def _nelder_mead(fun, x0, counter: _Counter) -> tuple[np.ndarray, float]:
    res = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={"xatol": SIMPLEX_TOL, "fatol": np.inf, "maxiter": MAX_ITER, "maxfev": 2 * MAX_ITER},
    )
    counter.iterations += int(res.nit)
    counter.evaluations += int(res.nfev)
    return np.asarray(res.x, float), float(res.fun)


def _restore_feasibility(p, lam_of, steps: int = 20, h: float = 1e-7) -> tuple[np.ndarray, float]:
    """Newton steps on ``lam_of(p) = RESTORE_TARGET`` using a central-difference gradient."""
    lam = lam_of(p)
    for _ in range(steps):
        if lam >= 0.0:
            break
        g = np.empty(p.size)
        for i in range(p.size):
            e = np.zeros(p.size)
            e[i] = h
            g[i] = (lam_of(p + e) - lam_of(p - e)) / (2 * h)
        gg = float(g @ g)
        if gg == 0.0:
            break
        q = p + (RESTORE_TARGET - lam) * g / gg
        lam_q = lam_of(q)
        if lam_q <= lam:
            break
        p, lam = q, lam_q
    return p, lam


def constrained_search(
    objectives: Sequence[Objective],
    x0,
    build: Callable[[np.ndarray], AffineChannel],
    names: Sequence[str] | None = None,
    restarts: int = RESTARTS,
    seed: int = 0,
    tol: float = EPS_CP,
) -> SearchResult:
    """Minimise ``objectives`` lexicographically subject to ``build(p)`` being CP.

    ``build`` maps a parameter vector to a channel; each objective maps a
    parameter vector to a float. Raises :class:`InfeasibleSearchError` when
    the final point violates CP by more than ``tol``.
    """
    if not objectives:
        raise ValueError("need at least one objective")
    x0 = np.atleast_1d(np.asarray(x0, float))
    names = tuple(names) if names is not None else tuple(f"p{i}" for i in range(x0.size))
    if len(names) != x0.size:
        raise ValueError("names must match the number of parameters")
    restarts = max(1, int(restarts))
    counter = _Counter()

    def violation(p):
        return max(0.0, -min_choi_eigenvalue(build(p)))

    fixed: list[tuple[Objective, float]] = []
    best = x0
    for stage, obj in enumerate(objectives):

        def penalised(p, P, obj=obj):
            v = violation(p)
            total = obj(p) + P * v * v
            for prev, bound in fixed:
                excess = max(0.0, prev(p) - bound)
                total += P * excess * excess
            return total

        candidates = []
        for k, s in enumerate(start_points(best, restarts, seed + 7919 * stage)):
            x, f = _nelder_mead(lambda p: penalised(p, PENALTY), s, counter)
            candidates.append((f, k, x))
        # lowest penalised value; restart index breaks ties deterministically
        _, _, best = min(candidates, key=lambda c: (c[0], c[1]))
        for P in POLISH_PENALTIES:
            best, _ = _nelder_mead(lambda p: penalised(p, P), best, counter)
        fixed.append((obj, obj(best) + EPS_LEX))

    best, lam = _restore_feasibility(best, lambda p: min_choi_eigenvalue(build(p)))
    if lam < -tol:
        raise InfeasibleSearchError(
            f"no completely positive point found (best min Choi eigenvalue {lam:.3g})", -lam
        )
    return SearchResult(
        names=names,
        values=best,
        objective_values=tuple(float(o(best)) for o in objectives),
        min_choi_eigenvalue=lam,
        iterations=counter.iterations,
        evaluations=counter.evaluations,
        restarts=restarts,
    )
