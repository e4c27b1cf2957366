"""Stagnation points of the Wigner velocity field and their hyperbolic class.

Equilibria solve ``omega_x = omega_k = 0``.  Because the field is invariant
under ``x <-> k`` up to the factor ``-a^2``, the equilibrium set does not
depend on ``a`` and the symmetric point ``x_o = k_o`` (the quantum-shifted
``arcsin(w)``) is the one tracked by scans and threshold searches.  A Newton
iterate started on the diagonal stays on it exactly.
"""

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from wigner_aah.model import AahParams, PhaseState
from wigner_aah.wigner import (
    GaussianEnsemble,
    quantum_factor,
    quantum_factor_slope,
    velocity,
)

__all__ = [
    "BracketError",
    "EquilibriumReport",
    "JacobianMatrix",
    "OutOfRegimeError",
    "ScanCell",
    "SingularJacobianError",
    "SolverError",
    "Stability",
    "ThresholdResult",
    "classify",
    "equilibrium_report",
    "find_equilibrium",
    "find_equilibria",
    "jacobian_at",
    "perturbative_det",
    "perturbative_shift",
    "perturbative_threshold",
    "perturbative_trace",
    "saddle_threshold",
    "stability_scan",
    "stagnation_region",
    "symmetric_guess",
    "track_equilibrium",
]

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-12
CLASSIFY_TOL = 1e-9


class SolverError(RuntimeError):
    """Newton iteration failed; carries the last iterate and its residual."""

    def __init__(self, message, point=None, residual=math.nan):
        super().__init__(message)
        self.point = point
        self.residual = residual


class SingularJacobianError(SolverError):
    pass


class BracketError(ValueError):
    pass


class OutOfRegimeError(ValueError):
    pass


class Stability(enum.Enum):
    STABLE_FOCUS = "stable_focus"
    UNSTABLE_FOCUS = "unstable_focus"
    STABLE_NODE = "stable_node"
    UNSTABLE_NODE = "unstable_node"
    SADDLE = "saddle"
    NON_HYPERBOLIC = "non_hyperbolic"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class JacobianMatrix:
    """Partials of ``(omega_x, omega_k)`` with respect to ``(x, k)``."""

    dxdx: float
    dxdk: float
    dkdx: float
    dkdk: float

    @property
    def trace(self):
        return self.dxdx + self.dkdk

    @property
    def det(self):
        return self.dxdx * self.dkdk - self.dxdk * self.dkdx

    @property
    def delta(self):
        return self.trace**2 - 4.0 * self.det

    def as_array(self):
        return np.array([[self.dxdx, self.dxdk], [self.dkdx, self.dkdk]])

    def scaled(self, c):
        return JacobianMatrix(c * self.dxdx, c * self.dxdk, c * self.dkdx, c * self.dkdk)


@dataclass(frozen=True)
class EquilibriumReport:
    point: PhaseState
    jacobian: JacobianMatrix
    stability: Stability
    residual: float


def _alpha(ens):
    # None stands for the classical limit alpha -> 0 (C = 1, C' = 0).
    return 0.0 if ens is None else ens.alpha


def _residual(alpha, params, x, k):
    if alpha == 0:
        return params.w - math.sin(k), -params.a2 * (params.w - math.sin(x))
    return velocity(GaussianEnsemble(alpha), params, PhaseState(x, k))


def _jacobian(alpha, params, x, k):
    sx, cx = math.sin(x), math.cos(x)
    sk, ck = math.sin(k), math.cos(k)
    a2 = params.a2
    return JacobianMatrix(
        dxdx=-sk * quantum_factor_slope(alpha, x),
        dxdk=-ck * quantum_factor(alpha, x),
        dkdx=a2 * cx * quantum_factor(alpha, k),
        dkdk=a2 * sx * quantum_factor_slope(alpha, k),
    )


def jacobian_at(
    ens: Optional[GaussianEnsemble], params: AahParams, point: PhaseState
) -> JacobianMatrix:
    """Analytic Jacobian of the Wigner velocity field (``ens=None``: classical)."""
    return _jacobian(_alpha(ens), params, point[0], point[1])


def find_equilibrium(
    ens: Optional[GaussianEnsemble],
    params: AahParams,
    guess: PhaseState,
    tol: float = RESIDUAL_TOL,
    max_iter: int = 50,
    max_halvings: int = 20,
) -> PhaseState:
    """Damped Newton iteration for ``omega_x = omega_k = 0``.

    Each full Newton step is halved (up to ``max_halvings`` times) until the
    residual 2-norm decreases.  Converged when ``max |omega| <= tol``.

    Raises
    ------
    SingularJacobianError
        If ``|det J| < 1e-14 * scale`` at an iterate.
    SolverError
        If no convergence within ``max_iter`` iterations or the line search
        cannot reduce the residual.
    """
    alpha = _alpha(ens)
    x, k = float(guess[0]), float(guess[1])
    if not (math.isfinite(x) and math.isfinite(k)):
        raise ValueError(f"guess must be finite, got {guess!r}")
    fx, fk = _residual(alpha, params, x, k)
    for _ in range(max_iter):
        if max(abs(fx), abs(fk)) <= tol:
            return PhaseState(x, k)
        jac = _jacobian(alpha, params, x, k)
        scale = max(abs(jac.dxdx), abs(jac.dxdk), abs(jac.dkdx), abs(jac.dkdk), 1.0)
        det = jac.det
        if abs(det) < 1e-14 * scale * scale:
            raise SingularJacobianError(
                f"singular Jacobian at ({x}, {k})",
                PhaseState(x, k),
                max(abs(fx), abs(fk)),
            )
        dx = -(jac.dkdk * fx - jac.dxdk * fk) / det
        dk = -(-jac.dkdx * fx + jac.dxdx * fk) / det
        norm = math.hypot(fx, fk)
        lam = 1.0
        for _ in range(max_halvings + 1):
            xn, kn = x + lam * dx, k + lam * dk
            gx, gk = _residual(alpha, params, xn, kn)
            if math.hypot(gx, gk) < norm:
                break
            lam *= 0.5
        else:
            if max(abs(fx), abs(fk)) <= 10 * tol:
                # stuck at the rounding floor just above tol
                return PhaseState(x, k)
            raise SolverError(
                f"line search failed at ({x}, {k})",
                PhaseState(x, k),
                max(abs(fx), abs(fk)),
            )
        x, k, fx, fk = xn, kn, gx, gk
    if max(abs(fx), abs(fk)) <= tol:
        return PhaseState(x, k)
    raise SolverError(
        f"Newton did not converge in {max_iter} iterations",
        PhaseState(x, k),
        max(abs(fx), abs(fk)),
    )


def classify(j: JacobianMatrix, tol: float = CLASSIFY_TOL) -> Stability:
    if not tol > 0:
        raise ValueError("classification tolerance must be positive")
    trace, det, delta = j.trace, j.det, j.delta
    if det < -tol:
        return Stability.SADDLE
    if det <= tol or abs(trace) <= tol:
        return Stability.NON_HYPERBOLIC
    focus = delta < -tol
    if trace > 0:
        return Stability.UNSTABLE_FOCUS if focus else Stability.UNSTABLE_NODE
    return Stability.STABLE_FOCUS if focus else Stability.STABLE_NODE


def equilibrium_report(
    ens: Optional[GaussianEnsemble],
    params: AahParams,
    guess: PhaseState,
    tol: float = CLASSIFY_TOL,
) -> EquilibriumReport:
    point = find_equilibrium(ens, params, guess)
    jac = jacobian_at(ens, params, point)
    fx, fk = _residual(_alpha(ens), params, *point)
    return EquilibriumReport(point, jac, classify(jac, tol), max(abs(fx), abs(fk)))


def find_equilibria(
    ens: Optional[GaussianEnsemble],
    params: AahParams,
    lattice: int = 9,
    tol: float = CLASSIFY_TOL,
):
    """Exhaustive search: seed Newton on a ``lattice x lattice`` grid covering
    the primary cell and keep the distinct roots inside ``(-pi, pi]^2``."""
    seeds = np.linspace(-math.pi, math.pi, lattice + 2)[1:-1]
    found = []
    for gx in seeds:
        for gk in seeds:
            try:
                rep = equilibrium_report(ens, params, PhaseState(gx, gk), tol)
            except SolverError:
                continue
            x, k = rep.point
            if not (-math.pi < x <= math.pi and -math.pi < k <= math.pi):
                continue
            if any(math.hypot(x - r.point.x, k - r.point.k) < 1e-8 for r in found):
                continue
            found.append(rep)
    found.sort(key=lambda r: (round(r.point.x, 10), round(r.point.k, 10)))
    return found


def symmetric_guess(w):
    t = math.asin(max(-0.99, min(0.99, w)))
    return PhaseState(t, t)


def track_equilibrium(alphas: Sequence[float], params: AahParams, seed=None):
    """Continue the symmetric equilibrium along an ascending ``alpha`` path.

    Returns the list of converged points; raises :class:`SolverError` on the
    first failure.
    """
    point = seed if seed is not None else symmetric_guess(params.w)
    out = []
    for alpha in alphas:
        ens = GaussianEnsemble(alpha) if alpha > 0 else None
        point = find_equilibrium(ens, params, point)
        out.append(point)
    return out


# -- perturbative laws -------------------------------------------------------


def perturbative_trace(ens: GaussianEnsemble, params: AahParams) -> float:
    """``Tr j ~ (alpha^4 / 3)(a^2 - 1) w arcsin(w)`` at the symmetric point."""
    if ens.alpha > 1:
        raise OutOfRegimeError(
            f"perturbative trace is only meaningful for alpha <= 1, got {ens.alpha}"
        )
    w = params.w
    return ens.alpha**4 / 3.0 * (params.a2 - 1.0) * w * math.asin(w)


def perturbative_det(ens: GaussianEnsemble, params: AahParams) -> float:
    return params.a2 * (1.0 - params.w**2 - ens.alpha**2 / 6.0)


def perturbative_shift(ens: GaussianEnsemble, params: AahParams) -> float:
    return math.asin(params.w / (1.0 - ens.alpha**2 / 12.0))


def perturbative_threshold(w: float) -> float:
    """Root of ``1 - w^2 - alpha^2 / 6`` (the O(alpha^2) determinant)."""
    return math.sqrt(6.0 * (1.0 - w * w))


class ThresholdResult(NamedTuple):
    w: float
    alpha_star: float
    alpha_star_perturbative: float
    bracket: tuple
    iterations: int


def saddle_threshold(
    params: AahParams,
    bracket=(1.5, 3.5),
    width: float = 1e-6,
    max_continuation_step: float = 0.1,
) -> ThresholdResult:
    """Bisection on ``alpha`` for the sign change of ``det j`` at the tracked
    symmetric equilibrium (focus/node -> saddle).

    The equilibrium at every bisection midpoint is seeded from the solution
    at the nearest ``alpha`` solved so far.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0 < lo < hi:
        raise BracketError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    n_cont = max(1, math.ceil((hi - lo) / max_continuation_step))
    path = list(np.linspace(lo, hi, n_cont + 1))
    solved = dict(zip(path, track_equilibrium(path, params)))

    def det_at(alpha):
        nearest = min(solved, key=lambda a: abs(a - alpha))
        point = find_equilibrium(GaussianEnsemble(alpha), params, solved[nearest])
        solved[alpha] = point
        return jacobian_at(GaussianEnsemble(alpha), params, point).det

    d_lo, d_hi = det_at(lo), det_at(hi)
    if not (d_lo > 0 > d_hi):
        raise BracketError(
            f"no focus/node -> saddle sign change in {bracket}: "
            f"det({lo})={d_lo:.6g}, det({hi})={d_hi:.6g}"
        )
    iterations = 0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if det_at(mid) > 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return ThresholdResult(
        w=params.w,
        alpha_star=0.5 * (lo + hi),
        alpha_star_perturbative=perturbative_threshold(params.w),
        bracket=(float(bracket[0]), float(bracket[1])),
        iterations=iterations,
    )


# -- scans -------------------------------------------------------------------


class ScanCell(NamedTuple):
    alpha: float
    a: float
    report: Optional[EquilibriumReport]

    @property
    def stability(self):
        return Stability.UNRESOLVED if self.report is None else self.report.stability


def _scan_row(args):
    alphas, a, w, tol = args
    params = AahParams(a=a, w=w)
    point = symmetric_guess(w)
    row = []
    for alpha in alphas:
        ens = GaussianEnsemble(alpha) if alpha > 0 else None
        try:
            rep = equilibrium_report(ens, params, point, tol)
        except SolverError as exc:
            log.debug("unresolved cell alpha=%g a=%g: %s", alpha, a, exc)
            row.append(None)
            continue
        point = rep.point
        row.append(rep)
    return row


def stability_scan(alphas, a_values, w, tol: float = CLASSIFY_TOL, workers: int = 1):
    """Classify the tracked equilibrium on an ``alpha x a`` grid.

    Each fixed-``a`` row is continued serially in ascending ``alpha``; rows
    are independent and may run in parallel.  ``alpha = 0`` cells use the
    classical field.  Returns :class:`ScanCell` entries in alpha-major order
    (``for alpha in alphas: for a in a_values``); failed cells carry
    ``report=None`` and classify as ``UNRESOLVED``.
    """
    alphas = [float(v) for v in alphas]
    a_values = [float(v) for v in a_values]
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha grid must be ascending")
    if any(b < a for a, b in zip(a_values, a_values[1:])):
        raise ValueError("a grid must be ascending")
    if any(v < 0 for v in alphas):
        raise ValueError("alpha grid must be non-negative")
    jobs = [(alphas, a, w, tol) for a in a_values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_row, jobs))
    else:
        rows = [_scan_row(job) for job in jobs]
    cells = []
    for i, alpha in enumerate(alphas):
        for j, a in enumerate(a_values):
            cells.append(ScanCell(alpha, a, rows[j][i]))
    return cells


def stagnation_region(
    ens: GaussianEnsemble, params: AahParams, xs, ks, speed_threshold: float
):
    """Boolean mask ``[i, j]`` of grid points ``(xs[i], ks[j])`` where
    ``|omega| < speed_threshold``."""
    if not speed_threshold >= 0:
        raise ValueError("speed_threshold must be non-negative")
    mask = np.zeros((len(xs), len(ks)), dtype=bool)
    for i, x in enumerate(xs):
        for j, k in enumerate(ks):
            ox, ok = velocity(ens, params, PhaseState(float(x), float(k)))
            mask[i, j] = math.hypot(ox, ok) < speed_threshold
    return mask
