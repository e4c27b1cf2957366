"""Exact Wigner flow of an origin-centred Gaussian ensemble under AAH dynamics.

The ensemble is the tau = 0 snapshot

    G(x, k) = (alpha^2 / pi) exp[-alpha^2 (x^2 + k^2)]

and all quantities below (currents, their divergences, the velocity field
``w = J / G`` and the two quantifiers) are evaluated on it.  The Moyal series
for the currents collapses to closed forms in terms of ``sinh`` and ``erf``;
:func:`series_div_currents` keeps the truncated Hermite series around as an
independent check of those closed forms.

The velocity field is written through one even kernel,

    C(z) = sqrt(pi)/(2 alpha) exp(alpha^2 z^2) [erf(alpha(z + 1/2)) - erf(alpha(z - 1/2))]
         = 1/2 int_{-1}^{1} exp(-alpha^2 s^2 / 4) cosh(alpha^2 z s) ds,

so that ``omega_x = w - sin(k) C(x)`` and ``omega_k = -a^2 [w - sin(x) C(k)]``.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from wigner_aah.model import AahParams, PhaseState
from wigner_aah.numerics import (
    DomainError,
    erf_difference,
    erfcx,
    gauss_legendre,
    hermite_table,
)

__all__ = [
    "ClosureSpec",
    "FlowSample",
    "GaussianEnsemble",
    "SeriesDivergenceWarning",
    "SeriesResult",
    "aah_closure",
    "current_jk",
    "current_jx",
    "div_jk",
    "div_jx",
    "flow_grid",
    "flow_sample",
    "gaussian_value",
    "liouvillianity",
    "liouvillianity_quotient",
    "purity",
    "quantum_factor",
    "quantum_factor_slope",
    "series_div_currents",
    "stationarity",
    "velocity",
]

SQRT_PI = math.sqrt(math.pi)
# exp(-700) ~ 1e-304: below this the density is numerically zero and w = J/G
# stops being meaningful.
UNDERFLOW_EXPONENT = 700.0
MAX_SERIES_ORDER = 64

_GL_NODES, _GL_WEIGHTS = gauss_legendre(24)


@dataclass(frozen=True)
class GaussianEnsemble:
    """Origin-centred Gaussian Wigner function with localization ``alpha``.

    The purity of this state is ``alpha**2``; for ``alpha > 1`` it exceeds the
    pure-state bound and the Gaussian is only a localization model, which
    :attr:`exceeds_pure_bound` flags.
    """

    alpha: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")

    @property
    def exceeds_pure_bound(self):
        return self.alpha > 1.0


@dataclass(frozen=True)
class FlowSample:
    density: float
    j_x: float
    j_k: float
    div_j: float
    div_w: float


def gaussian_value(ens: GaussianEnsemble, s: PhaseState) -> float:
    x, k = s
    b = ens.alpha * ens.alpha
    return b / math.pi * math.exp(-b * (x * x + k * k))


def purity(ens: GaussianEnsemble) -> float:
    """``2 pi * integral of G^2``, which is ``alpha^2`` in closed form."""
    return ens.alpha * ens.alpha


# -- the velocity kernel -----------------------------------------------------


def quantum_factor(alpha, zeta):
    """The even kernel ``C(zeta)``; equals 1 in the classical limit alpha -> 0.

    Three evaluation routes, chosen so none of them cancels or overflows:
    Gauss-Legendre on the integral form for small ``alpha``, the plain erf
    difference near the origin, and an ``erfcx`` recombination with shifted
    exponents ``exp(alpha^2 (z -+ 1/4))`` in the tails.
    """
    if alpha == 0:
        return 1.0
    z = abs(zeta)
    b = alpha * alpha
    if alpha < 0.25 and b * z <= 8.0:
        acc = 0.0
        for s, wt in zip(_GL_NODES, _GL_WEIGHTS):
            acc += wt * math.exp(-0.25 * b * s * s) * math.cosh(b * z * s)
        return 0.5 * acc
    u = alpha * (z + 0.5)
    v = alpha * (z - 0.5)
    pref = SQRT_PI / (2.0 * alpha)
    try:
        if v > 0.5:
            return pref * (
                erfcx(v) * math.exp(b * (z - 0.25)) - erfcx(u) * math.exp(-b * (z + 0.25))
            )
        return pref * math.exp(b * z * z) * erf_difference(u, v)
    except OverflowError:
        raise DomainError(
            f"velocity kernel overflows at alpha={alpha}, zeta={zeta}"
        ) from None


def quantum_factor_slope(alpha, zeta):
    """``dC/dzeta = 2 alpha^2 zeta C(zeta) - 2 exp(-alpha^2/4) sinh(alpha^2 zeta)``."""
    if alpha == 0 or zeta == 0:
        return 0.0
    z = abs(zeta)
    b = alpha * alpha
    if alpha < 0.25 and b * z <= 8.0:
        acc = 0.0
        for s, wt in zip(_GL_NODES, _GL_WEIGHTS):
            acc += wt * s * math.exp(-0.25 * b * s * s) * math.sinh(b * z * s)
        slope = 0.5 * b * acc
    else:
        try:
            slope = 2.0 * b * z * quantum_factor(alpha, z) - 2.0 * math.exp(
                -0.25 * b
            ) * math.sinh(b * z)
        except OverflowError:
            raise DomainError(
                f"velocity kernel slope overflows at alpha={alpha}, zeta={zeta}"
            ) from None
    return slope if zeta > 0 else -slope


# -- closed forms ------------------------------------------------------------


def div_jx(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> float:
    x, k = s
    b = ens.alpha * ens.alpha
    bracket = params.w * b * x - math.sin(k) * math.sinh(b * x) * math.exp(-0.25 * b)
    return -2.0 * bracket * gaussian_value(ens, s)


def div_jk(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> float:
    x, k = s
    b = ens.alpha * ens.alpha
    bracket = params.w * b * k - math.sin(x) * math.sinh(b * k) * math.exp(-0.25 * b)
    return 2.0 * params.a2 * bracket * gaussian_value(ens, s)


def _erf_current_term(alpha, along, across):
    # (alpha / 2 sqrt(pi)) sin(across) exp(-alpha^2 across^2)
    #   * [erf(alpha(along - 1/2)) - erf(alpha(along + 1/2))]
    diff = erf_difference(alpha * (along + 0.5), alpha * (along - 0.5))
    return (
        -alpha / (2.0 * SQRT_PI)
        * math.sin(across)
        * math.exp(-alpha * alpha * across * across)
        * diff
    )


def current_jx(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> float:
    x, k = s
    return params.w * gaussian_value(ens, s) + _erf_current_term(ens.alpha, x, k)


def current_jk(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> float:
    x, k = s
    return -params.a2 * (
        params.w * gaussian_value(ens, s) + _erf_current_term(ens.alpha, k, x)
    )


def velocity(ens: GaussianEnsemble, params: AahParams, s: PhaseState):
    """Wigner phase-space velocity ``(J_x / G, J_k / G)``."""
    x, k = s
    alpha = ens.alpha
    w = params.w
    return (
        w - math.sin(k) * quantum_factor(alpha, x),
        -params.a2 * (w - math.sin(x) * quantum_factor(alpha, k)),
    )


def stationarity(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> float:
    """Divergence of the Wigner current, i.e. ``-dG/dtau`` at the snapshot."""
    return div_jx(ens, params, s) + div_jk(ens, params, s)


def _check_density_domain(ens, s):
    x, k = s
    if ens.alpha * ens.alpha * (x * x + k * k) > UNDERFLOW_EXPONENT:
        raise DomainError(
            f"density underflows at {tuple(s)} for alpha={ens.alpha}; "
            "the Liouvillianity quantifier is undefined there"
        )


def liouvillianity(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> float:
    """Divergence of the Wigner velocity field; zero for Liouville flow."""
    _check_density_domain(ens, s)
    x, k = s
    alpha = ens.alpha
    return -math.sin(k) * quantum_factor_slope(alpha, x) + params.a2 * math.sin(
        x
    ) * quantum_factor_slope(alpha, k)


def liouvillianity_quotient(
    ens: GaussianEnsemble, params: AahParams, s: PhaseState
) -> float:
    """Same quantity from ``(G div J - J . grad G) / G^2`` and the currents."""
    _check_density_domain(ens, s)
    x, k = s
    g = gaussian_value(ens, s)
    b = ens.alpha * ens.alpha
    jx = current_jx(ens, params, s)
    jk = current_jk(ens, params, s)
    return stationarity(ens, params, s) / g + 2.0 * b * (x * jx + k * jk) / g


def flow_sample(ens: GaussianEnsemble, params: AahParams, s: PhaseState) -> FlowSample:
    """All flow quantities at one point; ``div_w`` is NaN where G underflows."""
    try:
        div_w = liouvillianity(ens, params, s)
    except DomainError:
        div_w = math.nan
    return FlowSample(
        density=gaussian_value(ens, s),
        j_x=current_jx(ens, params, s),
        j_k=current_jk(ens, params, s),
        div_j=stationarity(ens, params, s),
        div_w=div_w,
    )


def flow_grid(ens: GaussianEnsemble, params: AahParams, xs, ks):
    """Evaluate :func:`flow_sample` on the tensor grid ``xs x ks``.

    Returns a dict of ``(len(xs), len(ks))`` arrays keyed by the
    :class:`FlowSample` field names plus ``omega_x`` / ``omega_k``.
    Entry ``[i, j]`` belongs to ``(xs[i], ks[j])``.
    """
    shape = (len(xs), len(ks))
    keys = ("density", "j_x", "j_k", "div_j", "div_w", "omega_x", "omega_k")
    out = {key: np.empty(shape) for key in keys}
    for i, x in enumerate(xs):
        for j, k in enumerate(ks):
            s = PhaseState(float(x), float(k))
            sample = flow_sample(ens, params, s)
            out["density"][i, j] = sample.density
            out["j_x"][i, j] = sample.j_x
            out["j_k"][i, j] = sample.j_k
            out["div_j"][i, j] = sample.div_j
            out["div_w"][i, j] = sample.div_w
            try:
                out["omega_x"][i, j], out["omega_k"][i, j] = velocity(ens, params, s)
            except DomainError:
                out["omega_x"][i, j] = out["omega_k"][i, j] = math.nan
    return out


# -- Hermite series oracle ---------------------------------------------------


class SeriesDivergenceWarning(RuntimeWarning):
    """The truncated series was still growing at its last retained order."""


@dataclass(frozen=True)
class ClosureSpec:
    """Derivative closure for ``H = K(k) + V(x)``.

    The odd derivatives are assumed to take the form

        d^(2n+1) V / dx^(2n+1) = sigma_n lam(x)^(2n+1) upsilon(x) + [n == 0] x_drift
        d^(2n+1) K / dk^(2n+1) = sigma_n mu(k)^(2n+1) kappa(k)    + [n == 0] k_drift

    with ``sigma_n = (-1)^n`` for trigonometric potentials (where the complex
    closure has an imaginary rate) and ``sigma_n = 1`` otherwise.  The drift
    terms carry linear parts of the Hamiltonian, which only reach first order.
    """

    upsilon: Callable[[float], float]
    lam: Callable[[float], float]
    kappa: Callable[[float], float]
    mu: Callable[[float], float]
    truncation_order: int = 32
    trigonometric: bool = False
    x_drift: float = 0.0
    k_drift: float = 0.0

    def __post_init__(self):
        if not 0 <= self.truncation_order <= MAX_SERIES_ORDER:
            raise ValueError(
                f"truncation_order must lie in [0, {MAX_SERIES_ORDER}], "
                f"got {self.truncation_order}"
            )

    def odd_derivatives_v(self, x):
        return self._odd(self.upsilon(x), self.lam(x), self.x_drift)

    def odd_derivatives_k(self, k):
        return self._odd(self.kappa(k), self.mu(k), self.k_drift)

    def _odd(self, amp, rate, drift):
        out = []
        r2 = rate * rate
        term = rate * amp
        for n in range(self.truncation_order + 1):
            out.append(term + drift if n == 0 else term)
            term *= -r2 if self.trigonometric else r2
        return out


def aah_closure(params: AahParams, truncation_order: int = 32) -> ClosureSpec:
    """Closure of ``K = w k + cos k`` and ``V = a^2 (w x + cos x)``."""
    a2 = params.a2
    return ClosureSpec(
        upsilon=lambda x: -a2 * math.sin(x),
        lam=lambda x: 1.0,
        kappa=lambda k: -math.sin(k),
        mu=lambda k: 1.0,
        truncation_order=truncation_order,
        trigonometric=True,
        x_drift=a2 * params.w,
        k_drift=params.w,
    )


class SeriesResult(NamedTuple):
    div_jx: float
    div_jk: float
    converged: bool


def _hermite_sum(alpha, derivs, y):
    # sum_n (-1)^n (alpha/2)^(2n+1) / (2n+1)! * D_n * h_(2n+1)(y)
    n_max = len(derivs) - 1
    h = hermite_table(2 * n_max + 1, y)
    coef = 0.5 * alpha
    step = coef * coef
    total = 0.0
    terms = []
    for n, d in enumerate(derivs):
        t = coef * d * h[2 * n + 1]
        if n % 2:
            t = -t
        terms.append(t)
        total += t
        coef *= step / ((2 * n + 2) * (2 * n + 3))
    converged = True
    if len(terms) >= 2:
        last, prev = abs(terms[-1]), abs(terms[-2])
        if last > prev and last > 1e-15 * abs(total):
            converged = False
    return total, converged


def series_div_currents(
    ens: GaussianEnsemble, closure: ClosureSpec, s: PhaseState
) -> SeriesResult:
    """Truncated Hermite series for ``(dJ_x/dx, dJ_k/dk)``.

    Uses ``d^(2n+1) G / dz^(2n+1) = -alpha^(2n+1) h_(2n+1)(alpha z) G`` in the
    Moyal expansion.  Order 0 is the classical (Liouville) result; each higher
    order adds one quantum correction.  A :class:`SeriesDivergenceWarning` is
    emitted (and ``converged`` is False) when the last retained term still
    grows.
    """
    x, k = s
    alpha = ens.alpha
    g = gaussian_value(ens, s)
    sum_x, ok_x = _hermite_sum(alpha, closure.odd_derivatives_k(k), alpha * x)
    sum_k, ok_k = _hermite_sum(alpha, closure.odd_derivatives_v(x), alpha * k)
    converged = ok_x and ok_k
    if not converged:
        warnings.warn(
            f"Hermite series not converged at order {closure.truncation_order} "
            f"for point {tuple(s)}",
            SeriesDivergenceWarning,
            stacklevel=2,
        )
    return SeriesResult(-2.0 * g * sum_x, 2.0 * g * sum_k, converged)
