"""Numerical primitives shared by the rest of the package.

Everything here is a pure function of its inputs.  Scalars go through the
``math`` module (the hot loops in :mod:`wigner_aah.dynamics` call these a few
million times); arrays are dispatched to :mod:`scipy.special`.
"""

import math
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import integrate, special

__all__ = [
    "DomainError",
    "IntegrationError",
    "OdeField",
    "erf",
    "erfc",
    "erfcx",
    "erf_difference",
    "hermite",
    "hermite_table",
    "rk4_integrate",
    "trapezoid_2d",
    "gauss_legendre",
]

OdeField = Callable[[float, float], Tuple[float, float]]


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined or computable."""


class IntegrationError(RuntimeError):
    """A trajectory left the finite floating point range."""

    def __init__(self, step_index, state):
        self.step_index = step_index
        self.state = state
        super().__init__(
            f"non-finite field value at step {step_index} (state={state!r})"
        )


def _check_finite(z, name):
    if np.ndim(z) == 0:
        if not math.isfinite(z):
            raise DomainError(f"{name}: argument must be finite, got {z!r}")
    elif not np.all(np.isfinite(z)):
        raise DomainError(f"{name}: argument must be finite")


def erf(z):
    """Gauss error function for a real scalar or array."""
    _check_finite(z, "erf")
    if np.ndim(z) == 0:
        return math.erf(z)
    return special.erf(np.asarray(z, dtype=float))


def erfc(z):
    """Complementary error function ``1 - erf(z)``, accurate in the tail."""
    _check_finite(z, "erfc")
    if np.ndim(z) == 0:
        return math.erfc(z)
    return special.erfc(np.asarray(z, dtype=float))


def erfcx(z):
    """Scaled complementary error function ``exp(z**2) * erfc(z)``.

    For negative arguments the value grows like ``2 exp(z**2)`` and overflows
    past ``z ~ -26.6``; for positive ``z`` it decays like ``1/(z sqrt(pi))``
    and never underflows.
    """
    _check_finite(z, "erfcx")
    if np.ndim(z) == 0:
        return float(special.erfcx(z))
    return special.erfcx(np.asarray(z, dtype=float))


def erf_difference(u, v):
    """``erf(u) - erf(v)`` without cancellation when both lie in one tail."""
    if v > 0.5:
        return math.erfc(v) - math.erfc(u)
    if u < -0.5:
        return math.erfc(-u) - math.erfc(-v)
    return math.erf(u) - math.erf(v)


def hermite(n, y):
    """Physicists' Hermite polynomial ``h_n(y)`` by three-term recurrence.

    Works for scalar or array ``y``.
    """
    if n < 0:
        raise ValueError(f"hermite order must be non-negative, got {n}")
    h_prev = np.ones_like(y, dtype=float) if np.ndim(y) else 1.0
    if n == 0:
        return h_prev
    h = 2.0 * y
    for m in range(1, n):
        h_prev, h = h, 2.0 * y * h - 2.0 * m * h_prev
    return h


def hermite_table(n_max, y):
    """Return ``[h_0(y), ..., h_{n_max}(y)]`` for a scalar ``y``."""
    table = [1.0]
    if n_max >= 1:
        table.append(2.0 * y)
    for m in range(1, n_max):
        table.append(2.0 * y * table[m] - 2.0 * m * table[m - 1])
    return table


def rk4_integrate(field: OdeField, start: Sequence[float], step: float, n_steps: int):
    """Classic fixed-step fourth order Runge-Kutta.

    Parameters
    ----------
    field : callable
        ``field(x, k) -> (rate_x, rate_k)``.
    start : pair of float
        Initial ``(x, k)``.
    step : float
        Step size in units of dimensionless time.
    n_steps : int
        Number of steps.

    Returns
    -------
    ndarray, shape (n_steps + 1, 2)
        The trajectory, starting state included.

    Raises
    ------
    IntegrationError
        If the field or the state stops being finite.
    """
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {n_steps}")

    x, k = float(start[0]), float(start[1])
    out = np.empty((n_steps + 1, 2))
    out[0] = x, k
    half = 0.5 * step
    sixth = step / 6.0
    isfinite = math.isfinite
    for i in range(1, n_steps + 1):
        a1, b1 = field(x, k)
        a2, b2 = field(x + half * a1, k + half * b1)
        a3, b3 = field(x + half * a2, k + half * b2)
        a4, b4 = field(x + step * a3, k + step * b3)
        x += sixth * (a1 + 2.0 * (a2 + a3) + a4)
        k += sixth * (b1 + 2.0 * (b2 + b3) + b4)
        if not (isfinite(x) and isfinite(k)):
            raise IntegrationError(i, (x, k))
        out[i, 0] = x
        out[i, 1] = k
    return out


def trapezoid_2d(f, x_range, k_range, nx, nk):
    """Composite trapezoid rule for a double integral on a rectangle.

    ``f`` is called once with broadcastable ``(X, K)`` arrays of shape
    ``(nx, nk)``; wrap scalar-only callables in :func:`numpy.vectorize`.
    """
    if nx < 2 or nk < 2:
        raise ValueError("trapezoid_2d needs at least two nodes per axis")
    xs = np.linspace(x_range[0], x_range[1], nx)
    ks = np.linspace(k_range[0], k_range[1], nk)
    X, K = np.meshgrid(xs, ks, indexing="ij")
    values = np.broadcast_to(np.asarray(f(X, K), dtype=float), X.shape)
    return float(integrate.trapezoid(integrate.trapezoid(values, ks, axis=1), xs))


_GL_CACHE = {}


def gauss_legendre(n):
    """Gauss-Legendre nodes and weights on [-1, 1] as plain float lists."""
    if n not in _GL_CACHE:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (nodes.tolist(), weights.tolist())
    return _GL_CACHE[n]
