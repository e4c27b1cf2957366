"""Classical and quantum-distorted trajectories, and envelope verdicts.

Quantum trajectories follow the Wigner velocity field ``J / G`` of a fixed
Gaussian snapshot; classical ones follow Hamilton's equations.
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from wigner_aah.model import AahParams, PhaseState, aah_energy
from wigner_aah.numerics import rk4_integrate
from wigner_aah.wigner import GaussianEnsemble, quantum_factor

__all__ = [
    "DEFAULT_HORIZON",
    "DEFAULT_STEP",
    "ENVELOPE_MARGIN",
    "EnvelopeVerdict",
    "FieldKind",
    "InsufficientDataError",
    "Trajectory",
    "Trend",
    "envelope",
    "field_for",
    "integrate",
]

DEFAULT_STEP = 1e-3
DEFAULT_HORIZON = 200.0
ENVELOPE_MARGIN = 0.05


class FieldKind(enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


class Trend(enum.Enum):
    GROWING = "growing"
    DECAYING = "decaying"
    BOUNDED = "bounded"


class InsufficientDataError(ValueError):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n, 2), columns x, k
    field_kind: FieldKind
    step: float

    def __len__(self):
        return len(self.times)

    def energies(self, params: AahParams):
        return np.array([aah_energy(params, PhaseState(x, k)) for x, k in self.states])


@dataclass(frozen=True)
class EnvelopeVerdict:
    trend: Trend
    ratio: float


def field_for(kind: FieldKind, ens: Optional[GaussianEnsemble], params: AahParams):
    """Return a fast ``(x, k) -> (rate_x, rate_k)`` closure."""
    w, a2 = params.w, params.a2
    sin = math.sin
    if kind is FieldKind.CLASSICAL:

        def classical(x, k):
            return w - sin(k), -a2 * (w - sin(x))

        return classical
    if ens is None:
        raise ValueError("quantum trajectories need a GaussianEnsemble")
    alpha = ens.alpha

    def quantum(x, k):
        return (
            w - sin(k) * quantum_factor(alpha, x),
            -a2 * (w - sin(x) * quantum_factor(alpha, k)),
        )

    return quantum


def integrate(
    field_kind: FieldKind,
    ens: Optional[GaussianEnsemble],
    params: AahParams,
    start: PhaseState,
    step: float = DEFAULT_STEP,
    horizon: float = DEFAULT_HORIZON,
) -> Trajectory:
    """RK4 trajectory over ``[0, horizon]``; ``ens`` is ignored for classical runs."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if not horizon >= step:
        raise ValueError(f"horizon must be at least one step, got {horizon}")
    n_steps = int(round(horizon / step))
    states = rk4_integrate(field_for(field_kind, ens, params), start, step, n_steps)
    times = step * np.arange(n_steps + 1)
    return Trajectory(times, states, field_kind, step)


def _peaks(r):
    inner = r[1:-1]
    idx = np.nonzero((inner > r[:-2]) & (inner > r[2:]))[0] + 1
    return idx


def envelope(
    traj: Trajectory, center: PhaseState, margin: float = ENVELOPE_MARGIN
) -> EnvelopeVerdict:
    """Compare oscillation amplitude late vs early in a trajectory.

    Amplitude is the distance ``|state - center|``; its strict local maxima on
    the sampled series are the peaks.  The ratio is the largest peak in the
    last quarter over the largest peak in the first quarter.
    """
    r = np.hypot(traj.states[:, 0] - center[0], traj.states[:, 1] - center[1])
    peaks = _peaks(r)
    if len(peaks) < 4:
        raise InsufficientDataError(
            f"need at least 4 amplitude peaks, found {len(peaks)}; extend the horizon"
        )
    n = len(r)
    early = peaks[peaks < n // 4]
    late = peaks[peaks >= n - n // 4]
    if len(early) == 0 or len(late) == 0:
        raise InsufficientDataError("no amplitude peak in the first or last quarter")
    ratio = float(r[late].max() / r[early].max())
    if ratio > 1.0 + margin:
        trend = Trend.GROWING
    elif ratio < 1.0 - margin:
        trend = Trend.DECAYING
    else:
        trend = Trend.BOUNDED
    return EnvelopeVerdict(trend, ratio)
