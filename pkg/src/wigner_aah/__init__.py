"""Phase-space Wigner flow for Gaussian ensembles driven by the
Aubry-Andre-Harper Hamiltonian.

The subpackages are layered bottom-up::

    numerics     special functions, Hermite recurrence, RK4, quadrature
    model        dimensionless AAH Hamiltonian and its classical flow
    wigner       exact Wigner currents, velocity field and quantifiers
    equilibrium  stagnation points, Jacobians, hyperbolic classification
    dynamics     classical / quantum trajectories and envelope verdicts
    cli          command line front end
"""

from wigner_aah.model import AahParams, EnergyClass, PhaseState
from wigner_aah.wigner import FlowSample, GaussianEnsemble

__version__ = "0.1.0"

__all__ = [
    "AahParams",
    "EnergyClass",
    "FlowSample",
    "GaussianEnsemble",
    "PhaseState",
    "__version__",
]
