import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from wigner_aah.equilibrium import (
    BracketError,
    JacobianMatrix,
    OutOfRegimeError,
    SingularJacobianError,
    SolverError,
    Stability,
    classify,
    equilibrium_report,
    find_equilibria,
    find_equilibrium,
    jacobian_at,
    perturbative_det,
    perturbative_shift,
    perturbative_threshold,
    perturbative_trace,
    saddle_threshold,
    stability_scan,
    stagnation_region,
    symmetric_guess,
    track_equilibrium,
)
from wigner_aah.model import AahParams, PhaseState
from wigner_aah.wigner import GaussianEnsemble, quantum_factor, velocity


def test_classical_equilibrium_is_arcsin():
    p = AahParams(a=1.0, w=0.4)
    pt = find_equilibrium(None, p, PhaseState(0.2, 0.6))
    assert pt.x == pytest.approx(math.asin(0.4), abs=1e-12)
    assert pt.k == pytest.approx(math.asin(0.4), abs=1e-12)


def test_quantum_equilibrium_solves_kernel_equation():
    ens, p = GaussianEnsemble(0.8), AahParams(a=1.1, w=0.4)
    pt = find_equilibrium(ens, p, symmetric_guess(0.4))
    assert pt.x == pt.k
    assert math.sin(pt.x) * quantum_factor(0.8, pt.x) == pytest.approx(0.4, abs=1e-12)


def test_equilibrium_independent_of_anisotropy():
    ens = GaussianEnsemble(0.6)
    pts = [find_equilibrium(ens, AahParams(a=a, w=0.3), symmetric_guess(0.3)) for a in (0.7, 1.0, 1.4)]
    for pt in pts[1:]:
        assert pt.x == pytest.approx(pts[0].x, abs=1e-12)


def test_no_classical_equilibrium_for_large_drift():
    with pytest.raises(SolverError):
        find_equilibrium(None, AahParams(w=1.5), PhaseState(1.0, 1.0))


def test_quantum_roots_exist_off_cell_for_large_drift():
    # C grows with |zeta|, so sin(x) C(x) = w has far-away roots even for w > 1
    pt = find_equilibrium(GaussianEnsemble(0.5), AahParams(w=1.5), PhaseState(1.0, 1.0))
    assert abs(pt.x) > math.pi


def test_singular_jacobian_detected():
    with pytest.raises(SingularJacobianError) as info:
        find_equilibrium(None, AahParams(w=0.4), PhaseState(math.pi / 2, math.pi / 2))
    assert info.value.residual > 0


def test_non_finite_guess_rejected():
    with pytest.raises(ValueError):
        find_equilibrium(None, AahParams(), PhaseState(math.nan, 0.0))


def test_jacobian_matches_finite_difference():
    ens, p = GaussianEnsemble(1.3), AahParams(a=0.9, w=0.2)
    s = PhaseState(0.4, -0.8)
    j = jacobian_at(ens, p, s)
    h = 1e-6
    vxp, vxm = velocity(ens, p, (s.x + h, s.k)), velocity(ens, p, (s.x - h, s.k))
    vkp, vkm = velocity(ens, p, (s.x, s.k + h)), velocity(ens, p, (s.x, s.k - h))
    fd = np.array([
        [(vxp[0] - vxm[0]) / (2 * h), (vkp[0] - vkm[0]) / (2 * h)],
        [(vxp[1] - vxm[1]) / (2 * h), (vkp[1] - vkm[1]) / (2 * h)],
    ])
    np.testing.assert_allclose(j.as_array(), fd, atol=1e-8)


@pytest.mark.parametrize(
    "j,expected",
    [
        (JacobianMatrix(0.1, -1.0, 1.0, 0.1), Stability.UNSTABLE_FOCUS),
        (JacobianMatrix(-0.1, -1.0, 1.0, -0.1), Stability.STABLE_FOCUS),
        (JacobianMatrix(2.0, 0.0, 0.0, 3.0), Stability.UNSTABLE_NODE),
        (JacobianMatrix(-2.0, 0.0, 0.0, -3.0), Stability.STABLE_NODE),
        (JacobianMatrix(1.0, 0.0, 0.0, -1.0), Stability.SADDLE),
        (JacobianMatrix(0.0, -1.0, 1.0, 0.0), Stability.NON_HYPERBOLIC),
        (JacobianMatrix(1.0, 0.0, 0.0, 0.0), Stability.NON_HYPERBOLIC),
    ],
)
def test_classify_canonical_matrices(j, expected):
    assert classify(j) is expected


def test_classify_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        classify(JacobianMatrix(1, 0, 0, 1), tol=0.0)


entries = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(entries, entries, entries, entries, st.floats(0.1, 10))
def test_classification_invariant_under_positive_scaling(a, b, c, d, scale):
    j = JacobianMatrix(a, b, c, d)
    # stay clear of the class boundaries so tolerances do not matter
    assume(abs(j.det) > 1e-3 and abs(j.trace) > 1e-3 and abs(j.delta) > 1e-3)
    assert classify(j.scaled(scale)) is classify(j)


@settings(max_examples=100, deadline=None)
@given(entries, entries, entries, entries)
def test_classification_time_reversal(a, b, c, d):
    j = JacobianMatrix(a, b, c, d)
    assume(abs(j.det) > 1e-3 and abs(j.trace) > 1e-3 and abs(j.delta) > 1e-3)
    flip = {
        Stability.STABLE_FOCUS: Stability.UNSTABLE_FOCUS,
        Stability.UNSTABLE_FOCUS: Stability.STABLE_FOCUS,
        Stability.STABLE_NODE: Stability.UNSTABLE_NODE,
        Stability.UNSTABLE_NODE: Stability.STABLE_NODE,
        Stability.SADDLE: Stability.SADDLE,
    }
    assert classify(j.scaled(-1.0)) is flip[classify(j)]


def test_report_fields():
    rep = equilibrium_report(GaussianEnsemble(0.5), AahParams(a=1.2, w=0.4), symmetric_guess(0.4))
    assert rep.residual <= 1e-12
    assert rep.stability is Stability.UNSTABLE_FOCUS
    assert rep.jacobian.trace > 0


def test_exhaustive_search_finds_symmetric_pair_and_saddles():
    reps = find_equilibria(GaussianEnsemble(0.5), AahParams(a=1.0, w=0.4))
    assert len(reps) == 4
    diag = [r for r in reps if abs(r.point.x - r.point.k) < 1e-10]
    assert len(diag) == 2
    assert sum(r.stability is Stability.SADDLE for r in reps) == 2


@pytest.mark.parametrize("alpha", [0.1, 0.2])
def test_shift_law(alpha):
    ens, p = GaussianEnsemble(alpha), AahParams(w=0.4)
    pt = find_equilibrium(ens, p, symmetric_guess(0.4))
    assert pt.x == pytest.approx(perturbative_shift(ens, p), abs=1e-4)


@pytest.mark.parametrize("alpha", [0.1, 0.3])
@pytest.mark.parametrize("a", [0.8, 1.2])
def test_det_and_trace_laws(alpha, a):
    ens, p = GaussianEnsemble(alpha), AahParams(a=a, w=0.4)
    j = jacobian_at(ens, p, find_equilibrium(ens, p, symmetric_guess(0.4)))
    assert abs(j.det - perturbative_det(ens, p)) <= 2 * alpha**4
    assert abs(j.trace - perturbative_trace(ens, p)) <= 5 * alpha**6


def test_perturbative_trace_regime():
    with pytest.raises(OutOfRegimeError):
        perturbative_trace(GaussianEnsemble(1.5), AahParams())


def test_track_equilibrium_continuous():
    pts = track_equilibrium(np.linspace(0.1, 3.0, 30), AahParams(w=0.4))
    xs = [p.x for p in pts]
    assert max(abs(b - a) for a, b in zip(xs, xs[1:])) < 0.05


def test_saddle_threshold_w04():
    res = saddle_threshold(AahParams(w=0.4))
    assert 2.29 <= res.alpha_star <= 2.59
    assert res.alpha_star_perturbative == pytest.approx(math.sqrt(6 * 0.84))
    assert res.bracket == (1.5, 3.5)
    ens = GaussianEnsemble(res.alpha_star - 1e-4)
    p = AahParams(w=0.4)
    assert jacobian_at(ens, p, find_equilibrium(ens, p, symmetric_guess(0.4))).det > 0


def test_threshold_decreases_with_drift():
    t04 = saddle_threshold(AahParams(w=0.4)).alpha_star
    t099 = saddle_threshold(AahParams(w=0.99), bracket=(0.5, 3.5)).alpha_star
    assert t099 < t04
    assert perturbative_threshold(0.99) < perturbative_threshold(0.4)


def test_threshold_bracket_errors():
    with pytest.raises(BracketError):
        saddle_threshold(AahParams(w=0.4), bracket=(0.5, 1.0))
    with pytest.raises(BracketError):
        saddle_threshold(AahParams(w=0.4), bracket=(2.0, 1.0))


def test_scan_order_and_classical_row():
    alphas, a_values = [0.0, 1.0, 3.0], [0.8, 1.0, 1.2]
    cells = stability_scan(alphas, a_values, 0.4)
    assert [(c.alpha, c.a) for c in cells] == [(al, a) for al in alphas for a in a_values]
    assert all(c.stability is Stability.NON_HYPERBOLIC for c in cells[:3])
    assert [c.stability for c in cells[3:6]] == [
        Stability.STABLE_FOCUS, Stability.NON_HYPERBOLIC, Stability.UNSTABLE_FOCUS
    ]
    assert all(c.stability is Stability.SADDLE for c in cells[6:])


def test_scan_parallel_matches_serial():
    args = ([0.5, 1.5, 2.5], [0.9, 1.1], 0.4)
    assert stability_scan(*args, workers=2) == stability_scan(*args, workers=1)


def test_scan_unresolved_cells():
    cells = stability_scan([0.0], [0.9, 1.0], 1.5)
    assert all(c.stability is Stability.UNRESOLVED and c.report is None for c in cells)


def test_scan_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        stability_scan([1.0, 0.5], [1.0], 0.4)


def test_stagnation_region_contains_equilibrium():
    ens, p = GaussianEnsemble(0.5), AahParams(w=0.4)
    eq = find_equilibrium(ens, p, symmetric_guess(0.4))
    xs = np.array([eq.x, eq.x + 1.0])
    mask = stagnation_region(ens, p, xs, np.array([eq.k]), 1e-6)
    assert mask.tolist() == [[True], [False]]
    with pytest.raises(ValueError):
        stagnation_region(ens, p, xs, xs, -1.0)
