"""Self-consistent linewidth / line-shift solver."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from collamb.model import ModelParams
from collamb.solver import (
    ConvergenceError,
    SolverConfig,
    effective_wavenumber,
    residual,
    solve,
    sweep_density,
    sweep_detuning,
    weak_drive_source,
)
from collamb.validation import bisection_gamma


def params(coop, det=0.0):
    return ModelParams(cooperativity=coop, detuning=det, rabi=1e-3)


# ---------------------------------------------------------------- source term


def test_source_vanishes_without_medium():
    assert weak_drive_source(1.0, 0.3, 0.0) == 0.0


def test_source_on_resonance_is_negative_imaginary():
    # 2*1 / (0 + 1i) = -2i
    assert_allclose(weak_drive_source(1.0, 0.0, 1.0), -2.0j, rtol=0, atol=1e-15)


def test_source_off_resonance():
    # 2*0.5 / (2*0.5 + 1i) = 1/(1+1i) ... with C=1, det=0.5: 2/(1+1i) = 1-1i
    assert_allclose(weak_drive_source(1.0, 0.5, 1.0), 1.0 - 1.0j, rtol=1e-15)


def test_source_singular_denominator_raises():
    with pytest.raises(ValueError, match="singular source"):
        weak_drive_source(0.0, 0.0, 1.0)


# ---------------------------------------------------------- principal branch


def test_wavenumber_trivial_values():
    assert effective_wavenumber(0.0) == 1.0
    assert_allclose(effective_wavenumber(3.0), 2.0, rtol=1e-15)


def test_wavenumber_resonant_source():
    s = effective_wavenumber(-2.0j)
    assert_allclose(s.real, 1.272019649514069, rtol=1e-14)
    assert_allclose(s.imag, -0.7861513777574233, rtol=1e-14)


def test_wavenumber_degenerate_ray_picks_decaying_sign():
    # 1 + u = -1 lies on the branch cut; Re root is 0, Im must be <= 0.
    s = effective_wavenumber(-2.0)
    assert s.real == 0.0
    assert s.imag == -1.0


# ------------------------------------------------------------------ residual


def test_residual_exact_zero_without_medium():
    assert residual(1.0, 0.0, params(0.0)) == 0.0


def test_residual_of_bare_guess_on_resonance():
    # plugging the free-space linewidth into the C=1 equation leaves -2i
    res = residual(1.0, 0.0, params(1.0))
    assert_allclose(res, -2.0j, rtol=0, atol=1e-15)
    assert_allclose(abs(res), 2.0, rtol=1e-15)


def test_residual_of_converged_solution_is_tiny():
    p = params(1.7, -0.3)
    sol = solve(p)
    assert abs(residual(sol.gamma11, sol.delta11p, p)) < 1e-12


# ----------------------------------------------------------------- solutions


def test_free_space_solution_is_exact():
    sol = solve(params(0.0))
    assert sol.gamma11 == 1.0
    assert sol.delta11p == 0.0
    assert sol.converged
    assert sol.branch == "principal"


def test_dilute_limit_linear_shift():
    # delta' ~ C/2 for small C, linewidth stays near one
    sol = solve(params(0.01))
    assert abs(sol.delta11p - 0.005) < 1e-5
    assert abs(sol.gamma11 - 1.0) < 1e-4


def test_exact_anchor_resonant_c2():
    sol = solve(params(2.0, 0.0))
    assert_allclose(sol.gamma11, math.sqrt(2.0), rtol=1e-12)
    assert_allclose(sol.delta11p, 0.5, rtol=1e-12)


def test_exact_anchor_off_resonance():
    # C = 0.8, det = -0.4 closes at (0.6, 0.4)
    sol = solve(params(0.8, -0.4))
    assert_allclose(sol.gamma11, 0.6, rtol=1e-11)
    assert_allclose(sol.delta11p, 0.4, rtol=1e-11)


def test_exact_family_on_matched_line():
    # along C = -2*det the linewidth is sqrt(1 - 4 det^2)
    for det in (-0.1, -0.25, -0.45):
        sol = solve(params(-2.0 * det, det))
        assert_allclose(sol.gamma11, math.sqrt(1.0 - 4.0 * det**2), rtol=1e-11)


def test_frozen_resonant_values():
    sol = solve(params(1.0, 0.0))
    assert_allclose(sol.gamma11, 1.210607794406, rtol=1e-9)
    assert_allclose(sol.delta11p, 0.341163901914, rtol=1e-9)

    sol2 = solve(params(0.5, 0.0))
    assert_allclose(sol2.gamma11, 1.086117877114, rtol=1e-9)
    assert_allclose(sol2.delta11p, 0.211926899535, rtol=1e-9)


def test_resonant_identities():
    # on resonance g^4 (g^2 - 1) = C^2 and delta' = C / (2 g^2)
    for coop in (0.3, 1.0, 2.5, 7.0):
        sol = solve(params(coop))
        g = sol.gamma11
        assert_allclose(g**4 * (g**2 - 1.0), coop**2, rtol=1e-10)
        assert_allclose(sol.delta11p, coop / (2.0 * g**2), rtol=1e-10)


def test_wavenumber_consistent_with_rates():
    for coop, det in [(0.5, 0.0), (2.0, 1.5), (4.0, -2.0), (0.05, 5.0)]:
        sol = solve(params(coop, det))
        assert abs(sol.s - complex(sol.gamma11, -2.0 * sol.delta11p)) < 1e-12


def test_near_free_space_band():
    for det in np.linspace(-10.0, 10.0, 11):
        sol = solve(params(1e-10, det))
        assert abs(sol.gamma11 - 1.0) < 1e-8
        assert abs(sol.delta11p) < 1e-8


def test_far_detuned_returns_to_free_space():
    for det in (100.0, -100.0):
        sol = solve(params(3.0, det))
        assert abs(sol.gamma11 - 1.0) < 0.05
        assert abs(sol.delta11p) < 0.05


def test_degenerate_branch_is_flagged():
    # C = 2, det = -1 closes with a vanishing linewidth
    sol = solve(params(2.0, -1.0))
    assert sol.branch == "degenerate"
    assert abs(sol.gamma11) < 1e-10
    assert_allclose(sol.delta11p, 0.5, atol=1e-10)
    assert sol.converged


# -------------------------------------------------------------------- sweeps


def test_sweep_detuning_free_space_row():
    grid = np.linspace(-5, 5, 11)
    sols = sweep_detuning(0.0, grid)
    assert len(sols) == len(grid)
    for sol in sols:
        assert sol.gamma11 == 1.0 and sol.delta11p == 0.0


def test_sweep_detuning_asymmetry_at_c2():
    grid = np.linspace(-10, 10, 201)
    g = np.array([s.gamma11 for s in sweep_detuning(2.0, grid)])
    assert grid[int(np.argmax(g))] > 0
    assert grid[int(np.argmin(g))] < 0


def test_sweep_density_dilute_law_and_resonant_identity():
    grid = np.linspace(0.0, 0.2, 21)
    sols = sweep_density(0.0, grid)
    for coop, sol in zip(grid[1:], sols[1:]):
        # linear law holds to a few percent this far in
        assert abs(sol.delta11p / (coop / 2.0) - 1.0) < 0.05
        assert_allclose(sol.delta11p, coop / (2.0 * sol.gamma11**2), rtol=1e-10)


def test_sweep_density_blue_side_minimum():
    grid = np.arange(0.0, 3.0 + 1e-9, 0.02)
    g = np.array([s.gamma11 for s in sweep_density(-0.4, grid)])
    assert_allclose(grid[int(np.argmin(g))], 0.8, atol=0.05)


def test_sweep_rejects_non_finite_grid():
    with pytest.raises(ValueError):
        sweep_detuning(1.0, [0.0, float("nan")])
    with pytest.raises(ValueError):
        sweep_density(0.0, [0.0, float("inf")])


# ------------------------------------------------------- failure + config


def test_convergence_error_carries_partial_solution():
    cfg = SolverConfig(tol=1e-14, max_iter=1)
    with pytest.raises(ConvergenceError) as excinfo:
        solve(params(3.0, 0.0), config=cfg)
    partial = excinfo.value.solution
    assert not partial.converged
    assert partial.gamma11 > 0


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        SolverConfig(damping=0.0)
    with pytest.raises(ValueError):
        SolverConfig(damping=1.5)


def test_agrees_with_independent_bisection():
    sol = solve(params(1.0, 0.0))
    roots = bisection_gamma(1.0, 0.0)
    assert roots, "scan found no roots"
    assert min(abs(r - sol.gamma11) for r in roots) < 1e-10
