"""Geometry averages: Monte-Carlo sampling, quadrature oracle, inversion."""

import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from collamb.ensemble import (
    Cylinder,
    Sphere,
    effective_coherence,
    effective_coherence_quadrature_sphere,
    invert_effective,
    sample_pair,
    sweep_geometry,
)
from collamb.model import ModelParams
from collamb.solver import solve


def solved(coop, det=0.0, rabi=1e-3):
    p = ModelParams(cooperativity=coop, detuning=det, rabi=rabi)
    return solve(p), p


# ---------------------------------------------------------------- geometries


def test_geometry_validation():
    assert Sphere(2.0).size == 2.0
    assert Cylinder(0.2, 50.0).size == 50.0
    with pytest.raises(ValueError):
        Sphere(0.0)
    with pytest.raises(ValueError):
        Cylinder(0.2, -1.0)
    with pytest.raises(ValueError):
        Cylinder(0.0, 10.0)
    # finite-waist beams are declared but not implemented
    with pytest.raises(ValueError, match="zero-waist"):
        Sphere(1.0, waist=0.5)
    with pytest.raises(ValueError, match="zero-waist"):
        Cylinder(0.2, 10.0, waist=0.5)


def test_sphere_sampling_moments_and_containment():
    rng = np.random.default_rng(2024)
    g = Sphere(1.0)
    n = 20000
    radii = np.empty(n)
    for i in range(n):
        r1, r2 = sample_pair(g, rng)
        assert r1 @ r1 <= 1.0 + 1e-12
        assert r2[0] == 0.0 and r2[1] == 0.0
        assert abs(r2[2]) <= 1.0
        radii[i] = np.sqrt(r1 @ r1)
    # uniform ball: E|r| = 3R/4, sd of the mean ~ 1.4e-3 here
    assert abs(np.mean(radii) - 0.75) < 4.5e-3


def test_cylinder_sampling_containment():
    rng = np.random.default_rng(7)
    g = Cylinder(0.3, 8.0)
    for _ in range(2000):
        r1, r2 = sample_pair(g, rng)
        assert r1[0] ** 2 + r1[1] ** 2 <= 0.09 + 1e-12
        assert abs(r1[2]) <= 4.0
        assert r2[0] == 0.0 and r2[1] == 0.0
        assert abs(r2[2]) <= 4.0


def test_nonuniform_density_hook_is_explicitly_missing():
    rng = np.random.default_rng(1)
    with pytest.raises(NotImplementedError):
        sample_pair(Sphere(1.0), rng, density=lambda r: 1.0)


# ------------------------------------------------------------ the MC average


def test_effective_coherence_input_guards():
    sol, p = solved(1.0)
    g = Sphere(1.0)
    with pytest.raises(ValueError, match="seed"):
        effective_coherence(g, sol, p, n_samples=100)
    with pytest.raises(ValueError, match="n_samples"):
        effective_coherence(g, sol, p, n_samples=0, seed=1)
    with pytest.raises(ValueError, match="unconverged"):
        bad = dataclasses.replace(sol, converged=False)
        effective_coherence(g, bad, p, n_samples=100, seed=1)
    with pytest.raises(ValueError, match="positive drive"):
        quiet = ModelParams(cooperativity=1.0, detuning=0.0, rabi=0.0)
        effective_coherence(g, sol, quiet, n_samples=100, seed=1)


def test_deterministic_for_fixed_seed():
    sol, p = solved(1.0, 0.2)
    g = Sphere(1.5)
    a = effective_coherence(g, sol, p, n_samples=30000, seed=99)
    b = effective_coherence(g, sol, p, n_samples=30000, seed=99)
    assert a.rho_eff == b.rho_eff
    assert a.mc_stderr == b.mc_stderr
    c = effective_coherence(g, sol, p, n_samples=30000, seed=100)
    assert c.rho_eff != a.rho_eff


def test_result_invariant_links_rates_to_coherence():
    sol, p = solved(2.0, -0.5)
    res = effective_coherence(Sphere(1.0), sol, p, n_samples=5000, seed=3)
    lhs = (res.delta_eff - 0.5j * res.gamma_eff) * res.rho_eff
    assert abs(lhs - p.rabi) < 1e-12
    assert res.n_samples == 5000
    assert res.seed == 3


def test_stderr_shrinks_with_sample_quadrupling():
    sol, p = solved(1.0)
    g = Sphere(1.0)
    small = effective_coherence(g, sol, p, n_samples=20000, seed=11)
    big = effective_coherence(g, sol, p, n_samples=80000, seed=12)
    ratio = small.mc_stderr / big.mc_stderr
    assert 2.0 / 1.5 < ratio < 2.0 * 1.5


def test_free_space_limit_reduces_to_bare_lorentzian():
    # with no medium and a large ball the pair terms average out
    sol, p = solved(0.0, 0.3)
    res = effective_coherence(Sphere(20.0), sol, p, n_samples=100000, seed=8)
    bare = p.rabi / (p.detuning - 0.5j)
    assert abs(res.rho_eff - bare) / abs(bare) < 1e-3


def test_forced_zero_pair_terms_give_exact_lorentzian():
    sol, p = solved(1.5, 0.4)

    def no_pairs(d, s):
        z = np.zeros_like(np.asarray(d, dtype=float))
        return z, z.copy()

    bare = p.rabi / (sol.delta11p + p.detuning - 0.5j * sol.gamma11)
    res = effective_coherence(Sphere(0.7), sol, p, n_samples=10000, seed=21,
                              pair_terms_fn=no_pairs)
    assert abs(res.rho_eff - bare) / abs(bare) < 1e-14
    assert res.mc_stderr < 1e-15
    # the same forcing checks the quadrature weight normalization
    quad = effective_coherence_quadrature_sphere(0.7, sol, p,
                                                 pair_terms_fn=no_pairs)
    assert abs(quad - bare) / abs(bare) < 1e-13


# ----------------------------------------------------------------- the oracle


def test_quadrature_matches_monte_carlo():
    sol, p = solved(2.0, 0.0)
    res = effective_coherence(Sphere(0.5), sol, p, n_samples=100000, seed=101)
    quad = effective_coherence_quadrature_sphere(0.5, sol, p)
    assert abs(res.rho_eff - quad) < 3.0 * res.mc_stderr


def test_quadrature_is_converged_at_default_resolution():
    sol, p = solved(2.0, 0.0)
    q1 = effective_coherence_quadrature_sphere(1.0, sol, p)
    q2 = effective_coherence_quadrature_sphere(1.0, sol, p,
                                               n_radial=128, n_angular=128)
    assert abs(q1 - q2) / abs(q2) < 1e-4


def test_quadrature_rejects_bad_radius():
    sol, p = solved(1.0)
    with pytest.raises(ValueError):
        effective_coherence_quadrature_sphere(0.0, sol, p)


def test_large_sphere_forgets_its_boundary():
    # the effective rates approach the bulk values for R >> wavelength
    for coop in (0.5, 1.0):
        sol, p = solved(coop, 0.0)
        quad = effective_coherence_quadrature_sphere(50.0, sol, p)
        gamma_eff, delta_eff = invert_effective(quad, p.rabi)
        assert abs(gamma_eff / sol.gamma11 - 1.0) < 1e-4
        assert abs(delta_eff / sol.delta11p - 1.0) < 1e-4


def test_shift_dip_below_asymptote_for_dense_blue_cloud():
    sol, p = solved(8.0, 4.0)
    sizes = np.arange(0.1, 1.2001, 0.05)
    shifts = []
    for R in sizes:
        quad = effective_coherence_quadrature_sphere(float(R), sol, p)
        shifts.append(invert_effective(quad, p.rabi)[1])
    shifts = np.asarray(shifts)
    interior = [i for i in range(1, len(shifts) - 1)
                if shifts[i] < shifts[i - 1] and shifts[i] < shifts[i + 1]]
    assert interior, "no local minimum in the scanned window"
    assert any(0.3 <= sizes[i] <= 0.8 for i in interior)


# ------------------------------------------------------------------ inversion


def test_invert_effective_examples():
    gamma, delta = invert_effective(1.0 - 1.0j, 1.0)
    # rabi/rho = (1+i)/2
    assert_allclose(gamma, -1.0, rtol=1e-14)
    assert_allclose(delta, 0.5, rtol=1e-14)
    gamma, delta = invert_effective(2.0j, 1.0)
    assert_allclose(gamma, 1.0, rtol=1e-14)
    assert delta == 0.0
    with pytest.raises(ValueError):
        invert_effective(0.0, 1.0)


def test_invert_round_trip():
    rng = np.random.default_rng(55)
    for _ in range(50):
        gamma = float(rng.uniform(0.05, 3.0))
        delta = float(rng.uniform(-3.0, 3.0))
        om = float(rng.uniform(1e-4, 1e-2))
        rho = om / (delta - 0.5j * gamma)
        g_back, d_back = invert_effective(rho, om)
        assert abs(g_back - gamma) < 1e-12
        assert abs(d_back - delta) < 1e-12


# -------------------------------------------------------------------- sweeps


def test_sweep_uses_independent_per_point_streams():
    sol, p = solved(1.0, 0.0)
    family = [Sphere(0.5), Sphere(1.0), Sphere(2.0)]
    out = sweep_geometry(family, sol, p, n_samples=4000, seed=7)
    assert len(out) == 3
    # point i is reproducible in isolation from the same spawn key
    ss = np.random.SeedSequence(7, spawn_key=(1,))
    alone = effective_coherence(family[1], sol, p, n_samples=4000, seed=ss)
    assert out[1].rho_eff == alone.rho_eff
    assert out[1].mc_stderr == alone.mc_stderr
    assert out[1].seed == 7


def test_sweep_requires_seed():
    sol, p = solved(1.0)
    with pytest.raises(ValueError, match="seed"):
        sweep_geometry([Sphere(1.0)], sol, p, n_samples=100)


def test_dilute_curves_are_flat():
    sol, p = solved(1e-6, 0.0)
    out = sweep_geometry([Sphere(2.0), Sphere(5.0), Sphere(10.0)],
                         sol, p, n_samples=100000, seed=31)
    for res in out:
        assert abs(res.gamma_eff - 1.0) < 0.01
        assert abs(res.delta_eff) < 5e-3
