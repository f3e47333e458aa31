"""Cross-module oracle suite.

Each check here re-derives a quantity through an independent route
(bisection scan, direct Green's-function evaluation, full master-equation
integration, deterministic quadrature) and compares it to the production
path.  The same battery backs the command-line ``validate`` command and
the acceptance tests, so CI and users exercise identical checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import greens, twoatom
from .ensemble import (Sphere, effective_coherence,
                       effective_coherence_quadrature_sphere, invert_effective)
from .model import ModelParams
from .solver import SolverConfig, residual, solve


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def bisection_gamma(cooperativity: float, detuning: float,
                    scan_points: int = 4000, tol: float = 1e-12) -> list[float]:
    """All fixed points of g = Re sqrt(1 + 2C/(2*detuning + i*g)) in (0, 4].

    Dense sign scan followed by bisection; an empty bracket list means the
    linewidth collapses to zero (the degenerate branch).
    """

    def h(g):
        return g - (np.sqrt(complex(1.0, 0.0)
                            + 2.0 * cooperativity / (2.0 * detuning + 1j * g))).real

    gs = np.linspace(1e-9, 4.0, scan_points)
    vals = np.array([h(g) for g in gs])
    roots = []
    for i in range(len(gs) - 1):
        if vals[i] == 0.0:
            roots.append(float(gs[i]))
            continue
        if vals[i] * vals[i + 1] < 0.0:
            lo, hi = gs[i], gs[i + 1]
            flo = vals[i]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = h(mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
    return roots


def nearest_root_gap(cooperativity: float, detuning: float,
                     gamma11: float) -> float:
    """Distance from the solver's linewidth to the closest scanned root."""
    roots = bisection_gamma(cooperativity, detuning)
    if not roots:
        return abs(gamma11)     # degenerate branch: compare against zero
    return min(abs(gamma11 - r) for r in roots)


def check_solver_oracle(n_points: int = 20, seed: int = 421,
                        tol: float = 1e-9) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        C = float(rng.uniform(0.0, 5.0))
        det = float(rng.uniform(-5.0, 5.0))
        sol = solve(ModelParams(cooperativity=C, detuning=det))
        worst = max(worst, nearest_root_gap(C, det, sol.gamma11))
    return CheckResult("solver vs bisection-scan oracle", worst < tol,
                       f"max |gamma11 - nearest root| = {worst:.3e} over {n_points} points")


def check_solver_residuals(tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    n_bad = 0
    for C in np.linspace(0.0, 3.0, 21):
        for det in np.linspace(-5.0, 5.0, 21):
            p = ModelParams(cooperativity=float(C), detuning=float(det))
            sol = solve(p)
            if not sol.converged:
                n_bad += 1
                continue
            worst = max(worst, abs(residual(sol.gamma11, sol.delta11p, p)))
    ok = worst < tol and n_bad == 0
    return CheckResult("self-consistency residual on 21x21 grid", ok,
                       f"max |residual| = {worst:.3e}, unconverged = {n_bad}")


def check_pair_closed_form(n_points: int = 100, seed: int = 97,
                           tol: float = 1e-12) -> CheckResult:
    # direct -2Re/Im of the dressed propagator is the source of truth
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        r = float(rng.uniform(0.02, 4.0))
        s = complex(rng.uniform(0.1, 3.0), rng.uniform(-1.0, 0.0))
        direct = greens.dressed_scalar(r, s)
        pt = greens.pair_terms(r, s)
        worst = max(worst, abs(pt.gamma12 - (-2.0 * direct.real)),
                    abs(pt.delta12 - direct.imag))
    return CheckResult("pair terms vs direct propagator", worst < tol,
                       f"max deviation = {worst:.3e} over {n_points} draws")


def check_free_space_reduction(n_points: int = 100, seed: int = 11,
                               tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        r = float(rng.uniform(0.01, 5.0))
        dressed = greens.dressed_scalar(r, complex(1.0, 0.0))
        free = greens.free_space_scalar(r)
        worst = max(worst, abs(dressed - free))
    return CheckResult("dressed propagator reduces at s=1", worst < tol,
                       f"max |dressed - free| = {worst:.3e}")


def check_dynamics_oracle(n_sets: int = 4, seed: int = 2718) -> CheckResult:
    """Full master-equation steady state vs the weak-drive closed form."""
    rng = np.random.default_rng(seed)
    slopes = []
    worst_res = 0.0
    for _ in range(n_sets):
        # reject degenerate-branch draws (gamma11 ~ 0) and near-degenerate
        # subradiant pairs: both relax too slowly for the ODE budget
        while True:
            C = float(rng.uniform(0.5, 3.0))
            det = float(rng.uniform(-2.0, 2.0))
            sol = solve(ModelParams(cooperativity=C, detuning=det))
            if sol.gamma11 < 0.2:
                continue
            pt = greens.pair_terms(float(rng.uniform(0.2, 1.5)), sol.s)
            if sol.gamma11 - abs(pt.gamma12) >= 0.05:
                break
        rel = []
        drives = (1e-2, 1e-3, 1e-4)
        for om in drives:
            p = twoatom.TwoAtomParams(detuning=det, rabi=om,
                                      gamma11=sol.gamma11, gamma12=pt.gamma12,
                                      delta11=sol.delta11p, delta12=pt.delta12)
            ode = twoatom.coherences_from_state(twoatom.steady_state_ode(p))
            pert = twoatom.perturbative_steady_state(p)
            rel.append(abs(ode.rho_eg - pert.rho_eg) / abs(pert.rho_eg))
            worst_res = max(worst_res,
                            max(abs(x) for x in twoatom.steady_state_residuals(pert, p)))
        fit = np.polyfit(np.log(drives), np.log(rel), 1)
        slopes.append(float(fit[0]))
    ok = all(abs(m - 2.0) < 0.3 for m in slopes) and worst_res < 1e-13
    return CheckResult("master equation vs weak-drive form", ok,
                       f"relative-deviation slopes = {[round(m, 3) for m in slopes]}, "
                       f"max closed-form residual = {worst_res:.2e}")


def check_source_reduction(tol: float = 1e-13) -> CheckResult:
    worst = 0.0
    for C, det in ((0.5, 0.0), (1.0, 1.0), (2.0, -0.7)):
        sol = solve(ModelParams(cooperativity=C, detuning=det))
        p = twoatom.TwoAtomParams(detuning=det, rabi=0.0, gamma11=sol.gamma11,
                                  gamma12=0.0, delta11=sol.delta11p, delta12=0.0)
        full = twoatom.source_function_full(sol.delta11p, p, 0.0, 0.0, C)
        from .solver import weak_drive_source
        weak = weak_drive_source(sol.gamma11, det, C)
        worst = max(worst, abs(full - weak))
    return CheckResult("full source function reduces at zero drive", worst < tol,
                       f"max |full - weak| = {worst:.3e}")


def check_qrt_oracle(tol: float = 1e-6) -> CheckResult:
    sol = solve(ModelParams(cooperativity=1.0, detuning=0.3))
    p = twoatom.TwoAtomParams(detuning=0.3, rabi=0.2, gamma11=sol.gamma11,
                              gamma12=0.0, delta11=sol.delta11p, delta12=0.0)
    ss = twoatom.maxwell_bloch_steady_state(p)
    init = twoatom.qrt_initial_conditions(ss[0].real, ss[1])
    worst = 0.0
    for omega in (0.5, -1.1):
        direct = twoatom.qrt_spectrum(omega, p, init)
        td = twoatom.qrt_spectrum_time_domain(omega, p, init)
        worst = max(worst, float(np.max(np.abs(direct - td) / np.abs(direct))))
    return CheckResult("transform-domain correlator vs time integration",
                       worst < tol, f"max relative deviation = {worst:.3e}")


def check_mc_vs_quadrature() -> CheckResult:
    p = ModelParams(cooperativity=2.0, detuning=0.0, rabi=1e-3)
    sol = solve(p)
    worst_sigma = 0.0
    for R, seed in ((0.5, 101), (1.5, 102)):
        res = effective_coherence(Sphere(R), sol, p, n_samples=100000, seed=seed)
        quad = effective_coherence_quadrature_sphere(R, sol, p)
        worst_sigma = max(worst_sigma, abs(res.rho_eff - quad) / res.mc_stderr)
    return CheckResult("Monte-Carlo vs sphere quadrature", worst_sigma < 3.0,
                       f"max deviation = {worst_sigma:.2f} standard errors")


def check_inversion_roundtrip(n_points: int = 50, seed: int = 5,
                              tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        gamma = float(rng.uniform(0.05, 3.0))
        delta = float(rng.uniform(-3.0, 3.0))
        rabi = float(rng.uniform(1e-4, 1e-1))
        rho = rabi / complex(delta, -gamma / 2.0)
        g2, d2 = invert_effective(rho, rabi)
        worst = max(worst, abs(g2 - gamma), abs(d2 - delta))
    return CheckResult("effective-quantity inversion round trip", worst < tol,
                       f"max round-trip error = {worst:.3e}")


def check_determinism() -> CheckResult:
    p = ModelParams(cooperativity=1.0, detuning=0.0, rabi=1e-3)
    sol = solve(p)
    a = effective_coherence(Sphere(1.0), sol, p, n_samples=50000, seed=77)
    b = effective_coherence(Sphere(1.0), sol, p, n_samples=50000, seed=77)
    same = (a.rho_eff == b.rho_eff) and (a.mc_stderr == b.mc_stderr)
    return CheckResult("seeded Monte-Carlo determinism", same,
                       "bitwise identical" if same else "results differ")


def run_all() -> list[CheckResult]:
    checks = (
        check_solver_oracle,
        check_solver_residuals,
        check_pair_closed_form,
        check_free_space_reduction,
        check_dynamics_oracle,
        check_source_reduction,
        check_qrt_oracle,
        check_mc_vs_quadrature,
        check_inversion_roundtrip,
        check_determinism,
    )
    return [c() for c in checks]


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    n_fail = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
