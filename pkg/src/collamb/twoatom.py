"""Brute-force dynamics of two probe atoms inside the dressed medium.

This module is the oracle layer: it integrates the two-atom master
equation directly and carries the closed-form weak-drive steady state,
the Maxwell-Bloch equations, the regression-theorem correlator transforms
and the full frequency-resolved source function.  Everything downstream
(the self-consistent closure, the geometry averages) can be checked
against it order by order in the drive.

Basis ordering is fixed once and for all as |gg>, |ge>, |eg>, |ee>
(first letter = atom 1), and every matrix literal in the tests uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp, simpson

_SM = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
_ID2 = np.eye(2, dtype=complex)
SIGMA1 = np.kron(_SM, _ID2)
SIGMA2 = np.kron(_ID2, _SM)
_SIGMAS = (SIGMA1, SIGMA2)
_NUMBER = SIGMA1.conj().T @ SIGMA1 + SIGMA2.conj().T @ SIGMA2
_DRIVE = SIGMA1 + SIGMA1.conj().T + SIGMA2 + SIGMA2.conj().T
# products sigma_j^dag sigma_i, indexed [i][j]
_SDS = [[_SIGMAS[j].conj().T @ _SIGMAS[i] for j in range(2)] for i in range(2)]

GROUND = np.zeros((4, 4), dtype=complex)
GROUND[0, 0] = 1.0

_MAX_TIME = 1e4


@dataclass(frozen=True)
class TwoAtomParams:
    """Coefficients of the two-atom master equation, all in linewidth units.

    The cross terms are symmetric (gamma12 = gamma21 and likewise for the
    shifts) and the decay matrix [[gamma11, gamma12], [gamma12, gamma11]]
    must be positive semidefinite, i.e. |gamma12| <= gamma11, or the
    generator is not completely positive.
    """

    detuning: float
    rabi: float
    gamma11: float
    gamma12: float
    delta11: float
    delta12: float

    def __post_init__(self):
        if not self.gamma11 > 0:
            raise ValueError("gamma11 must be > 0")
        if abs(self.gamma12) > self.gamma11 + 1e-12:
            raise ValueError(
                "invalid generator: |gamma12| <= gamma11 is required for "
                "complete positivity")


@dataclass(frozen=True)
class CoherenceSolution:
    """Averaged single-atom coherence and its population-weighted partner."""

    rho_eg: complex
    m_eg: complex


@dataclass(frozen=True)
class CorrelatorInitial:
    """Initial data for the two-time correlator system.

    correlators holds, at zero delay, the vector
    (<sigma_ee(t) sigma(t)>, <sigma(t) sigma(t)>, <sigma^dag(t) sigma(t)>);
    sigma_t is the single-time <sigma(t)> entering the drive term.
    """

    correlators: np.ndarray
    sigma_t: complex


def validate_state(rho: np.ndarray, herm_tol: float = 1e-12,
                   trace_tol: float = 1e-12, eig_floor: float = -1e-10) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity of a two-atom state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("state must be a 4x4 matrix")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValueError("state is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
        raise ValueError("state trace differs from one")
    if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < eig_floor:
        raise ValueError("state has a negative eigenvalue beyond tolerance")
    return rho


def lindblad_rhs(state: np.ndarray, p: TwoAtomParams) -> np.ndarray:
    """Time derivative of the two-atom density matrix.

    Four pieces: the detuning term, the classical drive, the coherent
    pair-shift commutator, and the dissipator with cross decay.  The
    output is traceless and Hermitian for Hermitian input.
    """
    rho = np.asarray(state, dtype=complex)
    gam = ((p.gamma11, p.gamma12), (p.gamma12, p.gamma11))
    dlt = ((p.delta11, p.delta12), (p.delta12, p.delta11))

    out = -1j * p.detuning * (_NUMBER @ rho - rho @ _NUMBER)
    out += 1j * p.rabi * (_DRIVE @ rho - rho @ _DRIVE)
    for i in range(2):
        for j in range(2):
            sds = _SDS[i][j]
            out += -1j * dlt[i][j] * (sds @ rho - rho @ sds)
            out += -0.5 * gam[i][j] * (
                sds @ rho - 2.0 * (_SIGMAS[i] @ rho @ _SIGMAS[j].conj().T)
                + rho @ sds)
    return out


def steady_state_ode(p: TwoAtomParams, rtol: float = 1e-10,
                     stop_norm: float = 1e-12) -> np.ndarray:
    """Integrate the master equation to its stationary state.

    The integration runs in chunks of a few lifetimes; it stops once the
    max-norm of the generator output stays below stop_norm over a full
    unit of time, and fails after 1e4 time units without that happening.
    """
    rho = GROUND.copy()

    def fun(_t, y):
        return lindblad_rhs(y.reshape(4, 4), p).ravel()

    def rhs_norm(r):
        return float(np.max(np.abs(lindblad_rhs(r, p))))

    chunk = 20.0 / p.gamma11
    elapsed = 0.0
    while elapsed < _MAX_TIME:
        if rhs_norm(rho) < stop_norm:
            hold = solve_ivp(fun, (0.0, 1.0), rho.ravel(), method="DOP853",
                             rtol=rtol, atol=1e-13)
            held = hold.y[:, -1].reshape(4, 4)
            elapsed += 1.0
            if rhs_norm(held) < stop_norm:
                return held
            rho = held
            continue
        span = min(chunk, _MAX_TIME - elapsed)
        sol = solve_ivp(fun, (0.0, span), rho.ravel(), method="DOP853",
                        rtol=rtol, atol=1e-13)
        if not sol.success:
            raise RuntimeError(f"integrator failed: {sol.message}")
        rho = sol.y[:, -1].reshape(4, 4)
        elapsed += span
    raise RuntimeError(
        f"no stationary state within {_MAX_TIME:g} lifetimes "
        f"(residual {rhs_norm(rho):.3e})")


def coherences_from_state(rho: np.ndarray) -> CoherenceSolution:
    """Extract the averaged coherence pair from a two-atom density matrix.

    rho_eg averages <sigma_i>; m_eg averages <sigma_i sigma_z(other)>,
    the coherence weighted by the partner's inversion.
    """
    rho = np.asarray(rho, dtype=complex)
    s1 = rho[2, 0] + rho[3, 1]
    s2 = rho[1, 0] + rho[3, 2]
    m1 = -rho[2, 0] + rho[3, 1]   # <sigma_1 sigma_z2>
    m2 = -rho[1, 0] + rho[3, 2]   # <sigma_2 sigma_z1>
    return CoherenceSolution(rho_eg=(s1 + s2) / 2.0, m_eg=(m1 + m2) / 2.0)


def perturbative_steady_state(p: TwoAtomParams) -> CoherenceSolution:
    """First-order-in-drive steady state of the coherence pair."""
    den = complex(p.delta11 + p.delta12 + p.detuning,
                  -(p.gamma11 + p.gamma12) / 2.0)
    if den == 0:
        raise ValueError("singular steady state: vanishing complex detuning")
    rho_eg = p.rabi / den
    return CoherenceSolution(rho_eg=rho_eg, m_eg=-rho_eg)


def steady_state_residuals(sol: CoherenceSolution, p: TwoAtomParams) -> tuple[complex, complex]:
    """Defects of the two linear steady-state equations at first order."""
    rho, m = sol.rho_eg, sol.m_eg
    line1 = (-(p.gamma11 / 2.0 + 1j * (p.delta11 + p.detuning)) * rho
             + (p.gamma12 / 2.0 + 1j * p.delta12) * m
             + 1j * p.rabi)
    line2 = (-(1.5 * p.gamma11 + p.gamma12 + 1j * (p.delta11 + p.detuning)) * m
             - (p.gamma11 + p.gamma12 / 2.0 - 1j * p.delta12) * rho
             - 1j * p.rabi)
    return line1, line2


def maxwell_bloch_rhs(v, p: TwoAtomParams) -> np.ndarray:
    """Tangent of (excited population, coherence, conjugate coherence)."""
    see, s, sd = v
    lam = complex(p.gamma11 / 2.0, p.delta11 + p.detuning)
    return np.array([
        -p.gamma11 * see - 1j * p.rabi * (s - sd),
        -lam * s - 1j * p.rabi * (2.0 * see - 1.0),
        -lam.conjugate() * sd + 1j * p.rabi * (2.0 * see - 1.0),
    ])


def maxwell_bloch_matrix(p: TwoAtomParams) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix M and constant vector b with d/dt v = M v + b."""
    lam = complex(p.gamma11 / 2.0, p.delta11 + p.detuning)
    om = p.rabi
    M = np.array([
        [-p.gamma11, -1j * om, 1j * om],
        [-2j * om, -lam, 0.0],
        [2j * om, 0.0, -lam.conjugate()],
    ])
    b = np.array([0.0, 1j * om, -1j * om])
    return M, b


def maxwell_bloch_steady_state(p: TwoAtomParams) -> np.ndarray:
    """Stationary (population, coherence, conjugate) of the driven atom."""
    M, b = maxwell_bloch_matrix(p)
    return np.linalg.solve(M, -b)


def qrt_initial_conditions(sigma_ee: complex, sigma: complex) -> CorrelatorInitial:
    """Canonical zero-delay correlator data built from single-time values.

    The operator products fix the zero-delay vector to (0, 0, <sigma_ee>):
    sigma_ee*sigma and sigma*sigma vanish identically while
    sigma^dag*sigma is the excited-state projector.
    """
    return CorrelatorInitial(
        correlators=np.array([0.0, 0.0, sigma_ee], dtype=complex),
        sigma_t=complex(sigma))


def qrt_spectrum(omega: float, p: TwoAtomParams,
                 initial: CorrelatorInitial) -> np.ndarray:
    """Fourier-domain two-time correlators of the driven atom.

    The regression theorem gives the delay dependence the Maxwell-Bloch
    generator M, with the inhomogeneity proportional to the anchored
    <sigma(t)>.  Transforming dc/dtau = M c + b with the one-sided kernel
    exp(-i omega tau) yields (i omega I - M)^(-1) (c0 + b / (i omega)).
    """
    M, _ = maxwell_bloch_matrix(p)
    b = np.array([0.0, 1j * p.rabi * initial.sigma_t,
                  -1j * p.rabi * initial.sigma_t])
    c0 = np.asarray(initial.correlators, dtype=complex)
    if omega == 0.0:
        if np.max(np.abs(b)) != 0.0:
            raise ValueError("zero frequency with a driven anchor is singular")
        rhs = c0
        A = -M
    else:
        rhs = c0 + b / (1j * omega)
        A = 1j * omega * np.eye(3) - M
    try:
        return np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as err:
        raise ValueError(f"resonance singularity at omega={omega}") from err


def qrt_spectrum_time_domain(omega: float, p: TwoAtomParams,
                             initial: CorrelatorInitial,
                             tau_max: float | None = None,
                             n_tau: int = 50001) -> np.ndarray:
    """Oracle for qrt_spectrum: integrate in delay, then transform.

    The correlators are split into their stationary part (transformed
    analytically) and a decaying part handled by direct integration on a
    delay grid of default length 200 lifetimes.
    """
    M, _ = maxwell_bloch_matrix(p)
    b = np.array([0.0, 1j * p.rabi * initial.sigma_t,
                  -1j * p.rabi * initial.sigma_t])
    c0 = np.asarray(initial.correlators, dtype=complex)
    c_ss = np.linalg.solve(M, -b)
    d0 = c0 - c_ss
    T = tau_max if tau_max is not None else 200.0 / p.gamma11
    taus = np.linspace(0.0, T, n_tau)

    sol = solve_ivp(lambda _t, y: M @ y, (0.0, T), d0, method="DOP853",
                    rtol=1e-11, atol=1e-13, t_eval=taus)
    if not sol.success:
        raise RuntimeError(f"delay integration failed: {sol.message}")
    kernel = np.exp(-1j * omega * taus)
    decay_hat = np.array([simpson(kernel * sol.y[k], x=taus) for k in range(3)])
    if omega == 0.0:
        if np.max(np.abs(c_ss)) != 0.0:
            raise ValueError("zero frequency with a nonzero stationary part")
        return decay_hat
    return c_ss / (1j * omega) + decay_hat


def source_function_full(omega: float, p: TwoAtomParams, sigma_ee: complex,
                         sigma: complex, cooperativity: float) -> complex:
    """Frequency-resolved medium source term at finite drive and excitation.

    Rescaled so that it is directly comparable with the weak-drive source:
    at sigma_ee = sigma = rabi = 0 and omega equal to the single-atom
    shift it collapses to 2C/(2*detuning + i*gamma11) exactly.
    """
    gam, om = p.gamma11, p.rabi
    shift = p.delta11 + p.detuning
    num = ((2.0 * sigma_ee - 1.0)
           * ((gam / 2.0 + 1j * (shift + omega)) * (gam + 1j * omega)
              + 2.0 * om**2)
           + 2.0 * om * sigma * (-1j * gam / 2.0 + shift + omega))
    den = ((shift**2 + (gam / 2.0 + 1j * omega) ** 2) * (gam + 1j * omega)
           + 4.0 * om**2 * (gam / 2.0 + 1j * omega))
    if den == 0:
        raise ValueError("singular source denominator")
    return 1j * cooperativity * num / den
