"""Self-consistent collective linewidth and shift of the dense gas.

The medium modifies the decay rate and resonance of an embedded atom
through a complex effective wave number ``s`` (in units of the free-space
wave number).  Writing ``g`` for the modified linewidth and ``d`` for the
renormalized shift, the closure condition is

    1 + u(g) = (g - 2i d)^2,      u(g) = 2 C / (2 detuning + i g),

with ``s = sqrt(1 + u(g))``, ``g = Re(s)`` and ``d = -Im(s)/2``.  Only the
real part of ``s`` feeds back into ``u``, so the whole problem is a
one-dimensional real fixed point

    g  <-  Re sqrt(1 + 2 C / (2 detuning + i g)).

The iteration below is a damped fixed point with oscillation detection,
a finite-difference Newton fallback after stalls, and homotopy
continuation in C from the free-space point (1, 0) so that exactly one
branch -- the one smoothly connected to free space -- is returned even
where the closure condition admits several roots.

On part of the blue-detuned side (detuning < 0) the continued branch
collapses onto g = 0 over a finite window of C: there ``1 + u(0)`` is a
negative real number, ``s`` is purely imaginary, and the map above has an
attracting fixed point at zero.  Such solutions are returned with
``branch = "degenerate"`` instead of being masked or regularized.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Sequence

from .model import ModelParams, require_finite

_DAMPING_FLOOR = 1.0 / 32.0
_STALL_PERIOD = 200
_NEWTON_STEP = 1e-7
_DEGENERATE_GAMMA = 1e-10
_CONTINUATION_STEP = 0.25
_WARM_START_FLOOR = 1e-13


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration limits for the fixed-point solver."""

    tol: float = 1e-12
    max_iter: int = 10000
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class SelfConsistentSolution:
    """Converged (or flagged) solution of the closure condition."""

    gamma11: float
    delta11p: float
    s: complex
    residual_norm: float
    iterations: int
    converged: bool
    branch: str = "principal"
    cooperativity: float = 0.0
    detuning: float = 0.0


class ConvergenceError(RuntimeError):
    """Raised when neither fixed point nor Newton reaches tolerance.

    Carries the last iterate in ``solution`` for diagnostics.
    """

    def __init__(self, message: str, solution: SelfConsistentSolution):
        super().__init__(message)
        self.solution = solution


def weak_drive_source(gamma11: float, detuning: float, cooperativity: float) -> complex:
    """Dimensionless medium source term ``u = 2 C / (2 detuning + i gamma11)``.

    This is the quantity added to 1 under the square root defining the
    effective wave number.  The denominator must not vanish.
    """
    den = complex(2.0 * detuning, gamma11)
    if den == 0:
        raise ValueError(
            "singular source: gamma11 and detuning cannot both be zero"
        )
    return 2.0 * cooperativity / den


def effective_wavenumber(u: complex) -> complex:
    """Effective wave number ``s = sqrt(1 + u)`` on the physical branch.

    The principal square root keeps Re(s) >= 0, matching a non-negative
    decay rate.  On the degenerate ray where Re(s) = 0 exactly, the branch
    with Im(s) <= 0 is selected (decaying propagation); callers flag this
    case rather than accepting it silently.
    """
    s = cmath.sqrt(1.0 + u)
    if s.real == 0.0:
        s = complex(0.0, -abs(s.imag))
    return s


def residual(gamma11: float, delta11p: float, params: ModelParams) -> complex:
    """Defect of the closure condition ``1 + u - (gamma11 - 2i delta11p)^2``."""
    u = weak_drive_source(gamma11, params.detuning, params.cooperativity)
    return 1.0 + u - complex(gamma11, -2.0 * delta11p) ** 2


def _evaluate(g: float, coop: float, detuning: float) -> tuple[complex, float]:
    """Wave number s(g) and residual magnitude of the candidate linewidth g."""
    t = 1.0 + weak_drive_source(g, detuning, coop)
    s = effective_wavenumber(t - 1.0)
    res = t - complex(g, s.imag) ** 2
    return s, abs(res)


def _accepted(g: float, s: complex, res: float, tol: float) -> bool:
    # The residual factors as |Re s - g| * |Re s + g + 2i Im s|; near the
    # linewidth dips the second factor drops below one, so the residual
    # alone would let the fixed-point defect exceed tol.  Require both.
    return res < tol and abs(s.real - g) < tol


def _zero_attracting(coop: float, detuning: float) -> bool:
    """Is g = 0 an attracting fixed point of the map at (C, detuning)?

    Near zero the map behaves like g -> k*g whenever 1 + C/detuning < 0;
    the plateau exists exactly where the local slope k is below one.
    """
    if detuning == 0:
        return False
    if 1.0 + coop / detuning >= 0.0:
        return False
    probe = 1e-8
    s, _ = _evaluate(probe, coop, detuning)
    return s.real < probe


def _newton(g0: float, coop: float, detuning: float, cfg: SolverConfig,
            budget: int) -> tuple[float, int, bool]:
    """Finite-difference Newton on h(g) = g - Re s(g). Returns (g, used, ok)."""
    g = g0
    used = 0
    floor = 1e-16 if detuning == 0 else 0.0
    while used < budget:
        s, res = _evaluate(g, coop, detuning)
        used += 1
        if _accepted(g, s, res, cfg.tol):
            return g, used, True
        h = g - s.real
        s2, _ = _evaluate(g + _NEWTON_STEP, coop, detuning)
        used += 1
        h2 = (g + _NEWTON_STEP) - s2.real
        dh = (h2 - h) / _NEWTON_STEP
        if dh == 0 or not math.isfinite(dh):
            return g, used, False
        step = h / dh
        if not math.isfinite(step):
            return g, used, False
        g = max(g - step, floor)
    return g, used, False


def _iterate(coop: float, detuning: float, g0: float,
             cfg: SolverConfig) -> tuple[float, complex, float, int, bool]:
    """Damped fixed point with Newton fallback at one (C, detuning) point.

    Returns (gamma11, s, residual_norm, iterations, converged).
    """
    floor = 1e-16 if detuning == 0 else 0.0
    g = max(g0, floor)
    alpha = cfg.damping
    prev_sign = 0
    flips = 0
    it = 0
    while it < cfg.max_iter:
        s, res = _evaluate(g, coop, detuning)
        it += 1
        if _accepted(g, s, res, cfg.tol):
            return g, s, res, it, True

        step = s.real - g
        sign = (step > 0) - (step < 0)
        if sign != 0 and sign == -prev_sign:
            flips += 1
            if flips >= 2:
                alpha = max(alpha / 2.0, _DAMPING_FLOOR)
                flips = 0
        else:
            flips = 0
        prev_sign = sign
        g = max(g + alpha * step, floor)

        if it % _STALL_PERIOD == 0:
            # Stalled: snap onto an attracting degenerate plateau if we are
            # clearly sliding into one, otherwise hand over to Newton.
            if g < 1e-8 and _zero_attracting(coop, detuning):
                s, res = _evaluate(0.0, coop, detuning)
                return 0.0, s, res, it + 1, _accepted(0.0, s, res, cfg.tol)
            gn, used, ok = _newton(g, coop, detuning, cfg,
                                   min(120, cfg.max_iter - it))
            it += used
            if ok:
                if gn < _DEGENERATE_GAMMA and not _zero_attracting(coop, detuning):
                    # Newton fell onto the repelling zero root; the branch
                    # continued from free space lives at finite g.
                    g = max(g, 1e-6)
                else:
                    s, res = _evaluate(gn, coop, detuning)
                    return gn, s, res, it + 1, _accepted(gn, s, res, cfg.tol)

    s, res = _evaluate(g, coop, detuning)
    return g, s, res, it, _accepted(g, s, res, cfg.tol)


def _package(g: float, s: complex, res: float, iterations: int, converged: bool,
             coop: float, detuning: float) -> SelfConsistentSolution:
    require_finite(s, "effective wave number")
    branch = "degenerate" if (g < _DEGENERATE_GAMMA and coop > 0) else "principal"
    return SelfConsistentSolution(
        gamma11=g,
        delta11p=-s.imag / 2.0,
        s=s,
        residual_norm=res,
        iterations=iterations,
        converged=converged,
        branch=branch,
        cooperativity=coop,
        detuning=detuning,
    )


def solve(params: ModelParams, config: SolverConfig | None = None,
          warm_start: float | None = None) -> SelfConsistentSolution:
    """Solve the closure condition at one (C, detuning) point.

    A fresh solve walks C up from zero in steps of at most 0.25, warm
    starting each stage from the previous one, which pins the returned
    root to the branch smoothly connected to the free-space values (1, 0).
    Passing ``warm_start`` (a nearby converged linewidth) skips the
    continuation, which is what the sweep drivers do.

    Raises ConvergenceError (with the last iterate attached) if the final
    stage fails to reach tolerance.
    """
    cfg = config or SolverConfig()
    coop = params.cooperativity
    detuning = params.detuning

    total = 0
    if warm_start is not None:
        g = max(warm_start, _WARM_START_FLOOR)
        stages = [coop]
    else:
        g = 1.0
        n = max(1, math.ceil(coop / _CONTINUATION_STEP))
        stages = [coop * (k + 1) / n for k in range(n)]

    for stage_c in stages:
        g, s, res, it, ok = _iterate(stage_c, detuning, g, cfg)
        total += it
        if not ok and stage_c == stages[-1]:
            sol = _package(g, s, res, total, False, coop, detuning)
            raise ConvergenceError(
                f"no convergence at C={coop:g}, detuning={detuning:g}: "
                f"residual {res:.3e} after {total} iterations", sol)
        g = max(g, _WARM_START_FLOOR)

    return _package(g, s, res, total, True, coop, detuning)


def _sweep(points: Sequence[ModelParams],
           config: SolverConfig | None) -> list[SelfConsistentSolution]:
    """Warm-started sweep; convergence failures are flagged, not raised."""
    cfg = config or SolverConfig()
    out: list[SelfConsistentSolution] = []
    warm: float | None = None
    for p in points:
        try:
            sol = solve(p, cfg, warm_start=warm)
        except ConvergenceError as err:
            sol = err.solution
        out.append(sol)
        # A failed point does not poison the next one: fall back to a
        # fresh continuation there instead of chaining a bad iterate.
        warm = sol.gamma11 if sol.converged else None
    return out


def sweep_detuning(coop: float, detuning_grid: Sequence[float],
                   config: SolverConfig | None = None) -> list[SelfConsistentSolution]:
    """Solve along a sorted detuning grid at fixed cooperativity."""
    grid = list(detuning_grid)
    if any(not math.isfinite(d) for d in grid):
        raise ValueError("detuning grid must be finite")
    pts = [ModelParams(cooperativity=coop, detuning=d) for d in grid]
    return _sweep(pts, config)


def sweep_density(detuning: float, coop_grid: Sequence[float],
                  config: SolverConfig | None = None) -> list[SelfConsistentSolution]:
    """Solve along a sorted cooperativity grid at fixed detuning."""
    grid = list(coop_grid)
    if any(not math.isfinite(c) or c < 0 for c in grid):
        raise ValueError("cooperativity grid must be finite and >= 0")
    pts = [ModelParams(cooperativity=c, detuning=detuning) for c in grid]
    return _sweep(pts, config)
