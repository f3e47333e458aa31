"""Geometry averages of the pair coherence and the measurable inversion.

The observable linewidth and shift of a finite sample are obtained by
averaging the weak-drive pair coherence

    k(d) = rabi / (delta11p + delta12(d) + detuning
                   - i (gamma11 + gamma12(d)) / 2)

over one atom drawn uniformly from the body and one drawn uniformly along
the probe-beam line through its center (direction z, zero waist), with
d the pair separation.  Inverting the averaged coherence back through the
single-atom Lorentzian form then defines (gamma_eff, delta_eff).

Monte-Carlo estimates are deterministic for a fixed seed: the sample
budget is cut into fixed-size chunks, each chunk owns an independent
child of the seed sequence, and the chunk partials are reduced in index
order.  Splitting the chunks across workers therefore cannot change the
result; the serial reduction used here is the reference order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .greens import pair_terms_arrays
from .model import ModelParams
from .solver import SelfConsistentSolution

COINCIDENCE_CLAMP = 1e-9
_CHUNK = 4096


@dataclass(frozen=True)
class Sphere:
    """Ball of the given radius (wavelength units), beam along z."""

    radius: float
    waist: float = 0.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        if self.waist != 0.0:
            raise ValueError("only a zero-waist beam line is supported")

    @property
    def size(self) -> float:
        return self.radius


@dataclass(frozen=True)
class Cylinder:
    """Cylinder along z with the given radius and length (wavelengths)."""

    radius: float
    length: float
    waist: float = 0.0

    def __post_init__(self):
        if not self.radius > 0 or not self.length > 0:
            raise ValueError("cylinder dimensions must be > 0")
        if self.waist != 0.0:
            raise ValueError("only a zero-waist beam line is supported")

    @property
    def size(self) -> float:
        return self.length


Geometry = Sphere | Cylinder


@dataclass(frozen=True)
class EnsembleResult:
    """Averaged coherence and the effective quantities inverted from it."""

    rho_eff: complex
    gamma_eff: float
    delta_eff: float
    n_samples: int
    mc_stderr: float
    seed: int


def _bulk_points(g: Geometry, rng: np.random.Generator, n: int) -> np.ndarray:
    """n points uniform over the body, by rejection from the bounding box."""
    out = np.empty((n, 3))
    have = 0
    if isinstance(g, Sphere):
        R = g.radius
        while have < n:
            cand = rng.uniform(-R, R, size=(2 * (n - have) + 16, 3))
            keep = cand[np.einsum("ij,ij->i", cand, cand) <= R * R]
            take = min(len(keep), n - have)
            out[have:have + take] = keep[:take]
            have += take
    else:
        a, L = g.radius, g.length
        while have < n:
            m = 2 * (n - have) + 16
            cand = rng.uniform(-a, a, size=(m, 2))
            keep = cand[np.einsum("ij,ij->i", cand, cand) <= a * a]
            take = min(len(keep), n - have)
            out[have:have + take, :2] = keep[:take]
            have += take
        out[:, 2] = rng.uniform(-L / 2.0, L / 2.0, size=n)
    return out


def _beam_points(g: Geometry, rng: np.random.Generator, n: int) -> np.ndarray:
    """n points uniform along the beam line through the center."""
    half = g.radius if isinstance(g, Sphere) else g.length / 2.0
    out = np.zeros((n, 3))
    out[:, 2] = rng.uniform(-half, half, size=n)
    return out


def sample_pair(g: Geometry, rng_stream: np.random.Generator, density=None):
    """One (bulk point, beam point) pair for the geometry average.

    density is a placeholder for non-uniform atom distributions; only the
    uniform one is implemented.
    """
    if density is not None:
        raise NotImplementedError("only the uniform distribution is implemented")
    return _bulk_points(g, rng_stream, 1)[0], _beam_points(g, rng_stream, 1)[0]


def _kernel(dist: np.ndarray, sol: SelfConsistentSolution, params: ModelParams,
            pair_terms_fn=None) -> np.ndarray:
    d = np.maximum(dist, COINCIDENCE_CLAMP)
    fn = pair_terms_fn if pair_terms_fn is not None else pair_terms_arrays
    gamma12, delta12 = fn(d, sol.s)
    den = (sol.delta11p + delta12 + params.detuning
           - 0.5j * (sol.gamma11 + gamma12))
    return params.rabi / den


def effective_coherence(g: Geometry, sol: SelfConsistentSolution,
                        params: ModelParams, n_samples: int = 100000,
                        seed=None, pair_terms_fn=None) -> EnsembleResult:
    """Monte-Carlo average of the pair coherence over the sample geometry.

    seed is mandatory (an int, or a numpy SeedSequence when a sweep hands
    out per-point streams); there is no hidden global generator.  The
    returned record carries the estimate, its standard error, and the
    inverted effective linewidth and shift.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if seed is None:
        raise ValueError("a seed is required for reproducible averages")
    if not sol.converged:
        raise ValueError("refusing to average around an unconverged solution")
    if params.rabi <= 0:
        raise ValueError("a positive drive is needed to define the average")

    if isinstance(seed, np.random.SeedSequence):
        root = seed
        seed_label = int(root.entropy) if isinstance(root.entropy, int) else -1
    else:
        root = np.random.SeedSequence(seed)
        seed_label = int(seed)

    n_chunks = (n_samples + _CHUNK - 1) // _CHUNK
    children = root.spawn(n_chunks)
    total = 0.0 + 0.0j
    total_sq = 0.0
    left = n_samples
    for child in children:
        m = min(_CHUNK, left)
        rng = np.random.default_rng(child)
        r1 = _bulk_points(g, rng, m)
        r2 = _beam_points(g, rng, m)
        k = _kernel(np.linalg.norm(r1 - r2, axis=1), sol, params, pair_terms_fn)
        total += complex(np.sum(k))
        total_sq += float(np.sum(np.abs(k) ** 2))
        left -= m

    rho_eff = total / n_samples
    var = max(total_sq / n_samples - abs(rho_eff) ** 2, 0.0)
    stderr = math.sqrt(var / n_samples)
    gamma_eff, delta_eff = invert_effective(rho_eff, params.rabi)
    return EnsembleResult(rho_eff=rho_eff, gamma_eff=gamma_eff,
                          delta_eff=delta_eff, n_samples=n_samples,
                          mc_stderr=stderr, seed=seed_label)


def effective_coherence_quadrature_sphere(R: float, sol: SelfConsistentSolution,
                                          params: ModelParams,
                                          n_radial: int = 64,
                                          n_angular: int = 64,
                                          pair_terms_fn=None) -> complex:
    """Deterministic sphere oracle for the Monte-Carlo average.

    Spherical symmetry reduces the average to three dimensions: the bulk
    radius, the angle to the beam axis, and the position along the chord,
    handled by Gauss-Legendre products.
    """
    if not R > 0:
        raise ValueError("radius must be > 0")
    xa, wa = leggauss(n_radial)
    a = 0.5 * R * (xa + 1.0)          # bulk radius in [0, R]
    wa = 0.5 * R * wa
    mu, wm = leggauss(n_angular)       # cosine of the polar angle
    xz, wz = leggauss(n_radial)
    z = R * xz                        # beam coordinate in [-R, R]
    wz = R * wz

    A = a[:, None, None]
    MU = mu[None, :, None]
    Z = z[None, None, :]
    dist = np.sqrt(np.maximum(A * A + Z * Z - 2.0 * A * Z * MU, 0.0))
    k = _kernel(dist, sol, params, pair_terms_fn)
    w = (wa[:, None, None] * a[:, None, None] ** 2
         * wm[None, :, None] * wz[None, None, :])
    # 2 pi / volume from the azimuth, 1/(2R) from the beam normalization
    return complex(np.sum(w * k) * 3.0 / (4.0 * R**4))


def invert_effective(rho_eff: complex, rabi: float) -> tuple[float, float]:
    """Effective (linewidth, shift) reproducing an averaged coherence.

    Defined through delta_eff - i*gamma_eff/2 = rabi / rho_eff, the exact
    inverse of the single-atom Lorentzian form.
    """
    if rho_eff == 0:
        raise ValueError("cannot invert a vanishing coherence")
    w = rabi / rho_eff
    return -2.0 * w.imag, w.real


def sweep_geometry(g_family, sol: SelfConsistentSolution, params: ModelParams,
                   n_samples: int = 100000, seed=None) -> list[EnsembleResult]:
    """One Monte-Carlo average per geometry, with per-point child streams.

    Point i uses SeedSequence(seed, spawn_key=(i,)), so the sweep is
    reproducible as a whole and any sub-range can be recomputed alone.
    """
    if seed is None:
        raise ValueError("a seed is required for reproducible sweeps")
    out = []
    for i, g in enumerate(g_family):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        res = effective_coherence(g, sol, params, n_samples=n_samples, seed=ss)
        out.append(EnsembleResult(rho_eff=res.rho_eff, gamma_eff=res.gamma_eff,
                                  delta_eff=res.delta_eff,
                                  n_samples=res.n_samples,
                                  mc_stderr=res.mc_stderr, seed=int(seed)))
    return out
