"""Free-space and medium-dressed photon propagators for an atom pair.

Everything is evaluated in the shared dimensionless rescaling in which the
pair decay and shift terms come out directly in units of the free-space
linewidth: with ``x = 2*pi*r`` (r in wavelengths) the scalar free-space
propagator is ``-(i/(2x)) * w**2 * exp(-i*w*x)`` and the dressed one
replaces the exponent's wave number by the complex ``s`` of the medium
while keeping the on-resonance prefactor.  The pair terms follow as

    gamma12(r) = -2 Re D(r, s) = sin(x Re s) exp(x Im s) / x
    delta12(r) =    Im D(r, s) = -cos(x Re s) exp(x Im s) / (2 x)

where the closed trigonometric forms on the right are used on hot paths
and are validated against the direct -2Re/Im evaluation in the tests (the
direct evaluation is the source of truth for signs).

``delta12`` is deliberately left unrenormalized: it diverges like
``-1/(4 pi r)`` at contact, which is the free-space self-energy that the
single-atom shift absorbs.  Downstream averages use ``delta11p +
delta12(r)`` at r > 0, where the divergence simply parks the integrand at
zero.  Only :func:`pair_terms_limit` reports the renormalized contact
values (Re s, -Im s / 2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PairTerms:
    """Distance-resolved decay and shift felt by an atom pair."""

    r: float
    gamma12: float
    delta12: float


@dataclass(eq=False)
class GreensTensor:
    """Free-space dyadic propagator between two points.

    matrix is 3x3 complex and symmetric; rvec is the separation in
    wavelengths; w is the frequency in units of the transition frequency.
    """

    matrix: np.ndarray
    rvec: np.ndarray = field(repr=False)
    w: float = 1.0


def free_space_scalar(r: float, w: float = 1.0) -> complex:
    """Orientation-averaged free-space propagator at separation r.

    r must be positive (the contact limit is only meaningful after
    renormalization, see pair_terms_limit).
    """
    if r <= 0:
        raise ValueError("separation must be > 0")
    x = TWO_PI * r
    return -1j / (2.0 * x) * w * w * cmath.exp(-1j * w * x)


def free_space_tensor(rvec, w: float = 1.0) -> GreensTensor:
    """Full dyadic free-space propagator, near field included.

    The trace over polarizations divided by three reproduces
    free_space_scalar exactly, which is the random-orientation average
    x_a x_b / r^2 -> delta_ab / 3.
    """
    rv = np.asarray(rvec, dtype=float)
    if rv.shape != (3,):
        raise ValueError("rvec must be a 3-vector")
    r = float(np.linalg.norm(rv))
    if r <= 0:
        raise ValueError("separation must be > 0")
    rho = TWO_PI * r
    rhat = rv / r
    diag = w * w - 1j * w / rho - 1.0 / rho**2
    longi = -w * w + 3j * w / rho + 3.0 / rho**2
    pref = -3j * cmath.exp(-1j * w * rho) / (4.0 * rho)
    mat = pref * (diag * np.eye(3) + longi * np.outer(rhat, rhat))
    return GreensTensor(matrix=mat, rvec=rv, w=w)


def dressed_scalar(r: float, s: complex) -> complex:
    """Scalar propagator inside the medium with effective wave number s.

    Reduces to free_space_scalar(r, 1) when s = 1.
    """
    if r <= 0:
        raise ValueError("separation must be > 0")
    x = TWO_PI * r
    return -1j / (2.0 * x) * cmath.exp(-1j * s * x)


def pair_terms(r: float, s: complex) -> PairTerms:
    """Pair decay and shift at separation r, from the dressed propagator."""
    d = dressed_scalar(r, s)
    return PairTerms(r=r, gamma12=-2.0 * d.real, delta12=d.imag)


def pair_terms_arrays(r, s: complex):
    """Vectorized closed-form pair terms for an array of separations.

    Same values as pair_terms applied elementwise; this is the hot path
    for the geometry averages.  Returns (gamma12, delta12) arrays.
    """
    x = TWO_PI * np.asarray(r, dtype=float)
    if np.any(x <= 0):
        raise ValueError("separations must be > 0")
    envelope = np.exp(x * s.imag)
    phase = x * s.real
    gamma12 = np.sin(phase) * envelope / x
    delta12 = -np.cos(phase) * envelope / (2.0 * x)
    return gamma12, delta12


def pair_terms_limit(s: complex) -> tuple[float, float]:
    """Renormalized contact values (gamma11, delta11p) = (Re s, -Im s / 2)."""
    if s.real < 0:
        raise ValueError("Re(s) must be >= 0 on the physical branch")
    return s.real, -s.imag / 2.0
