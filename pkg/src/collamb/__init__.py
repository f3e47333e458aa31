"""Collective linewidth and Lamb-shift calculator for dense driven gases.

The package solves the self-consistent dressing of the photon propagator
in a homogeneous two-level gas under weak drive, evaluates the resulting
pair decay/shift terms, cross-checks them against full two-atom master
equation dynamics, and averages the pair coherence over finite sphere and
cylinder samples to produce the measurable effective linewidth and shift.
"""

__version__ = "0.1.0"

from .ensemble import (Cylinder, EnsembleResult, Sphere, effective_coherence,
                       effective_coherence_quadrature_sphere, invert_effective,
                       sample_pair, sweep_geometry)
from .greens import (GreensTensor, PairTerms, dressed_scalar, free_space_scalar,
                     free_space_tensor, pair_terms, pair_terms_arrays,
                     pair_terms_limit)
from .model import (ModelParams, PhysicalInput, atoms_per_cubic_wavelength,
                    cooperativity, number_density_for)
from .solver import (ConvergenceError, SelfConsistentSolution, SolverConfig,
                     effective_wavenumber, residual, solve, sweep_density,
                     sweep_detuning, weak_drive_source)
from .twoatom import (CoherenceSolution, TwoAtomParams, lindblad_rhs,
                      maxwell_bloch_rhs, maxwell_bloch_steady_state,
                      perturbative_steady_state, qrt_initial_conditions,
                      qrt_spectrum, qrt_spectrum_time_domain, steady_state_residuals,
                      source_function_full, steady_state_ode, validate_state)

__all__ = [
    "__version__",
    "Cylinder", "EnsembleResult", "Sphere", "effective_coherence",
    "effective_coherence_quadrature_sphere", "invert_effective", "sample_pair",
    "sweep_geometry",
    "GreensTensor", "PairTerms", "dressed_scalar", "free_space_scalar",
    "free_space_tensor", "pair_terms", "pair_terms_arrays", "pair_terms_limit",
    "ModelParams", "PhysicalInput", "atoms_per_cubic_wavelength",
    "cooperativity", "number_density_for",
    "ConvergenceError", "SelfConsistentSolution", "SolverConfig",
    "effective_wavenumber", "residual", "solve", "sweep_density",
    "sweep_detuning", "weak_drive_source",
    "CoherenceSolution", "TwoAtomParams", "lindblad_rhs", "maxwell_bloch_rhs",
    "maxwell_bloch_steady_state", "perturbative_steady_state",
    "qrt_initial_conditions", "qrt_spectrum", "qrt_spectrum_time_domain",
    "steady_state_residuals", "source_function_full", "steady_state_ode",
    "validate_state",
]
