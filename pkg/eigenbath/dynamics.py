"""
Schrödinger dynamics of the central-system inversion, propagated spectrally.

The central system starts excited with the environment in the lower band k,
either completely mixed (|1><1| ⊗ 1_k/g) or in a random pure band state.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from eigenbath.analysis import EigenSystem, predicted_equilibrium_inversion
from eigenbath.ensembles import make_rng
from eigenbath.lib.errors import DomainError
from eigenbath.lib.operators import DensityOperator
from eigenbath.subspace import CrossStateBasis

DEFAULT_SAMPLES = 2000
DEFAULT_PERIODS = 50.0

# Relative energy distance below which eigenvalues count as degenerate.
DEGENERACY_TOLERANCE = 1e-9

# Number of sample times propagated per matrix product.
TIME_CHUNK = 256

INITIAL_STATES = ("mixed", "pure")

# Random stream of a seed used for pure initial states.
PURE_STATE_STREAM = 2


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Central-system Bloch-z component over time."""

    times: np.ndarray
    bloch_z: np.ndarray
    window_average: np.ndarray


def initial_mixed_band_state(basis: CrossStateBasis) -> DensityOperator:
    """Weight 1/g on every |1, k:m> basis state."""
    g, g_prime = basis.band_pair.g, basis.band_pair.g_prime
    diagonal = np.concatenate([np.zeros(g_prime), np.full(g, 1.0 / g)])
    return DensityOperator(np.diag(diagonal))


def initial_pure_band_state(basis: CrossStateBasis, seed: int) -> DensityOperator:
    """|1> ⊗ |φ_k> with φ_k drawn uniformly from the unit sphere of band k."""
    g, g_prime = basis.band_pair.g, basis.band_pair.g_prime
    rng = make_rng(seed, PURE_STATE_STREAM)
    phi = rng.standard_normal(g) + 1j * rng.standard_normal(g)
    psi = np.concatenate([np.zeros(g_prime, dtype=complex), phi / np.linalg.norm(phi)])
    return DensityOperator(np.outer(psi, psi.conj()))


def initial_state(basis: CrossStateBasis, kind: str = "mixed", seed: int = 0) -> DensityOperator:
    """Initial state by name, see INITIAL_STATES."""
    if kind == "mixed":
        return initial_mixed_band_state(basis)
    if kind == "pure":
        return initial_pure_band_state(basis, seed)
    raise DomainError(f"Unknown initial state {kind!r}")


def __eigenbasis(eig: EigenSystem, rho0: DensityOperator) -> tuple[np.ndarray, np.ndarray]:
    """Returns rho0 and σ_z in the eigenbasis."""
    if rho0.dim != eig.dim:
        raise DomainError(f"State dimension {rho0.dim} does not match spectrum {eig.dim}")
    w = eig.vectors
    rho = w.conj().T @ rho0.entries @ w
    sigma = (w.conj().T * eig.sigma_z()) @ w
    return rho, sigma


def running_average(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Time average of `values` from the first sample up to each sample."""
    integral = cumulative_trapezoid(values, times, initial=0.0)
    elapsed = times - times[0]
    average = np.array(values, dtype=float)
    later = elapsed > 0
    average[later] = integral[later] / elapsed[later]
    return average


def evolve_bloch_z(
    eig: EigenSystem, rho0: DensityOperator, times: Sequence[float]
) -> Trajectory:
    """<σ_z^S>(t) = Σ_ab ρ_ab (σ_z)_ba e^{-i(E_a - E_b)t} in the eigenbasis."""
    times = np.asarray(times, dtype=float)
    rho, sigma = __eigenbasis(eig, rho0)
    weights = rho * sigma.T
    bloch_z = np.empty(len(times))
    for start in range(0, len(times), TIME_CHUNK):
        chunk = times[start : start + TIME_CHUNK]
        phases = np.exp(-1j * np.outer(chunk, eig.energies))
        values = np.sum((phases @ weights) * phases.conj(), axis=1)
        bloch_z[start : start + len(chunk)] = np.real(values)
    bloch_z = np.clip(bloch_z, -1.0, 1.0)
    return Trajectory(times, bloch_z, running_average(times, bloch_z))


def density_at(eig: EigenSystem, rho0: DensityOperator, t: float) -> DensityOperator:
    """Evolved state e^{-iHt} rho0 e^{iHt} in the cross basis."""
    if rho0.dim != eig.dim:
        raise DomainError(f"State dimension {rho0.dim} does not match spectrum {eig.dim}")
    w = eig.vectors
    u = (w * np.exp(-1j * eig.energies * t)) @ w.conj().T
    return DensityOperator(u @ rho0.entries @ u.conj().T)


def degenerate_clusters(energies: np.ndarray, tolerance: float = DEGENERACY_TOLERANCE):
    """Yields (start, stop) index ranges of (near-)degenerate eigenvalues."""
    scale = max(1.0, float(np.max(np.abs(energies), initial=0.0)))
    start = 0
    for i in range(1, len(energies) + 1):
        if i == len(energies) or energies[i] - energies[i - 1] > tolerance * scale:
            yield start, i
            start = i


def diagonal_ensemble_inversion(eig: EigenSystem, rho0: DensityOperator) -> float:
    """Infinite-time average of <σ_z^S>.

    Coherences between distinct energies dephase; inside each degenerate
    eigenspace the full block Tr(P rho0 P σ_z) survives. For a nondegenerate
    spectrum this is Σ_ε ρ_εε λ_ε."""
    rho, sigma = __eigenbasis(eig, rho0)
    total = 0.0
    for start, stop in degenerate_clusters(eig.energies):
        block = slice(start, stop)
        total += np.real(np.sum(rho[block, block] * sigma[block, block].T))
    return float(total)


def finite_window_average(traj: Trajectory, t_start: float, t_end: float) -> float:
    """Trapezoidal mean of Bloch-z over [t_start, t_end]."""
    if not t_start < t_end:
        raise DomainError(f"Empty window [{t_start}, {t_end}]")
    if t_start < traj.times[0] or t_end > traj.times[-1]:
        raise DomainError(
            f"Window [{t_start}, {t_end}] outside trajectory "
            f"[{traj.times[0]}, {traj.times[-1]}]"
        )
    inside = (traj.times >= t_start) & (traj.times <= t_end)
    times = traj.times[inside]
    if len(times) < 2:
        raise DomainError(f"Window [{t_start}, {t_end}] holds fewer than two samples")
    return float(trapezoid(traj.bloch_z[inside], times) / (times[-1] - times[0]))


def default_times(
    eig: EigenSystem, samples: int = DEFAULT_SAMPLES, periods: float = DEFAULT_PERIODS
) -> np.ndarray:
    """Uniform grid over [0, periods / median nearest-level gap]."""
    gaps = np.diff(eig.energies)
    scale = max(1.0, float(np.max(np.abs(eig.energies), initial=0.0)))
    gaps = gaps[gaps > DEGENERACY_TOLERANCE * scale]
    t_max = periods / float(np.median(gaps)) if len(gaps) else periods
    return np.linspace(0.0, t_max, samples)


def predicted_plateau(eig: EigenSystem) -> float:
    """Equilibrium inversion predicted from the λ variance of this spectrum."""
    band_pair = eig.band_pair
    return predicted_equilibrium_inversion(
        band_pair.g, band_pair.g_prime, float(np.var(eig.lambdas))
    )
