"""
Eigenvector inversions λ_ε and their statistics.

For an energy eigenvector |ε> = α|0,χ> + β|1,η> on the cross subspace,
λ_ε = |β|² - |α|². Over a complete eigenbasis Σλ_ε = g - g'.
"""

from dataclasses import dataclass
from fractions import Fraction
from multiprocessing.dummy import Pool as ThreadPool
from typing import Callable, Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.stats
from scipy.special import gammaln, xlogy

from eigenbath.ensembles import scale_env_spectrum
from eigenbath.lib.errors import DomainError
from eigenbath.lib.operators import HermitianOperator
from eigenbath.subspace import BandPair, CrossStateBasis, build_cross_basis, canonical_inversion

# Residual above which an operator is rejected as non-Hermitian.
EIGH_HERMITICITY_TOLERANCE = 1e-10

DEFAULT_BINS = 50

# Proximity used to classify λ values onto the delta peaks.
PEAK_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Spectral decomposition on a cross-state basis.

    `vectors[:, i]` is the eigenvector of `energies[i]`."""

    energies: np.ndarray
    vectors: np.ndarray
    lambdas: np.ndarray
    basis: CrossStateBasis

    @property
    def band_pair(self) -> BandPair:
        return self.basis.band_pair

    @property
    def dim(self) -> int:
        return len(self.energies)

    def orthonormality_residual(self) -> float:
        gram = self.vectors.conj().T @ self.vectors
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def sigma_z(self) -> np.ndarray:
        """Diagonal of σ_z^S ⊗ 1 in the cross basis."""
        g_prime = self.band_pair.g_prime
        return np.concatenate([-np.ones(g_prime), np.ones(self.band_pair.g)])


@dataclass(frozen=True, eq=False)
class LambdaDistribution:
    """Pooled λ samples with a histogram over [-1, 1]."""

    samples: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float
    variance: float
    band_pair: BandPair

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    def density(self) -> np.ndarray:
        """Histogram normalized to unit area."""
        widths = np.diff(self.bin_edges)
        return self.counts / (self.counts.sum() * widths)


class SweepPoint(NamedTuple):
    scale: float
    relative_strength: float
    variance: float


class PeakCounts(NamedTuple):
    """Numbers of eigenvectors with λ = -1, 0 and +1."""

    minus_one: int
    zero: int
    plus_one: int


def eigendecompose(
    h: HermitianOperator, basis: Optional[CrossStateBasis] = None
) -> EigenSystem:
    """Diagonalizes H and computes λ_ε for every eigenvector."""
    if basis is None:
        if h.band_pair is None:
            raise DomainError("Operator has no band pair; pass a basis")
        basis = build_cross_basis(h.band_pair)
    if h.dim != basis.dim:
        raise DomainError(f"Operator dimension {h.dim} does not match basis {basis.dim}")
    residual = h.hermiticity_residual()
    if residual > EIGH_HERMITICITY_TOLERANCE:
        raise DomainError(f"Operator is not Hermitian (residual {residual:.3g})")
    energies, vectors = scipy.linalg.eigh(h.entries)
    weights = np.abs(vectors) ** 2
    g_prime = basis.band_pair.g_prime
    lambdas = weights[g_prime:].sum(axis=0) - weights[:g_prime].sum(axis=0)
    return EigenSystem(energies, vectors, np.clip(lambdas, -1.0, 1.0), basis)


def predicted_equilibrium_inversion(g: int, g_prime: int, variance: float) -> float:
    """Time-averaged inversion <σ_z> = <σ_z>_can + (g+g')/(2g) Δλ²."""
    if variance < 0:
        raise DomainError(f"Negative variance {variance}")
    return canonical_inversion(g, g_prime) + (g + g_prime) / (2 * g) * variance


def gue_lambda_pdf(lam, g: int, g_prime: int):
    """Analytic density of λ for GUE eigenvectors,

        P(λ) = Γ(d) / (2^(d-1) Γ(g) Γ(g')) (1-λ)^(g'-1) (1+λ)^(g-1),

    evaluated in log space. Zero outside [-1, 1]."""
    lam = np.asarray(lam, dtype=float)
    d = g + g_prime
    log_norm = gammaln(d) - gammaln(d - g_prime) - gammaln(g_prime) - (d - 1) * np.log(2.0)
    inside = np.abs(lam) <= 1
    safe = np.where(inside, lam, 0.0)
    with np.errstate(divide="ignore"):
        log_p = log_norm + xlogy(g_prime - 1, 1 - safe) + xlogy(g - 1, 1 + safe)
    p = np.where(inside, np.exp(log_p), 0.0)
    return float(p) if p.ndim == 0 else p


def gue_lambda_cdf(lam, g: int, g_prime: int):
    """Cumulative distribution of the GUE λ density.

    p₀ = (1-λ)/2 follows Beta(g', g), so P(Λ <= λ) = P(p₀ >= (1-λ)/2)."""
    lam = np.clip(np.asarray(lam, dtype=float), -1.0, 1.0)
    cdf = scipy.stats.beta.sf((1 - lam) / 2, g_prime, g)
    return float(cdf) if np.ndim(cdf) == 0 else cdf


def gue_variance_closed_form(g: int, g_prime: int, exact: bool = False):
    """Variance 4gg'/(d²(d+1)) of the GUE λ density."""
    if g < 1 or g_prime < 1:
        raise DomainError(f"Band degeneracies must be positive: g={g} g'={g_prime}")
    d = g + g_prime
    value = Fraction(4 * g * g_prime, d * d * (d + 1))
    return value if exact else float(value)


def ks_distance(samples, g: int, g_prime: int) -> float:
    """Kolmogorov-Smirnov distance between λ samples and the GUE law."""
    return float(
        scipy.stats.kstest(samples, lambda x: gue_lambda_cdf(x, g, g_prime)).statistic
    )


def lambda_distribution(
    systems: Union[EigenSystem, Iterable[EigenSystem]], bins: int = DEFAULT_BINS
) -> LambdaDistribution:
    """Pools the λ values of one or more spectra on the same band pair."""
    if isinstance(systems, EigenSystem):
        systems = [systems]
    systems = list(systems)
    if not systems:
        raise DomainError("Need at least one eigensystem")
    band_pair = systems[0].band_pair
    shape = (band_pair.g, band_pair.g_prime)
    for eig in systems[1:]:
        if (eig.band_pair.g, eig.band_pair.g_prime) != shape:
            raise DomainError(f"Mixed band pairs: {band_pair} and {eig.band_pair}")
    samples = np.concatenate([eig.lambdas for eig in systems])
    counts, edges = np.histogram(samples, bins=bins, range=(-1.0, 1.0))
    return LambdaDistribution(
        samples=samples,
        bin_edges=edges,
        counts=counts,
        mean=float(np.mean(samples)),
        variance=float(np.var(samples)),
        band_pair=band_pair,
    )


def relative_strength(h: HermitianOperator) -> float:
    """V_R = sqrt(Tr(H_diag²) / Tr(H_off²)).

    H_diag is the traceless block-diagonal part (environment spectrum),
    H_off the coupling blocks V and V^†."""
    if h.band_pair is None:
        raise DomainError("Relative strength needs the cross-state block layout")
    local = h.block_diagonal()
    off = h.entries - local
    local = local - np.trace(local) / h.dim * np.eye(h.dim)
    off_norm = np.sum(np.abs(off) ** 2)
    if off_norm == 0:
        raise DomainError("Operator has no coupling blocks; V_R is undefined")
    return float(np.sqrt(np.sum(np.abs(local) ** 2) / off_norm))


def vr_gue(g: int, g_prime: int) -> float:
    """Average V_R of a GUE matrix, sqrt((g² + g'²) / (2gg'))."""
    return float(np.sqrt((g * g + g_prime * g_prime) / (2 * g * g_prime)))


def __sweep_point(args) -> SweepPoint:
    base_h, s = args
    h = scale_env_spectrum(base_h, s)
    eig = eigendecompose(h)
    return SweepPoint(s, relative_strength(h), float(np.var(eig.lambdas)))


def sweep_variance_vs_vr(
    base_h: HermitianOperator, scales: Sequence[float], jobs: int = 1
) -> list[SweepPoint]:
    """Scales the environment spectrum over `scales` and records (V_R, Δλ²)."""
    if any(s < 0 for s in scales):
        raise DomainError("Spectrum scales must be non-negative")
    tasks = [(base_h, float(s)) for s in sorted(scales)]
    return run_tasks(__sweep_point, tasks, jobs)


def locate_minimum(points: Sequence[SweepPoint]) -> SweepPoint:
    """Sweep point with the smallest variance."""
    return min(points, key=lambda p: p.variance)


def degenerate_peak_counts(v: np.ndarray) -> PeakCounts:
    """Counts λ = -1, 0, +1 eigenvectors of the degenerate resonant layout
    from the rank of the g×g' coupling block V.

    Each nonzero singular value gives a ±σ pair with λ = 0; the kernel of V
    (ground block) gives λ = -1, the kernel of V^† (excited block) λ = +1."""
    v = np.asarray(v)
    g, g_prime = v.shape
    singular = scipy.linalg.svdvals(v)
    cutoff = singular.max(initial=0.0) * max(g, g_prime) * np.finfo(float).eps
    rank = int(np.sum(singular > cutoff))
    return PeakCounts(minus_one=g_prime - rank, zero=2 * rank, plus_one=g - rank)


def classify_lambdas(lambdas, tolerance: float = PEAK_TOLERANCE) -> PeakCounts:
    """Counts λ values within `tolerance` of -1, 0 and +1."""
    lambdas = np.asarray(lambdas)
    return PeakCounts(
        minus_one=int(np.sum(np.abs(lambdas + 1) < tolerance)),
        zero=int(np.sum(np.abs(lambdas) < tolerance)),
        plus_one=int(np.sum(np.abs(lambdas - 1) < tolerance)),
    )


def perturbed_peak_counts(
    h: HermitianOperator, epsilon: float = 1e-10, seed: int = 0
) -> PeakCounts:
    """Classifies the λ values of H plus a tiny random diagonal, which lifts
    accidental degeneracies without moving the peaks beyond PEAK_TOLERANCE."""
    rng = np.random.default_rng(seed)
    shifted = np.array(h.entries)
    shifted[np.diag_indices(h.dim)] += epsilon * rng.standard_normal(h.dim)
    return classify_lambdas(eigendecompose(h.with_entries(shifted)).lambdas)


def run_tasks(func: Callable, tasks: Sequence, jobs: int = 1) -> list:
    """Maps `func` over `tasks` on a thread pool; results keep task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with ThreadPool(min(jobs, len(tasks))) as pool:
        return list(pool.imap(func, tasks))


def eigendecompose_all(
    build: Callable[[int], HermitianOperator], seeds: Sequence[int], jobs: int = 1
) -> list[EigenSystem]:
    """Builds and diagonalizes one operator per seed."""
    return run_tasks(lambda seed: eigendecompose(build(seed)), list(seeds), jobs)
