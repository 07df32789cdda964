"""
Band-pair model, cross-state basis and the closed-form canonical quantities.

Energies are in units of the reference splitting, times in units of its inverse,
hbar = 1.
"""

from dataclasses import dataclass, field
import math
import numbers
from typing import NamedTuple

from scipy.special import comb

from eigenbath.lib.errors import DomainError


@dataclass(frozen=True)
class BandPair:
    """Two environment bands k (lower, g levels) and k' (upper, g' levels)
    resonantly coupled to a two-level system."""

    g: int
    g_prime: int
    delta_s: float = 1.0
    delta_c: float = 1.0
    bandwidth: float = 0.0
    d: int = field(init=False)

    def __post_init__(self):
        degeneracies = (self.g, self.g_prime)
        if not all(isinstance(x, numbers.Integral) for x in degeneracies):
            raise DomainError(f"Band degeneracies must be integers: {self.g}, {self.g_prime}")
        if self.g < 1 or self.g_prime < 1:
            raise DomainError(f"Band degeneracies must be positive: g={self.g} g'={self.g_prime}")
        if self.delta_s < 0 or self.delta_c < 0 or self.bandwidth < 0:
            raise DomainError("Splittings and bandwidth must be non-negative")
        object.__setattr__(self, "d", int(self.g + self.g_prime))

    @property
    def detuning(self) -> float:
        """Delta = delta_S - delta_C."""
        return self.delta_s - self.delta_c

    def __repr__(self) -> str:
        return "BandPair(g=%d, g'=%d, Δ=%g, δε=%g)" % (
            self.g,
            self.g_prime,
            self.detuning,
            self.bandwidth,
        )


class CrossState(NamedTuple):
    """A cross-state label |central, band:level>."""

    central: int
    band: str
    level: int

    def __str__(self) -> str:
        return "|%d,%s:%d>" % (self.central, self.band, self.level)


@dataclass(frozen=True)
class CrossStateBasis:
    """Ordered basis of the cross-state subspace.

    Indices below g' hold |0, k':m'>, the rest hold |1, k:m>."""

    band_pair: BandPair
    labels: tuple[CrossState, ...]

    def __post_init__(self):
        assert len(self.labels) == self.band_pair.d

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    @property
    def dim(self) -> int:
        return self.band_pair.d

    def is_ground(self, index: int) -> bool:
        """Whether the central system is in |0> for the given basis index."""
        return index < self.band_pair.g_prime


def band_degeneracy(n: int, k: int) -> int:
    """Returns C(N, k), the number of N-spin states with exactly k spins up."""
    if not 0 <= k <= n:
        raise DomainError(f"Excitation number {k} outside [0, {n}]")
    return int(comb(n, k, exact=True))


def canonical_inversion(g: int, g_prime: int) -> float:
    """Inversion (g - g') / (g + g') of the canonical state."""
    if g < 1 or g_prime < 1:
        raise DomainError(f"Band degeneracies must be positive: g={g} g'={g_prime}")
    return (g - g_prime) / (g + g_prime)


def canonical_populations(g: int, g_prime: int) -> tuple[float, float]:
    """Returns the (ground, excited) populations of the canonical reduced state."""
    d = g + g_prime
    return g_prime / d, g / d


def canonical_beta(g: int, g_prime: int, delta_s: float) -> float:
    """Inverse temperature (1/delta_S) ln(g'/g) of the canonical state."""
    if delta_s == 0:
        raise DomainError("delta_S = 0 leaves the temperature scale undefined")
    if g < 1 or g_prime < 1:
        raise DomainError(f"Band degeneracies must be positive: g={g} g'={g_prime}")
    return math.log(g_prime / g) / delta_s


def thermal_excited_population(n: int, delta: float, beta_c: float) -> float:
    """Excited population of S after band-wise canonical relaxation with an
    environment of N spins at inverse temperature beta_C."""
    if n < 1:
        raise DomainError(f"Spin count must be positive, got {n}")
    # 1 / (1 + e^x) without overflow for large x.
    fermi = 0.5 * (1.0 - math.tanh(0.5 * delta * beta_c))
    return n / (n + 1) * fermi + 1 / (n + 1)


def build_cross_basis(band_pair: BandPair) -> CrossStateBasis:
    """Returns the cross-state basis, ground block first."""
    labels = [CrossState(0, "k'", m) for m in range(1, band_pair.g_prime + 1)]
    labels += [CrossState(1, "k", m) for m in range(1, band_pair.g + 1)]
    return CrossStateBasis(band_pair, tuple(labels))
