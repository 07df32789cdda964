"""
Abstract Hamiltonians on the cross-state subspace: GUE matrices and the
block-structured random-interaction matrices with configurable band spectra.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from eigenbath.lib.errors import DomainError
from eigenbath.lib.operators import HermitianOperator
from eigenbath.subspace import BandPair

MAX_SEED = 2**64 - 1

SPECTRUM_KINDS = ("degenerate", "equidistant", "explicit")


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Returns the generator for a seed and an optional stream index.

    Distinct streams of one seed are statistically independent, which lets
    ensemble members be drawn in any order (or in parallel) reproducibly."""
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"Seed {seed} is not a 64-bit unsigned integer")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=stream))


@dataclass(frozen=True)
class EnvSpectrum:
    """Level offsets inside both environment bands."""

    kind: str = "degenerate"
    bandwidth: float = 0.0
    # (band k' levels, band k levels)
    explicit_levels: Optional[tuple[Sequence[float], Sequence[float]]] = None

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise DomainError(f"Unknown spectrum kind {self.kind!r}")
        if self.bandwidth < 0:
            raise DomainError(f"Negative bandwidth {self.bandwidth}")
        if self.kind == "degenerate" and self.bandwidth != 0:
            raise DomainError("Degenerate bands have zero bandwidth")
        if self.kind == "explicit" and self.explicit_levels is None:
            raise DomainError("Explicit spectrum needs explicit_levels")

    @staticmethod
    def for_band_pair(band_pair: BandPair) -> "EnvSpectrum":
        """Equidistant bands of the band pair's width, degenerate if it has none."""
        if band_pair.bandwidth > 0:
            return EnvSpectrum("equidistant", band_pair.bandwidth)
        return EnvSpectrum()

    def offsets(self, n_levels: int, upper: bool) -> np.ndarray:
        """Returns the level offsets of a band of n levels (ascending)."""
        if self.kind == "degenerate":
            return np.zeros(n_levels)
        if self.kind == "equidistant":
            if n_levels == 1:
                return np.zeros(1)
            return np.arange(n_levels) * (self.bandwidth / (n_levels - 1))
        levels = np.asarray(self.explicit_levels[0 if upper else 1], dtype=float)
        if levels.shape != (n_levels,):
            raise DomainError(
                f"Explicit band has {levels.size} levels, expected {n_levels}"
            )
        return levels


def sample_gue(
    d: int,
    scale: float = 1.0,
    seed: int = 0,
    band_pair: Optional[BandPair] = None,
) -> HermitianOperator:
    """Draws a GUE matrix.

    Diagonal entries are real with variance 2·scale², off-diagonal real and
    imaginary parts each have variance scale²."""
    if d < 2:
        raise DomainError(f"GUE dimension must be at least 2, got {d}")
    if scale <= 0:
        raise DomainError(f"GUE scale must be positive, got {scale}")
    if band_pair is not None and band_pair.d != d:
        raise DomainError(f"Dimension {d} does not match {band_pair}")
    rng = make_rng(seed)
    a = rng.normal(0.0, scale, (d, d)) + 1j * rng.normal(0.0, scale, (d, d))
    h = (a + a.conj().T) / np.sqrt(2.0)
    return HermitianOperator(h, band_pair)


def sample_interaction_block(
    g: int, g_prime: int, scale: float = 1.0, seed: int = 0
) -> np.ndarray:
    """Draws the g×g' coupling block V with independent Gaussian real and
    imaginary parts of standard deviation `scale`."""
    if g < 1 or g_prime < 1:
        raise DomainError(f"Block shape must be positive: {g}x{g_prime}")
    if scale < 0:
        raise DomainError(f"Negative coupling scale {scale}")
    rng = make_rng(seed)
    return rng.normal(0.0, scale, (g, g_prime)) + 1j * rng.normal(
        0.0, scale, (g, g_prime)
    )


def build_structured(
    band_pair: BandPair, env_spectrum: EnvSpectrum, v: np.ndarray
) -> HermitianOperator:
    """Assembles the block matrix

        [ -Δ/2 + k' offsets        V^† ]
        [        V         +Δ/2 + k offsets ]

    in cross-state basis order."""
    g, g_prime = band_pair.g, band_pair.g_prime
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (g, g_prime):
        raise DomainError(f"Coupling block has shape {v.shape}, expected {(g, g_prime)}")
    half = band_pair.detuning / 2
    h = np.zeros((band_pair.d, band_pair.d), dtype=np.complex128)
    diagonal = np.concatenate(
        [
            -half + env_spectrum.offsets(g_prime, upper=True),
            half + env_spectrum.offsets(g, upper=False),
        ]
    )
    np.fill_diagonal(h, diagonal)
    h[g_prime:, :g_prime] = v
    h[:g_prime, g_prime:] = v.conj().T
    return HermitianOperator(h, band_pair)


def random_structured(
    band_pair: BandPair,
    env_spectrum: Optional[EnvSpectrum] = None,
    scale: float = 1.0,
    seed: int = 0,
) -> HermitianOperator:
    """Draws V and builds the structured matrix for it."""
    if env_spectrum is None:
        env_spectrum = EnvSpectrum.for_band_pair(band_pair)
    v = sample_interaction_block(band_pair.g, band_pair.g_prime, scale, seed)
    return build_structured(band_pair, env_spectrum, v)


def scale_env_spectrum(h: HermitianOperator, s: float) -> HermitianOperator:
    """Multiplies the traceless block-diagonal part of H by s.

    The coupling blocks and the trace are unchanged."""
    if s < 0:
        raise DomainError(f"Negative spectrum scale {s}")
    local = h.block_diagonal()
    mean = np.trace(h.entries) / h.dim
    traceless = local - mean * np.eye(h.dim)
    coupling = h.entries - local
    scaled = coupling + mean * np.eye(h.dim) + s * traceless
    # Keep exact Hermiticity.
    scaled = (scaled + scaled.conj().T) / 2
    return h.with_entries(scaled)
