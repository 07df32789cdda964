"""
Hamiltonian families selectable from a run configuration.
"""

from typing import Callable

from eigenbath.config import RunConfig
from eigenbath.ensembles import MAX_SEED, EnvSpectrum, random_structured, sample_gue
from eigenbath.lib.operators import HermitianOperator
from eigenbath.spinbath import (
    SpinBathSpec,
    flip_flop_couplings,
    inhomogeneous_zeeman,
    project_to_cross_subspace,
    sample_star_couplings,
    tune_to_resonance,
)
from eigenbath.subspace import BandPair, band_degeneracy


def band_pair_for(config: RunConfig) -> BandPair:
    """Band pair of the configured model."""
    if config.is_spin_family:
        return BandPair(
            g=band_degeneracy(config.n_env, config.band_k),
            g_prime=band_degeneracy(config.n_env, config.band_k + 1),
            delta_s=config.delta_s,
            delta_c=config.zeeman_center,
        )
    return BandPair(
        g=config.g,
        g_prime=config.g_prime,
        delta_s=config.delta_s,
        delta_c=config.delta_c,
        bandwidth=config.delta_eps if config.family == "structured_equidistant" else 0.0,
    )


def spin_spec_for(config: RunConfig, seed: int) -> SpinBathSpec:
    """Spin environment of a spin family for one seed."""
    n = config.n_env
    if config.coupling_kind == "flip_flop":
        couplings = flip_flop_couplings(n, config.scale)
    else:
        couplings = sample_star_couplings(n, config.scale, seed)
    zeeman = None
    if config.family == "spin_inhomogeneous":
        zeeman = inhomogeneous_zeeman(
            n, config.zeeman_center, config.zeeman_spread, seed, config.zeeman_sampling
        )
    ring = config.family == "spin_ring"
    return SpinBathSpec(
        n_env=n,
        zeeman=zeeman,
        coupling_tensors=couplings,
        intra_kind=config.intra_kind if ring else "none",
        intra_strength=config.intra_strength if ring else 0.0,
        topology="ring" if ring else "star",
        band_k=config.band_k,
        delta_s=config.delta_s,
    )


def spin_hamiltonian(config: RunConfig, seed: int) -> HermitianOperator:
    """Cross-subspace Hamiltonian of a spin family, tuned to resonance if configured."""
    h = project_to_cross_subspace(spin_spec_for(config, seed))
    return tune_to_resonance(h) if config.resonant else h


def builder_for(config: RunConfig) -> Callable[[int], HermitianOperator]:
    """Returns seed -> Hamiltonian on the cross subspace."""
    band_pair = band_pair_for(config)
    if config.family == "gue":
        return lambda seed: sample_gue(band_pair.d, config.scale, seed, band_pair)
    if config.family == "structured_degenerate":
        return lambda seed: random_structured(band_pair, EnvSpectrum(), config.scale, seed)
    if config.family == "structured_equidistant":
        spectrum = EnvSpectrum("equidistant", config.delta_eps)
        return lambda seed: random_structured(band_pair, spectrum, config.scale, seed)
    if config.is_spin_family:
        return lambda seed: spin_hamiltonian(config, seed)
    assert False, f"Unhandled family {config.family}"


def member_seeds(config: RunConfig) -> list[int]:
    """Seeds of the ensemble members, consecutive from the run seed."""
    return [(config.seed + i) % (MAX_SEED + 1) for i in range(config.samples)]
