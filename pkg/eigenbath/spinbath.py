"""
Spin environments: a central spin-1/2 coupled to N environment spins in a star
(no intra-bath links) or ring (periodic nearest-neighbour) topology.

Site 0 is the central spin, sites 1..N the environment. Every spin contributes
(δ/2)σ_z, so its splitting is δ.
"""

from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sps

from eigenbath.ensembles import make_rng
from eigenbath.lib.bits import apply_pauli_string, band_states
from eigenbath.lib.errors import DomainError, ResourceError
from eigenbath.lib.operators import HermitianOperator
from eigenbath.subspace import BandPair, band_degeneracy

MAX_SPINS = 16

# Random stream of a seed used for Zeeman splittings, distinct from couplings.
ZEEMAN_STREAM = 1

ZEEMAN_SAMPLINGS = ("uniform", "stratified")

INTRA_KINDS = ("none", "xx", "xx_plus_yy", "heisenberg")
TOPOLOGIES = ("star", "ring")
PAULIS = "xyz"

# Pauli components of each intra-bath coupling kind.
INTRA_AXES = {
    "none": "",
    "xx": "x",
    "xx_plus_yy": "xy",
    "heisenberg": "xyz",
}

# Single-site matrices in (|0>, |1>) order.
PAULI_MATRICES = {
    "x": sps.csr_matrix(np.array([[0, 1], [1, 0]], dtype=np.complex128)),
    "y": sps.csr_matrix(np.array([[0, 1j], [-1j, 0]], dtype=np.complex128)),
    "z": sps.csr_matrix(np.array([[-1, 0], [0, 1]], dtype=np.complex128)),
}


class PauliTerm(NamedTuple):
    """coefficient × Π σ_pauli(site)"""

    coefficient: complex
    ops: tuple[tuple[int, str], ...]


@dataclass(frozen=True, eq=False)
class SpinBathSpec:
    """Describes a central spin coupled to N environment spins."""

    n_env: int
    zeeman: tuple[float, ...] = None
    # (N, 3, 3) tensors γ^(ν)_ij, i on the central spin, j on spin ν.
    coupling_tensors: np.ndarray = None
    intra_kind: str = "none"
    intra_strength: float = 0.0
    topology: str = "star"
    band_k: int = 0
    delta_s: float = 1.0

    def __post_init__(self):
        n = self.n_env
        if n < 1:
            raise DomainError(f"Environment needs at least one spin, got {n}")
        zeeman = self.zeeman if self.zeeman is not None else [1.0] * n
        zeeman = tuple(float(x) for x in zeeman)
        if len(zeeman) != n:
            raise DomainError(f"{len(zeeman)} Zeeman splittings for {n} spins")
        tensors = self.coupling_tensors
        if tensors is None:
            tensors = np.zeros((n, 3, 3))
        tensors = np.array(tensors, dtype=float)
        if tensors.shape != (n, 3, 3):
            raise DomainError(f"Coupling tensors have shape {tensors.shape}")
        tensors.setflags(write=False)
        if self.intra_kind not in INTRA_KINDS:
            raise DomainError(f"Unknown intra-bath coupling {self.intra_kind!r}")
        if self.topology not in TOPOLOGIES:
            raise DomainError(f"Unknown topology {self.topology!r}")
        if self.topology == "star" and self.intra_kind != "none":
            raise DomainError("A star environment has no intra-bath coupling")
        if self.intra_strength < 0:
            raise DomainError(f"Negative intra-bath strength {self.intra_strength}")
        if not 0 <= self.band_k <= n - 1:
            raise DomainError(f"Band {self.band_k} has no upper partner for N={n}")
        object.__setattr__(self, "zeeman", zeeman)
        object.__setattr__(self, "coupling_tensors", tensors)

    def band_pair(self, band_k: Optional[int] = None) -> BandPair:
        """The band pair (k, k+1) as an abstract model."""
        k = self.band_k if band_k is None else band_k
        return BandPair(
            g=band_degeneracy(self.n_env, k),
            g_prime=band_degeneracy(self.n_env, k + 1),
            delta_s=self.delta_s,
            delta_c=float(np.mean(self.zeeman)),
        )

    def ring_bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour site pairs of the periodic ring."""
        n = self.n_env
        if self.topology != "ring" or n < 2:
            return []
        if n == 2:
            return [(1, 2)]
        return [(nu, nu % n + 1) for nu in range(1, n + 1)]


def hamiltonian_terms(spec: SpinBathSpec) -> list[PauliTerm]:
    """Expands the spin Hamiltonian into Pauli strings."""
    terms = [PauliTerm(spec.delta_s / 2, ((0, "z"),))]
    for nu, delta in enumerate(spec.zeeman, start=1):
        terms.append(PauliTerm(delta / 2, ((nu, "z"),)))
    for nu, tensor in enumerate(spec.coupling_tensors, start=1):
        for i, j in np.ndindex(3, 3):
            if tensor[i, j] != 0:
                terms.append(PauliTerm(tensor[i, j], ((0, PAULIS[i]), (nu, PAULIS[j]))))
    if spec.intra_strength != 0:
        for a, b in spec.ring_bonds():
            for axis in INTRA_AXES[spec.intra_kind]:
                terms.append(PauliTerm(spec.intra_strength, ((a, axis), (b, axis))))
    return terms


def __site_operator(pauli: str, site: int, n_sites: int) -> sps.csr_matrix:
    # The rightmost Kronecker factor is bit 0.
    return sps.kron(
        sps.kron(sps.identity(2 ** (n_sites - 1 - site), format="csr"), PAULI_MATRICES[pauli]),
        sps.identity(2**site, format="csr"),
        format="csr",
    )


def build_full_hamiltonian(spec: SpinBathSpec) -> sps.csr_matrix:
    """Builds the Hamiltonian on the full 2^(N+1) spin space as a sparse matrix."""
    if spec.n_env > MAX_SPINS:
        raise ResourceError(f"{spec.n_env} environment spins exceed the limit of {MAX_SPINS}")
    n_sites = spec.n_env + 1
    dim = 2**n_sites
    h = sps.csr_matrix((dim, dim), dtype=np.complex128)
    for term in hamiltonian_terms(spec):
        factors = [__site_operator(pauli, site, n_sites) for site, pauli in term.ops]
        h = h + term.coefficient * reduce(lambda a, b: a @ b, factors)
    return h.tocsr()


def cross_states(n_env: int, band_k: int) -> list[int]:
    """Full-space bitmasks of the cross basis for bands (k, k+1).

    Ground block first: |0, env in k+1>, then |1, env in k>."""
    ground = [env << 1 for env in band_states(n_env, band_k + 1)]
    excited = [(env << 1) | 1 for env in band_states(n_env, band_k)]
    return ground + excited


def project_to_cross_subspace(
    spec: SpinBathSpec, band_k: Optional[int] = None
) -> HermitianOperator:
    """Returns P·H·P on the cross subspace of bands (k, k+1), computed from
    the Pauli terms without building the full matrix."""
    if spec.n_env > MAX_SPINS:
        raise ResourceError(f"{spec.n_env} environment spins exceed the limit of {MAX_SPINS}")
    k = spec.band_k if band_k is None else band_k
    if not 0 <= k <= spec.n_env - 1:
        raise DomainError(f"Band {k} has no upper partner for N={spec.n_env}")
    states = cross_states(spec.n_env, k)
    index = {state: i for i, state in enumerate(states)}
    terms = hamiltonian_terms(spec)
    h = np.zeros((len(states), len(states)), dtype=np.complex128)
    for col, state in enumerate(states):
        for term in terms:
            amplitude, image = apply_pauli_string(state, term.ops)
            row = index.get(image)
            if row is not None:
                h[row, col] += term.coefficient * amplitude
    return HermitianOperator(h, spec.band_pair(k))


def tune_to_resonance(h: HermitianOperator) -> HermitianOperator:
    """Retunes δ_S so that the ground and excited blocks share one mean energy.

    The coupling terms σ_z ⊗ σ_z shift the effective splitting of the central
    spin away from δ_S. The diagonal moves as under δ_S -> δ_S + x; the band
    pair keeps the configured δ_S."""
    band_pair = h.band_pair
    if band_pair is None:
        raise DomainError("Resonance tuning needs a cross-state layout")
    n = band_pair.g_prime
    ground_mean = np.trace(h.ground_block()).real / n
    excited_mean = np.trace(h.excited_block()).real / band_pair.g
    shift = ground_mean - excited_mean
    entries = np.array(h.entries)
    diagonal = np.arange(h.dim)
    entries[diagonal, diagonal] += np.where(diagonal < n, -shift / 2, shift / 2)
    return h.with_entries(entries)


def sample_star_couplings(n_env: int, strength: float, seed: int) -> np.ndarray:
    """Random coupling tensors, each γ^(ν)_ij uniform on [-strength, strength]."""
    if strength <= 0:
        raise DomainError(f"Coupling strength must be positive, got {strength}")
    return make_rng(seed).uniform(-strength, strength, (n_env, 3, 3))


def flip_flop_couplings(n_env: int, strength: float) -> np.ndarray:
    """Homogeneous σx⊗σx + σy⊗σy coupling to every environment spin."""
    tensors = np.zeros((n_env, 3, 3))
    tensors[:, 0, 0] = strength
    tensors[:, 1, 1] = strength
    return tensors


def inhomogeneous_zeeman(
    n_env: int, center: float, spread: float, seed: int, sampling: str = "stratified"
) -> np.ndarray:
    """Zeeman splittings homogeneously distributed on [center - spread/2, center + spread/2].

    "uniform" draws each splitting independently. "stratified" cuts the range
    into n_env equal slices, draws one splitting in each and shuffles them
    over the sites."""
    if sampling not in ZEEMAN_SAMPLINGS:
        raise DomainError(f"Unknown Zeeman sampling {sampling!r}")
    if spread < 0:
        raise DomainError(f"Negative Zeeman spread {spread}")
    if spread == 0:
        return np.full(n_env, float(center))
    rng = make_rng(seed, ZEEMAN_STREAM)
    low = center - spread / 2
    if sampling == "uniform":
        return rng.uniform(low, low + spread, n_env)
    slots = (np.arange(n_env) + rng.uniform(size=n_env)) / n_env
    return low + spread * rng.permutation(slots)
