"""
Dense operators on the cross-state subspace (or on the full spin space).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

HERMITICITY_TOLERANCE = 1e-12


def _frozen_complex(entries) -> np.ndarray:
    array = np.array(entries, dtype=np.complex128)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A dense complex Hermitian matrix.

    When `band_pair` is set, the matrix is laid out in cross-state basis order:
    the first g' rows belong to the ground block, the remaining g rows to the
    excited block."""

    entries: np.ndarray
    band_pair: Optional["BandPair"] = None

    def __post_init__(self):
        entries = _frozen_complex(self.entries)
        assert entries.ndim == 2, "Operator must be a matrix"
        assert entries.shape[0] == entries.shape[1], f"Non-square operator {entries.shape}"
        if self.band_pair is not None:
            assert entries.shape[0] == self.band_pair.d, (
                "Operator dimension %d does not match band pair dimension %d"
                % (entries.shape[0], self.band_pair.d)
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __len__(self) -> int:
        return self.dim

    def hermiticity_residual(self) -> float:
        """Returns max |H_ij - conj(H_ji)|."""
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_hermitian(self, tolerance: float = HERMITICITY_TOLERANCE) -> bool:
        return self.hermiticity_residual() <= tolerance

    def __split(self) -> int:
        assert self.band_pair is not None, "Operator has no cross-state layout"
        return self.band_pair.g_prime

    def ground_block(self) -> np.ndarray:
        """Upper-left g'×g' block (central system in |0>)."""
        n = self.__split()
        return self.entries[:n, :n]

    def excited_block(self) -> np.ndarray:
        """Lower-right g×g block (central system in |1>)."""
        n = self.__split()
        return self.entries[n:, n:]

    def coupling_block(self) -> np.ndarray:
        """Lower-left g×g' block V."""
        n = self.__split()
        return self.entries[n:, :n]

    def block_diagonal(self) -> np.ndarray:
        """Returns the matrix with the coupling blocks zeroed."""
        n = self.__split()
        diag = np.array(self.entries)
        diag[n:, :n] = 0
        diag[:n, n:] = 0
        return diag

    def with_entries(self, entries) -> "HermitianOperator":
        return HermitianOperator(entries, self.band_pair)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A density matrix: Hermitian, unit trace, positive semidefinite."""

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_complex(self.entries)
        assert entries.ndim == 2 and entries.shape[0] == entries.shape[1]
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float(np.real(np.sum(self.entries * self.entries.T)))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])
