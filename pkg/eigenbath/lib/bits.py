"""Bitmask helpers for spin-1/2 basis states.

Bit value 1 is the excited (spin-up) state."""

from itertools import combinations


def popcount(state: int) -> int:
    """Counts the set bits of a state."""
    return bin(state).count("1")


def get_bit(state: int, site: int) -> int:
    return (state >> site) & 1


def band_states(n: int, k: int) -> list[int]:
    """Returns all n-bit states with exactly k set bits, ascending."""
    states = [sum(1 << i for i in combo) for combo in combinations(range(n), k)]
    return sorted(states)


def apply_pauli(state: int, site: int, pauli: str) -> tuple[complex, int]:
    """Applies a Pauli operator to one site; returns (amplitude, new state)."""
    bit = get_bit(state, site)
    if pauli == "x":
        return 1, state ^ (1 << site)
    if pauli == "y":
        return (1j if bit else -1j), state ^ (1 << site)
    if pauli == "z":
        return (1 if bit else -1), state
    assert False, f"Unknown Pauli operator {pauli!r}"


def apply_pauli_string(state: int, ops) -> tuple[complex, int]:
    """Applies a product of single-site Pauli operators (distinct sites)."""
    amplitude = 1
    for site, pauli in ops:
        factor, state = apply_pauli(state, site, pauli)
        amplitude *= factor
    return amplitude, state
