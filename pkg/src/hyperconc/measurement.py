"""Measurement layer: nondestructive two-photon parity checks and destructive
single-photon diagonal-basis readout.

A parity check compares one degree of freedom of two photons and announces
Even (equal bits) or Odd (different bits) without absorbing either photon.
The two Odd phase subcases are physically indistinguishable to the check, so
Odd is a single merged outcome.  Parity projectors are diagonal in the
computational basis, hence checks on different degrees of freedom commute.

Diagonal readout measures one photon in the |+/-> basis of both degrees of
freedom at once and removes it from the state.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .states import Dof, FullState, _bit_shift

# Branches with probability below this are treated as impossible: they are
# never sampled and branch projections report them as empty.
MIN_BRANCH_PROBABILITY = 1e-14


class ParityOutcome(Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class DiagonalOutcome:
    """Outcome of diagonal readout: one sign per degree of freedom.

    ``pol_sign`` is +1 for |+> and -1 for |-> in polarization; ``spa_sign``
    likewise for the spatial mode.
    """

    pol_sign: int
    spa_sign: int

    def __post_init__(self) -> None:
        if self.pol_sign not in (1, -1) or self.spa_sign not in (1, -1):
            raise ValueError("diagonal outcome signs must be +1 or -1")

    def label(self) -> str:
        return ("+" if self.pol_sign == 1 else "-") + ("+" if self.spa_sign == 1 else "-")


# Fixed enumeration and sampling order for the four diagonal outcomes.
DIAGONAL_OUTCOMES = (
    DiagonalOutcome(1, 1),
    DiagonalOutcome(1, -1),
    DiagonalOutcome(-1, 1),
    DiagonalOutcome(-1, -1),
)


class RandomSource:
    """Deterministic random source: PCG64 behind numpy's Generator.

    Equal seeds yield identical outcome sequences on any platform.  ``derive``
    builds an independent child stream from the seed and an index, so batches
    of trials can be reproduced individually.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._path = _path
        seq = np.random.SeedSequence(self.seed, spawn_key=_path)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return float(self._gen.random())

    def uniforms(self, size: int) -> np.ndarray:
        return self._gen.random(size)

    def derive(self, index: int) -> "RandomSource":
        """Child source determined by (seed, ..., index)."""
        return RandomSource(self.seed, self._path + (int(index),))


@lru_cache(maxsize=None)
def _even_mask(n: int, shift_i: int, shift_j: int) -> np.ndarray:
    idx = np.arange(4**n)
    mask = ((idx >> shift_i) & 1) == ((idx >> shift_j) & 1)
    mask.flags.writeable = False
    return mask


def _parity_probs(state: FullState, i: int, j: int, dof: Dof) -> tuple[float, np.ndarray]:
    if i == j:
        raise ValueError("parity check needs two distinct photons")
    n = state.n_photons
    mask = _even_mask(n, _bit_shift(n, i, dof), _bit_shift(n, j, dof))
    amps = state.amplitudes
    p_even = float(np.sum(amps.real[mask] ** 2 + amps.imag[mask] ** 2))
    return p_even, mask


def parity_branch(
    state: FullState, i: int, j: int, dof: Dof, outcome: ParityOutcome
) -> tuple[float, FullState | None]:
    """Project onto one parity outcome for photons ``i`` and ``j``.

    Returns (probability, renormalized post state); the post state is ``None``
    when the branch probability falls below ``MIN_BRANCH_PROBABILITY``.  Both
    photons stay in the state: the check is nondestructive.
    """
    p_even, mask = _parity_probs(state, i, j, dof)
    if outcome is ParityOutcome.EVEN:
        prob, keep = p_even, mask
    else:
        prob, keep = 1.0 - p_even, ~mask
    if prob < MIN_BRANCH_PROBABILITY:
        return max(prob, 0.0), None
    amps = np.where(keep, state.amplitudes, 0.0)
    return prob, FullState(state.n_photons, amps / np.sqrt(prob))


def parity_measure(
    state: FullState, i: int, j: int, dof: Dof, rng: RandomSource
) -> tuple[ParityOutcome, FullState]:
    """Sample a parity outcome and return it with the projected state."""
    p_even, mask = _parity_probs(state, i, j, dof)
    if p_even < MIN_BRANCH_PROBABILITY:
        outcome = ParityOutcome.ODD
    elif 1.0 - p_even < MIN_BRANCH_PROBABILITY:
        outcome = ParityOutcome.EVEN
    else:
        outcome = ParityOutcome.EVEN if rng.uniform() < p_even else ParityOutcome.ODD
    if outcome is ParityOutcome.EVEN:
        prob, keep = p_even, mask
    else:
        prob, keep = 1.0 - p_even, ~mask
    amps = np.where(keep, state.amplitudes, 0.0)
    return outcome, FullState(state.n_photons, amps / np.sqrt(prob))


# Rows: the four diagonal readout vectors in the single-photon digit basis
# (uH, uV, dH, dV), i.e. (1, pol_sign, spa_sign, pol_sign*spa_sign) / 2.
_DIAG_MATRIX = 0.5 * np.array(
    [[1, o.pol_sign, o.spa_sign, o.pol_sign * o.spa_sign] for o in DIAGONAL_OUTCOMES],
    dtype=np.complex128,
)


def diagonal_components(state: FullState, photon: int) -> np.ndarray:
    """Unnormalized post components for all four outcomes, shape (left, rest, 4).

    Component k belongs to ``DIAGONAL_OUTCOMES[k]``; its squared norm is the
    outcome probability and flattening it (after renormalization) gives the
    post state with the photon removed.  One call serves all four branches,
    which exhaustive enumeration leans on.
    """
    n = state.n_photons
    if n < 2:
        raise ValueError("diagonal readout needs at least two photons (one must remain)")
    if not 0 <= photon < n:
        raise ValueError(f"photon index {photon} out of range for {n} photons")
    resh = state.amplitudes.reshape(4**photon, 4, 4 ** (n - 1 - photon))
    return np.tensordot(resh, _DIAG_MATRIX.conj(), axes=([1], [1]))


def diagonal_branch(
    state: FullState, photon: int, outcome: DiagonalOutcome
) -> tuple[float, FullState | None]:
    """Project one photon onto a diagonal outcome and remove it.

    Returns (probability, renormalized state of the remaining photons), with
    ``None`` for branches below ``MIN_BRANCH_PROBABILITY``.
    """
    comps = diagonal_components(state, photon)
    k = DIAGONAL_OUTCOMES.index(outcome)
    part = comps[:, :, k]
    prob = float(np.sum(part.real**2 + part.imag**2))
    if prob < MIN_BRANCH_PROBABILITY:
        return max(prob, 0.0), None
    return prob, FullState(state.n_photons - 1, part.reshape(-1) / np.sqrt(prob))


def measure_diagonal(
    state: FullState, photon: int, rng: RandomSource
) -> tuple[DiagonalOutcome, FullState]:
    """Sample a diagonal readout of one photon; the photon leaves the state."""
    comps = diagonal_components(state, photon)
    probs = np.sum(comps.real**2 + comps.imag**2, axis=(0, 1))
    eligible = [k for k in range(4) if probs[k] >= MIN_BRANCH_PROBABILITY]
    total = float(np.sum(probs[eligible]))
    u = rng.uniform() * total
    acc = 0.0
    pick = eligible[-1]
    for k in eligible:
        acc += float(probs[k])
        if u < acc:
            pick = k
            break
    part = comps[:, :, pick]
    post = FullState(state.n_photons - 1, part.reshape(-1) / np.sqrt(probs[pick]))
    return DIAGONAL_OUTCOMES[pick], post
