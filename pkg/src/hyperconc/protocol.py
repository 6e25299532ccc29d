"""Concentration protocol rounds and iteration drivers.

One round takes a GHZ-like working state whose coefficients are known,
couples it to a fresh resource (a tailored single-photon ancilla, or a second
identical copy with every photon flipped), runs a polarization parity check
and then a spatial parity check on the pair (working photon 0, first resource
photon), reads the resource photons out in the diagonal basis, and applies
sign corrections to photon 0.  Even parity in a degree of freedom leaves that
degree of freedom balanced; odd parity squares its coefficients.

Two success notions coexist and coincide except at exact-balance inputs.  A
single round's ``succeeded`` field reports a physical fact: the corrected
survivor is balanced in both degrees of freedom.  The iteration drivers
instead count a round as concentrating only when every degree of freedom not
already balanced by an earlier even outcome comes out even now; a coefficient
that merely starts at one half is not credited until a parity check pins it.
The drivers' tallies therefore match the closed-form retry recursion even on
the balance boundary, where the physical field is true on every branch.

Failed rounds are rerun on the residual: single survivors pair with fresh
ancillas, while two-copy residuals must pair with each other, which is what
the pool driver accounts for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .measurement import (
    DiagonalOutcome,
    ParityOutcome,
    RandomSource,
    measure_diagonal,
    parity_measure,
)
from .states import (
    BALANCED,
    Dof,
    DofAmplitudes,
    FullState,
    Gate,
    GhzForm,
    apply_single_photon_gate,
    flip_copy,
    full_to_ghz,
    ghz_to_full,
    is_maximal,
    prepare_ancilla,
    tensor,
)


class BranchClass(Enum):
    """Joint parity outcome: first letter polarization, second spatial."""

    EE = "ee"
    EO = "eo"
    OE = "oe"
    OO = "oo"

    @staticmethod
    def from_parities(pol: ParityOutcome, spa: ParityOutcome) -> "BranchClass":
        key = ("e" if pol is ParityOutcome.EVEN else "o") + (
            "e" if spa is ParityOutcome.EVEN else "o"
        )
        return BranchClass(key)


@dataclass(frozen=True)
class CorrectionParity:
    """Which sign corrections the diagonal outcomes call for.

    ``pol`` (``spa``) is 1 when the number of minus outcomes in that degree
    of freedom is odd, demanding a Z on the surviving reference photon.
    """

    pol: int
    spa: int


def corrections_from_outcomes(outcomes: list[DiagonalOutcome]) -> CorrectionParity:
    """Fold a list of diagonal outcomes into the two correction parities."""
    if not outcomes:
        raise ValueError("at least one diagonal outcome is required")
    p = sum(1 for o in outcomes if o.pol_sign == -1) % 2
    q = sum(1 for o in outcomes if o.spa_sign == -1) % 2
    return CorrectionParity(p, q)


@dataclass(frozen=True)
class RoundResult:
    """Everything one round produced.

    ``post`` is the corrected survivor state (signs +1).  ``succeeded`` means
    the survivor is balanced in both degrees of freedom.
    """

    branch: BranchClass
    succeeded: bool
    post: GhzForm
    parity_outcomes: tuple[ParityOutcome, ParityOutcome]
    diagonal_outcomes: tuple[DiagonalOutcome, ...]
    corrections: tuple[tuple[int, Dof, Gate], ...]


def _finish_round(
    state: FullState,
    pol_out: ParityOutcome,
    spa_out: ParityOutcome,
    diag: tuple[DiagonalOutcome, ...],
) -> RoundResult:
    # Shared tail of both schemes: corrections on photon 0, then extraction.
    cp = corrections_from_outcomes(list(diag))
    corrections: list[tuple[int, Dof, Gate]] = []
    if cp.pol:
        state = apply_single_photon_gate(state, 0, Dof.POLARIZATION, Gate.Z)
        corrections.append((0, Dof.POLARIZATION, Gate.Z))
    if cp.spa:
        state = apply_single_photon_gate(state, 0, Dof.SPATIAL, Gate.Z)
        corrections.append((0, Dof.SPATIAL, Gate.Z))
    post = full_to_ghz(state)
    return RoundResult(
        branch=BranchClass.from_parities(pol_out, spa_out),
        succeeded=is_maximal(post),
        post=post,
        parity_outcomes=(pol_out, spa_out),
        diagonal_outcomes=diag,
        corrections=tuple(corrections),
    )


def run_scheme_a_round(state: GhzForm, rng: RandomSource) -> RoundResult:
    """One ancilla-assisted round.

    The working state keeps all n photons; the ancilla is checked against
    photon 0 in both degrees of freedom and then read out diagonally.
    """
    if state.n < 2:
        raise ValueError("scheme A needs at least two photons in the working state")
    g = state.signs_folded()
    ancilla = prepare_ancilla(g.pol, g.spa)
    joint = tensor(ghz_to_full(g), ghz_to_full(ancilla))
    pol_out, joint = parity_measure(joint, 0, g.n, Dof.POLARIZATION, rng)
    spa_out, joint = parity_measure(joint, 0, g.n, Dof.SPATIAL, rng)
    outcome, survivor = measure_diagonal(joint, g.n, rng)
    return _finish_round(survivor, pol_out, spa_out, (outcome,))


def run_scheme_b_round(copy1: GhzForm, copy2: GhzForm, rng: RandomSource) -> RoundResult:
    """One two-copy round.

    The second copy enters flipped, is checked against copy 1 through the
    (photon 0, photon n) pair, and then every one of its photons is read out
    diagonally; the n photons of copy 1 survive.
    """
    if copy1.n != copy2.n:
        raise ValueError("the two copies must have equal photon counts")
    if copy1.n < 2:
        raise ValueError("scheme B needs at least two photons per copy")
    g1 = copy1.signs_folded()
    g2 = copy2.signs_folded()
    for x, y in zip(
        (g1.pol.first, g1.pol.second, g1.spa.first, g1.spa.second),
        (g2.pol.first, g2.pol.second, g2.spa.first, g2.spa.second),
    ):
        if abs(abs(x) - abs(y)) > 1e-9:
            raise ValueError("the two copies must carry identical coefficient moduli")
    n = g1.n
    joint = tensor(ghz_to_full(g1), ghz_to_full(flip_copy(g2)))
    pol_out, joint = parity_measure(joint, 0, n, Dof.POLARIZATION, rng)
    spa_out, joint = parity_measure(joint, 0, n, Dof.SPATIAL, rng)
    outcomes: list[DiagonalOutcome] = []
    for _ in range(n):
        # After each removal the remaining second-copy photons start at index n.
        outcome, joint = measure_diagonal(joint, n, rng)
        outcomes.append(outcome)
    return _finish_round(joint, pol_out, spa_out, tuple(outcomes))


def classify_residual(branch: BranchClass, state: GhzForm) -> GhzForm:
    """Residual family for a failed branch.

    Even parity in a degree of freedom balances it; odd parity squares its
    amplitudes (then renormalizes).  EE never leaves a residual.
    """
    if branch is BranchClass.EE:
        raise ValueError("the ee branch is a success, not a residual")
    g = state.signs_folded()

    def squared(pair: DofAmplitudes) -> DofAmplitudes:
        f, s = complex(pair.first) ** 2, complex(pair.second) ** 2
        norm = (abs(f) ** 2 + abs(s) ** 2) ** 0.5
        return DofAmplitudes(f / norm, s / norm)

    pol = BALANCED if branch is BranchClass.EO else squared(g.pol)
    spa = BALANCED if branch is BranchClass.OE else squared(g.spa)
    return GhzForm(g.n, pol, spa)


def branch_concentrates(branch: BranchClass, pol_fixed: bool, spa_fixed: bool) -> bool:
    """Retry-accounting success rule for one round.

    A degree of freedom counts as settled once an even outcome has balanced it
    in some earlier round (the ``*_fixed`` flags); the round concentrates when
    every unsettled degree of freedom comes out even.  Fresh states therefore
    only succeed on the ee branch, regardless of their coefficients.
    """
    pol_even = branch in (BranchClass.EE, BranchClass.EO)
    spa_even = branch in (BranchClass.EE, BranchClass.OE)
    return (pol_fixed or pol_even) and (spa_fixed or spa_even)


@dataclass(frozen=True)
class IterationTrace:
    """Outcome record of repeated rounds on one working state.

    ``succeeded`` follows the retry accounting of :func:`branch_concentrates`,
    not the per-round physical flag, so balanced inputs are still counted
    through their parity history.
    """

    rounds: tuple[RoundResult, ...]
    succeeded: bool
    rounds_used: int
    success_round: int | None  # 1-based; None when every round failed


def iterate_scheme_a(state: GhzForm, max_rounds: int, rng: RandomSource) -> IterationTrace:
    """Run ancilla-assisted rounds until success or ``max_rounds`` failures.

    After a failed round the working state is replaced by its residual family
    and a fresh ancilla is tailored to the new coefficients.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    working = state.signs_folded()
    results: list[RoundResult] = []
    pol_fixed = spa_fixed = False
    for k in range(1, max_rounds + 1):
        res = run_scheme_a_round(working, rng)
        results.append(res)
        if branch_concentrates(res.branch, pol_fixed, spa_fixed):
            return IterationTrace(tuple(results), True, k, k)
        pol_fixed = pol_fixed or res.branch in (BranchClass.EE, BranchClass.EO)
        spa_fixed = spa_fixed or res.branch in (BranchClass.EE, BranchClass.OE)
        working = classify_residual(res.branch, working)
    return IterationTrace(tuple(results), False, max_rounds, None)


@dataclass
class PoolRound:
    """Per-round tally of a pool run."""

    index: int
    attempts: int
    successes: int
    residual_counts: dict[BranchClass, int] = field(default_factory=dict)


@dataclass
class PoolReport:
    """Outcome of a two-copy pool run.

    ``distilled`` counts maximal states produced; ``leftovers`` counts states
    that never found a partner (odd bucket populations, or survivors of the
    final round).  ``leftover_counts`` splits them by residual family, where
    eo means polarization settled, oe spatial settled, oo neither (fresh
    never-attempted copies also land under oo).  ``pairs_attempted`` is the
    total number of rounds run.
    """

    initial_count: int
    max_rounds: int
    rounds: list[PoolRound]
    distilled: int
    leftovers: int
    leftover_counts: dict[str, int]
    pairs_attempted: int


def iterate_scheme_b_pool(
    count: int, template: GhzForm, max_rounds: int, rng: RandomSource
) -> PoolReport:
    """Drive a pool of identical copies through two-copy rounds.

    States pair only with states of identical coefficients, so buckets are
    keyed by (settled flags, round of creation); same-age residuals of the
    same family merge even when different branches produced them, while an
    unpaired leftover stays in its bucket and can never mix with the
    (differently squared) residuals of later rounds.
    """
    if count < 2:
        raise ValueError("the pool needs at least two copies")
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    BucketKey = tuple[bool, bool, int]  # (pol settled, spa settled, birth round)
    buckets: dict[BucketKey, tuple[GhzForm, int]] = {
        (False, False, 0): (template.signs_folded(), count)
    }
    rounds: list[PoolRound] = []
    distilled = 0
    pairs_attempted = 0
    for r in range(1, max_rounds + 1):
        stats = PoolRound(index=r, attempts=0, successes=0)
        new_buckets: dict[BucketKey, tuple[GhzForm, int]] = {}

        def _add(key: BucketKey, g: GhzForm, k: int) -> None:
            if k <= 0:
                return
            if key in new_buckets:
                new_buckets[key] = (new_buckets[key][0], new_buckets[key][1] + k)
            else:
                new_buckets[key] = (g, k)

        for (pol_fixed, spa_fixed, birth), (g, cnt) in buckets.items():
            # odd leftover carries, stranded in its bucket
            _add((pol_fixed, spa_fixed, birth), g, cnt % 2)
            for _ in range(cnt // 2):
                res = run_scheme_b_round(g, g, rng)
                stats.attempts += 1
                pairs_attempted += 1
                if branch_concentrates(res.branch, pol_fixed, spa_fixed):
                    stats.successes += 1
                    distilled += 1
                else:
                    stats.residual_counts[res.branch] = (
                        stats.residual_counts.get(res.branch, 0) + 1
                    )
                    key = (
                        pol_fixed or res.branch is BranchClass.EO,
                        spa_fixed or res.branch is BranchClass.OE,
                        r,
                    )
                    _add(key, classify_residual(res.branch, g), 1)
        rounds.append(stats)
        buckets = new_buckets
    leftover_counts: dict[str, int] = {}
    for (pol_fixed, spa_fixed, _), (_, cnt) in buckets.items():
        label = ("e" if pol_fixed else "o") + ("e" if spa_fixed else "o")
        if label == "ee":  # both settled cannot persist as a residual
            raise AssertionError("a fully settled state survived the pool")
        leftover_counts[label] = leftover_counts.get(label, 0) + cnt
    return PoolReport(
        initial_count=count,
        max_rounds=max_rounds,
        rounds=rounds,
        distilled=distilled,
        leftovers=sum(leftover_counts.values()),
        leftover_counts=dict(sorted(leftover_counts.items())),
        pairs_attempted=pairs_attempted,
    )


@dataclass(frozen=True)
class ParameterEstimate:
    """Coefficient estimates from computational-basis sampling."""

    alpha_sq: float
    delta_sq: float
    trials: int
    alpha_sq_err: float
    delta_sq_err: float


def estimate_parameters(template: GhzForm, trials: int, rng: RandomSource) -> ParameterEstimate:
    """Estimate |pol.first|**2 and |spa.first|**2 by sampling one photon.

    Measuring any photon of a GHZ-like state in the computational basis of a
    degree of freedom lands on its first branch with probability equal to the
    squared first coefficient; frequencies over identically prepared copies
    estimate the pair.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    g = template.signs_folded()
    p_pol, p_spa = g.first_moduli_sq()
    hits_pol = int(np.count_nonzero(rng.uniforms(trials) < p_pol))
    hits_spa = int(np.count_nonzero(rng.uniforms(trials) < p_spa))
    a_hat = hits_pol / trials
    d_hat = hits_spa / trials
    return ParameterEstimate(
        alpha_sq=a_hat,
        delta_sq=d_hat,
        trials=trials,
        alpha_sq_err=(a_hat * (1.0 - a_hat) / trials) ** 0.5,
        delta_sq_err=(d_hat * (1.0 - d_hat) / trials) ** 0.5,
    )
