"""State containers, basis layout, gates, and form extraction."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperconc import (
    BALANCED,
    PHOTON_CAP,
    Dof,
    DofAmplitudes,
    FullState,
    Gate,
    GhzForm,
    apply_single_photon_gate,
    fidelity,
    flip_copy,
    full_to_ghz,
    ghz_to_full,
    is_maximal,
    maximal_ghz,
    prepare_ancilla,
    prepare_partial_ghz,
    tensor,
)

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def ghz(n, alpha_sq, delta_sq):
    return GhzForm(
        n,
        DofAmplitudes.from_first_probability(alpha_sq),
        DofAmplitudes.from_first_probability(delta_sq),
    )


class TestDofAmplitudes:
    def test_renormalizes_tiny_drift(self):
        eps = 1e-10
        pair = DofAmplitudes(INV_SQRT2 * (1 + eps), INV_SQRT2)
        assert abs(abs(pair.first) ** 2 + abs(pair.second) ** 2 - 1.0) < 1e-15

    def test_rejects_non_normalized(self):
        with pytest.raises(ValueError):
            DofAmplitudes(0.9, 0.9)
        with pytest.raises(ValueError):
            DofAmplitudes(0.1, 0.1)

    def test_from_first_probability(self):
        pair = DofAmplitudes.from_first_probability(0.8)
        assert pair.first == pytest.approx(math.sqrt(0.8))
        assert pair.second == pytest.approx(math.sqrt(0.2))
        with pytest.raises(ValueError):
            DofAmplitudes.from_first_probability(1.2)
        with pytest.raises(ValueError):
            DofAmplitudes.from_first_probability(-0.1)

    def test_swapped(self):
        pair = DofAmplitudes.from_first_probability(0.8).swapped()
        assert pair.first_sq() == pytest.approx(0.2)

    def test_complex_amplitudes_allowed(self):
        pair = DofAmplitudes(INV_SQRT2, INV_SQRT2 * 1j)
        assert pair.first_sq() == pytest.approx(0.5)


class TestGhzForm:
    def test_sign_validation(self):
        with pytest.raises(ValueError):
            GhzForm(2, BALANCED, BALANCED, pol_sign=0)
        with pytest.raises(ValueError):
            GhzForm(0, BALANCED, BALANCED)

    def test_signs_folded_matches_dense_vector(self):
        g = GhzForm(2, BALANCED, DofAmplitudes.from_first_probability(0.6), pol_sign=-1)
        assert fidelity(ghz_to_full(g), ghz_to_full(g.signs_folded())) == pytest.approx(1.0)
        folded = g.signs_folded()
        assert folded.pol_sign == 1 and folded.spa_sign == 1
        assert folded.pol.second.real == pytest.approx(-INV_SQRT2)

    def test_first_moduli_sq(self):
        assert ghz(3, 0.8, 0.6).first_moduli_sq() == pytest.approx((0.8, 0.6))


class TestFullState:
    def test_normalizes_input(self):
        amps = np.zeros(16, dtype=complex)
        amps[0] = 2.0
        s = FullState(2, amps)
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0)

    def test_amplitudes_read_only(self):
        s = ghz_to_full(maximal_ghz(2))
        with pytest.raises(ValueError):
            s.amplitudes[0] = 1.0

    def test_rejects_wrong_shape_and_zero_norm(self):
        with pytest.raises(ValueError):
            FullState(2, np.zeros(15, dtype=complex))
        with pytest.raises(ValueError):
            FullState(1, np.zeros(4, dtype=complex))

    def test_photon_cap(self):
        with pytest.raises(ValueError):
            FullState(PHOTON_CAP + 1, np.zeros(4 ** (PHOTON_CAP + 1), dtype=complex))


class TestBasisLayout:
    def test_ghz_to_full_populates_the_four_corners(self):
        g = ghz(2, 0.8, 0.6)
        v = ghz_to_full(g).amplitudes
        a, b = math.sqrt(0.8), math.sqrt(0.2)
        c, d = math.sqrt(0.6), math.sqrt(0.4)
        r = (4**2 - 1) // 3  # 5: digit 1 at both photons
        assert v[0] == pytest.approx(a * c)
        assert v[r] == pytest.approx(b * c)
        assert v[2 * r] == pytest.approx(a * d)
        assert v[3 * r] == pytest.approx(b * d)
        assert np.count_nonzero(v) == 4

    def test_photon_zero_is_most_significant(self):
        # X on photon 0's polarization must move amplitude from index 0
        # (all H, all u) to the index with only photon 0's pol bit set.
        n = 3
        s = ghz_to_full(ghz(n, 1.0, 1.0))  # lone amplitude at index 0
        flipped = apply_single_photon_gate(s, 0, Dof.POLARIZATION, Gate.X)
        expect = 1 << (2 * (n - 1))
        assert abs(flipped.amplitudes[expect]) == pytest.approx(1.0)

    def test_spatial_bit_above_pol_bit(self):
        s = ghz_to_full(ghz(2, 1.0, 1.0))
        flipped = apply_single_photon_gate(s, 1, Dof.SPATIAL, Gate.X)
        assert abs(flipped.amplitudes[2]) == pytest.approx(1.0)


class TestGates:
    def test_z_flips_second_branch_sign(self):
        g = maximal_ghz(2)
        s = apply_single_photon_gate(ghz_to_full(g), 0, Dof.POLARIZATION, Gate.Z)
        got = full_to_ghz(s)
        folded = got.signs_folded()
        assert folded.pol.second.real == pytest.approx(-INV_SQRT2)
        assert folded.spa.second.real == pytest.approx(INV_SQRT2)

    def test_x_then_x_is_identity(self):
        s = ghz_to_full(ghz(2, 0.8, 0.6))
        once = apply_single_photon_gate(s, 1, Dof.SPATIAL, Gate.X)
        twice = apply_single_photon_gate(once, 1, Dof.SPATIAL, Gate.X)
        assert fidelity(s, twice) == pytest.approx(1.0)


class TestPreparation:
    def test_maximal_ghz_is_maximal(self):
        assert is_maximal(maximal_ghz(4))
        assert not is_maximal(ghz(4, 0.8, 0.5))
        assert not is_maximal(GhzForm(2, BALANCED, BALANCED, pol_sign=-1))

    def test_prepare_partial_ghz(self):
        g = prepare_partial_ghz(
            3,
            DofAmplitudes.from_first_probability(0.7),
            DofAmplitudes.from_first_probability(0.4),
        )
        assert g.first_moduli_sq() == pytest.approx((0.7, 0.4))

    def test_ancilla_swaps_both_pairs(self):
        anc = prepare_ancilla(
            DofAmplitudes.from_first_probability(0.8),
            DofAmplitudes.from_first_probability(0.6),
        )
        assert anc.n == 1
        assert anc.first_moduli_sq() == pytest.approx((0.2, 0.4))

    def test_flip_copy_swaps_and_keeps_signs(self):
        g = GhzForm(
            2,
            DofAmplitudes.from_first_probability(0.8),
            DofAmplitudes.from_first_probability(0.6),
            pol_sign=-1,
        )
        f = flip_copy(g)
        assert f.first_moduli_sq() == pytest.approx((0.2, 0.4))
        assert f.pol_sign == -1 and f.spa_sign == 1


class TestTensor:
    def test_order_and_cap(self):
        a = ghz_to_full(ghz(2, 1.0, 1.0))
        b = ghz_to_full(ghz(1, 0.0, 1.0))  # photon in V
        joint = tensor(a, b)
        assert joint.n_photons == 3
        assert abs(joint.amplitudes[1]) == pytest.approx(1.0)  # last photon V
        big = ghz_to_full(maximal_ghz(6))
        with pytest.raises(ValueError):
            tensor(big, big)


class TestExtraction:
    def test_round_trip_plain(self):
        g = ghz(3, 0.8, 0.6)
        got = full_to_ghz(ghz_to_full(g))
        assert got.first_moduli_sq() == pytest.approx((0.8, 0.6))

    def test_round_trip_with_negative_branch(self):
        g = GhzForm(2, BALANCED, DofAmplitudes.from_first_probability(0.3), spa_sign=-1)
        got = full_to_ghz(ghz_to_full(g))
        assert fidelity(ghz_to_full(got), ghz_to_full(g)) == pytest.approx(1.0)

    def test_degenerate_pure_branches(self):
        for alpha_sq, delta_sq in ((1.0, 0.6), (0.0, 0.6), (0.8, 1.0), (0.8, 0.0), (1.0, 1.0)):
            g = ghz(2, alpha_sq, delta_sq)
            got = full_to_ghz(ghz_to_full(g))
            assert got.first_moduli_sq() == pytest.approx((alpha_sq, delta_sq), abs=1e-12)

    def test_rejects_non_ghz_state(self):
        amps = np.zeros(16, dtype=complex)
        amps[0] = amps[1] = 1.0  # photon 1 superposed alone: not GHZ-like
        with pytest.raises(ValueError):
            full_to_ghz(FullState(2, amps))

    def test_global_phase_is_ignored(self):
        g = ghz(2, 0.8, 0.6)
        v = ghz_to_full(g).amplitudes * np.exp(0.7j)
        got = full_to_ghz(FullState(2, v))
        assert got.first_moduli_sq() == pytest.approx((0.8, 0.6))


class TestFidelity:
    def test_partial_versus_maximal_frozen_value(self):
        # 0.5*(sqrt(.8)+sqrt(.2))^2 * 0.5*(sqrt(.6)+sqrt(.4))^2
        want = 0.9 * (0.5 + math.sqrt(0.24))
        got = fidelity(ghz_to_full(maximal_ghz(2)), ghz_to_full(ghz(2, 0.8, 0.6)))
        assert got == pytest.approx(0.8909081537009721, abs=1e-12)
        assert got == pytest.approx(want, abs=1e-12)

    def test_bounds(self):
        s = ghz_to_full(maximal_ghz(3))
        assert fidelity(s, s) == pytest.approx(1.0)
        t = ghz_to_full(ghz(3, 1.0, 1.0))
        u = ghz_to_full(GhzForm(3, BALANCED, BALANCED, pol_sign=-1))
        assert 0.0 <= fidelity(t, u) <= 1.0


@settings(deadline=None, max_examples=60)
@given(
    alpha_sq=st.floats(0.01, 0.99),
    delta_sq=st.floats(0.01, 0.99),
    pol_sign=st.sampled_from([1, -1]),
    spa_sign=st.sampled_from([1, -1]),
    n=st.integers(1, 4),
)
def test_extraction_round_trip_property(alpha_sq, delta_sq, pol_sign, spa_sign, n):
    g = GhzForm(
        n,
        DofAmplitudes.from_first_probability(alpha_sq),
        DofAmplitudes.from_first_probability(delta_sq),
        pol_sign=pol_sign,
        spa_sign=spa_sign,
    )
    dense = ghz_to_full(g)
    got = full_to_ghz(dense)
    assert fidelity(ghz_to_full(got), dense) == pytest.approx(1.0, abs=1e-12)
    assert got.first_moduli_sq() == pytest.approx((alpha_sq, delta_sq), abs=1e-9)
