"""Amplitude engine against a brute-force enumeration oracle.

The oracle below expands every product ket by hand with plain Python
complex arithmetic and never touches the package's array code, so the two
implementations share nothing but the physics.
"""

import cmath
import math

import numpy as np
import pytest

from timebinsim import (
    PhasePair,
    TimeBinState,
    apply_mzi,
    entangled_state,
    fringe,
    ideal_visibility,
    matched_coincidence_probability,
)


def brute_force_fringe(n: int, phi_s: float, phi_i: float) -> float:
    """Matched-coincidence probability by direct ket enumeration."""
    amp: dict[tuple[int, int], complex] = {}
    for k in range(1, n + 1):
        c = 1.0 / math.sqrt(n)
        for slot_s, amp_s in ((k, 0.5), (k + 1, 0.5 * cmath.exp(1j * phi_s))):
            for slot_i, amp_i in ((k, 0.5), (k + 1, 0.5 * cmath.exp(1j * phi_i))):
                key = (slot_s, slot_i)
                amp[key] = amp.get(key, 0.0) + c * amp_s * amp_i
    return sum(abs(v) ** 2 for (s, i), v in amp.items() if s == i)


# Frozen from the oracle: brute_force_fringe(2, 0, 0) and (2, pi, 0),
# i.e. (1 + 4 + 1)/32 and (1 + 0 + 1)/32.
FRINGE_2_CONSTRUCTIVE = 0.1875
FRINGE_2_DESTRUCTIVE = 0.0625


class TestEntangledState:
    def test_uniform_diagonal(self):
        state = entangled_state(5)
        diag = np.diagonal(state.amplitudes)
        assert np.allclose(diag, 1 / math.sqrt(5), atol=1e-15)
        off = state.amplitudes - np.diag(diag)
        assert np.all(off == 0)

    def test_normalized_with_no_loss(self):
        state = entangled_state(37)
        assert state.loss_weight == 0.0
        assert abs(state.probability_total - 1.0) < 1e-12
        assert state.normalized
        assert not state.mzi_signal and not state.mzi_idler

    @pytest.mark.parametrize("n", [1, 0, -4])
    def test_too_few_slots_rejected(self, n):
        with pytest.raises(ValueError, match=">= 2"):
            entangled_state(n)


class TestApplyMzi:
    def test_single_ket_splits_in_two(self):
        # One slot, amplitude 1: |1> -> (|1> + |2>)/2 at zero phase.
        state = TimeBinState(amplitudes=np.array([[1.0 + 0j]]))
        out = apply_mzi(state, "signal", 0.0)
        assert np.allclose(out.amplitudes, [[0.5], [0.5]])
        assert out.loss_weight == pytest.approx(0.5, abs=1e-15)
        assert out.mzi_signal and not out.mzi_idler

    @pytest.mark.parametrize("phase", [math.pi, math.pi / 2, 1.234])
    def test_delayed_path_carries_the_phase(self, phase):
        state = TimeBinState(amplitudes=np.array([[1.0 + 0j]]))
        out = apply_mzi(state, "idler", phase)
        assert out.amplitudes[0, 0] == pytest.approx(0.5)
        assert out.amplitudes[0, 1] == pytest.approx(0.5 * cmath.exp(1j * phase))

    def test_slot_count_grows_by_one_per_mode(self):
        state = entangled_state(6)
        after_s = apply_mzi(state, "signal", 0.3)
        assert (after_s.n_signal_slots, after_s.n_idler_slots) == (7, 6)
        after_both = apply_mzi(after_s, "idler", -0.7)
        assert (after_both.n_signal_slots, after_both.n_idler_slots) == (7, 7)

    @pytest.mark.parametrize("n", [2, 3, 10, 50])
    @pytest.mark.parametrize("phases", [(0.0, 0.0), (1.1, -2.2), (math.pi, math.pi / 3)])
    def test_probability_conserved_at_each_stage(self, n, phases):
        state = entangled_state(n)
        state = apply_mzi(state, "signal", phases[0])
        assert abs(state.probability_total - 1.0) < 1e-12
        state = apply_mzi(state, "idler", phases[1])
        assert abs(state.probability_total - 1.0) < 1e-12
        assert state.normalized

    def test_half_lost_at_first_interferometer(self):
        # No two input kets share an output slot pair yet, so exactly half
        # the norm leaves through the unused port.
        for phase in (0.0, 0.9, math.pi):
            state = apply_mzi(entangled_state(4), "signal", phase)
            assert state.loss_weight == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 50])
    @pytest.mark.parametrize("theta", [0.0, 1.0, math.pi])
    def test_kept_norm_after_both_is_phase_dependent(self, n, theta):
        # Interference in the monitored ports: the retained norm is the
        # matched closed form plus a constant 1/8 of one-slot-apart pairs
        # (2n off-diagonal paths of weight 1/(16n) each), not a flat 1/4.
        state = apply_mzi(apply_mzi(entangled_state(n), "signal", theta), "idler", 0.0)
        expected = (2 + 2 * (n - 1) * (1 + math.cos(theta))) / (16 * n) + 0.125
        assert state.retained_probability == pytest.approx(expected, abs=1e-12)
        off_diagonal = state.retained_probability - matched_coincidence_probability(state)
        assert off_diagonal == pytest.approx(0.125, abs=1e-12)

    def test_double_application_rejected(self):
        state = apply_mzi(entangled_state(3), "signal", 0.0)
        with pytest.raises(ValueError, match="signal.*already"):
            apply_mzi(state, "signal", 0.0)
        state = apply_mzi(state, "idler", 0.0)
        with pytest.raises(ValueError, match="idler.*already"):
            apply_mzi(state, "idler", 0.0)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            apply_mzi(entangled_state(3), "herald", 0.0)


class TestMatchedCoincidence:
    def test_requires_both_interferometers(self):
        state = entangled_state(3)
        with pytest.raises(ValueError, match="both interferometers"):
            matched_coincidence_probability(state)
        with pytest.raises(ValueError, match="both interferometers"):
            matched_coincidence_probability(apply_mzi(state, "signal", 0.0))

    def test_diagonal_amplitudes_two_slots(self):
        # Edge slots single-path, interior slot double-path: [1, 2, 1]/(4 sqrt 2).
        state = apply_mzi(apply_mzi(entangled_state(2), "signal", 0.0), "idler", 0.0)
        diag = np.diagonal(state.amplitudes)
        assert np.allclose(diag, np.array([1.0, 2.0, 1.0]) / (4 * math.sqrt(2)))


class TestFringe:
    def test_frozen_two_slot_values(self):
        assert fringe(2, PhasePair(0.0, 0.0)) == pytest.approx(
            FRINGE_2_CONSTRUCTIVE, abs=1e-15
        )
        assert fringe(2, PhasePair(math.pi, 0.0)) == pytest.approx(
            FRINGE_2_DESTRUCTIVE, abs=1e-15
        )

    @pytest.mark.parametrize("n", [2, 3, 4, 7, 16])
    @pytest.mark.parametrize("phi_s, phi_i", [(0.0, 0.0), (0.8, 0.0), (2.0, -0.5), (3.9, 2.1)])
    def test_matches_brute_force_enumeration(self, n, phi_s, phi_i):
        assert fringe(n, PhasePair(phi_s, phi_i)) == pytest.approx(
            brute_force_fringe(n, phi_s, phi_i), abs=1e-14
        )

    @pytest.mark.parametrize("n", [2, 3, 5, 8, 13, 21, 34, 55, 64])
    def test_closed_form_residual(self, n):
        theta = np.linspace(0.0, 2 * math.pi, 100)
        for th in theta:
            got = fringe(n, PhasePair(th, 0.0))
            assert abs(16 * n * got - 2 - 2 * (n - 1) * (1 + math.cos(th))) < 1e-12

    def test_depends_on_phase_sum_only(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            a, b, shift = rng.uniform(-6, 6, size=3)
            assert fringe(n, PhasePair(a, b)) == pytest.approx(
                fringe(n, PhasePair(a + shift, b - shift)), abs=1e-12
            )

    def test_periodic_in_two_pi(self):
        for n in (2, 9, 30):
            for th in (0.1, 2.5, 5.0):
                assert abs(
                    fringe(n, PhasePair(th, 0.0)) - fringe(n, PhasePair(th + 2 * math.pi, 0.0))
                ) < 1e-12

    def test_post_selection_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 80))
            value = fringe(n, PhasePair(*rng.uniform(-8, 8, size=2)))
            assert 0.0 <= value <= 0.25

    def test_extremes_at_zero_and_pi(self):
        for n in (2, 6, 41):
            top = fringe(n, PhasePair(0.0, 0.0))
            bottom = fringe(n, PhasePair(math.pi, 0.0))
            for th in np.linspace(0.1, 3.0, 7):
                mid = fringe(n, PhasePair(th, 0.0))
                assert bottom - 1e-14 <= mid <= top + 1e-14


class TestIdealVisibility:
    @pytest.mark.parametrize("n, expected", [(2, 0.5), (3, 2 / 3), (10, 0.9), (64, 63 / 64)])
    def test_edge_slot_cap(self, n, expected):
        assert ideal_visibility(n) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("n", [2, 5, 17, 64])
    def test_consistent_with_fringe_extremes(self, n):
        top = fringe(n, PhasePair(0.0, 0.0))
        bottom = fringe(n, PhasePair(math.pi, 0.0))
        assert (top - bottom) / (top + bottom) == pytest.approx(
            ideal_visibility(n), abs=1e-12
        )

    def test_too_few_slots_rejected(self):
        with pytest.raises(ValueError):
            ideal_visibility(1)


class TestPhasePair:
    def test_reduced_folds_into_principal_range(self):
        reduced = PhasePair(-math.pi / 2, 5 * math.pi).reduced()
        assert reduced.signal == pytest.approx(1.5 * math.pi, rel=1e-12)
        assert reduced.idler == pytest.approx(math.pi, rel=1e-12)

    def test_raw_values_kept_for_arithmetic(self):
        pair = PhasePair(7.0, -3.0)
        assert (pair.signal, pair.idler) == (7.0, -3.0)
