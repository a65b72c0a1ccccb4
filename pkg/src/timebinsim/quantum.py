"""Exact two-photon amplitudes for time-bin entangled states.

The state of a signal/idler photon pair spread over a train of time slots is
held as a dense complex array amp[j, k] = amplitude of (signal in slot j+1,
idler in slot k+1). A delay-line interferometer with one-slot path difference
maps each single-photon ket

    |k>  ->  (|k> + e^{i phi} |k+1>) / 2

in the monitored output port. The map is applied per mode; the missing norm
is the photon routed to the unused port (50% post-selection per photon) and
is tracked explicitly as a loss weight rather than renormalized away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

PROBABILITY_ATOL = 1e-12

SIGNAL = "signal"
IDLER = "idler"


@dataclass(frozen=True)
class PhasePair:
    """Interferometer phases for the two arms. Raw values, any real number."""

    signal: float
    idler: float

    def reduced(self) -> "PhasePair":
        """Phases folded into [0, 2 pi), for reporting only."""
        two_pi = 2.0 * math.pi
        return PhasePair(self.signal % two_pi, self.idler % two_pi)


@dataclass(frozen=True)
class TimeBinState:
    """Two-photon amplitude array plus post-selection bookkeeping.

    amplitudes : complex ndarray, shape (signal slots, idler slots)
    loss_weight : probability already routed out of the monitored ports
    mzi_signal, mzi_idler : whether each mode has passed its interferometer
    """

    amplitudes: np.ndarray
    loss_weight: float = 0.0
    mzi_signal: bool = False
    mzi_idler: bool = False

    @property
    def n_signal_slots(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_idler_slots(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def retained_probability(self) -> float:
        """Norm still in the monitored ports."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def probability_total(self) -> float:
        """Retained norm plus recorded loss; 1 for any physical state."""
        return self.retained_probability + self.loss_weight

    @property
    def normalized(self) -> bool:
        return abs(self.probability_total - 1.0) <= PROBABILITY_ATOL


def entangled_state(n_slots: int) -> TimeBinState:
    """Pair state with equal amplitude in every slot of the coherence window.

    A pump train coherent over n_slots pulses prepares
    sum_k |k>_s |k>_i / sqrt(n): both photons always share a slot, with a
    uniform envelope. Needs at least two slots to carry any entanglement.
    """
    if n_slots < 2:
        raise ValueError(f"n_slots must be >= 2, got {n_slots}")
    amp = np.zeros((n_slots, n_slots), dtype=complex)
    idx = np.arange(n_slots)
    amp[idx, idx] = 1.0 / math.sqrt(n_slots)
    return TimeBinState(amplitudes=amp)


def apply_mzi(state: TimeBinState, mode: str, phase: float) -> TimeBinState:
    """Pass one mode through a one-slot-delay interferometer.

    Output slot count grows by one (the delayed path can spill past the last
    input slot). Norm lost to the unused port is added to loss_weight; a
    second application to the same mode is physically meaningless and
    rejected.
    """
    if mode == SIGNAL:
        if state.mzi_signal:
            raise ValueError("signal mode already passed its interferometer")
        axis = 0
    elif mode == IDLER:
        if state.mzi_idler:
            raise ValueError("idler mode already passed its interferometer")
        axis = 1
    else:
        raise ValueError(f"mode must be '{SIGNAL}' or '{IDLER}', got {mode!r}")

    amp = state.amplitudes
    shape = list(amp.shape)
    shape[axis] += 1
    out = np.zeros(shape, dtype=complex)
    direct = [slice(None), slice(None)]
    delayed = [slice(None), slice(None)]
    direct[axis] = slice(0, amp.shape[axis])
    delayed[axis] = slice(1, amp.shape[axis] + 1)
    out[tuple(direct)] += 0.5 * amp
    out[tuple(delayed)] += 0.5 * np.exp(1j * phase) * amp

    norm_before = float(np.sum(np.abs(amp) ** 2))
    norm_after = float(np.sum(np.abs(out) ** 2))
    return replace(
        state,
        amplitudes=out,
        loss_weight=state.loss_weight + (norm_before - norm_after),
        mzi_signal=state.mzi_signal or axis == 0,
        mzi_idler=state.mzi_idler or axis == 1,
    )


def matched_coincidence_probability(state: TimeBinState) -> float:
    """Probability that both photons are found in the same slot.

    Only defined after both modes have passed their interferometers; before
    that the photons are trivially matched and the question is not the one
    the fringe measurement asks.
    """
    if not (state.mzi_signal and state.mzi_idler):
        raise ValueError("matched coincidence requires both interferometers applied")
    diag = np.diagonal(state.amplitudes)
    return float(np.sum(np.abs(diag) ** 2))


def fringe(n_slots: int, phases: PhasePair) -> float:
    """Matched-coincidence probability after both interferometers.

    Composes entangled_state -> signal MZI -> idler MZI and sums the slot
    diagonal. Depends on the phases only through their sum; the closed form
    is [2 + 2(n-1)(1 + cos(phi_s + phi_i))] / (16 n), bounded by the double
    post-selection at 1/4.
    """
    state = entangled_state(n_slots)
    state = apply_mzi(state, SIGNAL, phases.signal)
    state = apply_mzi(state, IDLER, phases.idler)
    return matched_coincidence_probability(state)


def ideal_visibility(n_slots: int) -> float:
    """Fringe visibility of the lossless, noise-free n-slot state.

    The two edge slots of the coherence window never interfere (each is fed
    by a single path), which caps the visibility at (n-1)/n.
    """
    if n_slots < 2:
        raise ValueError(f"n_slots must be >= 2, got {n_slots}")
    return (n_slots - 1) / n_slots
