"""Resolution of separation ambiguities and channel extraction.

Separation recovers the stacked sources only up to sign, ordering, and
scale. The known SI frame pins the SI slots (a blind-feasible anchor);
SOI slots are pinned against ground truth in evaluation mode or left in
component order with positive sign in blind mode, where the BPSK sign
ambiguity is unresolvable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame, SiMatchFailure
from .fastica import IcaOutcome, WhiteningResult
from .signal_model import ChannelMatrix, SignalFrame, StackedObservation

DEFAULT_SI_MATCH_THRESHOLD = 0.9


@dataclass(frozen=True)
class ComponentAssignment:
    """Bijection between recovered components and source slots.

    Slots 0..n-1 are the SI streams, n..2n-1 the SOI streams.
    ``component_to_slot[j]`` is the slot of component j, ``signs[j]`` its
    sign correction, and ``correlation_scores[j]`` the |correlation| of the
    matched pair (NaN for SOI slots assigned blindly).
    """

    component_to_slot: np.ndarray
    signs: np.ndarray
    correlation_scores: np.ndarray

    @property
    def slot_to_component(self) -> np.ndarray:
        inverse = np.empty_like(self.component_to_slot)
        inverse[self.component_to_slot] = np.arange(len(self.component_to_slot))
        return inverse


@dataclass(frozen=True)
class ChannelEstimates:
    """Channel estimates pulled out of the estimated mixing matrix.

    ``h_si_r_hat = h_si_total_hat - h_si_c`` by construction whenever the
    direct SI channel was supplied.
    """

    h_si_total_hat: np.ndarray
    h_si_r_hat: np.ndarray | None
    h_soi_hat: np.ndarray
    s_soi_hat: np.ndarray | None = None


def _signed_correlations(components: np.ndarray, sources: np.ndarray) -> np.ndarray:
    """Cosine similarity of every component row against every source row."""
    comp = components / np.linalg.norm(components, axis=1, keepdims=True)
    src = sources / np.linalg.norm(sources, axis=1, keepdims=True)
    return comp @ src.T


def _best_injection(score: np.ndarray, candidates: list[int], n_slots: int):
    """Injective component->slot map maximizing total score, exhaustively.

    At most 2n components and n slots per stage, so the search space stays
    tiny (P(8, 4) = 1680 at the largest supported size). Ties resolve to the
    lexicographically smallest component tuple because permutations are
    generated in sorted order and only strict improvements are kept.
    """
    best_total = -np.inf
    best = None
    for comps in itertools.permutations(candidates, n_slots):
        total = sum(score[c, s] for s, c in enumerate(comps))
        if total > best_total:
            best_total = total
            best = comps
    return best


def match_components(components: np.ndarray, s_si_known: SignalFrame,
                     s_soi_truth: SignalFrame | None = None,
                     si_match_threshold: float = DEFAULT_SI_MATCH_THRESHOLD) -> ComponentAssignment:
    """Assign recovered components to source slots by correlation.

    SI slots are matched first using only the known SI frame. SOI slots are
    matched against ``s_soi_truth`` when given (evaluation mode); otherwise
    the leftover components fill the SOI slots in index order with +1 sign.

    Raises SiMatchFailure when any matched SI slot falls below
    ``si_match_threshold`` in |correlation|, which flags a failed separation.
    """
    q = components.shape[0]
    n = s_si_known.antennas
    if q != 2 * n:
        raise ValueError(f"expected {2 * n} components for {n} SI streams, got {q}")

    corr_si = _signed_correlations(components, s_si_known.symbols)
    si_comps = _best_injection(np.abs(corr_si), list(range(q)), n)

    slot_of = np.full(q, -1, dtype=np.intp)
    signs = np.ones(q)
    scores = np.full(q, np.nan)
    for slot, comp in enumerate(si_comps):
        score = abs(corr_si[comp, slot])
        if not score >= si_match_threshold:  # NaN-safe: NaN must fail the match
            raise SiMatchFailure(
                f"SI slot {slot} best |corr| {score:.3f} is below threshold {si_match_threshold}")
        slot_of[comp] = slot
        signs[comp] = 1.0 if corr_si[comp, slot] >= 0 else -1.0
        scores[comp] = score

    leftovers = [c for c in range(q) if slot_of[c] < 0]
    if s_soi_truth is not None:
        corr_soi = _signed_correlations(components, s_soi_truth.symbols)
        soi_comps = _best_injection(np.abs(corr_soi), leftovers, n)
        for i, comp in enumerate(soi_comps):
            slot_of[comp] = n + i
            signs[comp] = 1.0 if corr_soi[comp, i] >= 0 else -1.0
            scores[comp] = abs(corr_soi[comp, i])
    else:
        for i, comp in enumerate(leftovers):
            slot_of[comp] = n + i

    return ComponentAssignment(component_to_slot=slot_of, signs=signs,
                               correlation_scores=scores)


def estimate_mixing(whitening: WhiteningResult, ica: IcaOutcome,
                    assignment: ComponentAssignment,
                    s_si_known: SignalFrame) -> np.ndarray:
    """Estimate the stacked mixing matrix, resolved and rescaled.

    The raw estimate is the dewhitening map composed with the transposed
    demixing matrix; its columns are then reordered per the assignment.
    SI columns are scaled so the matching components reproduce the known
    SI frame in the least-squares sense; SOI columns are scaled so the
    recovered SOI streams have unit empirical power (the BPSK convention).
    """
    if not ica.converged:
        raise ValueError("estimate_mixing requires a converged separation")
    base = whitening.dewhitening_matrix @ ica.demixing.T
    q = base.shape[1]
    n = s_si_known.antennas

    mixing = np.empty_like(base)
    for comp in range(q):
        slot = assignment.component_to_slot[comp]
        y = ica.components[comp]
        if slot < n:
            anchor = s_si_known.symbols[slot]
            scale = float(y @ anchor) / float(anchor @ anchor)
        else:
            scale = assignment.signs[comp] * float(np.sqrt(np.mean(y ** 2)))
        mixing[:, slot] = scale * base[:, comp]
    return mixing


def extract_channels(a_hat: np.ndarray, h_si_c_known: ChannelMatrix) -> ChannelEstimates:
    """Split the estimated mixing matrix into channel blocks.

    The total SI channel is the bottom-left block, the SOI channel the
    bottom-right block, and the reflected SI channel follows by subtracting
    the known direct SI channel.
    """
    n = a_hat.shape[0] // 2
    h_si_total = a_hat[n:, :n]
    h_soi = a_hat[n:, n:]
    return ChannelEstimates(h_si_total_hat=h_si_total,
                            h_si_r_hat=h_si_total - h_si_c_known.coefficients,
                            h_soi_hat=h_soi)


def recover_soi(components: np.ndarray,
                assignment: ComponentAssignment) -> tuple[np.ndarray, np.ndarray]:
    """Extract the SOI streams: sign corrected and scaled to unit power.

    Returns the soft estimate and its hard decisions (symbol signs).
    """
    q = components.shape[0]
    n = q // 2
    s_hat = np.empty((n, components.shape[1]))
    for comp in range(q):
        slot = assignment.component_to_slot[comp]
        if slot < n:
            continue
        y = components[comp]
        rms = float(np.sqrt(np.mean(y ** 2)))
        s_hat[slot - n] = assignment.signs[comp] * y / rms
    return s_hat, np.sign(s_hat)


def ls_baseline(observation: StackedObservation, s_si_known: SignalFrame,
                s_soi_truth: SignalFrame,
                h_si_c_known: ChannelMatrix | None = None) -> ChannelEstimates:
    """Least-squares channel oracle using both source frames.

    Regresses the receive block on the stacked true sources. Valid only in
    evaluation mode (it needs the SOI ground truth); serves as the accuracy
    reference that separation-based estimates are compared against.
    """
    sources = np.vstack([s_si_known.symbols, s_soi_truth.symbols])
    gram = sources @ sources.T
    eigval = np.linalg.eigvalsh(gram)
    if eigval[0] <= 1e-10 * max(eigval[-1], np.finfo(float).tiny):
        raise DegenerateFrame("stacked source matrix is rank deficient")
    received = observation.received_block
    h_blocks = np.linalg.solve(gram, sources @ received.T).T
    n = s_si_known.antennas
    h_si_total = h_blocks[:, :n]
    h_si_r = None
    if h_si_c_known is not None:
        h_si_r = h_si_total - h_si_c_known.coefficients
    return ChannelEstimates(h_si_total_hat=h_si_total, h_si_r_hat=h_si_r,
                            h_soi_hat=h_blocks[:, n:])
