"""Antenna subset selection for on-off beamforming.

Every transmit antenna is either connected to the single RF chain or left
off, so a beam is just a subset T of the complex channel coefficients and
its quality is driven by the beam sum f = sum_{j in T} h_j.  Two objectives
are supported:

* separate (per-antenna power): maximize |f|^2,
* total (shared power, split evenly): maximize |f|^2 / |T|.

The separate-mode optimum is found by an angular sweep: each coefficient's
perpendicular through the origin splits the plane, the 2N perpendiculars cut
it into 2N sectors, and the optimum equals the best sector set (the set of
coefficients with positive projection on any direction inside the sector).
The total-mode optimum is found by enumerating every direction at which the
projection ranking of the coefficients can change and evaluating all prefix
cardinalities of the ranking via prefix sums.

All selectors are pure functions; the batched variants (`*_batch`) operate
on a (trials, N) coefficient matrix at once and are what the Monte Carlo
engine calls.  Single-realization calls run through the same code with one
row, so both paths produce identical selections.

Tie policy (applied everywhere): among subsets whose objectives agree
within 1e-12 relative, prefer the smaller cardinality, then the
lexicographically smallest sorted index list.  An all-zero channel returns
{0} with objective 0 instead of raising, so Monte Carlo loops stay total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization

MODE_SEPARATE = "separate"
MODE_TOTAL = "total"

# relative tolerance below which two objectives count as tied
_TIE_RTOL = 1e-12
# crossing angles closer than this are effectively duplicated; merging them
# only removes zero-width arcs and never changes the scanned candidate sets
_ANGLE_MERGE = 1e-12
# element budget for the (chunk, arcs, N) work arrays of the total-mode scan
_SCAN_BUDGET = 2_500_000

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BeamSelection:
    """A chosen antenna index set and its complex beam sum."""

    indices: tuple
    beam_sum: complex

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValueError("a beam selection must contain at least one antenna")
        if any(i < 0 for i in idx) or any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing and nonnegative: {idx}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "beam_sum", complex(self.beam_sum))

    @property
    def cardinality(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SelectionResult:
    """A beam selection together with its objective value and power mode."""

    selection: BeamSelection
    objective: float
    mode: str

    def __post_init__(self):
        if self.mode not in (MODE_SEPARATE, MODE_TOTAL):
            raise ValueError(f"unknown power mode: {self.mode!r}")
        object.__setattr__(self, "objective", float(self.objective))


def _coeffs(ch: ChannelRealization) -> np.ndarray:
    if not isinstance(ch, ChannelRealization):
        ch = ChannelRealization(np.asarray(ch, dtype=np.complex128))
    return ch.coefficients


def _masked_sum(H: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Row-wise beam sums over selected entries, summed in fixed index order."""
    return np.where(mask, H, 0.0).sum(axis=1)


def _power(z) -> np.ndarray:
    """|z|^2 as re^2 + im^2; the one floating form used for every objective,
    so equal selections yield bitwise-equal objectives across selectors."""
    z = np.asarray(z)
    return z.real ** 2 + z.imag ** 2


def _result_from_mask(h: np.ndarray, mask: np.ndarray, mode: str) -> SelectionResult:
    indices = np.flatnonzero(mask)
    beam_sum = complex(np.where(mask, h, 0.0).sum())
    objective = float(_power(beam_sum))
    if mode == MODE_TOTAL:
        objective /= indices.size
    return SelectionResult(BeamSelection(tuple(indices), beam_sum), objective, mode)


def _degenerate(n: int, mode: str) -> SelectionResult:
    # all-zero channel: probability-zero under the fading model, documented
    # convention is antenna 0 with objective 0
    return SelectionResult(BeamSelection((0,), 0.0 + 0.0j), 0.0, mode)


# ---------------------------------------------------------------------------
# OABF-s: optimal subset under the per-antenna power constraint
# ---------------------------------------------------------------------------

def _sweep_separate(H: np.ndarray):
    """Sector sweep over a (T, 2N) angular event list.

    Coefficient j is active for sweep directions within +-pi/2 of its own
    phase, so it enters at theta_j - pi/2 and leaves at theta_j + pi/2.
    Sorting the 2N boundary angles and cumulatively applying the add/remove
    events yields the beam sum of every sector in one pass.  The state
    after the last event equals the state before the first (the wrap
    sector), which fixes the initial membership combinatorially: j starts
    active exactly when its add event sorts after its remove event.

    Returns per-row arrays: sector objectives (|f|^2, -1 for empty sets),
    sector cardinalities, event positions p_add/p_rem per coefficient, and
    the wrap-sector membership.  All entries of H must be nonzero.
    """
    T, N = H.shape
    theta = np.angle(H)
    ang = np.concatenate([np.mod(theta - 0.5 * np.pi, _TWO_PI),
                          np.mod(theta + 0.5 * np.pi, _TWO_PI)], axis=1)
    values = np.concatenate([H, -H], axis=1)
    deltas = np.concatenate([np.ones((T, N), dtype=np.int64),
                             -np.ones((T, N), dtype=np.int64)], axis=1)
    order = np.argsort(ang, axis=1, kind="stable")
    pos = np.empty_like(order)
    np.put_along_axis(pos, order, np.arange(2 * N, dtype=order.dtype)[None, :], axis=1)
    p_add, p_rem = pos[:, :N], pos[:, N:]
    active0 = p_add > p_rem

    f0 = _masked_sum(H, active0)
    c0 = active0.sum(axis=1)
    f_states = f0[:, None] + np.cumsum(np.take_along_axis(values, order, axis=1), axis=1)
    c_states = c0[:, None] + np.cumsum(np.take_along_axis(deltas, order, axis=1), axis=1)
    obj = _power(f_states)
    obj[c_states < 1] = -1.0
    return obj, c_states, p_add, p_rem, active0


def _members_at(p_add, p_rem, active0, positions):
    """Membership masks after processing the events up to `positions` (per row)."""
    k = np.asarray(positions)[:, None]
    a_done = p_add <= k
    r_done = p_rem <= k
    return np.where(a_done ^ r_done, a_done, active0)


def _tie_break_sets(h: np.ndarray, masks: list, mode: str):
    """Pick among candidate masks: max objective, then min |T|, then lex order."""
    best = None
    for mask in masks:
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            continue
        obj = float(_power(np.where(mask, h, 0.0).sum()))
        if mode == MODE_TOTAL:
            obj /= idx.size
        key = (idx.size, tuple(idx))
        if best is None or obj > best[0] * (1.0 + _TIE_RTOL):
            best = (obj, key, mask)
        elif obj >= best[0] * (1.0 - _TIE_RTOL) and key < best[1]:
            best = (max(obj, best[0]), key, mask)
    return best[2]


def oabf_s_batch(H: np.ndarray):
    """Separate-mode optimum per row of a nonzero (T, N) coefficient matrix.

    Returns (mask, beam_sum, objective, cardinality) arrays.  Objectives are
    recomputed from the winning set so they are exact functions of the
    selection, independent of sweep round-off.
    """
    H = np.ascontiguousarray(H, dtype=np.complex128)
    T, N = H.shape
    if not np.all(H.real ** 2 + H.imag ** 2 > 0.0):
        raise ValueError("oabf_s_batch requires all coefficients nonzero")
    obj, c_states, p_add, p_rem, active0 = _sweep_separate(H)
    best = np.argmax(obj, axis=1)
    rows = np.arange(T)
    row_max = obj[rows, best]
    tied_rows = np.flatnonzero((obj >= row_max[:, None] * (1.0 - _TIE_RTOL)).sum(axis=1) > 1)

    mask = _members_at(p_add, p_rem, active0, best)
    for r in tied_rows:
        positions = np.flatnonzero(obj[r] >= row_max[r] * (1.0 - _TIE_RTOL))
        cand = _members_at(p_add[r][None, :].repeat(positions.size, axis=0),
                           p_rem[r][None, :].repeat(positions.size, axis=0),
                           active0[r][None, :].repeat(positions.size, axis=0),
                           positions)
        mask[r] = _tie_break_sets(H[r], list(cand), MODE_SEPARATE)

    beam_sum = _masked_sum(H, mask)
    return mask, beam_sum, _power(beam_sum), mask.sum(axis=1)


def oabf_s(ch: ChannelRealization) -> SelectionResult:
    """Optimal on-off beam under the per-antenna power constraint.

    Implements the 2N-sector angular sweep; the returned set maximizes
    |sum_{j in T} h_j|^2 over all nonempty subsets.  Zero coefficients are
    never selected (they sit on every sector boundary).
    """
    h = _coeffs(ch)
    nz = np.flatnonzero(h.real ** 2 + h.imag ** 2 > 0.0)
    if nz.size == 0:
        return _degenerate(h.size, MODE_SEPARATE)
    sub_mask, _, _, _ = oabf_s_batch(h[nz][None, :])
    mask = np.zeros(h.size, dtype=bool)
    mask[nz[sub_mask[0]]] = True
    return _result_from_mask(h, mask, MODE_SEPARATE)


# ---------------------------------------------------------------------------
# OABF-b: bridge heuristic (half-plane of the strongest coefficient)
# ---------------------------------------------------------------------------

def oabf_b_batch(H: np.ndarray):
    """Bridge selection per row: strongest coefficient plus its half-plane."""
    H = np.ascontiguousarray(H, dtype=np.complex128)
    T, N = H.shape
    rows = np.arange(T)
    m = np.argmax(np.abs(H), axis=1)
    hm = H[rows, m]
    proj = H.real * hm.real[:, None] + H.imag * hm.imag[:, None]
    mask = proj >= 0.0
    beam_sum = _masked_sum(H, mask)
    return mask, beam_sum, _power(beam_sum), mask.sum(axis=1)


def oabf_b(ch: ChannelRealization) -> SelectionResult:
    """Suboptimal bridge selector: pick m = argmax |h_j|, then every
    coefficient whose projection on h_m is nonnegative (Re(h_i conj(h_m)) >= 0)."""
    h = _coeffs(ch)
    if not np.any(np.abs(h) > 0.0):
        return _degenerate(h.size, MODE_SEPARATE)
    mask, _, _, _ = oabf_b_batch(h[None, :])
    return _result_from_mask(h, mask[0], MODE_SEPARATE)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def antenna_select_batch(H: np.ndarray):
    """Single strongest antenna per row (smallest index on ties)."""
    H = np.ascontiguousarray(H, dtype=np.complex128)
    T, N = H.shape
    rows = np.arange(T)
    m = np.argmax(np.abs(H), axis=1)
    mask = np.zeros((T, N), dtype=bool)
    mask[rows, m] = True
    beam_sum = H[rows, m]
    return mask, beam_sum, _power(beam_sum), np.ones(T, dtype=np.int64)


def antenna_select(ch: ChannelRealization) -> SelectionResult:
    """Classic antenna selection: transmit on the single strongest antenna."""
    h = _coeffs(ch)
    m = int(np.argmax(np.abs(h)))
    return SelectionResult(BeamSelection((m,), complex(h[m])), float(_power(h[m])), MODE_SEPARATE)


def phase_aligned_value(ch: ChannelRealization) -> float:
    """Received power of ideal equal-gain (phase-shifter) beamforming: (sum |h_j|)^2."""
    h = _coeffs(ch)
    return float(np.abs(h).sum() ** 2)


# ---------------------------------------------------------------------------
# OABF-t: optimal subset under the total power constraint
# ---------------------------------------------------------------------------

def crossing_angles(ch: ChannelRealization) -> np.ndarray:
    """Sorted sweep directions in [0, 2pi) where the projection ranking can change.

    The ranking of the signed projections |h_j| cos(phi - theta_j) changes
    only where two of them are equal, i.e. at arg(h_i - h_j) +- pi/2 for a
    pair, and each single projection changes sign at theta_j +- pi/2.  The
    returned list is the deduplicated union of both families (angles closer
    than 1e-12 rad are merged); between consecutive entries the descending
    projection ranking of all coefficients is constant.
    """
    h = _coeffs(ch)
    parts = []
    nz = h[np.abs(h) > 0.0]
    if nz.size:
        th = np.angle(nz)
        parts.append(th - 0.5 * np.pi)
        parts.append(th + 0.5 * np.pi)
    if h.size > 1:
        iu, ju = np.triu_indices(h.size, k=1)
        d = h[iu] - h[ju]
        d = d[np.abs(d) > 0.0]
        if d.size:
            da = np.angle(d)
            parts.append(da - 0.5 * np.pi)
            parts.append(da + 0.5 * np.pi)
    if not parts:
        return np.empty(0, dtype=np.float64)
    ang = np.sort(np.mod(np.concatenate(parts), _TWO_PI))
    keep = np.empty(ang.size, dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(ang) > _ANGLE_MERGE
    ang = ang[keep]
    if ang.size > 1 and (ang[0] + _TWO_PI - ang[-1]) <= _ANGLE_MERGE:
        ang = ang[:-1]
    return ang


def topk_by_projection(ch: ChannelRealization, direction: float, k: int) -> list:
    """Indices of the k largest projections |h_j| cos(direction - theta_j),
    in descending projection order, ties broken by smaller index."""
    h = _coeffs(ch)
    n = h.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    proj = h.real * np.cos(direction) + h.imag * np.sin(direction)
    order = np.lexsort((np.arange(n), -proj))
    return [int(i) for i in order[:k]]


def _scan_arc_angles(H: np.ndarray) -> np.ndarray:
    """Rectangular per-row superset of the crossing angles (no dedup needed:
    duplicate entries only create zero-width arcs, which subdivide but never
    remove any candidate ranking)."""
    T, N = H.shape
    th = np.angle(H)
    parts = [th - 0.5 * np.pi, th + 0.5 * np.pi]
    if N > 1:
        iu, ju = np.triu_indices(N, k=1)
        da = np.angle(H[:, iu] - H[:, ju])
        parts.extend([da - 0.5 * np.pi, da + 0.5 * np.pi])
    return np.mod(np.concatenate(parts, axis=1), _TWO_PI)


def oabf_t_batch(H: np.ndarray, resolve_ties: bool = False):
    """Total-mode optimum per row: maximize |sum_{j in T} h_j|^2 / |T|.

    For every arc between consecutive crossing angles, the coefficients are
    ranked by descending projection on the arc midpoint and every prefix
    cardinality K is scored as |prefix sum|^2 / K; the best (arc, K) wins.
    This visits every set reachable as "top-K along some direction", which
    contains the optimum for every K.

    The vectorized pass breaks objective ties by smaller K and first scan
    position; with resolve_ties=True (the single-realization path) exact
    ties additionally fall back to the full lexicographic tie policy.
    Ties between distinct sets have probability zero under continuous
    fading, so the Monte Carlo engine runs with resolve_ties=False.
    """
    H = np.ascontiguousarray(H, dtype=np.complex128)
    T, N = H.shape
    mask = np.zeros((T, N), dtype=bool)
    kbest_all = np.empty(T, dtype=np.int64)
    M = N * N + N  # 2N sign-change angles + N(N-1) pairwise crossings

    k_pattern = np.tile(np.arange(1, N + 1, dtype=np.int64), M)
    k_weights = np.arange(1, N + 1, dtype=np.float64)
    chunk = max(1, _SCAN_BUDGET // (M * N))
    for lo in range(0, T, chunk):
        hi = min(T, lo + chunk)
        Hc = H[lo:hi]
        ang = _scan_arc_angles(Hc)
        ang.sort(axis=1)
        mc = np.empty_like(ang)
        mc[:, :-1] = 0.5 * (ang[:, :-1] + ang[:, 1:])
        mc[:, -1] = 0.5 * (ang[:, -1] + ang[:, 0] + _TWO_PI)
        proj = (Hc.real[:, None, :] * np.cos(mc)[:, :, None]
                + Hc.imag[:, None, :] * np.sin(mc)[:, :, None])
        order = np.argsort(-proj, axis=2, kind="stable")
        prefix = np.cumsum(np.take_along_axis(
            np.broadcast_to(Hc[:, None, :], order.shape), order, axis=2), axis=2)
        cand = _power(prefix) / k_weights
        flat = cand.reshape(hi - lo, M * N)
        row_max = flat.max(axis=1)
        tied = flat >= row_max[:, None] * (1.0 - _TIE_RTOL)
        k_tied = np.where(tied, k_pattern[None, :], N + 1)
        k_min = k_tied.min(axis=1)
        pick = np.argmax(tied & (k_pattern[None, :] == k_min[:, None]), axis=1)
        arc, kbest = pick // N, pick % N + 1

        b_rows = np.arange(hi - lo)
        ranked = order[b_rows, arc, :]
        take = np.arange(N)[None, :] < kbest[:, None]
        np.put_along_axis(mask[lo:hi], ranked, take, axis=1)
        kbest_all[lo:hi] = kbest

        if resolve_ties:
            for r in np.flatnonzero(tied.sum(axis=1) > 1):
                positions = np.flatnonzero(tied[r])
                cands, seen = [], set()
                for p in positions:
                    idx = np.sort(order[r, p // N, : p % N + 1])
                    key = tuple(int(i) for i in idx)
                    if key not in seen:
                        seen.add(key)
                        m = np.zeros(N, dtype=bool)
                        m[idx] = True
                        cands.append(m)
                mask[lo + r] = _tie_break_sets(H[lo + r], cands, MODE_TOTAL)
                kbest_all[lo + r] = mask[lo + r].sum()

    beam_sum = _masked_sum(H, mask)
    return mask, beam_sum, _power(beam_sum) / kbest_all, kbest_all


def oabf_t(ch: ChannelRealization) -> SelectionResult:
    """Optimal on-off beam under the total power constraint (power split
    evenly over the K active antennas): maximizes |sum h_j|^2 / K."""
    h = _coeffs(ch)
    if not np.any(np.abs(h) > 0.0):
        return _degenerate(h.size, MODE_TOTAL)
    mask, _, _, _ = oabf_t_batch(h[None, :], resolve_ties=True)
    return _result_from_mask(h, mask[0], MODE_TOTAL)


# ---------------------------------------------------------------------------
# exhaustive oracles
# ---------------------------------------------------------------------------

_BRUTE_FORCE_MAX_N = 20


def _brute_force(ch: ChannelRealization, mode: str) -> SelectionResult:
    h = _coeffs(ch)
    n = h.size
    if n > _BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"brute force capacity exceeded: N={n} > {_BRUTE_FORCE_MAX_N} (2^N subsets)")
    sums = np.zeros(1 << n, dtype=np.complex128)
    for b in range(n):
        lo = 1 << b
        sums[lo: 2 * lo] = sums[:lo] + h[b]
    counts = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    obj = _power(sums)
    if mode == MODE_TOTAL:
        obj[1:] = obj[1:] / counts[1:]
    obj[0] = -1.0
    best = obj.max()
    tied = np.flatnonzero(obj >= best * (1.0 - _TIE_RTOL))
    tied = tied[counts[tied] == counts[tied].min()]
    key = min(tuple(j for j in range(n) if m >> j & 1) for m in tied)
    mask = np.zeros(n, dtype=bool)
    mask[list(key)] = True
    return _result_from_mask(h, mask, mode)


def brute_force_separate(ch: ChannelRealization) -> SelectionResult:
    """Exhaustive maximum of |sum h_j|^2 over all nonempty subsets (N <= 20)."""
    return _brute_force(ch, MODE_SEPARATE)


def brute_force_total(ch: ChannelRealization) -> SelectionResult:
    """Exhaustive maximum of |sum h_j|^2 / K over all nonempty subsets (N <= 20)."""
    return _brute_force(ch, MODE_TOTAL)
