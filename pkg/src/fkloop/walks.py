"""Monte Carlo machinery for the backward burger walks.

A run reads i.i.d. letters backwards from the origin and parses them on the
fly into blocks: single top-level letters and maximal F-excursions.  The
hamburger walk steps -1 on h, +1 on H and by the reduced length of each
type-c excursion; the cheeseburger walk is the mirror image.  tau^h is the
number of hamburger steps when that walk first hits -1, tau-tilde the number
of blocks when either walk first hits -1.

Letters are produced by a counter-based generator keyed by (seed, run),
so campaigns are reproducible and runs independent.  The fast path is a
numba kernel; a letter-by-letter pure Python engine with identical output
serves as the reference implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .analytics import ModelParams, partition_F

__all__ = [
    "BackwardStream",
    "WalkOutcome",
    "MCEstimate",
    "sample_backward_stream",
    "reduced_walk",
    "hitting_outcome",
    "run_campaign",
    "CampaignResult",
    "mc_cluster_perimeter",
    "mc_loop_perimeter",
    "verify_dictionary",
    "geometric_coupling_check",
    "xi_centred_check",
    "sample_xi",
    "tail_slope_wls",
    "hill_tail_index",
]

LETTERS = "chCHF"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finaliser; the counter RNG is u_i = mix(key + i*gamma)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _run_key(seed: int, run_index: int) -> int:
    return _mix64((_mix64(seed) ^ (run_index * _GAMMA)) & _MASK)


def _thresholds(p: float) -> np.ndarray:
    """Cumulative letter law: c, h with 1/4, C, H with (1-p)/4, F with p/2."""
    if not (0.0 < p < 0.5):
        raise ValueError(f"p must lie in (0, 1/2), got {p}")
    return np.array(
        [0.25, 0.5, 0.5 + (1 - p) / 4, 0.5 + (1 - p) / 2, 1.0], dtype=np.float64
    )


class BackwardStream:
    """Reproducible i.i.d. letter stream for one run, read right to left:
    the n-th letter produced is X(-n-1) relative to the origin."""

    def __init__(self, seed: int, p: float, run_index: int = 0):
        self.seed = seed
        self.p = p
        self.run_index = run_index
        self._key = _run_key(seed, run_index)
        self._i = 0
        self._cum = _thresholds(p)

    def uniform(self) -> float:
        u = _mix64((self._key + (self._i + 1) * _GAMMA) & _MASK)
        self._i += 1
        return (u >> 11) * 2.0**-53

    def next_letter(self) -> str:
        u = self.uniform()
        return LETTERS[int(np.searchsorted(self._cum, u, side="right"))]

    def letters(self, n: int) -> str:
        return "".join(self.next_letter() for _ in range(n))


def sample_backward_stream(seed: int, p: float, run_index: int = 0) -> BackwardStream:
    return BackwardStream(seed=seed, p=p, run_index=run_index)


# ---------------------------------------------------------------------------
# Reference engine (letter by letter, python)
# ---------------------------------------------------------------------------


@dataclass
class WalkOutcome:
    tau_h: int | None  # number of h-steps at the first hit of -1, if seen
    tau_c: int | None
    first: str | None  # 'h' or 'c': which coordinate hit -1 first
    tau_tilde: int | None  # block count at the first hit of either
    letters_used: int
    censored: bool  # a letter or step cap fired before tau^h resolved


class _Parser:
    """Incremental block parser shared by the reference walks.

    Keeps only the open maximal excursion: order entries of the two lazy
    stacks (C-or-F poppable by c, H-or-F poppable by h) with shared
    liveness for F entries.  Top-level pending orders are dropped since
    they never influence the walk.
    """

    def __init__(self):
        self.reset()

    def reset(self):
        self.cf: list[int] = []  # excursion letter indices, F encoded live
        self.hf: list[int] = []
        self.kind: dict[int, str] = {}
        self.alive: set[int] = set()
        self.eidx = 0

    @property
    def open(self) -> bool:
        return self.eidx > 0

    def feed(self, letter: str):
        """Returns (block_side, jump) when a block completes, else None.

        block_side is 'h' for blocks moving the hamburger walk, 'c' for the
        cheeseburger walk; jump is the signed step.
        """
        if not self.open:
            if letter == "h":
                return ("h", -1)
            if letter == "H":
                return ("h", +1)
            if letter == "c":
                return ("c", -1)
            if letter == "C":
                return ("c", +1)
            self._push(letter)
            return None
        if letter in "CHF":
            self._push(letter)
            return None
        stack = self.hf if letter == "h" else self.cf
        other = self.cf if letter == "h" else self.hf
        while True:
            idx = stack.pop()
            if self.kind[idx] != "F" or idx in self.alive:
                break
        if self.kind[idx] == "F":
            self.alive.discard(idx)
            if idx == 0:  # the opening F: the maximal excursion closes
                # no F on the other stack can still be alive (it would have
                # been popped before the opening F), so the survivors are
                # exactly the orders of the opposite type
                jump = sum(1 for j in other if self.kind[j] != "F")
                side = "c" if letter == "h" else "h"
                self.reset()
                return (side, jump)
        return None

    def _push(self, letter: str):
        idx = self.eidx
        self.eidx += 1
        self.kind[idx] = letter
        if letter == "C":
            self.cf.append(idx)
        elif letter == "H":
            self.hf.append(idx)
        else:
            self.cf.append(idx)
            self.hf.append(idx)
            self.alive.add(idx)


def reduced_walk(stream: BackwardStream, cap_letters: int = 10**5, max_blocks: int = 10**9):
    """Lazy trajectory (h-tilde, c-tilde) per block plus the non-lazy walks.

    Returns (lazy, h_steps, c_steps, letters_used) where lazy is the list of
    (h, c) after each block, and h_steps / c_steps are the signed step
    sequences of the coordinate that moved (including zero jumps from
    excursions of reduced length zero, which count as steps of the
    opposite-type walk while leaving it in place).
    """
    parser = _Parser()
    lazy: list[tuple[int, int]] = []
    h_steps: list[int] = []
    c_steps: list[int] = []
    h = c = 0
    used = 0
    while used < cap_letters and len(lazy) < max_blocks:
        out = parser.feed(stream.next_letter())
        used += 1
        if out is None:
            continue
        side, jump = out
        if side == "h":
            h += jump
            h_steps.append(jump)
        else:
            c += jump
            c_steps.append(jump)
        lazy.append((h, c))
    return lazy, h_steps, c_steps, used


def hitting_outcome(
    stream: BackwardStream, cap_letters: int = 10**7, step_cap: int = 10**9
) -> WalkOutcome:
    """Run one walk until the hamburger coordinate hits -1 (or a cap fires),
    recording which coordinate hit -1 first along the way."""
    parser = _Parser()
    h = c = 0
    s_h = s_c = blocks = 0
    tau_h = tau_c = tau_tilde = None
    first = None
    used = 0
    while used < cap_letters:
        out = parser.feed(stream.next_letter())
        used += 1
        if out is None:
            continue
        blocks += 1
        side, jump = out
        if side == "h":
            s_h += 1
            h += jump
            if h == -1 and tau_h is None:
                tau_h = s_h
                if first is None:
                    first = "h"
                    tau_tilde = blocks
                break
            if s_h > step_cap:
                break
        else:
            s_c += 1
            c += jump
            if c == -1 and tau_c is None:
                tau_c = s_c
                if first is None:
                    first = "c"
                    tau_tilde = blocks
    return WalkOutcome(
        tau_h=tau_h,
        tau_c=tau_c,
        first=first,
        tau_tilde=tau_tilde,
        letters_used=used,
        censored=tau_h is None and s_h <= step_cap,
    )


# ---------------------------------------------------------------------------
# Fast campaign kernel
# ---------------------------------------------------------------------------


@njit(cache=True)
def _kernel(seed, n_runs, cum, cap_letters, step_cap, tau_h, first, taut, letters):
    gamma = np.uint64(0x9E3779B97F4A7C15)
    mul1 = np.uint64(0xBF58476D1CE4E5B9)
    mul2 = np.uint64(0x94D049BB133111EB)

    def mix(z):
        z = (z ^ (z >> np.uint64(30))) * mul1
        z = (z ^ (z >> np.uint64(27))) * mul2
        return z ^ (z >> np.uint64(31))

    seed_m = mix(np.uint64(seed))
    c0, c1, c2, c3 = cum[0], cum[1], cum[2], cum[3]
    size = 1 << 12
    cf = np.empty(size, dtype=np.int64)
    hf = np.empty(size, dtype=np.int64)
    kind = np.empty(size, dtype=np.uint8)  # 0 C, 1 H, 2 F
    alive = np.empty(size, dtype=np.uint8)
    for r in range(n_runs):
        key = mix(seed_m ^ (np.uint64(r) * gamma))
        ctr = np.uint64(0)
        ncf = 0
        nhf = 0
        eidx = 0
        h = 0
        c = 0
        s_h = 0
        s_c = 0
        blocks = 0
        t_h = np.int64(-2)
        fst = np.int64(-1)
        tt = np.int64(-1)
        used = np.int64(0)
        while used < cap_letters:
            ctr += np.uint64(1)
            u64 = mix(key + ctr * gamma)
            u = (u64 >> np.uint64(11)) * (2.0**-53)
            used += 1
            if u < c0:
                letter = 0  # c
            elif u < c1:
                letter = 1  # h
            elif u < c2:
                letter = 2  # C
            elif u < c3:
                letter = 3  # H
            else:
                letter = 4  # F
            side = -1
            jump = 0
            if eidx == 0:  # top level
                if letter == 1:
                    side = 0
                    jump = -1
                elif letter == 3:
                    side = 0
                    jump = 1
                elif letter == 0:
                    side = 1
                    jump = -1
                elif letter == 2:
                    side = 1
                    jump = 1
                else:  # F opens an excursion
                    kind[0] = 2
                    alive[0] = 1
                    cf[0] = 0
                    hf[0] = 0
                    ncf = 1
                    nhf = 1
                    eidx = 1
            elif letter >= 2:  # push C, H or F
                if eidx >= size:
                    size2 = size * 2
                    cf2 = np.empty(size2, dtype=np.int64)
                    hf2 = np.empty(size2, dtype=np.int64)
                    kind2 = np.empty(size2, dtype=np.uint8)
                    alive2 = np.empty(size2, dtype=np.uint8)
                    cf2[:size] = cf
                    hf2[:size] = hf
                    kind2[:size] = kind
                    alive2[:size] = alive
                    cf, hf, kind, alive = cf2, hf2, kind2, alive2
                    size = size2
                if letter == 2:
                    kind[eidx] = 0
                    cf[ncf] = eidx
                    ncf += 1
                elif letter == 3:
                    kind[eidx] = 1
                    hf[nhf] = eidx
                    nhf += 1
                else:
                    kind[eidx] = 2
                    alive[eidx] = 1
                    cf[ncf] = eidx
                    ncf += 1
                    hf[nhf] = eidx
                    nhf += 1
                eidx += 1
            else:  # burger pops inside the excursion
                if letter == 1:  # h pops H-or-F
                    while True:
                        nhf -= 1
                        idx = hf[nhf]
                        if kind[idx] != 2 or alive[idx] == 1:
                            break
                    if kind[idx] == 2:
                        alive[idx] = 0
                        if idx == 0:  # closes with type h: c-side block
                            jump = 0
                            for t in range(ncf):
                                if kind[cf[t]] != 2:
                                    jump += 1
                            side = 1
                            ncf = 0
                            nhf = 0
                            eidx = 0
                else:  # c pops C-or-F
                    while True:
                        ncf -= 1
                        idx = cf[ncf]
                        if kind[idx] != 2 or alive[idx] == 1:
                            break
                    if kind[idx] == 2:
                        alive[idx] = 0
                        if idx == 0:  # closes with type c: h-side block
                            jump = 0
                            for t in range(nhf):
                                if kind[hf[t]] != 2:
                                    jump += 1
                            side = 0
                            ncf = 0
                            nhf = 0
                            eidx = 0
            if side == 0:
                blocks += 1
                s_h += 1
                h += jump
                if h == -1:
                    t_h = s_h
                    if fst < 0:
                        fst = 0
                        tt = blocks
                    break
                if s_h > step_cap:
                    t_h = -1  # resolved beyond the tracked range
                    break
            elif side == 1:
                blocks += 1
                s_c += 1
                c += jump
                if c == -1 and fst < 0:
                    fst = 1
                    tt = blocks
        tau_h[r] = t_h
        first[r] = fst
        taut[r] = tt
        letters[r] = used


@dataclass
class CampaignResult:
    """Per-run outcomes: tau_h (>=1 resolved, -1 beyond step cap, -2
    letter-censored), first (-1 none / 0 h / 1 c), tau_tilde, letters."""

    seed: int
    p: float
    n_runs: int
    cap_letters: int
    step_cap: int
    tau_h: np.ndarray
    first: np.ndarray
    tau_tilde: np.ndarray
    letters: np.ndarray

    @property
    def n_censored(self) -> int:
        return int(np.sum(self.tau_h == -2))


def run_campaign(
    p: float,
    n_samples: int,
    seed: int,
    cap_letters: int = 10**7,
    step_cap: int = 10**9,
) -> CampaignResult:
    """Run n_samples independent walks until the hamburger walk resolves."""
    cum = _thresholds(p)
    tau_h = np.empty(n_samples, dtype=np.int64)
    first = np.empty(n_samples, dtype=np.int64)
    taut = np.empty(n_samples, dtype=np.int64)
    letters = np.empty(n_samples, dtype=np.int64)
    _kernel(seed, n_samples, cum, cap_letters, step_cap, tau_h, first, taut, letters)
    return CampaignResult(
        seed=seed,
        p=p,
        n_runs=n_samples,
        cap_letters=cap_letters,
        step_cap=step_cap,
        tau_h=tau_h,
        first=first,
        tau_tilde=taut,
        letters=letters,
    )


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


@dataclass
class MCEstimate:
    point: float
    stderr: float
    n_total: int
    n_censored: int
    seed: int
    bracket: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo <= self.point <= hi):
            raise ValueError("bracket must contain the point estimate")


def _binomial_estimate(hits: int, n: int, censored: int, seed: int) -> MCEstimate:
    point = hits / n
    stderr = math.sqrt(max(point * (1 - point), 1e-300) / n)
    return MCEstimate(
        point=point,
        stderr=stderr,
        n_total=n,
        n_censored=censored,
        seed=seed,
        bracket=(hits / n, (hits + censored) / n),
    )


def mc_cluster_perimeter(
    params: ModelParams,
    n_samples: int,
    seed: int,
    ell_max: int = 1000,
    cap_letters: int = 10**7,
    campaign: CampaignResult = None,
) -> dict[int, MCEstimate]:
    """Histogram of the cluster boundary length tau^h - 1 conditioned on the
    hamburger walk hitting -1 first."""
    camp = campaign
    if camp is None:
        camp = run_campaign(
            params.p, n_samples, seed, cap_letters=cap_letters, step_cap=ell_max + 2
        )
    sel = (camp.first == 0) & (camp.tau_h >= 1)
    n_cond = int(np.sum(camp.first == 0))
    if n_cond == 0:
        raise ValueError("no run resolved with the hamburger walk first")
    vals = camp.tau_h[sel] - 1
    counts = np.bincount(vals, minlength=ell_max + 1)
    censored = camp.n_censored
    return {
        ell: _binomial_estimate(int(counts[ell]), n_cond, censored, seed)
        for ell in range(ell_max + 1)
    }


def mc_loop_perimeter(
    params: ModelParams,
    n_samples: int,
    seed: int,
    ell_max: int = 1000,
    cap_letters: int = 10**7,
    campaign: CampaignResult = None,
) -> dict[int, MCEstimate]:
    """Histogram of the loop length tau-tilde (blocks until either walk
    hits -1).

    Runs stopped by the step cap before either walk reached -1 have
    tau-tilde larger than the cap, so they count as overflow beyond
    ell_max rather than censored mass; only letter-cap truncation leaves
    the value genuinely unknown.
    """
    camp = campaign
    if camp is None:
        camp = run_campaign(
            params.p, n_samples, seed, cap_letters=cap_letters, step_cap=ell_max + 2
        )
    n = camp.n_runs
    resolved = camp.tau_tilde[camp.tau_tilde >= 1]
    censored = int(np.sum((camp.tau_tilde == -1) & (camp.tau_h == -2)))
    counts = np.bincount(
        np.minimum(resolved, ell_max + 1), minlength=ell_max + 2
    )
    return {
        ell: _binomial_estimate(int(counts[ell]), n, censored, camp.seed)
        for ell in range(1, ell_max + 1)
    }


def verify_dictionary(
    params: ModelParams,
    n_samples: int,
    seed: int,
    ell_max: int = 10,
    cap_letters: int = 10**7,
    campaign: CampaignResult = None,
) -> list[dict]:
    """Per-ell ratio 2 P(tau^h = ell+1) gamma_plus^ell / F_ell with CI.

    The hitting law of the hamburger walk determines the loop partition
    function: P(tau^h = ell+1) = C (2 x_c)^{ell+1} F_ell with C = 1/(4 x_c)
    pinned by ell = 0, so each ratio should be 1.
    """
    if campaign is None:
        campaign = run_campaign(
            params.p, n_samples, seed, cap_letters=cap_letters, step_cap=ell_max + 2
        )
    n = campaign.n_runs
    censored = campaign.n_censored
    rows = []
    for ell in range(ell_max + 1):
        hits = int(np.sum(campaign.tau_h == ell + 1))
        est = _binomial_estimate(hits, n, censored, campaign.seed)
        f_ell = partition_F(ell, params)
        scale = 2.0 * params.gamma_plus**ell / f_ell
        rows.append(
            {
                "ell": ell,
                "p_hat": est,
                "ratio": est.point * scale,
                "ratio_sigma": est.stderr * scale,
                "ratio_bracket": (est.bracket[0] * scale, est.bracket[1] * scale),
                "F_ell": f_ell,
            }
        )
    return rows


def geometric_coupling_check(
    p: float, n_samples: int, seed: int, ell_check: int = 5, gap_max: int = 10
) -> dict:
    """Gap law and factorization diagnostics for the lazy/non-lazy coupling.

    Checks that the number of blocks between consecutive hamburger moves is
    geometric(1/2) (chi-square), and that independence of the two walks
    makes P(h hits first and tau^h = ell+1) factor as P(tau^h = ell+1)
    times the probability that an independent cheeseburger walk survives
    the G_1 - 1 + ... + G_{ell+1} - 1 steps interleaved before the hit,
    with G_i i.i.d. geometric(1/2).
    """
    import scipy.stats

    camp = run_campaign(p, n_samples, seed, step_cap=10**9)
    rng = np.random.default_rng(seed)
    # gap statistics from the reference parser on a fresh sub-campaign
    gaps = []
    for r in range(min(n_samples, 4000)):
        stream = BackwardStream(seed + 10**9, p, run_index=r)
        parser = _Parser()
        used = 0
        last = 0
        blocks = 0
        h = 0
        while used < 10**5:
            out = parser.feed(stream.next_letter())
            used += 1
            if out is None:
                continue
            blocks += 1
            side, jump = out
            if side == "h":
                gaps.append(blocks - last)
                last = blocks
                h += jump
                if h == -1:
                    break
    gaps = np.asarray(gaps)
    observed = np.bincount(np.minimum(gaps, gap_max + 1), minlength=gap_max + 2)[1:]
    expected = np.array(
        [2.0 ** -j for j in range(1, gap_max + 1)] + [2.0**-gap_max]
    ) * len(gaps)
    chi2, p_value = scipy.stats.chisquare(observed, expected)
    # factorization: lhs vs product of independent estimates
    tau = camp.tau_h
    resolved = tau >= 1
    n = camp.n_runs
    emp_tau = np.sort(tau[resolved])
    rows = []
    for ell in range(ell_check + 1):
        lhs_hits = int(np.sum((tau == ell + 1) & (camp.first == 0)))
        lhs = lhs_hits / n
        lhs_sig = math.sqrt(max(lhs * (1 - lhs), 1e-300) / n)
        p_tau = float(np.sum(tau == ell + 1)) / n
        m = rng.geometric(0.5, size=(20000, ell + 1)).sum(axis=1) - (ell + 1)
        # empirical survival P(tau^c > m) from the tau^h sample (symmetry)
        surv = 1.0 - np.searchsorted(emp_tau, m, side="right") / len(emp_tau)
        rhs = p_tau * float(np.mean(surv))
        rows.append(
            {
                "ell": ell,
                "lhs": lhs,
                "rhs": rhs,
                "sigma": lhs_sig,
                "residual_sigmas": abs(lhs - rhs) / lhs_sig if lhs_sig else 0.0,
            }
        )
    return {
        "gap_chi2": chi2,
        "gap_p_value": p_value,
        "gap_mean": float(np.mean(gaps)),
        "n_gaps": int(len(gaps)),
        "factorization": rows,
    }


@njit(cache=True)
def _xi_kernel(seed, n_steps, cum, jumps, sides, cap_letters, cap_excursion):
    # collects consecutive walk steps (side 0 = hamburger) from one long
    # stream; same parser as _kernel without hitting logic.  Excursions
    # whose letter count exceeds cap_excursion are abandoned (state reset)
    # and counted as censored blocks: their letter lengths are so heavy
    # tailed that a single block can otherwise exhaust memory.  Blocks are
    # independent renewals, so dropping one leaves the rest unbiased.
    gamma = np.uint64(0x9E3779B97F4A7C15)
    mul1 = np.uint64(0xBF58476D1CE4E5B9)
    mul2 = np.uint64(0x94D049BB133111EB)

    def mix(z):
        z = (z ^ (z >> np.uint64(30))) * mul1
        z = (z ^ (z >> np.uint64(27))) * mul2
        return z ^ (z >> np.uint64(31))

    key = mix(mix(np.uint64(seed)) ^ gamma)
    ctr = np.uint64(0)
    c0, c1, c2, c3 = cum[0], cum[1], cum[2], cum[3]
    size = 1 << 12
    cf = np.empty(size, dtype=np.int64)
    hf = np.empty(size, dtype=np.int64)
    kind = np.empty(size, dtype=np.uint8)
    alive = np.empty(size, dtype=np.uint8)
    ncf = 0
    nhf = 0
    eidx = 0
    got = 0
    censored = 0
    used = np.int64(0)
    while got < n_steps and used < cap_letters:
        ctr += np.uint64(1)
        u64 = mix(key + ctr * gamma)
        u = (u64 >> np.uint64(11)) * (2.0**-53)
        used += 1
        if u < c0:
            letter = 0
        elif u < c1:
            letter = 1
        elif u < c2:
            letter = 2
        elif u < c3:
            letter = 3
        else:
            letter = 4
        side = -1
        jump = 0
        if eidx == 0:
            if letter == 1:
                side = 0
                jump = -1
            elif letter == 3:
                side = 0
                jump = 1
            elif letter == 0:
                side = 1
                jump = -1
            elif letter == 2:
                side = 1
                jump = 1
            else:
                kind[0] = 2
                alive[0] = 1
                cf[0] = 0
                hf[0] = 0
                ncf = 1
                nhf = 1
                eidx = 1
        elif letter >= 2:
            if eidx >= size:
                size2 = size * 2
                cf2 = np.empty(size2, dtype=np.int64)
                hf2 = np.empty(size2, dtype=np.int64)
                kind2 = np.empty(size2, dtype=np.uint8)
                alive2 = np.empty(size2, dtype=np.uint8)
                cf2[:size] = cf
                hf2[:size] = hf
                kind2[:size] = kind
                alive2[:size] = alive
                cf, hf, kind, alive = cf2, hf2, kind2, alive2
                size = size2
            if letter == 2:
                kind[eidx] = 0
                cf[ncf] = eidx
                ncf += 1
            elif letter == 3:
                kind[eidx] = 1
                hf[nhf] = eidx
                nhf += 1
            else:
                kind[eidx] = 2
                alive[eidx] = 1
                cf[ncf] = eidx
                ncf += 1
                hf[nhf] = eidx
                nhf += 1
            eidx += 1
            if eidx > cap_excursion:
                ncf = 0
                nhf = 0
                eidx = 0
                censored += 1
        else:
            if letter == 1:
                while True:
                    nhf -= 1
                    idx = hf[nhf]
                    if kind[idx] != 2 or alive[idx] == 1:
                        break
                if kind[idx] == 2:
                    alive[idx] = 0
                    if idx == 0:
                        jump = 0
                        for t in range(ncf):
                            if kind[cf[t]] != 2:
                                jump += 1
                        side = 1
                        ncf = 0
                        nhf = 0
                        eidx = 0
            else:
                while True:
                    ncf -= 1
                    idx = cf[ncf]
                    if kind[idx] != 2 or alive[idx] == 1:
                        break
                if kind[idx] == 2:
                    alive[idx] = 0
                    if idx == 0:
                        jump = 0
                        for t in range(nhf):
                            if kind[hf[t]] != 2:
                                jump += 1
                        side = 0
                        ncf = 0
                        nhf = 0
                        eidx = 0
        if side >= 0:
            jumps[got] = jump
            sides[got] = side
            got += 1
    return got, censored


def xi_centred_check(
    p: float,
    n_samples: int,
    seed: int,
    truncation_levels: tuple = (1, 10, 100, 10**4),
    cap_letters: int = None,
    cap_excursion: int = 10**7,
) -> dict:
    """Truncated means of the walk step law for increasing cutoffs.

    The step law is centred but heavy tailed (tail index 1/(1-theta) < 2
    of the positive jumps), so only a slow trend of the truncated means
    toward zero can be observed.  The hamburger and cheeseburger step
    samples are reported separately as a symmetry check.

    Blocks exceeding cap_excursion letters are dropped (their count and
    the worst-case bias bound M * censored / n are reported); without the
    cap a single block can consume unbounded memory.
    """
    if cap_letters is None:
        cap_letters = 400 * n_samples
    cum = _thresholds(p)
    jumps = np.zeros(n_samples, dtype=np.int64)
    sides = np.zeros(n_samples, dtype=np.int64)
    got, censored = _xi_kernel(
        seed, n_samples, cum, jumps, sides, cap_letters, cap_excursion
    )
    jumps, sides = jumps[:got], sides[:got]
    report = {"n_steps": int(got), "n_censored_blocks": int(censored), "levels": {}}
    for m in truncation_levels:
        out = {}
        for label, sel in (("h", sides == 0), ("c", sides == 1), ("both", slice(None))):
            x = jumps[sel]
            trunc = x[np.abs(x) <= m]
            mean = float(np.mean(trunc)) if len(trunc) else float("nan")
            sd = float(np.std(trunc) / math.sqrt(max(len(trunc), 1)))
            out[label] = {"mean": mean, "stderr": sd, "n": int(len(trunc))}
        out["bias_bound"] = m * censored / max(got + censored, 1)
        report["levels"][m] = out
    return report


def sample_xi(p: float, n_samples: int, seed: int, cap_letters: int = 10**6):
    """Reduced lengths of sampled F-excursions (the law of Xi).

    Realised inline: letters are read backwards starting from a conditioned
    F at the origin until the excursion closes.  The two phrasings of Xi
    coincide once lengths are reduced: dropping the final F and the opening
    burger from the excursion leaves exactly the surviving opposite-type
    orders, so |reduced(X(-J,-1))| - 1 equals the reduced excursion length.
    Censored samples (cap hit) are returned as -1.
    """
    out = np.empty(n_samples, dtype=np.int64)
    for r in range(n_samples):
        stream = BackwardStream(seed, p, run_index=r)
        parser = _Parser()
        res = parser.feed("F")
        assert res is None
        used = 0
        val = -1
        while used < cap_letters:
            res = parser.feed(stream.next_letter())
            used += 1
            if res is not None:
                val = res[1]
                break
        out[r] = val
    return out


# ---------------------------------------------------------------------------
# Tail-slope estimators
# ---------------------------------------------------------------------------


def tail_slope_wls(
    hist: dict[int, MCEstimate],
    lo: int,
    hi: int,
    n_bins: int = 12,
) -> tuple[float, float]:
    """Weighted least-squares slope of the log-log binned histogram on [lo, hi].

    The range is split into geometric bins; each bin contributes the log of its
    average probability per unit length at the log of its geometric midpoint.
    Bins are weighted by their width (uniform weight per unit of ell), so the
    fit is not dominated by the high-count head of the distribution, where
    power-law behaviour has not set in yet, and does not suffer the
    zero-truncation bias of fitting raw sparse counts in the far tail.
    """
    edges = np.unique(np.round(np.geomspace(lo, hi + 1, n_bins + 1)).astype(np.int64))
    xs, ys, ws = [], [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mass = sum(est.point for ell, est in hist.items() if a <= ell < b)
        if mass <= 0.0:
            continue
        xs.append(0.5 * (math.log(a) + math.log(b - 1)) if b - 1 > a else math.log(a))
        ys.append(math.log(mass / (b - a)))
        ws.append(float(b - a))
    if len(xs) < 3:
        raise ValueError("not enough occupied bins for a slope estimate")
    xs, ys, ws = map(np.asarray, (xs, ys, ws))
    W = ws.sum()
    xm = (ws * xs).sum() / W
    ym = (ws * ys).sum() / W
    slope = (ws * (xs - xm) * (ys - ym)).sum() / (ws * (xs - xm) ** 2).sum()
    resid = ys - ym - slope * (xs - xm)
    var = (ws * resid**2).sum() / W / (ws * (xs - xm) ** 2).sum() * len(xs)
    return float(slope), float(math.sqrt(max(var, 0.0)))


def hill_tail_index(values: np.ndarray, x_min: int) -> float:
    """Hill estimator of the survival exponent alpha for P(X > x) ~ x^-alpha;
    the density slope is then approximately -(alpha + 1)."""
    x = np.asarray(values, dtype=np.float64)
    x = x[x >= x_min]
    if len(x) < 10:
        raise ValueError("too few tail samples for the Hill estimator")
    return float(1.0 / np.mean(np.log(x / x_min)))
