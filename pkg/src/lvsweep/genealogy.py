"""Lineage-level simulation and genealogy statistics.

Genealogies are computed forward in time: every individual carries the
number of m-recombinations (background-switching recombinations) on its
neutral lineage since time 0, plus an origin tag recording the most recent
switch.  The count projection of a tagged run coincides pathwise with the
count simulator under the same seed, so the tagged variant needs no
separate validation of its population law.

Also here: the per-birth coalescence and m-recombination probabilities,
and the upcrossing/downcrossing/resident-jump counts of the mutant count
before it first reaches floor(eps*K), conditioned on that hitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, ssa
from .errors import InsufficientSampleError, ParameterError
from .model import EcologyParams, ScalingParams, derived_ecology
from .stats import percentile_bootstrap


def coalescence_probability(
    params: EcologyParams, r_K: float, n_A: int, n_a: int, alpha1: str, alpha2: str
) -> float:
    """Probability that two uniformly sampled neutral alleles (one on an
    alpha1-carrier, one on an alpha2-carrier) coalesce at a birth of an
    alpha1 individual from pre-birth state (n_A, n_a).

    Same background:  2/(n(n+1)) * (1 - r_K f' n'/(f_A n_A + f_a n_a));
    across backgrounds: r_K f' / ((n+1)(f_A n_A + f_a n_a)),
    with primes marking the complementary selected allele.
    """
    if alpha1 not in ("A", "a") or alpha2 not in ("A", "a"):
        raise ParameterError("alleles must be 'A' or 'a'")
    den = params.f_A * n_A + params.f_a * n_a
    if den <= 0:
        raise ParameterError("population must be nonempty")
    n1 = n_A if alpha1 == "A" else n_a
    if alpha1 == alpha2:
        f_bar = params.f_a if alpha1 == "A" else params.f_A
        n_bar = n_a if alpha1 == "A" else n_A
        return (2.0 / (n1 * (n1 + 1))) * (1.0 - r_K * f_bar * n_bar / den)
    f_bar = params.f_A if alpha2 == "A" else params.f_a
    return r_K * f_bar / ((n1 + 1) * den)


def m_recombination_probability(
    params: EcologyParams, r_K: float, n_A: int, n_a: int, alpha: str
) -> float:
    """Probability that a uniformly chosen alpha-carrier just after an
    alpha-birth is the newborn and m-recombined at that birth:
    n' r_K f' / ((n+1)(f_A n_A + f_a n_a)).
    """
    if alpha not in ("A", "a"):
        raise ParameterError("allele must be 'A' or 'a'")
    den = params.f_A * n_A + params.f_a * n_a
    if den <= 0:
        raise ParameterError("population must be nonempty")
    if alpha == "a":
        return n_A * r_K * params.f_A / ((n_a + 1) * den)
    return n_a * r_K * params.f_a / ((n_A + 1) * den)


@dataclass(frozen=True)
class OriginStats:
    """Distribution of m-recombination counts over the a-population."""

    t: float
    n_a: int
    frac_zero_mrec: float
    frac_one_mrec: float
    frac_multi_mrec: float
    frac_b1: float


@dataclass
class TaggedSweepResult:
    outcome: ssa.SweepOutcome
    stats_eps: OriginStats | None
    stats_final: OriginStats
    tag_violations: int


def _origin_stats(d: dict | None) -> OriginStats | None:
    if d is None:
        return None
    return OriginStats(
        t=d["t"],
        n_a=d["n_a"],
        frac_zero_mrec=d["frac_zero_mrec"],
        frac_one_mrec=d["frac_one_mrec"],
        frac_multi_mrec=d["frac_multi_mrec"],
        frac_b1=d["frac_b1"],
    )


def run_tagged_sweep(
    params: EcologyParams,
    scaling: ScalingParams,
    config: ssa.SimConfig,
    stop_at_eps: bool = True,
    backend=None,
) -> TaggedSweepResult:
    """Individual-based run with origin tags; statistics at T_eps (and at
    the final state when the run continues to extinction)."""
    kern = backend or _kernels
    derived = derived_ecology(params)
    band_lo, band_hi = ssa.resident_band(derived, params, scaling, config.epsilon)
    target = ssa.eps_threshold(scaling, config.epsilon)
    if target < 1:
        raise ParameterError("epsilon too small: floor(eps*K) must be >= 1")
    s = config.initial_state
    hard_start = s.n_ab1 == 1 and s.n_ab2 == 0
    res = kern.run_tagged(
        params.f_A, params.f_a, params.D_A, params.D_a,
        params.C_AA, params.C_Aa, params.C_aA, params.C_aa,
        scaling.K, scaling.r_K,
        s.n_Ab1, s.n_Ab2, s.n_ab1, s.n_ab2,
        config.seed, ssa.lineage_seed(config.seed),
        config.max_events,
        eps_target=target,
        band_lo=band_lo, band_hi=band_hi,
        stop_at_eps=stop_at_eps,
        check_founder_b1=hard_start,
    )
    return TaggedSweepResult(
        outcome=ssa._outcome_from_kernel(res),
        stats_eps=_origin_stats(res["stats_eps"]),
        stats_final=_origin_stats(res["stats_final"]),
        tag_violations=res["tag_violations"],
    )


@dataclass
class JumpStats:
    """Upcrossing statistics of the mutant count before floor(eps*K),
    aggregated over replicates conditioned on reaching it."""

    eps: float
    threshold: int           # floor(eps*K)
    n_attempted: int
    n_conditioned: int
    U: np.ndarray            # shape (n_conditioned, threshold+1); U[:, k] upcrossings k->k+1
    D: np.ndarray
    H: np.ndarray
    weighted_sum: np.ndarray  # per replicate: sum_k U_k/(k+1)
    r_K: float
    scalar: float             # r_K * mean(weighted_sum)
    scalar_ci: tuple[float, float]

    @property
    def U_mean(self) -> np.ndarray:
        return self.U.mean(axis=0)

    @property
    def D_mean(self) -> np.ndarray:
        return self.D.mean(axis=0)

    @property
    def H_mean(self) -> np.ndarray:
        return self.H.mean(axis=0)


def jump_statistics(
    params: EcologyParams,
    scaling: ScalingParams,
    eps: float,
    n_replicates: int,
    seed_base: int,
    min_conditioned: int = 30,
    max_events: int = ssa.DEFAULT_MAX_EVENTS,
    backend=None,
) -> JumpStats:
    """Count U_k, D_k, H_k on hard-sweep paths conditioned on T_eps < inf.

    Conditioning is by rejection: replicates whose mutant line dies before
    floor(eps*K) are discarded, matching the conditional law exactly at the
    cost of ~f_a/S_aA oversampling.  Raises when fewer than
    `min_conditioned` paths condition.
    """
    derived = derived_ecology(params)
    if not derived.assumption1_ok:
        raise ParameterError("jump statistics require the no-coexistence assumption")
    target = ssa.eps_threshold(scaling, eps)
    if target < 2:
        raise ParameterError("eps too small: floor(eps*K) must be >= 2")
    initial = ssa.hard_initial_state(params, scaling.K, 0.5)
    Us, Ds, Hs = [], [], []
    for i in range(n_replicates):
        cfg = ssa.SimConfig(
            initial_state=initial,
            seed=ssa.replicate_seed(seed_base, i),
            max_events=max_events,
            epsilon=eps,
            stop_at_eps=True,
            collect_jumps=True,
        )
        outcome, _ = ssa.run_sweep(params, scaling, cfg, backend=backend)
        if outcome.status == "eps_hit":
            Us.append(outcome.jump_u)
            Ds.append(outcome.jump_d)
            Hs.append(outcome.jump_h)
    n_cond = len(Us)
    if n_cond < min_conditioned:
        raise InsufficientSampleError(
            f"only {n_cond} of {n_replicates} replicates reached floor(eps*K); "
            f"need at least {min_conditioned}"
        )
    U = np.asarray(Us, dtype=np.int64)
    D = np.asarray(Ds, dtype=np.int64)
    H = np.asarray(Hs, dtype=np.int64)
    ks = np.arange(target + 1)
    weights = np.zeros(target + 1)
    weights[1:target] = 1.0 / (ks[1:target] + 1.0)
    wsum = U @ weights
    scalar = scaling.r_K * float(wsum.mean())
    lo, hi = percentile_bootstrap(wsum, seed=ssa.replicate_seed(seed_base, 1 << 20))
    return JumpStats(
        eps=eps,
        threshold=target,
        n_attempted=n_replicates,
        n_conditioned=n_cond,
        U=U, D=D, H=H,
        weighted_sum=wsum,
        r_K=scaling.r_K,
        scalar=scalar,
        scalar_ci=(scaling.r_K * lo, scaling.r_K * hi),
    )


def split_upcrossing_counts(levels, j: int):
    """Last-visit split of upcrossing counts for one conditioned path.

    `levels` is the sequence of mutant-count values at successive
    mutant-count jumps, starting with the initial count.  Returns
    (zeta_index, U1, U2): the index of the last visit to level j within
    that sequence and, per level k, the upcrossings k -> k+1 strictly
    before / at-or-after it.  Exposed for completeness; no acceptance
    claims attach to the split statistics.
    """
    lv = list(levels)
    if j not in lv:
        raise ParameterError(f"path never visits level {j}")
    zeta = max(i for i, v in enumerate(lv) if v == j)
    top = max(lv)
    U1 = [0] * (top + 1)
    U2 = [0] * (top + 1)
    for i in range(len(lv) - 1):
        if lv[i + 1] == lv[i] + 1:
            if i < zeta:
                U1[lv[i]] += 1
            else:
                U2[lv[i]] += 1
    return zeta, U1, U2


def origin_stats_csv(path, rows) -> None:
    """Write per-replicate origin statistics rows.

    Columns: replicate,fixed,frac_zero_mrec,frac_one_mrec,frac_multi_mrec,
    frac_b1_at_Teps.
    """
    with open(path, "w") as fh:
        fh.write(
            "replicate,fixed,frac_zero_mrec,frac_one_mrec,frac_multi_mrec,"
            "frac_b1_at_Teps\n"
        )
        for r in rows:
            fh.write(
                f"{r['replicate']},{int(r['fixed'])},{r['frac_zero_mrec']!r},"
                f"{r['frac_one_mrec']!r},{r['frac_multi_mrec']!r},"
                f"{r['frac_b1_at_Teps']!r}\n"
            )
