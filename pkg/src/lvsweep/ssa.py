"""Exact event-by-event simulation of the four-type jump process.

Thin wrapper over the kernel backends: builds stopping thresholds from the
ecology (the N_a = floor(eps*K) clock and the resident band around
nbar_A*K), derives per-replicate seeds with a fixed avalanche so results
never depend on scheduling order, and converts kernel dicts into outcome
records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ParameterError
from .model import DerivedEcology, EcologyParams, PopState, ScalingParams, derived_ecology
from .stats import wilson_interval

DEFAULT_MAX_EVENTS = 500_000_000
DEFAULT_EPSILON = 0.1

LINEAGE_SALT = 0x5851F42D4C957F2D

RECORD_NONE = 0
RECORD_SAMPLED = 1
RECORD_FULL = 2

_FULL_RECORD_EVENT_CAP = 2_000_000


def replicate_seed(seed_base: int, index: int) -> int:
    """Seed for replicate `index`: base mixed with the index (splitmix64)."""
    return _kernels.mix64((seed_base + 0x9E3779B97F4A7C15 * (index + 1)) & ((1 << 64) - 1))


def lineage_seed(rep_seed: int) -> int:
    """Second stream for within-type choices in the tagged simulator."""
    return _kernels.mix64(rep_seed ^ LINEAGE_SALT)


@dataclass(frozen=True)
class SimConfig:
    """Run controls for a single sweep replicate."""

    initial_state: PopState
    seed: int = 0
    max_events: int = DEFAULT_MAX_EVENTS
    epsilon: float = DEFAULT_EPSILON
    record_mode: str = "outcome"  # outcome | sampled | full
    dt_sample: float = 0.0
    t_end: float = math.inf
    stop_at_eps: bool = False
    collect_jumps: bool = False

    def __post_init__(self):
        if self.max_events < 1:
            raise ParameterError("max_events must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError("epsilon must lie in (0, 1)")
        if self.record_mode not in ("outcome", "sampled", "full"):
            raise ParameterError(f"unknown record_mode {self.record_mode!r}")
        if self.record_mode == "sampled" and self.dt_sample <= 0.0:
            raise ParameterError("sampled record_mode needs dt_sample > 0")
        if self.record_mode == "full" and self.max_events > _FULL_RECORD_EVENT_CAP:
            raise ParameterError(
                "full record_mode stores every event; cap max_events at "
                f"{_FULL_RECORD_EVENT_CAP}"
            )


@dataclass
class SweepOutcome:
    """Per-replicate record of one simulated sweep."""

    fixed: bool
    status: str
    t_final: float
    events_used: int
    final_state: PopState
    n_a_final: int
    t_ext: float | None = None
    p_ab1_final: float | None = None
    t_eps_hit: float | None = None
    s_eps_exit: float | None = None
    jump_u: np.ndarray | None = None
    jump_d: np.ndarray | None = None
    jump_h: np.ndarray | None = None

    @property
    def truncated(self) -> bool:
        return self.status == "truncated"


@dataclass
class Trajectory:
    """Sampled or per-event path of the four counts."""

    t: np.ndarray
    n: np.ndarray  # shape (len(t), 4)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,n_Ab1,n_Ab2,n_ab1,n_ab2\n")
            for ti, row in zip(self.t, self.n):
                fh.write(
                    f"{float(ti)!r},{int(row[0])},{int(row[1])},"
                    f"{int(row[2])},{int(row[3])}\n"
                )


_STATUS_NAMES = {
    _kernels.STATUS_FIXED: "fixed",
    _kernels.STATUS_LOSS: "loss",
    _kernels.STATUS_ABSORBED: "absorbed",
    _kernels.STATUS_TRUNCATED: "truncated",
    _kernels.STATUS_T_END: "t_end",
    _kernels.STATUS_EPS: "eps_hit",
}


def eps_threshold(scaling: ScalingParams, epsilon: float) -> int:
    """Mutant-count milestone floor(eps*K)."""
    return int(math.floor(epsilon * scaling.K))


def resident_band(derived: DerivedEcology, params: EcologyParams,
                  scaling: ScalingParams, epsilon: float) -> tuple[float, float]:
    """Band [K(nbar_A - 2 eps C_Aa/C_AA), K(nbar_A + 2 eps C_Aa/C_AA)].

    The resident count leaving this band defines the S_eps exit clock.
    """
    half = 2.0 * epsilon * params.C_Aa / params.C_AA
    return (scaling.K * (derived.nbar_A - half), scaling.K * (derived.nbar_A + half))


def run_sweep(
    params: EcologyParams,
    scaling: ScalingParams,
    config: SimConfig,
    backend=None,
) -> tuple[SweepOutcome, Trajectory | None]:
    """Simulate one replicate; returns (outcome, trajectory-or-None)."""
    kern = backend or _kernels
    derived = derived_ecology(params)
    band_lo, band_hi = resident_band(derived, params, scaling, config.epsilon)
    target = eps_threshold(scaling, config.epsilon)
    if target < 1:
        raise ParameterError("epsilon too small: floor(eps*K) must be >= 1")
    mode = {"outcome": RECORD_NONE, "sampled": RECORD_SAMPLED, "full": RECORD_FULL}[
        config.record_mode
    ]
    res = kern.run_sweep(
        params.f_A, params.f_a, params.D_A, params.D_a,
        params.C_AA, params.C_Aa, params.C_aA, params.C_aa,
        scaling.K, scaling.r_K,
        config.initial_state.n_Ab1, config.initial_state.n_Ab2,
        config.initial_state.n_ab1, config.initial_state.n_ab2,
        config.seed, config.max_events,
        eps_target=target,
        band_lo=band_lo, band_hi=band_hi,
        t_end=config.t_end,
        record_mode=mode, dt_sample=config.dt_sample,
        collect_jumps=config.collect_jumps,
        stop_at_eps=config.stop_at_eps,
    )
    outcome = _outcome_from_kernel(res)
    traj = None
    if mode != RECORD_NONE:
        traj = Trajectory(
            t=np.asarray(res["traj_t"], dtype=float),
            n=np.asarray(res["traj_n"], dtype=np.int64).reshape(-1, 4),
        )
    if config.collect_jumps:
        outcome.jump_u = np.asarray(res["jump_u"], dtype=np.int64)
        outcome.jump_d = np.asarray(res["jump_d"], dtype=np.int64)
        outcome.jump_h = np.asarray(res["jump_h"], dtype=np.int64)
    return outcome, traj


def _outcome_from_kernel(res: dict) -> SweepOutcome:
    def opt(x):
        return None if (isinstance(x, float) and math.isnan(x)) else x

    return SweepOutcome(
        fixed=bool(res["fixed"]),
        status=_STATUS_NAMES[res["status"]],
        t_final=res["t"],
        events_used=res["events"],
        final_state=PopState(*res["n"]),
        n_a_final=res["n_a_final"],
        t_ext=opt(res["t_ext"]),
        p_ab1_final=opt(res["p_ab1_final"]),
        t_eps_hit=opt(res["t_eps"]),
        s_eps_exit=opt(res["s_eps"]),
    )


def hard_initial_state(params: EcologyParams, K: int, z_Ab1_frac: float) -> PopState:
    """Single a,b1 mutant in a resident A-population at equilibrium.

    The resident count nbar_A*K is split between b1 and b2 carriers by
    z_Ab1_frac; the mutant count is floor(K * 1/K) = 1.
    """
    if not 0.0 <= z_Ab1_frac <= 1.0:
        raise ParameterError("z_Ab1_frac must lie in [0, 1]")
    derived = derived_ecology(params)
    if derived.nbar_A <= 0:
        raise ParameterError("resident equilibrium nbar_A must be positive")
    z_Ab1 = z_Ab1_frac * derived.nbar_A
    return PopState(
        n_Ab1=int(math.floor(z_Ab1 * K)),
        n_Ab2=int(math.floor((derived.nbar_A - z_Ab1) * K)),
        n_ab1=1,
        n_ab2=0,
    )


def soft_initial_state(z: tuple[float, float, float, float], K: int) -> PopState:
    """State floor(z*K) for macroscopic initial densities z."""
    if any(v < 0 for v in z):
        raise ParameterError("initial densities must be nonnegative")
    return PopState(*(int(math.floor(v * K)) for v in z))


@dataclass
class FixationEstimate:
    """Monte Carlo fixation-frequency estimate with a Wilson 95% interval."""

    n_replicates: int
    n_fixed: int
    n_lost: int
    n_truncated: int
    fraction: float
    ci_low: float
    ci_high: float
    warnings: list = field(default_factory=list)


def fixation_frequency(
    params: EcologyParams,
    scaling: ScalingParams,
    n_replicates: int,
    seed_base: int,
    initial_state: PopState | None = None,
    z_Ab1_frac: float = 0.5,
    epsilon: float = DEFAULT_EPSILON,
    max_events: int = DEFAULT_MAX_EVENTS,
    backend=None,
) -> FixationEstimate:
    """Fraction of replicates whose sweep fixes, with a 95% Wilson interval.

    Truncated replicates are excluded from the estimate and surfaced in the
    warnings list.  Defaults to the hard-sweep initial condition when no
    state is supplied.
    """
    if n_replicates < 1:
        raise ParameterError("n_replicates must be >= 1")
    if initial_state is None:
        initial_state = hard_initial_state(params, scaling.K, z_Ab1_frac)
    n_fixed = n_lost = n_trunc = 0
    for i in range(n_replicates):
        cfg = SimConfig(
            initial_state=initial_state,
            seed=replicate_seed(seed_base, i),
            max_events=max_events,
            epsilon=epsilon,
        )
        outcome, _ = run_sweep(params, scaling, cfg, backend=backend)
        if outcome.truncated:
            n_trunc += 1
        elif outcome.fixed:
            n_fixed += 1
        else:
            n_lost += 1
    n_eff = n_replicates - n_trunc
    frac = n_fixed / n_eff if n_eff else math.nan
    lo, hi = wilson_interval(n_fixed, n_eff)
    warnings = []
    if n_trunc:
        warnings.append(f"{n_trunc} replicate(s) truncated at max_events; excluded")
    return FixationEstimate(n_replicates, n_fixed, n_lost, n_trunc, frac, lo, hi, warnings)
