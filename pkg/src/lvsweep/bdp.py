"""Linear birth-death analytics and the coupling sandwich.

Closed forms for expected size, two-sided hitting probabilities, the
extinction-time CDF and the random-walk hitting ratios q_{j,k}, each with
an analytic b = d limit instead of an error.  Also the sandwich rates
s_-(eps) <= S_aA/f_a <= s_+(eps) and a Monte Carlo check that the monotone
coupling Z- <= N_a <= Z+ holds pathwise before the first-phase stopping
times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels, ssa
from .errors import ParameterError
from .model import EcologyParams, ScalingParams, derived_ecology


@dataclass(frozen=True)
class BdpParams:
    """Per-capita birth and death rates of a linear birth-death process."""

    b: float
    d: float

    def __post_init__(self):
        if self.b <= 0:
            raise ParameterError("birth rate b must be positive")
        if self.d < 0:
            raise ParameterError("death rate d must be nonnegative")


def expected_size(bdp: BdpParams, i: int, t: float) -> float:
    """E_i[Z_t] = i exp((b-d) t)."""
    if i < 0 or t < 0:
        raise ParameterError("need i >= 0 and t >= 0")
    return i * math.exp((bdp.b - bdp.d) * t)


def hitting_probability(bdp: BdpParams, i: int, j: int, k: int) -> float:
    """P_j(T_k < T_i) = (1 - (d/b)^(j-i)) / (1 - (d/b)^(k-i)).

    b = d uses the limit (j-i)/(k-i).  Degenerate orderings j == k and
    j == i return 1 and 0.
    """
    if not i <= j <= k:
        raise ParameterError("need i <= j <= k")
    if j == k:
        return 1.0
    if j == i:
        return 0.0
    rho = bdp.d / bdp.b
    if rho == 1.0:
        return (j - i) / (k - i)
    return (1.0 - rho ** (j - i)) / (1.0 - rho ** (k - i))


def extinction_cdf(bdp: BdpParams, i: int, t: float) -> float:
    """P_i(T_0 <= t) = (d (1 - e^{(d-b)t}) / (b - d e^{(d-b)t}))^i.

    b = d uses the critical limit (b t / (1 + b t))^i.
    """
    if i < 0 or t < 0:
        raise ParameterError("need i >= 0 and t >= 0")
    if i == 0:
        return 1.0
    if t == 0.0:
        return 0.0
    b, d = bdp.b, bdp.d
    if d == 0.0:
        return 0.0
    if b == d:
        return (b * t / (1.0 + b * t)) ** i
    e = math.exp((d - b) * t)
    return (d * (1.0 - e) / (b - d * e)) ** i


def extinction_probability(bdp: BdpParams, i: int) -> float:
    """P_i(T_0 < infinity) = min(1, (d/b)^i)."""
    if i < 0:
        raise ParameterError("need i >= 0")
    return min(1.0, (bdp.d / bdp.b) ** i)


def q_ratio(s1: float, s2: float, j: int, k: int, M: int) -> float:
    """Hitting-probability ratio q_{j,k}^{(s1,s2)} for +/-1 walks.

    The walk with parameter s moves up with probability 1/(2-s);
    q = P_{k+1}^{(s1)}(tau_M < tau_k) / P_{k+1}^{(s2)}(tau_M < tau_j)
      = s1/(1-(1-s1)^{M-k}) * (1-(1-s2)^{M-j})/(1-(1-s2)^{k+1-j}).
    """
    if not 0.0 < s1 < 1.0 or not 0.0 < s2 < 1.0:
        raise ParameterError("need 0 < s1, s2 < 1")
    if not 0 <= j <= k < M:
        raise ParameterError("need 0 <= j <= k < M")
    num = s1 / (1.0 - (1.0 - s1) ** (M - k))
    return num * (1.0 - (1.0 - s2) ** (M - j)) / (1.0 - (1.0 - s2) ** (k + 1 - j))


@dataclass(frozen=True)
class CouplingRates:
    """Sandwich rates s_-(eps) <= S_aA/f_a <= s_+(eps)."""

    s_minus: float
    s_plus: float
    eps: float


def coupling_rates(params: EcologyParams, eps: float) -> CouplingRates:
    """s_-(eps), s_+(eps) bracketing the mutant's net growth per birth.

    Requires eps < S_aA / (2 C_aA C_Aa / C_AA + C_aa) so that s_- > 0.
    """
    derived = derived_ecology(params)
    if derived.S_aA <= 0:
        raise ParameterError("coupling rates need S_aA > 0")
    limit = derived.S_aA / (2 * params.C_aA * params.C_Aa / params.C_AA + params.C_aa)
    if not 0 < eps < limit:
        raise ParameterError(f"eps must lie in (0, {limit}) for these parameters")
    s = derived.S_aA / params.f_a
    s_minus = s - eps * (2 * params.C_aA * params.C_Aa + params.C_aa * params.C_AA) / (
        params.f_a * params.C_AA
    )
    s_plus = s + 2 * eps * params.C_aA * params.C_Aa / (params.f_a * params.C_AA)
    if not 0.0 < s_minus <= s <= s_plus < 1.0:
        raise ParameterError(
            f"sandwich rates left (0,1): s_-={s_minus}, s_+={s_plus}; reduce eps"
        )
    return CouplingRates(s_minus, s_plus, eps)


@dataclass
class SandwichReport:
    """Pathwise coupling check over seeded replicates."""

    n_replicates: int
    n_ok: int
    total_violations: int
    rate_clamps: int
    n_hit_eps: int
    n_lost: int
    n_band_exit: int
    n_truncated: int
    n_zplus_hit_eps: int
    rates: CouplingRates
    hit_fraction: float
    hit_ci: tuple[float, float]
    s_bounds: tuple[float, float] = field(default=(0.0, 0.0))


def sandwich_check(
    params: EcologyParams,
    scaling: ScalingParams,
    eps: float,
    n_replicates: int,
    seed_base: int,
    max_events: int = ssa.DEFAULT_MAX_EVENTS,
    backend=None,
) -> SandwichReport:
    """Run coupled (Z-, N_a, Z+) triples and count sandwich violations.

    Each triple shares one event stream with nested thinning (a Z+ birth
    whenever N_a births, etc.), starts from the hard-sweep state, and stops
    at the first of T_eps, S_eps, mutant extinction.  A correct coupling
    reports zero violations on every path.
    """
    kern = backend or _kernels
    rates = coupling_rates(params, eps)
    derived = derived_ecology(params)
    target = ssa.eps_threshold(scaling, eps)
    if target < 1:
        raise ParameterError("eps too small: floor(eps*K) must be >= 1")
    band_lo, band_hi = ssa.resident_band(derived, params, scaling, eps)
    n0_A = int(math.floor(derived.nbar_A * scaling.K))
    n_ok = viol = clamps = 0
    hit = lost = band = trunc = zp_hit = 0
    for i in range(n_replicates):
        res = kern.run_coupled(
            params.f_A, params.f_a, params.D_A, params.D_a,
            params.C_AA, params.C_Aa, params.C_aA, params.C_aa,
            scaling.K, n0_A, 1,
            rates.s_minus, rates.s_plus,
            ssa.replicate_seed(seed_base, i), max_events,
            target, band_lo, band_hi,
        )
        if res["violations"] == 0:
            n_ok += 1
        viol += res["violations"]
        clamps += res["rate_clamps"]
        st = res["status"]
        if st == _kernels.STATUS_EPS:
            hit += 1
        elif st == _kernels.STATUS_LOSS:
            lost += 1
        elif st == _kernels.STATUS_ABSORBED:
            band += 1
        else:
            trunc += 1
        if not math.isnan(res["tp_eps"]):
            zp_hit += 1
    frac = hit / n_replicates
    ci = ssa.wilson_interval(hit, n_replicates)
    s = derived.S_aA / params.f_a
    plus_hit = rates.s_plus / (1.0 - (1.0 - rates.s_plus) ** target)
    return SandwichReport(
        n_replicates=n_replicates,
        n_ok=n_ok,
        total_violations=viol,
        rate_clamps=clamps,
        n_hit_eps=hit,
        n_lost=lost,
        n_band_exit=band,
        n_truncated=trunc,
        n_zplus_hit_eps=zp_hit,
        rates=rates,
        hit_fraction=frac,
        hit_ci=ci,
        s_bounds=(rates.s_minus, plus_hit),
    )
