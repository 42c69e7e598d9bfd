"""Closed-form predictors for the final neutral proportion and fixation.

Three regimes: a soft sweep from macroscopic standing variation mixes the
initial b1 proportions of the two backgrounds with weight F(z, r); a hard
sweep under strong recombination (r_K log K large) returns the resident
proportion unchanged; under weak recombination (r_K log K bounded) the
founder's allele keeps weight 1 - rho_K with
rho_K = 1 - exp(-f_a r_K log K / S_aA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import dynsys
from .errors import ParameterError, RegimeError
from .model import EcologyParams, derived_ecology


@dataclass(frozen=True)
class SweepPrediction:
    """Predicted final b1 proportion in the a-population, plus fixation odds."""

    regime: str                    # soft | hard-strong | hard-weak
    p_ab1_limit: float
    fixation_prob: float
    rho_K: float | None = None     # hard-weak only
    F_limit: float | None = None   # soft only
    rK_logK: float | None = None   # hard regimes; reported, never a silent cutoff
    regime_source: str = "explicit"


def rho_K(params: EcologyParams, r_K: float, K: int) -> float:
    """Escape probability 1 - exp(-f_a r_K log K / S_aA)."""
    if not 0.0 <= r_K <= 1.0:
        raise ParameterError("r_K must lie in [0, 1]")
    if K < 2:
        raise ParameterError("K must be >= 2")
    derived = derived_ecology(params)
    if derived.S_aA <= 0:
        raise RegimeError(f"no sweep: S_aA = {derived.S_aA} must be positive")
    return 1.0 - math.exp(-params.f_a * r_K * math.log(K) / derived.S_aA)


def predict_soft(
    params: EcologyParams,
    r: float,
    z: tuple[float, float, float, float],
    tol: float = 1e-8,
) -> SweepPrediction:
    """Soft-sweep limit: (z_Ab1/z_A) F(z,r) + (z_ab1/z_a)(1 - F(z,r))."""
    z_Ab1, z_Ab2, z_ab1, z_ab2 = z
    z_A = z_Ab1 + z_Ab2
    z_a = z_ab1 + z_ab2
    if z_a <= 0:
        raise RegimeError("soft sweep needs z_a > 0")
    derived = derived_ecology(params)
    if not derived.assumption1_ok:
        raise RegimeError(
            "no-coexistence assumption violated: need nbar_A > 0, nbar_a > 0 "
            f"and S_Aa < 0 < S_aA (got S_Aa={derived.S_Aa}, S_aA={derived.S_aA})"
        )
    if z_A > 0:
        F = dynsys.compute_F_limit(params, r, (z_A, z_a), tol=tol).value
        p_A = z_Ab1 / z_A
    else:
        F = 0.0
        p_A = 0.0
    p = p_A * F + (z_ab1 / z_a) * (1.0 - F)
    return SweepPrediction(
        regime="soft", p_ab1_limit=p, fixation_prob=1.0, F_limit=F
    )


def classify_hard_regime(r_K: float, K: int, threshold: float = 1.0) -> str:
    """Heuristic strong/weak split on r_K log K; advisory only."""
    return "strong" if r_K * math.log(K) >= threshold else "weak"


def predict_hard(
    params: EcologyParams,
    r_K: float,
    K: int,
    z_Ab1_frac: float,
    regime: str | None = None,
) -> SweepPrediction:
    """Hard-sweep limits for the single-mutant start (one a,b1 individual
    in a resident A-population at equilibrium).

    regime is the caller's call; when omitted, the r_K log K >= 1 heuristic
    is applied and recorded in regime_source.  Fixation probability is
    S_aA/f_a in both regimes.
    """
    if not 0.0 <= z_Ab1_frac <= 1.0:
        raise ParameterError("z_Ab1_frac must lie in [0, 1]")
    derived = derived_ecology(params)
    if not derived.assumption1_ok:
        raise RegimeError(
            "no-coexistence assumption violated: need nbar_A > 0, nbar_a > 0 "
            f"and S_Aa < 0 < S_aA (got S_Aa={derived.S_Aa}, S_aA={derived.S_aA})"
        )
    rk_logk = r_K * math.log(K)
    source = "explicit"
    if regime is None:
        regime = classify_hard_regime(r_K, K)
        source = "heuristic(r_K*logK>=1)"
    if regime not in ("strong", "weak"):
        raise ParameterError(f"regime must be 'strong' or 'weak', got {regime!r}")
    fix = derived.S_aA / params.f_a
    if regime == "strong":
        return SweepPrediction(
            regime="hard-strong", p_ab1_limit=z_Ab1_frac, fixation_prob=fix,
            rK_logK=rk_logk, regime_source=source,
        )
    rho = rho_K(params, r_K, K)
    p = (1.0 - rho) + rho * z_Ab1_frac
    return SweepPrediction(
        regime="hard-weak", p_ab1_limit=p, fixation_prob=fix,
        rho_K=rho, rK_logK=rk_logk, regime_source=source,
    )
