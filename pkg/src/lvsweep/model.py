"""Ecological parameters, population state, and transition rates.

The population carries two loci: a selected locus with alleles A/a and a
neutral locus with alleles b1/b2.  Individuals die at a density-dependent
rate (intrinsic mortality plus competition scaled by 1/K) and reproduce
through a gamete pool in which recombination swaps the neutral locus with
probability r_K per birth.  All functions here are pure and cheap; rates
are recomputed from scratch at each call since the state has four entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

ALLELES = ("A", "a")


@dataclass(frozen=True)
class EcologyParams:
    """Birth rates f, intrinsic death rates D, and 2x2 competition kernel C.

    C_xy is the competitive pressure felt by an x-carrier from a y-carrier;
    diagonal entries must be strictly positive so monomorphic equilibria
    exist.
    """

    f_A: float
    f_a: float
    D_A: float = 0.0
    D_a: float = 0.0
    C_AA: float = 1.0
    C_Aa: float = 1.0
    C_aA: float = 1.0
    C_aa: float = 1.0

    def __post_init__(self):
        for name in ("f_A", "f_a", "D_A", "D_a", "C_AA", "C_Aa", "C_aA", "C_aa"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
            if v < 0:
                raise ParameterError(f"{name} must be nonnegative, got {v}")
        if self.f_A <= 0 or self.f_a <= 0:
            raise ParameterError("birth rates f_A, f_a must be positive")
        if self.C_AA <= 0 or self.C_aa <= 0:
            raise ParameterError("diagonal competition C_AA, C_aa must be positive")

    def competition(self, alpha: str, alpha2: str) -> float:
        return getattr(self, f"C_{alpha}{alpha2}")

    def birth_rate(self, alpha: str) -> float:
        return self.f_A if alpha == "A" else self.f_a

    def death_rate(self, alpha: str) -> float:
        return self.D_A if alpha == "A" else self.D_a


@dataclass(frozen=True)
class ScalingParams:
    """Carrying-capacity scale K and recombination probability per birth."""

    K: int
    r_K: float = 0.0

    def __post_init__(self):
        if self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        if not 0.0 <= self.r_K <= 1.0:
            raise ParameterError(f"r_K must lie in [0, 1], got {self.r_K}")


@dataclass(frozen=True)
class PopState:
    """Four nonnegative integer counts, one per genotype."""

    n_Ab1: int
    n_Ab2: int
    n_ab1: int
    n_ab2: int

    def __post_init__(self):
        for name in ("n_Ab1", "n_Ab2", "n_ab1", "n_ab2"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be nonnegative")

    @property
    def n_A(self) -> int:
        return self.n_Ab1 + self.n_Ab2

    @property
    def n_a(self) -> int:
        return self.n_ab1 + self.n_ab2

    @property
    def total(self) -> int:
        return self.n_A + self.n_a

    def as_tuple(self):
        return (self.n_Ab1, self.n_Ab2, self.n_ab1, self.n_ab2)


@dataclass(frozen=True)
class DerivedEcology:
    """Monomorphic equilibria, invasion fitnesses, and the no-coexistence check.

    nbar_x = (f_x - D_x)/C_xx is the equilibrium density of a monomorphic
    x-population per unit carrying capacity; S_xy = f_x - D_x - C_xy*nbar_y
    is the per-capita growth rate of a rare x-mutant in a resident
    y-population at equilibrium.  assumption_ok is True when both equilibria
    are positive and S_Aa < 0 < S_aA, the regime in which an a-sweep can
    complete and coexistence is excluded.
    """

    nbar_A: float
    nbar_a: float
    S_aA: float
    S_Aa: float
    assumption1_ok: bool


def derived_ecology(params: EcologyParams) -> DerivedEcology:
    nbar_A = (params.f_A - params.D_A) / params.C_AA
    nbar_a = (params.f_a - params.D_a) / params.C_aa
    S_aA = params.f_a - params.D_a - params.C_aA * nbar_A
    S_Aa = params.f_A - params.D_A - params.C_Aa * nbar_a
    ok = nbar_A > 0 and nbar_a > 0 and S_Aa < 0 < S_aA
    return DerivedEcology(nbar_A, nbar_a, S_aA, S_Aa, ok)


def death_rates(params: EcologyParams, scaling: ScalingParams, state: PopState):
    """Cumulative death rate of each genotype class.

    d_xb = [D_x + C_xA*n_A/K + C_xa*n_a/K] * n_xb
    """
    invK = 1.0 / scaling.K
    n_A = state.n_A
    n_a = state.n_a
    dpcA = params.D_A + (params.C_AA * n_A + params.C_Aa * n_a) * invK
    dpca = params.D_a + (params.C_aA * n_A + params.C_aa * n_a) * invK
    return (
        dpcA * state.n_Ab1,
        dpcA * state.n_Ab2,
        dpca * state.n_ab1,
        dpca * state.n_ab2,
    )


def birth_rates(params: EcologyParams, scaling: ScalingParams, state: PopState):
    """Cumulative birth rate of each genotype class.

    b_xb = f_x*n_xb + r_K*f_A*f_a*(n_x'b*n_xb' - n_xb*n_x'b')/(f_A*n_A + f_a*n_a)
    where primes denote complementary alleles.  An empty population has
    all-zero birth rates, so absorbing states need no special-casing.
    """
    den = params.f_A * state.n_A + params.f_a * state.n_a
    if den <= 0.0:
        return (0.0, 0.0, 0.0, 0.0)
    w = state.n_ab1 * state.n_Ab2 - state.n_Ab1 * state.n_ab2
    rec = (scaling.r_K * params.f_A * params.f_a / den) * w
    b = (
        params.f_A * state.n_Ab1 + rec,
        params.f_A * state.n_Ab2 - rec,
        params.f_a * state.n_ab1 - rec,
        params.f_a * state.n_ab2 + rec,
    )
    return tuple(x if x > 0.0 else 0.0 for x in b)


def linkage_disequilibrium(state: PopState) -> int:
    """n_ab2*n_Ab1 - n_ab1*n_Ab2, the neutral-proportion disequilibrium.

    Equals n_A*n_a*(P_Ab1 - P_ab1) whenever both selected classes are
    nonempty; exact integer arithmetic.
    """
    return state.n_ab2 * state.n_Ab1 - state.n_ab1 * state.n_Ab2


def proportion_drift(
    params: EcologyParams, scaling: ScalingParams, state: PopState, alpha: str
) -> float:
    """Drift integrand of the neutral proportion P_{alpha,b1} (diagnostic).

    r_K*f_A*f_a*(n_x'b1*n_xb2 - n_xb1*n_x'b2) / ((n_x+1)*(f_A*n_A + f_a*n_a))
    for x = alpha; zero when the alpha class is empty.
    """
    n_alpha = state.n_A if alpha == "A" else state.n_a
    if n_alpha < 1:
        return 0.0
    den = params.f_A * state.n_A + params.f_a * state.n_a
    if alpha == "A":
        num = state.n_ab1 * state.n_Ab2 - state.n_Ab1 * state.n_ab2
    else:
        num = state.n_Ab1 * state.n_ab2 - state.n_ab1 * state.n_Ab2
    return scaling.r_K * params.f_A * params.f_a * num / ((n_alpha + 1) * den)


def assumption1_raw(params: EcologyParams) -> bool:
    """No-coexistence condition in its raw inequality form.

    f_A > D_A, f_a > D_a, and
    f_a - D_a > (f_A - D_A) * max(C_aA/C_AA, C_aa/C_Aa).
    Used as an independent cross-check of DerivedEcology.assumption1_ok.
    """
    if params.f_A <= params.D_A or params.f_a <= params.D_a:
        return False
    if params.C_Aa == 0.0:
        return False
    sup = max(params.C_aA / params.C_AA, params.C_aa / params.C_Aa)
    return params.f_a - params.D_a > (params.f_A - params.D_A) * sup
