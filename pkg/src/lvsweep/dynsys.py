"""Deterministic limits of the rescaled process.

Contains the 2D competitive Lotka-Volterra system for the selected-allele
densities, the 4D system with the neutral split and its recombination
coupling, the change of variables (n_A, n_a, g, p_ab1) that decouples the
neutral dynamics, the relaxation time to the stable equilibrium, and the
mixing weight F(z, r, t) computed by quadrature-by-augmentation (extra ODE
states h and F rather than post-hoc integration of stored trajectories).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, ParameterError
from .model import EcologyParams, derived_ecology

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-12
DEFAULT_METHOD = "DOP853"
HARD_TIME_CAP = 1e4
NEG_CLAMP = -1e-9


@dataclass(frozen=True)
class DenseState:
    """Real-valued four-type densities (per unit K)."""

    n_Ab1: float
    n_Ab2: float
    n_ab1: float
    n_ab2: float

    @property
    def n_A(self) -> float:
        return self.n_Ab1 + self.n_Ab2

    @property
    def n_a(self) -> float:
        return self.n_ab1 + self.n_ab2

    def as_array(self) -> np.ndarray:
        return np.array([self.n_Ab1, self.n_Ab2, self.n_ab1, self.n_ab2])


@dataclass(frozen=True)
class ChangeVarState:
    """Marginals plus proportion gap g = P_Ab1 - P_ab1 and p_ab1."""

    n_A: float
    n_a: float
    g: float
    p_ab1: float


def to_change_vars(z: DenseState) -> ChangeVarState:
    if z.n_A <= 0 or z.n_a <= 0:
        raise ParameterError("change of variables needs n_A > 0 and n_a > 0")
    p_A = z.n_Ab1 / z.n_A
    p_a = z.n_ab1 / z.n_a
    return ChangeVarState(z.n_A, z.n_a, p_A - p_a, p_a)


def from_change_vars(c: ChangeVarState) -> DenseState:
    p_A = c.g + c.p_ab1
    return DenseState(
        n_Ab1=p_A * c.n_A,
        n_Ab2=(1.0 - p_A) * c.n_A,
        n_ab1=c.p_ab1 * c.n_a,
        n_ab2=(1.0 - c.p_ab1) * c.n_a,
    )


@dataclass
class OdeSolution:
    """Trajectory wrapper with dense evaluation."""

    t: np.ndarray
    y: np.ndarray  # shape (n_states, len(t))
    sol: object    # scipy dense-output callable

    def __call__(self, t):
        return self.sol(t)


def _check_solution(res, what: str):
    if not res.success:
        raise NumericalError(f"{what}: integrator failed: {res.message}")
    if res.y.min() < NEG_CLAMP:
        raise NumericalError(
            f"{what}: negative-density excursion {res.y.min():.3e} below clamp"
        )
    np.clip(res.y, 0.0, None, out=res.y)


def _lv2_rhs(params: EcologyParams):
    fA, fa = params.f_A, params.f_a
    DA, Da = params.D_A, params.D_a
    CAA, CAa, CaA, Caa = params.C_AA, params.C_Aa, params.C_aA, params.C_aa

    def rhs(t, y):
        nA, na = y
        return (
            (fA - DA - CAA * nA - CAa * na) * nA,
            (fa - Da - CaA * nA - Caa * na) * na,
        )

    return rhs


def integrate_lv2(
    params: EcologyParams,
    z_A: float,
    z_a: float,
    t_end: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = DEFAULT_METHOD,
    t_eval=None,
) -> OdeSolution:
    """Two-species competitive Lotka-Volterra densities (n_A, n_a)."""
    if z_A < 0 or z_a < 0:
        raise ParameterError("initial densities must be nonnegative")
    if t_end <= 0:
        raise ParameterError("t_end must be positive")
    res = solve_ivp(
        _lv2_rhs(params), (0.0, t_end), [z_A, z_a],
        method=method, rtol=rtol, atol=atol, dense_output=True, t_eval=t_eval,
    )
    _check_solution(res, "lv2")
    return OdeSolution(res.t, res.y, res.sol)


def _lv4_rhs(params: EcologyParams, r: float):
    fA, fa = params.f_A, params.f_a
    DA, Da = params.D_A, params.D_a
    CAA, CAa, CaA, Caa = params.C_AA, params.C_Aa, params.C_aA, params.C_aa

    def rhs(t, y):
        nAb1, nAb2, nab1, nab2 = y
        nA = nAb1 + nAb2
        na = nab1 + nab2
        gA = fA - DA - CAA * nA - CAa * na
        ga = fa - Da - CaA * nA - Caa * na
        den = fA * nA + fa * na
        rec = (r * fA * fa / den) * (nab1 * nAb2 - nAb1 * nab2) if den > 0 else 0.0
        return (
            gA * nAb1 + rec,
            gA * nAb2 - rec,
            ga * nab1 - rec,
            ga * nab2 + rec,
        )

    return rhs


def integrate_lv4(
    params: EcologyParams,
    r: float,
    z: DenseState,
    t_end: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = DEFAULT_METHOD,
    t_eval=None,
) -> OdeSolution:
    """Four-type densities with the recombination coupling."""
    if z.n_A + z.n_a <= 0:
        raise ParameterError("need z_A + z_a > 0")
    res = solve_ivp(
        _lv4_rhs(params, r), (0.0, t_end), list(z.as_array()),
        method=method, rtol=rtol, atol=atol, dense_output=True, t_eval=t_eval,
    )
    _check_solution(res, "lv4")
    return OdeSolution(res.t, res.y, res.sol)


def integrate_change_vars(
    params: EcologyParams,
    r: float,
    c0: ChangeVarState,
    t_end: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = DEFAULT_METHOD,
    t_eval=None,
) -> OdeSolution:
    """Integrate (n_A, n_a, g, p_ab1) directly; oracle for the 4D system."""
    fA, fa = params.f_A, params.f_a

    lv2 = _lv2_rhs(params)

    def rhs(t, y):
        nA, na, g, p = y
        dA, da = lv2(t, (nA, na))
        den = fA * nA + fa * na
        if den > 0:
            mix_all = r * fA * fa * (nA + na) / den
            mix_A = r * fA * fa * nA / den
        else:
            mix_all = mix_A = 0.0
        return (dA, da, -g * mix_all, g * mix_A)

    res = solve_ivp(
        rhs, (0.0, t_end), [c0.n_A, c0.n_a, c0.g, c0.p_ab1],
        method=method, rtol=rtol, atol=atol, dense_output=True, t_eval=t_eval,
    )
    if not res.success:
        raise NumericalError(f"change-vars: integrator failed: {res.message}")
    return OdeSolution(res.t, res.y, res.sol)


def _f_quadrature_rhs(params: EcologyParams, r: float):
    """RHS for (n_A, n_a, h, F): dh = r fA fa (nA+na)/den, dF = r fA fa nA/den e^-h."""
    fA, fa = params.f_A, params.f_a
    lv2 = _lv2_rhs(params)

    def rhs(t, y):
        nA, na, h, F = y
        dA, da = lv2(t, (nA, na))
        den = fA * nA + fa * na
        if den > 0:
            coef = r * fA * fa / den
            dh = coef * (nA + na)
            dF = coef * nA * math.exp(-h)
        else:
            dh = dF = 0.0
        return (dA, da, dh, dF)

    return rhs


def compute_F(
    params: EcologyParams,
    r: float,
    z: tuple[float, float],
    t: float,
    rtol: float = 1e-10,
    atol: float = 1e-13,
) -> float:
    """Mixing weight F(z, r, t) in [0, 1] by co-integrated quadrature."""
    z_A, z_a = z
    if z_A + z_a <= 0:
        raise ParameterError("need z_A + z_a > 0")
    if not 0.0 <= r <= 1.0:
        raise ParameterError("r must lie in [0, 1]")
    if t == 0.0:
        return 0.0
    res = solve_ivp(
        _f_quadrature_rhs(params, r), (0.0, t), [z_A, z_a, 0.0, 0.0],
        method=DEFAULT_METHOD, rtol=rtol, atol=atol,
    )
    if not res.success:
        raise NumericalError(f"F quadrature failed: {res.message}")
    return min(max(res.y[3, -1], 0.0), 1.0)


@dataclass
class FLimit:
    """F(z, r) with the tail bound achieved at truncation."""

    value: float
    t_reached: float
    tail_bound: float


def compute_F_limit(
    params: EcologyParams,
    r: float,
    z: tuple[float, float],
    tol: float = 1e-8,
    rtol: float = 1e-10,
    atol: float = 1e-13,
    hard_time_cap: float = HARD_TIME_CAP,
) -> FLimit:
    """Limit of F(z, r, t) as t -> infinity, to within `tol`.

    Integrates until the residual tail bound
    int_t^inf fA fa nA/(fA nA + fa na) ds <= 2 fA nA(t) / (|S_Aa| (nbar_a - e/2))
    drops below tol; the bound is valid once the solution has entered
    [0, e^2] x [nbar_a - e/2, inf) for an internal e chosen so the resident
    decay rate is at least |S_Aa|/2 there.
    """
    z_A, z_a = z
    if z_a <= 0:
        raise ParameterError("F limit needs z_a > 0")
    derived = derived_ecology(params)
    if not derived.assumption1_ok:
        raise ParameterError("F limit requires the no-coexistence assumption")
    if z_A == 0.0:
        return FLimit(0.0, 0.0, 0.0)
    absSAa = abs(derived.S_Aa)
    eps0 = min(
        absSAa / params.C_Aa,
        derived.nbar_a / 2.0,
        params.C_aa / params.C_aA if params.C_aA > 0 else math.inf,
        1.0,
    )
    floor_na = derived.nbar_a - eps0 / 2.0
    window = 5.0 / absSAa
    rhs = _f_quadrature_rhs(params, r)
    y = [z_A, z_a, 0.0, 0.0]
    t = 0.0
    tail = math.inf
    while t < hard_time_cap:
        t_next = min(t + window, hard_time_cap)
        res = solve_ivp(rhs, (t, t_next), y, method=DEFAULT_METHOD,
                        rtol=rtol, atol=atol)
        if not res.success:
            raise NumericalError(f"F quadrature failed: {res.message}")
        y = list(res.y[:, -1])
        t = t_next
        nA, na = y[0], y[1]
        if nA <= eps0 * eps0 and na >= floor_na:
            tail = 2.0 * params.f_A * nA / (absSAa * floor_na)
            if tail <= tol:
                return FLimit(min(max(y[3], 0.0), 1.0), t, tail)
    raise NumericalError(
        f"F limit: tail bound {tail:.3e} still above tol {tol:.3e} "
        f"at the hard time cap {hard_time_cap}"
    )


@dataclass
class RelaxationResult:
    """First entry into the near-equilibrium set, with the verification window."""

    t_eps: float
    trailing_window: float
    eps: float


def relaxation_time(
    params: EcologyParams,
    z: tuple[float, float],
    eps: float,
    trailing_window: float | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    hard_time_cap: float = HARD_TIME_CAP,
) -> RelaxationResult:
    """Time after which the 2D flow stays in [0, eps^2/2] x [nbar_a - eps/2, inf).

    Entry is located on a dense grid and forward invariance is verified
    over a trailing window (default 10/|S_Aa|); an infinite-horizon check
    is impossible numerically, so the window length is reported with the
    value.
    """
    z_A, z_a = z
    derived = derived_ecology(params)
    if not derived.assumption1_ok:
        raise ParameterError("relaxation time requires the no-coexistence assumption")
    if z_a <= 0:
        raise ParameterError("relaxation time needs z_a > 0")
    bound = min(
        params.C_aa / params.C_aA if params.C_aA > 0 else math.inf,
        2.0 * abs(derived.S_Aa) / params.C_Aa,
    )
    if eps > bound:
        raise ParameterError(
            f"eps={eps} violates eps <= min(C_aa/C_aA, 2|S_Aa|/C_Aa) = {bound}"
        )
    absSAa = abs(derived.S_Aa)
    if trailing_window is None:
        trailing_window = 10.0 / absSAa

    a_cap = eps * eps / 2.0
    na_floor = derived.nbar_a - eps / 2.0

    def in_set(nA, na):
        return nA <= a_cap and na >= na_floor

    chunk = max(trailing_window, 5.0 / absSAa)
    grid_per_chunk = 2048
    t0 = 0.0
    y0 = [z_A, z_a]
    entry = None
    while t0 < hard_time_cap:
        t1 = min(t0 + chunk, hard_time_cap)
        sol = integrate_lv2(params, y0[0], y0[1], t1 - t0, rtol=rtol, atol=atol)
        ts = np.linspace(0.0, t1 - t0, grid_per_chunk)
        ys = sol(ts)
        for i, tau in enumerate(ts):
            t_abs = t0 + tau
            ok = in_set(ys[0, i], ys[1, i])
            if entry is None:
                if ok:
                    entry = t_abs
            elif not ok:
                entry = None
            elif t_abs - entry >= trailing_window:
                return RelaxationResult(entry, trailing_window, eps)
        y0 = [ys[0, -1], ys[1, -1]]
        t0 = t1
    raise NumericalError(
        f"no verified entry into the relaxation set within t <= {hard_time_cap}; "
        "check the no-coexistence assumption or increase eps"
    )


def integrate_lv4_with_F(
    params: EcologyParams,
    r: float,
    z: DenseState,
    t_end: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = DEFAULT_METHOD,
    t_eval=None,
) -> OdeSolution:
    """4D densities co-integrated with the quadrature accumulators (h, F)."""
    if z.n_A + z.n_a <= 0:
        raise ParameterError("need z_A + z_a > 0")
    fA, fa = params.f_A, params.f_a
    rhs4 = _lv4_rhs(params, r)

    def rhs(t, y):
        d4 = rhs4(t, y[:4])
        nA = y[0] + y[1]
        na = y[2] + y[3]
        den = fA * nA + fa * na
        if den > 0:
            coef = r * fA * fa / den
            dh = coef * (nA + na)
            dF = coef * nA * math.exp(-y[4])
        else:
            dh = dF = 0.0
        return (*d4, dh, dF)

    res = solve_ivp(
        rhs, (0.0, t_end), [*z.as_array(), 0.0, 0.0],
        method=method, rtol=rtol, atol=atol, dense_output=True, t_eval=t_eval,
    )
    if not res.success:
        raise NumericalError(f"lv4+F: integrator failed: {res.message}")
    return OdeSolution(res.t, res.y, res.sol)


def trajectory_csv(path, sol: OdeSolution):
    """Write t,n_Ab1,n_Ab2,n_ab1,n_ab2[,h,F] rows for a 4D or augmented solution."""
    if sol.y.shape[0] not in (4, 6):
        raise ParameterError("trajectory_csv expects a 4- or 6-state solution")
    header = "t,n_Ab1,n_Ab2,n_ab1,n_ab2"
    if sol.y.shape[0] == 6:
        header += ",h,F"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i, t in enumerate(sol.t):
            row = ",".join(repr(float(v)) for v in sol.y[:, i])
            fh.write(f"{float(t)!r},{row}\n")
