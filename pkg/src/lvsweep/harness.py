"""Experiment orchestration: configuration, replicate execution, reports.

A single JSON document describes an experiment (scenario, ecology, one or
more (K, r_K) cells, replicate count, seed base).  Replicates are
embarrassingly parallel: replicate i derives its seed from seed_base and i
alone, workers share nothing, and aggregation merges by replicate index,
so reports are identical for any worker count.  Progress goes to stderr;
machine-readable results go to files.
"""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import __version__, _kernels, bdp, genealogy, predict, ssa
from .errors import ValidationError
from .model import EcologyParams, ScalingParams, derived_ecology
from .stats import percentile_bootstrap, wilson_interval

SCHEMA_VERSION = 1
SCENARIOS = ("soft", "hard", "monomorphic", "bdp-check", "genealogy", "jumps")

_PARAM_KEYS = ("f_A", "f_a", "D_A", "D_a", "C_AA", "C_Aa", "C_aA", "C_aa")
_TOP_KEYS = {
    "schema_version", "scenario", "params", "scaling", "n_replicates",
    "seed_base", "epsilon", "max_events", "z", "z_Ab1_frac", "regime",
    "t_window", "dt_sample", "z_a", "tolerance", "outputs",
}


@dataclass
class ExperimentSpec:
    """Validated experiment description."""

    scenario: str
    params: EcologyParams
    scaling: list[ScalingParams]
    n_replicates: int
    seed_base: int
    epsilon: float = ssa.DEFAULT_EPSILON
    max_events: int = ssa.DEFAULT_MAX_EVENTS
    z: tuple[float, float, float, float] | None = None
    z_Ab1_frac: float | None = None
    regime: str | None = None
    t_window: tuple[float, float] | None = None
    dt_sample: float | None = None
    z_a: float | None = None
    tolerance: float | None = None
    outputs: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "params": {k: getattr(self.params, k) for k in _PARAM_KEYS},
            "scaling": [{"K": s.K, "r_K": s.r_K} for s in self.scaling],
            "n_replicates": self.n_replicates,
            "seed_base": self.seed_base,
            "epsilon": self.epsilon,
            "max_events": self.max_events,
        }
        for key in ("z", "z_Ab1_frac", "regime", "t_window", "dt_sample",
                    "z_a", "tolerance"):
            v = getattr(self, key)
            if v is not None:
                d[key] = list(v) if isinstance(v, tuple) else v
        if self.outputs:
            d["outputs"] = self.outputs
        return d


def load_spec(doc: dict) -> ExperimentSpec:
    """Validate a configuration document; unknown keys are errors."""
    if not isinstance(doc, dict):
        raise ValidationError("configuration must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ValidationError(f"unknown configuration keys: {sorted(unknown)}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(
            f"schema_version must be {SCHEMA_VERSION}, got {doc.get('schema_version')!r}"
        )
    scenario = doc.get("scenario")
    if scenario not in SCENARIOS:
        raise ValidationError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")

    pdoc = doc.get("params")
    if not isinstance(pdoc, dict):
        raise ValidationError("params must be an object")
    unknown = set(pdoc) - set(_PARAM_KEYS)
    if unknown:
        raise ValidationError(f"unknown params keys: {sorted(unknown)}")
    missing = set(_PARAM_KEYS) - set(pdoc)
    if missing:
        raise ValidationError(f"missing params keys: {sorted(missing)}")
    params = EcologyParams(**{k: float(pdoc[k]) for k in _PARAM_KEYS})

    sdoc = doc.get("scaling")
    if not isinstance(sdoc, list) or not sdoc:
        raise ValidationError("scaling must be a nonempty list of {K, r_K}")
    scaling = []
    for cell in sdoc:
        if set(cell) != {"K", "r_K"}:
            raise ValidationError(f"scaling cells need exactly K and r_K, got {cell}")
        scaling.append(ScalingParams(K=int(cell["K"]), r_K=float(cell["r_K"])))

    n_replicates = int(doc.get("n_replicates", 0))
    if n_replicates < 1:
        raise ValidationError("n_replicates must be >= 1")
    if "seed_base" not in doc:
        raise ValidationError("seed_base is required")
    seed_base = int(doc["seed_base"])

    spec = ExperimentSpec(
        scenario=scenario,
        params=params,
        scaling=scaling,
        n_replicates=n_replicates,
        seed_base=seed_base,
        epsilon=float(doc.get("epsilon", ssa.DEFAULT_EPSILON)),
        max_events=int(doc.get("max_events", ssa.DEFAULT_MAX_EVENTS)),
        z=tuple(float(v) for v in doc["z"]) if "z" in doc else None,
        z_Ab1_frac=float(doc["z_Ab1_frac"]) if "z_Ab1_frac" in doc else None,
        regime=doc.get("regime"),
        t_window=tuple(float(v) for v in doc["t_window"]) if "t_window" in doc else None,
        dt_sample=float(doc["dt_sample"]) if "dt_sample" in doc else None,
        z_a=float(doc["z_a"]) if "z_a" in doc else None,
        tolerance=float(doc["tolerance"]) if "tolerance" in doc else None,
        outputs=doc.get("outputs", {}),
    )
    _validate_scenario(spec)
    return spec


def _validate_scenario(spec: ExperimentSpec) -> None:
    d = derived_ecology(spec.params)
    if spec.scenario in ("soft", "hard", "genealogy", "jumps") and not d.assumption1_ok:
        raise ValidationError(
            "no-coexistence assumption violated: need nbar_A > 0, nbar_a > 0 and "
            f"S_Aa < 0 < S_aA; got nbar_A={d.nbar_A}, nbar_a={d.nbar_a}, "
            f"S_Aa={d.S_Aa}, S_aA={d.S_aA}"
        )
    if not 0.0 < spec.epsilon < 1.0:
        raise ValidationError("epsilon must lie in (0, 1)")
    for s in spec.scaling:
        if math.floor(spec.epsilon * s.K) < 1:
            raise ValidationError(
                f"epsilon too small for K={s.K}: floor(epsilon*K) must be >= 1"
            )
    if spec.scenario == "soft":
        if spec.z is None:
            raise ValidationError("soft scenario requires z = [z_Ab1, z_Ab2, z_ab1, z_ab2]")
        if len(spec.z) != 4 or any(v < 0 for v in spec.z):
            raise ValidationError("z must be four nonnegative densities")
        if spec.z[2] + spec.z[3] <= 0:
            raise ValidationError("soft scenario requires z_ab1 + z_ab2 > 0")
    if spec.scenario in ("hard", "genealogy"):
        if spec.z_Ab1_frac is None:
            raise ValidationError(f"{spec.scenario} scenario requires z_Ab1_frac")
        if not 0.0 <= spec.z_Ab1_frac <= 1.0:
            raise ValidationError("z_Ab1_frac must lie in [0, 1]")
    if spec.scenario == "hard" and spec.regime not in (None, "strong", "weak"):
        raise ValidationError("regime must be 'strong' or 'weak' when given")
    if spec.scenario == "monomorphic":
        if spec.t_window is None or len(spec.t_window) != 2:
            raise ValidationError("monomorphic scenario requires t_window = [t0, t1]")
        t0, t1 = spec.t_window
        if not 0 <= t0 < t1:
            raise ValidationError("t_window must satisfy 0 <= t0 < t1")
        if spec.dt_sample is None or spec.dt_sample <= 0:
            raise ValidationError("monomorphic scenario requires dt_sample > 0")
    if spec.scenario == "bdp-check":
        limit = d.S_aA / (
            2 * spec.params.C_aA * spec.params.C_Aa / spec.params.C_AA
            + spec.params.C_aa
        )
        if not 0 < spec.epsilon < limit:
            raise ValidationError(
                f"bdp-check requires epsilon < S_aA/(2 C_aA C_Aa/C_AA + C_aa) = {limit}"
            )


# ---------------------------------------------------------------------------
# replicate tasks (module-level for multiprocessing)

def _sweep_task(args):
    (params, scaling, initial, seed, max_events, epsilon) = args
    cfg = ssa.SimConfig(
        initial_state=initial, seed=seed, max_events=max_events, epsilon=epsilon
    )
    out, _ = ssa.run_sweep(params, scaling, cfg)
    return {
        "seed": seed,
        "status": out.status,
        "fixed": out.fixed,
        "t_ext": out.t_ext,
        "t_eps_hit": out.t_eps_hit,
        "s_eps_exit": out.s_eps_exit,
        "p_ab1_final": out.p_ab1_final,
        "n_a_final": out.n_a_final,
        "events_used": out.events_used,
    }


def _monomorphic_task(args):
    (params, scaling, initial, seed, max_events, epsilon, t0, t1, dt) = args
    cfg = ssa.SimConfig(
        initial_state=initial, seed=seed, max_events=max_events, epsilon=epsilon,
        record_mode="sampled", dt_sample=dt, t_end=t1,
    )
    out, traj = ssa.run_sweep(params, scaling, cfg)
    mask = (traj.t >= t0) & (traj.t <= t1)
    na = traj.n[mask, 2] + traj.n[mask, 3]
    return {
        "seed": seed,
        "status": out.status,
        "fixed": out.fixed,
        "t_ext": out.t_ext,
        "t_eps_hit": out.t_eps_hit,
        "s_eps_exit": out.s_eps_exit,
        "p_ab1_final": out.p_ab1_final,
        "n_a_final": out.n_a_final,
        "events_used": out.events_used,
        "mean_na_over_K": float(na.mean()) / scaling.K,
    }


def _genealogy_task(args):
    (params, scaling, initial, seed, max_events, epsilon) = args
    cfg = ssa.SimConfig(
        initial_state=initial, seed=seed, max_events=max_events, epsilon=epsilon
    )
    res = genealogy.run_tagged_sweep(params, scaling, cfg, stop_at_eps=False)
    row = {
        "seed": seed,
        "status": res.outcome.status,
        "fixed": res.outcome.fixed,
        "events_used": res.outcome.events_used,
        "tag_violations": res.tag_violations,
        "p_ab1_final": res.outcome.p_ab1_final,
        "frac_zero_mrec": None,
        "frac_one_mrec": None,
        "frac_multi_mrec": None,
        "frac_b1_at_Teps": None,
    }
    if res.stats_eps is not None:
        row.update(
            frac_zero_mrec=res.stats_eps.frac_zero_mrec,
            frac_one_mrec=res.stats_eps.frac_one_mrec,
            frac_multi_mrec=res.stats_eps.frac_multi_mrec,
            frac_b1_at_Teps=res.stats_eps.frac_b1,
        )
    return row


# ---------------------------------------------------------------------------

def _map_tasks(task_fn, arglist, workers: int):
    if workers <= 1:
        return [task_fn(a) for a in arglist]
    ctx = get_context("fork") if sys.platform.startswith("linux") else get_context()
    with ctx.Pool(processes=workers) as pool:
        return pool.map(task_fn, arglist, chunksize=max(1, len(arglist) // (8 * workers)))


def _nan_to_none(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isnan(x):
        return None
    return x


def _cell_common(rows):
    n = len(rows)
    n_fixed = sum(1 for r in rows if r["fixed"])
    n_trunc = sum(1 for r in rows if r["status"] == "truncated")
    n_eff = n - n_trunc
    fix_frac = n_fixed / n_eff if n_eff else math.nan
    fix_ci = wilson_interval(n_fixed, n_eff)
    return n, n_fixed, n_trunc, n_eff, fix_frac, fix_ci


def run_experiment(
    spec: ExperimentSpec,
    out_dir: str | Path | None = None,
    workers: int = 1,
    progress: bool = True,
) -> dict:
    """Execute every (K, r_K) cell; return the report document.

    Writes report.json plus per-cell replicate CSVs under out_dir when
    given.  The report is deterministic for fixed (spec, seed_base) up to
    the wall-time metadata field, whatever the worker count.
    """
    t_start = time.monotonic()
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        probe = out_path / ".write_probe"
        try:
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise ValidationError(f"output path not writable: {exc}") from exc

    cells = []
    csv_paths = []
    for ci, scaling in enumerate(spec.scaling):
        if progress:
            print(
                f"[lvsweep] cell {ci + 1}/{len(spec.scaling)}: scenario={spec.scenario} "
                f"K={scaling.K} r_K={scaling.r_K} n={spec.n_replicates}",
                file=sys.stderr,
            )
        cell, rows = _run_cell(spec, scaling, workers)
        cells.append(cell)
        if out_path is not None and spec.outputs.get("replicate_csv", True):
            path = out_path / f"replicates_K{scaling.K}_r{scaling.r_K}.csv"
            _write_rows_csv(path, rows)
            csv_paths.append(str(path))
            if spec.scenario == "genealogy":
                gpath = out_path / f"origin_stats_K{scaling.K}_r{scaling.r_K}.csv"
                genealogy.origin_stats_csv(
                    gpath,
                    (
                        {"replicate": i, **r}
                        for i, r in enumerate(rows)
                        if r["frac_zero_mrec"] is not None
                    ),
                )
                csv_paths.append(str(gpath))

    report = {
        "schema_version": SCHEMA_VERSION,
        "spec": spec.to_json_dict(),
        "cells": cells,
        "meta": {
            "seed_base": spec.seed_base,
            "code_version": __version__,
            "backend": _kernels.BACKEND,
            "wall_time_s": round(time.monotonic() - t_start, 3),
            "replicate_csv": csv_paths,
        },
    }
    if out_path is not None:
        write_report(out_path / "report.json", report)
    return report


def write_report(path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def report_breaches(report: dict) -> list[str]:
    """Cells whose |gap| exceeds the configured tolerance."""
    tol = report["spec"].get("tolerance")
    if tol is None:
        return []
    bad = []
    for cell in report["cells"]:
        gap = cell.get("gap")
        if gap is not None and abs(gap) > tol:
            bad.append(f"K={cell['K']} r_K={cell['r_K']}: gap {gap} > {tol}")
    return bad


def _run_cell(spec: ExperimentSpec, scaling: ScalingParams, workers: int):
    params = spec.params
    seeds = [ssa.replicate_seed(spec.seed_base, i) for i in range(spec.n_replicates)]

    if spec.scenario == "soft":
        initial = ssa.soft_initial_state(spec.z, scaling.K)
        args = [(params, scaling, initial, s, spec.max_events, spec.epsilon)
                for s in seeds]
        rows = _map_tasks(_sweep_task, args, workers)
        pred = predict.predict_soft(params, scaling.r_K, spec.z)
        cell = _sweep_cell(spec, scaling, rows, pred.p_ab1_limit)
        cell["extra"] = {"F_limit": pred.F_limit, "predicted_fix": pred.fixation_prob}
        return cell, rows

    if spec.scenario == "hard":
        initial = ssa.hard_initial_state(params, scaling.K, spec.z_Ab1_frac)
        args = [(params, scaling, initial, s, spec.max_events, spec.epsilon)
                for s in seeds]
        rows = _map_tasks(_sweep_task, args, workers)
        pred = predict.predict_hard(
            params, scaling.r_K, scaling.K, spec.z_Ab1_frac, regime=spec.regime
        )
        cell = _sweep_cell(spec, scaling, rows, pred.p_ab1_limit)
        cell["extra"] = {
            "regime": pred.regime,
            "regime_source": pred.regime_source,
            "rho_K": pred.rho_K,
            "rK_logK": pred.rK_logK,
            "predicted_fix": pred.fixation_prob,
        }
        return cell, rows

    if spec.scenario == "monomorphic":
        d = derived_ecology(params)
        z_a = spec.z_a if spec.z_a is not None else d.nbar_a
        initial = ssa.soft_initial_state((0.0, 0.0, z_a, 0.0), scaling.K)
        t0, t1 = spec.t_window
        args = [(params, scaling, initial, s, spec.max_events, spec.epsilon,
                 t0, t1, spec.dt_sample) for s in seeds]
        rows = _map_tasks(_monomorphic_task, args, workers)
        vals = [r["mean_na_over_K"] for r in rows]
        mean = float(np.mean(vals))
        ci = percentile_bootstrap(vals, seed=ssa.replicate_seed(spec.seed_base, 1 << 21))
        n, n_fixed, n_trunc, n_eff, fix_frac, fix_ci = _cell_common(rows)
        cell = {
            "K": scaling.K, "r_K": scaling.r_K,
            "n": n, "n_fixed": n_fixed,
            "fix_frac": _nan_to_none(fix_frac), "fix_ci": list(fix_ci),
            "mean_p_ab1": None, "p_ci": None,
            "predicted": d.nbar_a,
            "gap": mean - d.nbar_a,
            "degraded": n_trunc > 0.01 * n,
            "extra": {"mean_na_over_K": mean, "na_ci": list(ci)},
        }
        return cell, rows

    if spec.scenario == "genealogy":
        initial = ssa.hard_initial_state(params, scaling.K, spec.z_Ab1_frac)
        args = [(params, scaling, initial, s, spec.max_events, spec.epsilon)
                for s in seeds]
        rows = _map_tasks(_genealogy_task, args, workers)
        fixing = [r for r in rows if r["fixed"] and r["frac_zero_mrec"] is not None]
        rho = predict.rho_K(params, scaling.r_K, scaling.K)
        pred_weak = (1.0 - rho) + rho * spec.z_Ab1_frac
        n, n_fixed, n_trunc, n_eff, fix_frac, fix_ci = _cell_common(rows)
        if fixing:
            zero = [r["frac_zero_mrec"] for r in fixing]
            pfin = [r["p_ab1_final"] for r in fixing]
            mean_zero = float(np.mean(zero))
            mean_p = float(np.mean(pfin))
            zero_ci = percentile_bootstrap(
                zero, seed=ssa.replicate_seed(spec.seed_base, 1 << 22)
            )
            p_ci = percentile_bootstrap(
                pfin, seed=ssa.replicate_seed(spec.seed_base, 1 << 23)
            )
        else:
            mean_zero = mean_p = math.nan
            zero_ci = p_ci = (math.nan, math.nan)
        cell = {
            "K": scaling.K, "r_K": scaling.r_K,
            "n": n, "n_fixed": n_fixed,
            "fix_frac": _nan_to_none(fix_frac), "fix_ci": list(fix_ci),
            "mean_p_ab1": _nan_to_none(mean_p), "p_ci": list(p_ci),
            "predicted": pred_weak,
            "gap": _nan_to_none(mean_p - pred_weak) if fixing else None,
            "degraded": n_trunc > 0.01 * n,
            "extra": {
                "n_fixing_with_stats": len(fixing),
                "mean_frac_zero_mrec_at_Teps": _nan_to_none(mean_zero),
                "zero_mrec_ci": list(zero_ci),
                "one_minus_rho_K": 1.0 - rho,
                "rho_K": rho,
                "tag_violations": sum(r["tag_violations"] for r in rows),
            },
        }
        return cell, rows

    if spec.scenario == "jumps":
        d = derived_ecology(params)
        stats = genealogy.jump_statistics(
            params, scaling, spec.epsilon, spec.n_replicates, spec.seed_base,
            max_events=spec.max_events,
        )
        target = params.f_a * math.log(scaling.K) / d.S_aA
        rows = [
            {"replicate": i, "weighted_sum": float(w)}
            for i, w in enumerate(stats.weighted_sum)
        ]
        cell = {
            "K": scaling.K, "r_K": scaling.r_K,
            "n": stats.n_attempted, "n_fixed": None,
            "fix_frac": None, "fix_ci": None,
            "mean_p_ab1": None, "p_ci": None,
            "predicted": scaling.r_K * target,
            "gap": stats.scalar - scaling.r_K * target,
            "degraded": False,
            "extra": {
                "n_conditioned": stats.n_conditioned,
                "scalar_rK_weighted_upcrossings": stats.scalar,
                "scalar_ci": list(stats.scalar_ci),
                "fa_logK_over_SaA": target,
            },
        }
        return cell, rows

    if spec.scenario == "bdp-check":
        rep = bdp.sandwich_check(
            params, scaling, spec.epsilon, spec.n_replicates, spec.seed_base,
            max_events=spec.max_events,
        )
        rows = []
        cell = {
            "K": scaling.K, "r_K": scaling.r_K,
            "n": rep.n_replicates, "n_fixed": None,
            "fix_frac": None, "fix_ci": None,
            "mean_p_ab1": None, "p_ci": None,
            "predicted": 1.0,
            "gap": rep.n_ok / rep.n_replicates - 1.0,
            "degraded": rep.n_truncated > 0.01 * rep.n_replicates,
            "extra": {
                "n_ok": rep.n_ok,
                "total_violations": rep.total_violations,
                "rate_clamps": rep.rate_clamps,
                "n_hit_eps": rep.n_hit_eps,
                "hit_fraction": rep.hit_fraction,
                "hit_ci": list(rep.hit_ci),
                "s_minus": rep.rates.s_minus,
                "s_plus": rep.rates.s_plus,
                "hit_bounds": list(rep.s_bounds),
            },
        }
        return cell, rows

    raise ValidationError(f"unhandled scenario {spec.scenario!r}")


def _sweep_cell(spec: ExperimentSpec, scaling: ScalingParams, rows, predicted: float):
    n, n_fixed, n_trunc, n_eff, fix_frac, fix_ci = _cell_common(rows)
    p_vals = [r["p_ab1_final"] for r in rows
              if r["fixed"] and r["p_ab1_final"] is not None]
    if p_vals:
        mean_p = float(np.mean(p_vals))
        p_ci = percentile_bootstrap(
            p_vals, seed=ssa.replicate_seed(spec.seed_base, 1 << 24)
        )
        gap = mean_p - predicted
    else:
        mean_p = gap = None
        p_ci = (math.nan, math.nan)
    return {
        "K": scaling.K,
        "r_K": scaling.r_K,
        "n": n,
        "n_fixed": n_fixed,
        "fix_frac": _nan_to_none(fix_frac),
        "fix_ci": list(fix_ci),
        "mean_p_ab1": mean_p,
        "p_ci": list(p_ci),
        "predicted": predicted,
        "gap": gap,
        "degraded": n_trunc > 0.01 * n,
    }


def _write_rows_csv(path, rows) -> None:
    if not rows:
        Path(path).write_text("")
        return
    keys = sorted({k for r in rows for k in r})
    with open(path, "w") as fh:
        fh.write("replicate," + ",".join(keys) + "\n")
        for i, r in enumerate(rows):
            vals = []
            for k in keys:
                v = r.get(k)
                if v is None or (isinstance(v, float) and math.isnan(v)):
                    vals.append("")
                elif isinstance(v, bool):
                    vals.append(str(int(v)))
                elif isinstance(v, float):
                    vals.append(repr(float(v)))
                else:
                    vals.append(str(v))
            fh.write(f"{i}," + ",".join(vals) + "\n")


def _fmt_opt(v) -> str:
    return "-" if v is None else f"{v:.6f}"


def predict_table(spec: ExperimentSpec) -> str:
    """Pure predictor dispatch; returns the printed table."""
    lines = ["K\tr_K\tregime\tF\trho_K\tp_ab1_limit\tfixation_prob"]
    for scaling in spec.scaling:
        if spec.scenario == "soft":
            p = predict.predict_soft(spec.params, scaling.r_K, spec.z)
        else:
            p = predict.predict_hard(
                spec.params, scaling.r_K, scaling.K, spec.z_Ab1_frac,
                regime=spec.regime,
            )
        lines.append(
            f"{scaling.K}\t{scaling.r_K}\t{p.regime}\t{_fmt_opt(p.F_limit)}\t"
            f"{_fmt_opt(p.rho_K)}\t{p.p_ab1_limit:.6f}\t{p.fixation_prob:.6f}"
        )
    return "\n".join(lines)
