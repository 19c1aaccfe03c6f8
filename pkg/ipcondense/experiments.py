# ipcondense/experiments.py
# Command orchestration: runs one configured command end to end and writes its output files.

from __future__ import annotations

import logging
import math
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

import config
from . import reporting
from .dynamics import Configuration, derive_seed, run_replicas
from .errors import BudgetExceededError, ConfigError, DomainError, UnsupportedRegimeError
from .ldp import REGIME_SPEED, rate_curve
from .marginals import canonical_marginal, size_biased_marginal
from .partition import build_partition_table
from .schemas import ExperimentConfig, ModelParams
from .stats import (
    EmpiricalDistribution,
    empirical_moment,
    expected_residual,
    exponential_cdf,
    max_fraction,
    occupied_sites,
    phase_decomposition,
    r_k_profile,
    sample_gem_batch,
    scaled_lattice_cdf,
    size_biased_gc_table,
    size_biased_permutation,
    summarize,
)
from .weights import fugacity_Phi, log_Z_closed_form, relative_entropy_rate

logger = logging.getLogger(__name__)

Progress = Optional[Callable[[str], None]]

CONFIG_ERRORS = (ConfigError, ValidationError, UnsupportedRegimeError, DomainError)
RESOURCE_ERRORS = (BudgetExceededError, OSError)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, CONFIG_ERRORS):
        return 2
    if isinstance(exc, RESOURCE_ERRORS):
        return 3
    return 1


def output_path(cfg: ExperimentConfig) -> Path:
    if cfg.out is not None:
        return Path(cfg.out)
    return config.get_output_filename(cfg.command, cfg.format)


def _sibling(cfg: ExperimentConfig, suffix: str, fmt: Optional[str] = None) -> Path:
    return config.get_custom_output_filename(output_path(cfg), suffix, fmt)


def _resample_rng(cfg: ExperimentConfig, replica: int, sample: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, replica, sample])


def _group_summaries(rows: List[Dict], value_key: str = "value") -> List[Dict]:
    groups: Dict[tuple, List[float]] = {}
    for r in rows:
        groups.setdefault((r["statistic"], r["index"]), []).append(r[value_key])
    out = []
    for (stat, index), values in groups.items():
        out.append({"statistic": stat, "index": index, **summarize(values)})
    return out


# simulate

STAT_KEYS = ["replica", "sample", "resample", "statistic", "index", "value"]


def sample_statistics(cfg: ExperimentConfig, p: ModelParams, replica: int, sample: int,
                      conf: Configuration) -> List[Dict]:
    """Tidy rows of the selected statistics for one stationary configuration."""
    rows = []
    base = {"replica": replica, "sample": sample}
    wanted = set(cfg.statistics)
    K = cfg.threshold if cfg.threshold is not None else math.sqrt(p.N)

    if "max_fraction" in wanted and p.N > 0:
        rows.append({**base, "resample": None, "statistic": "max_fraction", "index": None, "value": max_fraction(conf)})
    if "occupied_sites" in wanted:
        rows.append({**base, "resample": None, "statistic": "occupied_sites", "index": None,
                     "value": occupied_sites(conf)})
    if "phase_decomposition" in wanted:
        bulk, condensed, volume = phase_decomposition(conf, K)
        for name, v in (("bulk_mass_fraction", bulk), ("condensed_mass_fraction", condensed),
                        ("condensed_volume_fraction", volume)):
            rows.append({**base, "resample": None, "statistic": name, "index": None, "value": v})
    if "empirical_moment" in wanted:
        for a in cfg.moments:
            rows.append({**base, "resample": None, "statistic": "empirical_moment", "index": a,
                         "value": empirical_moment([conf], a)})

    if p.N > 0 and wanted & {"r_k", "scaled_size_biased"}:
        rng = _resample_rng(cfg, replica, sample)
        for j in range(cfg.resamples):
            sb = size_biased_permutation(conf, rng)
            if "r_k" in wanted:
                for k, v in enumerate(r_k_profile(sb, cfg.k_max), start=1):
                    rows.append({**base, "resample": j, "statistic": "r_k", "index": k, "value": float(v)})
            if "scaled_size_biased" in wanted:
                scaled = sb.scaled(p.d)
                for i in cfg.tail_indices:
                    if i <= p.L:
                        rows.append({**base, "resample": j, "statistic": "scaled_size_biased", "index": i,
                                     "value": float(scaled[i - 1])})
    return rows


def configuration_rows(cfg: ExperimentConfig, p: ModelParams, samples) -> List[Dict]:
    rows = []
    for replica, sample, conf in samples:
        row = {"replica": replica, "sample": sample, "L": p.L, "N": p.N, "d": p.d, "kind": cfg.kind.value,
               "seed": conf.seed, "time": conf.time}
        row.update({f"eta_{x + 1}": int(v) for x, v in enumerate(conf.occupations)})
        rows.append(row)
    return rows


def cmd_simulate(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    p = cfg.model_params()
    meta = reporting.metadata(cfg)
    samples = run_replicas(p, cfg.kind, cfg.replicas, cfg.seed, n_samples=cfg.samples,
                           burn_in_factor=cfg.burn_in_factor, zrp_rates=cfg.zrp_rates, jobs=cfg.jobs,
                           progress_callback=progress_callback)
    if p.N == 0 and {"r_k", "scaled_size_biased", "max_fraction"} & set(cfg.statistics):
        logger.warning("N = 0: size-biased statistics and max fraction are skipped")

    stat_rows: List[Dict] = []
    for replica, sample, conf in samples:
        stat_rows.extend(sample_statistics(cfg, p, replica, sample, conf))

    out = output_path(cfg)
    conf_path = _sibling(cfg, "_configurations")
    summary_path = _sibling(cfg, "_summary", "json")
    conf_keys = ["replica", "sample", "L", "N", "d", "kind", "seed", "time"] + [f"eta_{x + 1}" for x in range(p.L)]

    reporting.export_rows(stat_rows, STAT_KEYS, out, cfg.format, meta)
    reporting.export_rows(configuration_rows(cfg, p, samples), conf_keys, conf_path, cfg.format, meta)

    summary = {"statistics": _group_summaries(stat_rows), "replicas": cfg.replicas, "samples": len(samples)}
    if "r_k" in cfg.statistics:
        alpha = p.dL
        summary["r_k_reference"] = {"alpha": alpha,
                                    "expected": [expected_residual(alpha, k) for k in range(1, cfg.k_max + 1)]}
    reporting.export_summary_json(summary, summary_path, meta)
    return {"files": [str(out), str(conf_path), str(summary_path)], "rows": len(stat_rows)}


# exact

EXACT_KEYS = ["quantity", "l", "n", "value", "closed_form", "residual"]


def cmd_exact(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    p = cfg.model_params()
    meta = reporting.metadata(cfg)
    table = build_partition_table(p, progress_callback=progress_callback)
    rows: List[Dict] = []
    max_residual = 0.0
    for l in range(1, p.L + 1):
        for n in range(p.N + 1):
            value = float(table.logZ[l, n])
            closed = log_Z_closed_form(l, n, p.d)
            residual = abs(value - closed) / max(1.0, abs(closed))
            max_residual = max(max_residual, residual)
            rows.append({"quantity": "log_Z", "l": l, "n": n, "value": value, "closed_form": closed,
                         "residual": residual})

    canon = canonical_marginal(p, table)
    for n, v in enumerate(canon):
        rows.append({"quantity": "canonical_marginal", "l": p.L, "n": n, "value": float(v)})
    if p.N > 0:
        for n, v in enumerate(size_biased_marginal(p, table)):
            rows.append({"quantity": "size_biased_marginal", "l": p.L, "n": n, "value": float(v)})

    summary = {"max_relative_residual": max_residual, "canonical_mass": float(canon.sum()),
               "canonical_mean": float(np.dot(np.arange(p.N + 1), canon)), "density": p.rho}

    if cfg.truncation is not None:
        truncated = build_partition_table(p, truncation=cfg.truncation)
        for l in range(1, p.L + 1):
            for n in range(p.N + 1):
                rows.append({"quantity": "log_Z_truncated", "l": l, "n": n, "value": float(truncated.logZ[l, n])})
        summary["max_at_most_truncation"] = math.exp(truncated.log_Z(p.L, p.N) - table.log_Z(p.L, p.N))

    out = output_path(cfg)
    summary_path = _sibling(cfg, "_summary", "json")
    reporting.export_rows(rows, EXACT_KEYS, out, cfg.format, meta)
    reporting.export_summary_json(summary, summary_path, meta)
    return {"files": [str(out), str(summary_path)], "rows": len(rows)}


# ldp

LDP_KEYS = ["m", "M", "closed_form", "finite_size_estimate", "L", "d", "speed"]


def ldp_params(cfg: ExperimentConfig) -> ModelParams:
    """Default d per regime: 1 (fluid), L^-1/2 (intermediate), L^-gamma (complete)."""
    defaults = {"fluid": 1.0, "intermediate": cfg.L ** -0.5, "complete": cfg.L ** -cfg.gamma}
    return cfg.model_params(default_d=defaults[cfg.regime])


def cmd_ldp(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    if cfg.regime is None:
        raise ConfigError("ldp needs --regime")
    speed = cfg.speed or REGIME_SPEED[cfg.regime]
    if REGIME_SPEED[cfg.regime] != speed:
        raise UnsupportedRegimeError(f"regime '{cfg.regime}' is not defined at speed '{speed}'")
    p = ldp_params(cfg)
    if p.N == 0:
        raise ConfigError("ldp needs N >= 1")
    meta = reporting.metadata(cfg)
    rows = rate_curve(cfg.regime, p, speed=speed, gamma=cfg.gamma, points=cfg.m_points,
                      progress_callback=progress_callback)
    finite = [abs(r["finite_size_estimate"] - r["closed_form"]) for r in rows
              if math.isfinite(r["finite_size_estimate"])]
    summary = {"regime": cfg.regime, "speed": speed, "L": p.L, "N": p.N, "d": p.d,
               "max_abs_difference": max(finite) if finite else None, "points": len(rows)}
    out = output_path(cfg)
    summary_path = _sibling(cfg, "_summary", "json")
    reporting.export_rows(rows, LDP_KEYS, out, cfg.format, meta)
    reporting.export_summary_json(summary, summary_path, meta)
    return {"files": [str(out), str(summary_path)], "rows": len(rows)}


# gemtest

GEM_KEYS = ["source", "alpha", "k", "mean", "se", "count", "expected", "z_score"]


def _gem_rows(source: str, alpha: float, values: np.ndarray) -> List[Dict]:
    """values: (draws, k_max) of R_k."""
    rows = []
    for k in range(1, values.shape[1] + 1):
        s = summarize(values[:, k - 1])
        expected = expected_residual(alpha, k)
        z = (s["mean"] - expected) / s["se"] if s["se"] else 0.0
        rows.append({"source": source, "alpha": alpha, "k": k, **s, "expected": expected, "z_score": z})
    return rows


def cmd_gemtest(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    meta = reporting.metadata(cfg)
    if cfg.source == "gem":
        rng = np.random.default_rng(cfg.seed)
        v, _ = sample_gem_batch(cfg.alpha, cfg.k_max, cfg.draws, rng)
        values = np.clip(1.0 - np.cumsum(v, axis=1), 0.0, 1.0)
        rows = _gem_rows("gem", cfg.alpha, values)
    else:
        p = cfg.model_params()
        if p.N == 0:
            raise ConfigError("gemtest from simulation needs N >= 1")
        samples = run_replicas(p, cfg.kind, cfg.replicas, cfg.seed, n_samples=cfg.samples,
                               burn_in_factor=cfg.burn_in_factor, zrp_rates=cfg.zrp_rates, jobs=cfg.jobs,
                               progress_callback=progress_callback)
        profiles = []
        for replica, sample, conf in samples:
            rng = _resample_rng(cfg, replica, sample)
            for _ in range(cfg.resamples):
                profiles.append(r_k_profile(size_biased_permutation(conf, rng), cfg.k_max))
        values = np.array(profiles).reshape(-1, cfg.k_max)
        rows = _gem_rows("simulation", p.dL, values) if len(values) else []
    out = output_path(cfg)
    summary_path = _sibling(cfg, "_summary", "json")
    reporting.export_rows(rows, GEM_KEYS, out, cfg.format, meta)
    max_z = max((abs(r["z_score"]) for r in rows), default=None)
    reporting.export_summary_json({"max_abs_z_score": max_z, "rows": len(rows)}, summary_path, meta)
    return {"files": [str(out), str(summary_path)], "rows": len(rows)}


# tails

TAIL_KEYS = ["index", "u", "empirical_tail", "exponential_tail", "size_biased_gc_tail"]
TAIL_GRID_POINTS = 101


def cmd_tails(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    p = cfg.model_params()
    if p.N == 0:
        raise ConfigError("tails need N >= 1")
    meta = reporting.metadata(cfg)
    samples = run_replicas(p, cfg.kind, cfg.replicas, cfg.seed, n_samples=cfg.samples,
                           burn_in_factor=cfg.burn_in_factor, zrp_rates=cfg.zrp_rates, jobs=cfg.jobs,
                           progress_callback=progress_callback)
    values: Dict[int, List[float]] = {i: [] for i in cfg.tail_indices if i <= p.L}
    for replica, sample, conf in samples:
        rng = _resample_rng(cfg, replica, sample)
        for _ in range(cfg.resamples):
            scaled = size_biased_permutation(conf, rng).scaled(p.d)
            for i in values:
                values[i].append(float(scaled[i - 1]))

    rho = p.rho
    exp_cdf = exponential_cdf(rho)
    gc_pmf = size_biased_gc_table(rho, p.d)
    gc_cdf = scaled_lattice_cdf(gc_pmf, p.d)
    lattice = p.d * np.arange(gc_pmf.size)

    rows: List[Dict] = []
    summary: Dict[str, Dict] = {}
    for i, vals in values.items():
        if not vals:
            continue
        emp = EmpiricalDistribution(np.asarray(vals))
        u_max = max(vals)
        grid = np.linspace(0.0, u_max, TAIL_GRID_POINTS) if u_max > 0 else np.zeros(1)
        emp_tail, exp_tail, gc_tail = emp.tail(grid), 1.0 - exp_cdf(grid), 1.0 - gc_cdf(grid)
        for j, u in enumerate(grid):
            rows.append({"index": i, "u": float(u), "empirical_tail": float(emp_tail[j]),
                         "exponential_tail": float(exp_tail[j]), "size_biased_gc_tail": float(gc_tail[j])})
        summary[str(i)] = {**summarize(vals), "ks_exponential": emp.ks_distance(exp_cdf),
                           "sup_size_biased_gc": emp.sup_distance(gc_cdf, lattice)}
    out = output_path(cfg)
    summary_path = _sibling(cfg, "_summary", "json")
    reporting.export_rows(rows, TAIL_KEYS, out, cfg.format, meta)
    reporting.export_summary_json({"rho": rho, "d": p.d, "indices": summary}, summary_path, meta)
    return {"files": [str(out), str(summary_path)], "rows": len(rows)}


# entropy

ENTROPY_KEYS = ["L", "N", "d", "phi", "relative_entropy_rate"]


def cmd_entropy(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    meta = reporting.metadata(cfg)
    rho = cfg.rho if cfg.rho is not None else (cfg.N / cfg.L if cfg.N is not None else 1.0)
    rows = []
    L = cfg.L_min
    while L <= cfg.L_max:
        d = cfg.diffusion(L)
        if d is None:
            raise ConfigError("entropy needs --d or --dl")
        p = ModelParams(L=L, N=int(round(rho * L)), d=d)
        phi = fugacity_Phi(p.rho, d)
        rows.append({"L": L, "N": p.N, "d": d, "phi": phi, "relative_entropy_rate": relative_entropy_rate(p, phi)})
        if progress_callback:
            progress_callback(f"entropy L={L}")
        L *= 2
    out = output_path(cfg)
    reporting.export_rows(rows, ENTROPY_KEYS, out, cfg.format, meta)
    return {"files": [str(out)], "rows": len(rows)}


COMMANDS = {
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "ldp": cmd_ldp,
    "gemtest": cmd_gemtest,
    "tails": cmd_tails,
    "entropy": cmd_entropy,
}


def run_command(cfg: ExperimentConfig, progress_callback: Progress = None) -> Dict:
    """
    Run one command.

    Returns:
        dict: success, message, files, exit_code (0 ok, 2 config, 3 resource) and error on failure
    """
    start_time = time.time()
    try:
        if progress_callback:
            progress_callback(f"running {cfg.command}...")
        result = COMMANDS[cfg.command](cfg, progress_callback)
        result.update({"success": True, "exit_code": 0, "message": f"{cfg.command} finished",
                       "processing_time": time.time() - start_time})
        return result
    except Exception as e:
        logging.error(f"{cfg.command} failed: {e}")
        return {
            "success": False,
            "exit_code": exit_code_for(e),
            "error": str(e),
            "error_type": type(e).__name__,
            "message": f"{cfg.command} failed: {e}",
            "processing_time": time.time() - start_time,
        }
