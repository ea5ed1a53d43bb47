"""Monte Carlo benchmark runners and their report format.

Three runners, one report shape:

* ``run_concentration``: per (N, trial), draw samples and measure
  ||T - T_hat||_HS; summarize per-N medians, the fitted log-log slope
  (theory: -1/2) and the fraction of trials inside the bound
  2 sqrt(2) kappa^2 sqrt(t) / sqrt(N) for each requested t.
* ``run_approximation_decay``: deterministic truncation-error table
  ||f - T g_tau(T) f||_H against tau on an exact reference; the fitted
  slope should not exceed -min(alpha, qualification) + 0.1.
* ``run_end_to_end``: per (N, trial), reconstruct f = T^alpha h from the
  empirical frame at tau = ceil(N^(1/(2 beta + 2))) and record the
  reproducing-space residual; the fitted slope of per-N medians should
  not exceed -beta/(2 beta + 2) + 0.1.

Reports serialize to a CSV of rows (n, trial, seed, error) plus a JSON
summary (medians, slopes, coverage, resolved config echo). Serialization
is deterministic: floats are written in shortest round-trip form, keys
are sorted, and the only non-reproducible field is the wall-clock timing,
which comparisons must drop. Trials are independent and may run on a
thread pool; results are reduced in key order, so the thread count never
changes the artifact.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .filters import FilterFamily, make_family
from .frame import WaveletFrame, default_tau
from .operator import (derive_seed, draw_samples, empirical_eigensystem,
                       hs_distance, kernel_matrix)
from .reference import CircleReference, ReferenceOperator
from .signals import continuous_residual, make_sobolev_signal, reconstruction_error

SCHEMA_VERSION = 1
CONCENTRATION_CONSTANT = 2.0 * math.sqrt(2.0)


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared}


def fit_rate(x_values, errors) -> RateFit:
    """Ordinary least squares on (log x, log error).

    Refuses nonpositive errors and degenerate designs (fewer than two
    distinct x values).
    """
    x = np.asarray(x_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    if x.size != e.size or x.size < 2:
        raise ValueError("need at least two (x, error) pairs")
    if np.unique(x).size < 2:
        raise ValueError("rate fit needs at least two distinct x values")
    if np.any(e <= 0):
        raise ValueError("rate fit needs positive errors")
    lx = np.log(x)
    le = np.log(e)
    slope, intercept = np.polyfit(lx, le, 1)
    pred = slope * lx + intercept
    ss_res = float(((le - pred) ** 2).sum())
    ss_tot = float(((le - le.mean()) ** 2).sum())
    r_sq = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=r_sq)


@dataclass
class ExperimentReport:
    """Rows plus summary, with deterministic serialization."""

    kind: str
    rows: list  # (n, trial, seed, error)
    summary: dict
    x_name: str = "n"

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("n,trial,seed,error\n")
            for n, trial, seed, error in self.rows:
                fh.write(f"{n},{trial},{seed},{float(error)!r}\n")

    def write_json(self, path) -> None:
        doc = {"schema_version": SCHEMA_VERSION, "kind": self.kind,
               "x_name": self.x_name, "summary": self.summary}
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")


def _run_jobs(jobs, worker, threads: int):
    """Evaluate worker over jobs, optionally on a thread pool; the result
    order is the job order either way."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, jobs))
    return [worker(job) for job in jobs]


def _median_table(rows) -> tuple[list[int], list[float]]:
    by_n: dict[int, list[float]] = {}
    for n, _trial, _seed, err in rows:
        by_n.setdefault(int(n), []).append(float(err))
    ns = sorted(by_n)
    return ns, [float(np.median(by_n[n])) for n in ns]


def concentration_bound(kappa_sq: float, t: float, n: int) -> float:
    """High-probability bound 2 sqrt(2) kappa^2 sqrt(t) / sqrt(N), valid
    with probability at least 1 - 2 e^-t."""
    return CONCENTRATION_CONSTANT * kappa_sq * math.sqrt(t) / math.sqrt(n)


def run_concentration(kernel, ref: ReferenceOperator, n_list, trials: int,
                      seed: int, t_values=(1.0, 2.0, 4.0), threads: int = 1,
                      config_echo: dict | None = None) -> ExperimentReport:
    """Measure ||T - T_hat||_HS across sample sizes and trials."""
    _check_grid(n_list, trials)
    domain = _kernel_domain(kernel)
    start = time.perf_counter()
    fast = isinstance(ref, CircleReference)

    def worker(job):
        n, trial = job
        s = derive_seed(seed, 0xC0, n, trial)
        samples = draw_samples(domain, n, s)
        if fast:
            err = ref.hs_distance_exact(samples.points)
        else:
            err = hs_distance(ref, kernel_matrix(kernel, samples), samples)
        return (n, trial, s, err)

    jobs = [(int(n), t) for n in n_list for t in range(trials)]
    rows = _run_jobs(jobs, worker, threads)
    ns, medians = _median_table(rows)
    fit = fit_rate(ns, medians)
    coverage = {}
    for t in t_values:
        inside = sum(1 for n, _tr, _s, err in rows
                     if err <= concentration_bound(kernel.kappa_sq, t, n))
        coverage[f"{float(t):g}"] = inside / len(rows)
    summary = {
        "n_values": ns, "medians": medians, "trials": trials,
        "fit": fit.as_dict(), "theory_slope": -0.5,
        "coverage": coverage,
        "coverage_floor": {f"{float(t):g}": 1.0 - 2.0 * math.exp(-float(t))
                           for t in t_values},
        "bound_constant": CONCENTRATION_CONSTANT * kernel.kappa_sq,
        "kappa_sq": kernel.kappa_sq, "seed": seed, "rng": "philox",
        "quadrature_error": ref.quadrature_error,
        "config": config_echo or {},
        "wall_clock_s": time.perf_counter() - start,
    }
    return ExperimentReport(kind="concentration", rows=rows, summary=summary)


def run_approximation_decay(ref: ReferenceOperator, family: FilterFamily,
                            alpha: float, tau_list, signal_seed: int,
                            budget: int | None = None,
                            config_echo: dict | None = None) -> ExperimentReport:
    """Deterministic truncation-error decay on the exact reference."""
    if not ref.exact:
        raise ValueError("approximation decay needs an exact reference")
    taus = [int(t) for t in tau_list]
    if len(taus) < 2 or sorted(set(taus)) != taus:
        raise ValueError("tau_list must be strictly increasing, length >= 2")
    start = time.perf_counter()
    budget = budget if budget is not None else ref.n_modes
    spec = make_sobolev_signal(ref, alpha, budget, signal_seed)
    rows = [(tau, 0, signal_seed, continuous_residual(spec, ref, family, tau))
            for tau in taus]
    fit = fit_rate([r[0] for r in rows], [r[3] for r in rows])
    beta = family.beta(alpha)
    summary = {
        "tau_values": taus, "errors": [r[3] for r in rows],
        "alpha": alpha, "beta": beta, "budget": budget,
        "fit": fit.as_dict(), "theory_slope": -beta,
        "filter": family.descriptor(), "kappa_sq": family.kappa_sq,
        "seed": signal_seed, "rng": "philox",
        "config": config_echo or {},
        "wall_clock_s": time.perf_counter() - start,
    }
    return ExperimentReport(kind="approximation", rows=rows, summary=summary,
                            x_name="tau")


def run_end_to_end(kernel, ref: ReferenceOperator, method: str, alpha: float,
                   n_list, trials: int, seed: int, budget: int | None = None,
                   tau_override: int | None = None, gamma: float | None = None,
                   m: int | None = None, threads: int = 1,
                   config_echo: dict | None = None) -> ExperimentReport:
    """Full pipeline: sample, decompose, reconstruct, measure the residual."""
    _check_grid(n_list, trials)
    if not ref.exact:
        raise ValueError("end-to-end residuals need an exact reference")
    domain = _kernel_domain(kernel)
    family = make_family(method, kernel.kappa_sq, m=m, gamma=gamma)
    start = time.perf_counter()
    budget = budget if budget is not None else ref.n_modes
    spec = make_sobolev_signal(ref, alpha, budget, derive_seed(seed, 0x51))

    def worker(job):
        n, trial = job
        s = derive_seed(seed, 0xE2E, n, trial)
        samples = draw_samples(domain, n, s)
        eig = empirical_eigensystem(kernel, samples)
        tau = tau_override if tau_override is not None else default_tau(n, alpha, family)
        frame = WaveletFrame(eig, samples, kernel, family, tau_max=tau)
        return (n, trial, s, reconstruction_error(spec, ref, frame, tau))

    jobs = [(int(n), t) for n in n_list for t in range(trials)]
    rows = _run_jobs(jobs, worker, threads)
    ns, medians = _median_table(rows)
    fit = fit_rate(ns, medians)
    beta = family.beta(alpha)
    theory = -beta / (2.0 * beta + 2.0)
    summary = {
        "n_values": ns, "medians": medians, "trials": trials,
        "taus": {str(n): (tau_override if tau_override is not None
                          else default_tau(n, alpha, family)) for n in ns},
        "alpha": alpha, "beta": beta, "budget": budget,
        "fit": fit.as_dict(), "theory_slope": theory,
        "filter": family.descriptor(), "kappa_sq": kernel.kappa_sq,
        "seed": seed, "rng": "philox",
        "config": config_echo or {},
        "wall_clock_s": time.perf_counter() - start,
    }
    return ExperimentReport(kind="rate", rows=rows, summary=summary)


def _check_grid(n_list, trials: int) -> None:
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns):
        raise ValueError("n_list must hold positive sample counts")
    if len(set(ns)) != len(ns):
        raise ValueError("n_list must not repeat values")
    if len(ns) < 2:
        raise ValueError("need at least two sample counts to fit a rate")
    if trials < 1:
        raise ValueError("need at least one trial")


def _kernel_domain(kernel):
    domain = getattr(kernel, "domain", None)
    if domain is None:
        from .kernels import Circle

        return Circle()
    return domain
