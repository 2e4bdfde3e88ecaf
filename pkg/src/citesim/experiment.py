"""Seeded replicated sweeps over two-country citation worlds.

A configuration fixes the two country location parameters, their world
shares, the world size and the replicate count.  Each replicate draws a
full world (country 1, country 2, rest of world at the solved location),
computes the five indicators for both countries, and the per-replicate
statistics are folded into empirical intervals, formula intervals
evaluated at the replicate-mean statistics, similarity scores and
formula-vs-model discrepancies.

Determinism contract: every replicate's random stream is derived by
hashing (master_seed, config_index, replicate_index, role), so sweep
output is byte-identical for any execution order or process count.
"""

from __future__ import annotations

import hashlib
import logging
import math
import multiprocessing
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .distribution import MixtureSpec, rest_of_world_location
from .indicators import TOP_SHARES, survival_counts
from .intervals import (
    Interval,
    SimilarityInput,
    empirical_interval,
    limit_discrepancy,
    similarity,
)

__all__ = [
    "INDICATOR_NAMES",
    "FORMULA_INDICATOR_NAMES",
    "ParameterSet",
    "ReplicateStats",
    "FormulaComparison",
    "IndicatorSummary",
    "ConfigSummary",
    "Table1Cell",
    "Table2Row",
    "SweepReport",
    "derive_seed",
    "generate_grid",
    "total_draws",
    "replicate_world",
    "replicate_statistics",
    "run_config",
    "run_sweep",
    "summarize",
]

log = logging.getLogger(__name__)

INDICATOR_NAMES = ("arith", "geo", "top1", "top10", "top50")
# Indicators with a closed-form interval to compare against the modelled one
# (no reliable formula exists for the arithmetic mean of this distribution).
FORMULA_INDICATOR_NAMES = ("geo", "top1", "top10", "top50")

DEFAULT_MU_VALUES = tuple(round(0.9 + 0.02 * i, 10) for i in range(11))
DEFAULT_P_VALUES = (0.05, 0.1, 0.15, 0.2, 0.25)
DEFAULT_N_VALUES = (500, 1000, 5000, 10000, 50000)


@dataclass(frozen=True)
class ParameterSet:
    """One sweep configuration.

    `diagnostic=True` permits mu1 == mu2 (a no-difference sanity case whose
    similarity is undefined and excluded from summaries).
    """

    mu1: float
    mu2: float
    p1: float
    p2: float
    n_world: int
    sigma: float = 1.0
    mu_overall: float = 1.0
    replicates: int = 1000
    config_index: int = 0
    diagnostic: bool = False

    def __post_init__(self) -> None:
        if self.diagnostic:
            if self.mu1 > self.mu2:
                raise ValueError("mu1 must not exceed mu2")
        elif not self.mu1 < self.mu2:
            raise ValueError(
                "mu1 must be strictly below mu2; equal means are only valid "
                "with diagnostic=True"
            )
        if self.n_world < 1:
            raise ValueError(f"n_world must be positive, got {self.n_world}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be positive, got {self.replicates}")
        self.mixture()  # validates shares and sigma

    def mixture(self) -> MixtureSpec:
        return MixtureSpec(self.mu_overall, self.sigma, self.mu1, self.mu2, self.p1, self.p2)

    def country_sizes(self) -> tuple[int, int, int]:
        """Article counts (country1, country2, rest); shares are rounded
        half-up, which never engages on the default grid."""
        n1 = int(math.floor(self.p1 * self.n_world + 0.5))
        n2 = int(math.floor(self.p2 * self.n_world + 0.5))
        return n1, n2, self.n_world - n1 - n2


@dataclass(frozen=True)
class ReplicateStats:
    """Per-replicate statistics for one configuration.

    arith/log_mean/log_sd have shape (2, R) indexed by country;
    top has shape (3, 2, R) indexed by (share in TOP_SHARES, country).
    log_mean and log_sd describe ln(1 + c); the offset geometric mean of a
    replicate is expm1(log_mean).
    """

    n1: int
    n2: int
    arith: np.ndarray
    log_mean: np.ndarray
    log_sd: np.ndarray
    top: np.ndarray


@dataclass(frozen=True)
class FormulaComparison:
    """Formula interval versus modelled interval, on the comparison scale.

    The comparison scale is ln(1 + c) for the geometric mean and the raw
    proportion for the top-X shares.  Discrepancies are fractions of the
    modelled interval's width (NaN when that interval has zero width).
    """

    model: Interval
    formula: Interval
    lower_discrepancy: float
    upper_discrepancy: float


@dataclass(frozen=True)
class IndicatorSummary:
    """Aggregate of one indicator for one country across all replicates."""

    mean: float
    empirical: Interval
    comparison: FormulaComparison | None = None


@dataclass(frozen=True)
class ConfigSummary:
    """Everything measured for one configuration."""

    params: ParameterSet
    country1: dict[str, IndicatorSummary]
    country2: dict[str, IndicatorSummary]
    similarities: dict[str, float]

    def to_dict(self) -> dict:
        ps = self.params
        return {
            "config_index": ps.config_index,
            "mu1": ps.mu1,
            "mu2": ps.mu2,
            "p1": ps.p1,
            "p2": ps.p2,
            "n_world": ps.n_world,
            "sigma": ps.sigma,
            "mu_overall": ps.mu_overall,
            "replicates": ps.replicates,
            "diagnostic": ps.diagnostic,
            "similarity": {k: _nan_to_none(v) for k, v in self.similarities.items()},
            "country1": {k: _summary_dict(v) for k, v in self.country1.items()},
            "country2": {k: _summary_dict(v) for k, v in self.country2.items()},
        }


def _nan_to_none(value: float):
    return None if value != value else value


def _summary_dict(summary: IndicatorSummary) -> dict:
    out = {
        "mean": summary.mean,
        "empirical": [summary.empirical.lower, summary.empirical.upper],
    }
    cmp = summary.comparison
    if cmp is None:
        out["model"] = None
        out["formula"] = None
        out["discrepancy"] = None
    else:
        out["model"] = [cmp.model.lower, cmp.model.upper]
        out["formula"] = [cmp.formula.lower, cmp.formula.upper]
        out["discrepancy"] = [
            _nan_to_none(cmp.lower_discrepancy),
            _nan_to_none(cmp.upper_discrepancy),
        ]
    return out


def derive_seed(
    master_seed: int,
    config_index: int,
    replicate_index: int,
    stream_role: str = "world",
) -> int:
    """Collision-resistant 128-bit seed for one random stream.

    Pure function of its arguments, so identical streams are produced
    regardless of execution order, process count or platform.
    """
    payload = f"{master_seed}:{config_index}:{replicate_index}:{stream_role}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:16], "little")


def generate_grid(
    mu_values=None,
    p_values=None,
    n_values=None,
    sigma: float = 1.0,
    mu_overall: float = 1.0,
    replicates: int = 1000,
    include_equal_means: bool = False,
) -> list[ParameterSet]:
    """Ordered list of configurations: (mu1 < mu2) pairs x (p1, p2) x N.

    Ordering is lexicographic in (mu1, mu2, p1, p2, N).  The default grids
    produce exactly 6875 configurations.  Configurations whose rest-of-world
    location is infeasible are skipped with a warning rather than aborting.
    `include_equal_means` adds mu1 == mu2 diagnostic cases.
    """
    mu_values = _checked_grid("mu_values", mu_values, DEFAULT_MU_VALUES)
    p_values = _checked_grid("p_values", p_values, DEFAULT_P_VALUES)
    n_values = _checked_grid("n_values", n_values, DEFAULT_N_VALUES)

    sets: list[ParameterSet] = []
    index = 0
    for mu1 in mu_values:
        for mu2 in mu_values:
            if mu2 < mu1 or (mu2 == mu1 and not include_equal_means):
                continue
            for p1 in p_values:
                for p2 in p_values:
                    spec = MixtureSpec(mu_overall, sigma, mu1, mu2, p1, p2)
                    try:
                        rest_of_world_location(spec)
                    except ValueError as exc:
                        log.warning(
                            "skipping infeasible configuration mu1=%g mu2=%g p1=%g p2=%g: %s",
                            mu1, mu2, p1, p2, exc,
                        )
                        continue
                    for n_world in n_values:
                        sets.append(
                            ParameterSet(
                                mu1=mu1,
                                mu2=mu2,
                                p1=p1,
                                p2=p2,
                                n_world=int(n_world),
                                sigma=sigma,
                                mu_overall=mu_overall,
                                replicates=replicates,
                                config_index=index,
                                diagnostic=mu1 == mu2,
                            )
                        )
                        index += 1
    return sets


def _checked_grid(name, values, default):
    if values is None:
        return default
    values = tuple(values)
    if not values:
        raise ValueError(f"{name} must not be empty")
    if any(not math.isfinite(v) for v in values):
        raise ValueError(f"{name} must be finite")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly increasing")
    return values


def total_draws(param_sets) -> int:
    """Total citation counts a sweep will generate (replicates x world size)."""
    return sum(ps.replicates * ps.n_world for ps in param_sets)


def _sample_world(mu_vec: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Citation counts for one world, one article per mu_vec entry.

    Same scheme as distribution.sample (reject lognormal variates below
    0.5, round to nearest integer), batched across the whole world with a
    per-article location vector, then shifted back to citation counts.
    """
    x = np.exp(mu_vec + sigma * rng.standard_normal(mu_vec.size))
    bad = np.nonzero(x < 0.5)[0]
    while bad.size:
        x[bad] = np.exp(mu_vec[bad] + sigma * rng.standard_normal(bad.size))
        bad = bad[x[bad] < 0.5]
    return np.floor(x + 0.5).astype(np.int64) - 1


def _world_locations(ps: ParameterSet) -> tuple[np.ndarray, int, int]:
    n1, n2, n0 = ps.country_sizes()
    mu0 = rest_of_world_location(ps.mixture())
    mu_vec = np.empty(ps.n_world)
    mu_vec[:n1] = ps.mu1
    mu_vec[n1 : n1 + n2] = ps.mu2
    mu_vec[n1 + n2 :] = mu0
    return mu_vec, n1, n2


def replicate_world(ps: ParameterSet, master_seed: int, replicate_index: int) -> np.ndarray:
    """Reconstruct the citation counts of one replicate's world.

    Articles [0, n1) belong to country 1, [n1, n1+n2) to country 2 and the
    remainder to the rest of the world.  Useful for inspecting the exact
    sample behind any reported statistic.
    """
    mu_vec, _, _ = _world_locations(ps)
    rng = np.random.default_rng(derive_seed(master_seed, ps.config_index, replicate_index))
    return _sample_world(mu_vec, ps.sigma, rng)


def replicate_statistics(ps: ParameterSet, master_seed: int) -> ReplicateStats:
    """Per-replicate indicator statistics for both countries.

    For each replicate: per-country arithmetic mean, mean and sample
    standard deviation of ln(1 + c), and the three top-X shares computed
    against the full world sample with proportional tie credit.
    """
    mu_vec, n1, n2 = _world_locations(ps)
    n_world = ps.n_world
    reps = ps.replicates
    sizes = (n1, n2)
    if min(sizes) < 2:
        raise ValueError("each country needs at least two articles per replicate")

    arith = np.empty((2, reps))
    log_mean = np.empty((2, reps))
    log_sd = np.empty((2, reps))
    top = np.empty((3, 2, reps))
    q_values = [share / 100.0 * n_world for share in TOP_SHARES]

    for r in range(reps):
        rng = np.random.default_rng(derive_seed(master_seed, ps.config_index, r))
        counts = _sample_world(mu_vec, ps.sigma, rng)
        c1 = counts[:n1]
        c2 = counts[n1 : n1 + n2]
        surv_w = survival_counts(counts)
        surv_c = (survival_counts(c1), survival_counts(c2))
        neg = -surv_w
        for j, q in enumerate(q_values):
            t = int(np.searchsorted(neg, -q, side="right")) - 1
            above_w = int(surv_w[t + 1]) if t + 1 < surv_w.size else 0
            frac = (q - above_w) / (int(surv_w[t]) - above_w)
            for i in (0, 1):
                surv = surv_c[i]
                above = int(surv[t + 1]) if t + 1 < surv.size else 0
                at = (int(surv[t]) if t < surv.size else 0) - above
                top[j, i, r] = (above + frac * at) / sizes[i]
        for i, cc in enumerate((c1, c2)):
            arith[i, r] = cc.mean()
            y = np.log1p(cc)
            m = float(y.mean())
            log_mean[i, r] = m
            # two-pass-free sample sd; magnitudes here keep it well conditioned
            ss = float(y @ y) - cc.size * m * m
            log_sd[i, r] = math.sqrt(max(ss, 0.0) / (cc.size - 1))

    return ReplicateStats(n1=n1, n2=n2, arith=arith, log_mean=log_mean, log_sd=log_sd, top=top)


def _compare(model: Interval, formula: Interval) -> FormulaComparison:
    if model.width > 0.0:
        lower, upper = limit_discrepancy(model, formula)
    else:
        # Degenerate modelled interval (statistic identical in all kept
        # replicates); the ratio is undefined, recorded as NaN and skipped
        # by summarize().
        lower = upper = math.nan
    return FormulaComparison(model, formula, lower, upper)


def run_config(ps: ParameterSet, master_seed: int, level: float = 0.95) -> ConfigSummary:
    """Simulate one configuration and aggregate its replicate statistics."""
    rs = replicate_statistics(ps, master_seed)
    z = float(sps.norm.ppf(1.0 - (1.0 - level) / 2.0))
    countries: list[dict[str, IndicatorSummary]] = []
    for i, n_c in enumerate((rs.n1, rs.n2)):
        t_q = float(sps.t.ppf(1.0 - (1.0 - level) / 2.0, n_c - 1))
        root_n = math.sqrt(n_c)
        summaries: dict[str, IndicatorSummary] = {}

        arith_stats = rs.arith[i]
        summaries["arith"] = IndicatorSummary(
            mean=float(arith_stats.mean()),
            empirical=empirical_interval(arith_stats, level),
        )

        # Geometric mean: similarity runs on the offset scale, the formula
        # comparison on the ln(1+c) scale.  expm1 is monotone, so the offset
        # empirical interval is the transform of the log-scale one.
        log_model = empirical_interval(rs.log_mean[i], level)
        centre = float(np.mean(rs.log_mean[i]))
        half = t_q * float(np.mean(rs.log_sd[i])) / root_n
        log_formula = Interval(centre - half, centre + half, kind="formula")
        geo_stats = np.expm1(rs.log_mean[i])
        summaries["geo"] = IndicatorSummary(
            mean=float(geo_stats.mean()),
            empirical=Interval(
                math.expm1(log_model.lower), math.expm1(log_model.upper), kind="empirical"
            ),
            comparison=_compare(log_model, log_formula),
        )

        for j, name in enumerate(("top1", "top10", "top50")):
            p_stats = rs.top[j, i]
            p_mean = float(p_stats.mean())
            half_p = z * math.sqrt(p_mean * (1.0 - p_mean) / n_c)
            formula = Interval(p_mean - half_p, p_mean + half_p, kind="formula")
            model = empirical_interval(p_stats, level)
            summaries[name] = IndicatorSummary(
                mean=p_mean,
                empirical=model,
                comparison=_compare(model, formula),
            )
        countries.append(summaries)

    sims: dict[str, float] = {}
    for name in INDICATOR_NAMES:
        if ps.mu1 == ps.mu2:
            # No population difference to test for; the score is undefined.
            sims[name] = math.nan
            continue
        a, b = countries[0][name], countries[1][name]
        if a.mean <= b.mean:
            pair = SimilarityInput(a.mean, b.mean, a.empirical, b.empirical)
        else:
            pair = SimilarityInput(b.mean, a.mean, b.empirical, a.empirical)
        sims[name] = similarity(pair)

    return ConfigSummary(ps, countries[0], countries[1], sims)


def _run_config_task(args) -> tuple[int, ConfigSummary]:
    ps, master_seed, level = args
    return ps.config_index, run_config(ps, master_seed, level)


def run_sweep(
    param_sets,
    master_seed: int,
    processes: int = 1,
    level: float = 0.95,
) -> list[ConfigSummary]:
    """Run every configuration and return summaries in input order.

    processes <= 0 selects the CPU count.  Results are byte-identical for
    any process count: each configuration is an isolated work unit seeded
    from (master_seed, config_index) and the fold order is fixed.
    """
    param_sets = list(param_sets)
    if processes <= 0:
        processes = os.cpu_count() or 1
    processes = min(processes, max(len(param_sets), 1))
    step = max(len(param_sets) // 20, 1)

    if processes == 1:
        results = []
        for done, ps in enumerate(param_sets, start=1):
            results.append(run_config(ps, master_seed, level))
            if done % step == 0 or done == len(param_sets):
                log.info("completed %d/%d configurations", done, len(param_sets))
        return results

    tasks = [(ps, master_seed, level) for ps in param_sets]
    chunksize = max(len(tasks) // (processes * 8), 1)
    collected: dict[int, ConfigSummary] = {}
    with multiprocessing.get_context().Pool(processes) as pool:
        for done, (index, summary) in enumerate(
            pool.imap_unordered(_run_config_task, tasks, chunksize=chunksize), start=1
        ):
            collected[index] = summary
            if done % step == 0 or done == len(tasks):
                log.info("completed %d/%d configurations", done, len(tasks))
    return [collected[ps.config_index] for ps in param_sets]


@dataclass(frozen=True)
class Table1Cell:
    """Configurations whose similarity score fell below 1, out of total."""

    count: int
    total: int

    @property
    def percent(self) -> int:
        if self.total == 0:
            return 0
        return int(math.floor(100.0 * self.count / self.total + 0.5))


@dataclass(frozen=True)
class Table2Row:
    """Distribution of formula-vs-model discrepancies over configurations."""

    minimum: float
    maximum: float
    mean: float
    sd: float
    n: int


@dataclass(frozen=True)
class SweepReport:
    """Aggregated sweep output.

    table1 maps (n_world, indicator) to a similarity-below-1 count;
    table2 maps (indicator, side, n_world) to discrepancy statistics, where
    the per-configuration value averages the two countries.
    """

    table1: dict[tuple[int, str], Table1Cell]
    table2: dict[tuple[str, str, int], Table2Row]
    records: list[ConfigSummary] = field(default_factory=list)


def summarize(records) -> SweepReport:
    """Fold per-configuration summaries into the two report tables.

    Diagnostic (equal-means) configurations are excluded from both tables;
    NaN discrepancies (degenerate modelled intervals) are skipped.
    """
    records = list(records)
    counted = [r for r in records if not r.params.diagnostic]
    n_values = sorted({r.params.n_world for r in counted})

    table1: dict[tuple[int, str], Table1Cell] = {}
    for n_world in n_values:
        rows = [r for r in counted if r.params.n_world == n_world]
        for name in INDICATOR_NAMES:
            hits = sum(1 for r in rows if r.similarities[name] < 1.0)
            table1[(n_world, name)] = Table1Cell(hits, len(rows))

    table2: dict[tuple[str, str, int], Table2Row] = {}
    for n_world in n_values:
        rows = [r for r in counted if r.params.n_world == n_world]
        for name in FORMULA_INDICATOR_NAMES:
            for side in ("lower", "upper"):
                values = []
                for r in rows:
                    pair = [
                        getattr(country[name].comparison, f"{side}_discrepancy")
                        for country in (r.country1, r.country2)
                    ]
                    pair = [v for v in pair if v == v]
                    if pair:
                        values.append(sum(pair) / len(pair))
                if not values:
                    continue
                arr = np.asarray(values)
                table2[(name, side, n_world)] = Table2Row(
                    minimum=float(arr.min()),
                    maximum=float(arr.max()),
                    mean=float(arr.mean()),
                    sd=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                    n=arr.size,
                )
    return SweepReport(table1=table1, table2=table2, records=records)
