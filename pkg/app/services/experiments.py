"""
Monte Carlo experiment drivers.

Every experiment is a pair of pure functions: `simulate_trial(cfg, trial)`
returns the sample rows of one trial and `summarize(cfg, frame)` turns the
rows of all trials into summary statistics and acceptance checks. Trials own
their random streams, so the report does not depend on how trials are
scheduled over worker processes.
"""
import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from app.core.constants import (
    CENSORING_WARNING_RATE,
    CSV_FLOAT_FORMAT,
    DEFAULT_THRESHOLDS,
    SCHEMA_VERSION,
)
from app.core.exceptions import ConfigError
from app.schemas import CheckResult, ExperimentConfig, ExperimentReport
from app.services.bumping import (
    RouteTrace,
    StopCondition,
    bumping_tree,
    hitting_times,
    projective_route,
    simulate_route,
    tree_non_crossing,
)
from app.services.plancherel import (
    SeededStream,
    augmented_growth,
    extended_growth,
    plancherel_growth,
)
from app.services.stats import (
    at_least,
    at_most,
    binomial,
    censored_ks_statistic,
    censored_proportion,
    empirical_measure,
    erlang,
    exponential,
    frechet_shape1,
    poisson,
    proportion_standard_error,
    tv_distance,
)
from app.services.tableau_core import recording_tableau

logger = logging.getLogger(__name__)

Rows = list[dict[str, Any]]
Summary = tuple[dict[str, Any], list[CheckResult]]


@dataclass(frozen=True)
class Experiment:
    """
    Registry entry of an experiment.

    Attributes:
        name (str): Identifier used by the CLI and the API.
        columns (tuple[str, ...]): Columns of the sample rows, in CSV order.
        simulate_trial (Callable): (cfg, trial index) → sample rows of the trial.
        summarize (Callable): (cfg, rows frame) → (summary, checks).
        exploratory (bool): Exploratory experiments never produce a verdict.
        defaults (Callable): cfg → field updates applied before the run.
        validate (Callable | None): Extra validation of the resolved config.
        description (str): One line shown in the catalogue.
    """
    name: str
    columns: tuple[str, ...]
    simulate_trial: Callable[[ExperimentConfig, int], Rows]
    summarize: Callable[[ExperimentConfig, pd.DataFrame], Summary]
    exploratory: bool = False
    defaults: Callable[[ExperimentConfig], dict[str, Any]] = field(default=lambda cfg: {})
    validate: Optional[Callable[[ExperimentConfig], None]] = None
    description: str = ""


def _thresholds(cfg: ExperimentConfig) -> dict[str, float]:
    return {**DEFAULT_THRESHOLDS, **cfg.thresholds}


def _check(name: str, value: Optional[float], threshold: float) -> CheckResult:
    passed = value is not None and math.isfinite(value) and value <= threshold
    return CheckResult(name=name, value=value, threshold=threshold, passed=passed)


def _ks_or_none(values: list[float], censored: list[bool], cdf: Callable | str,
                bound: str = "upper") -> Optional[float]:
    """KS distance with censored trials kept in the sample as one-sided bounds."""
    return censored_ks_statistic(values, censored, cdf, bound) if values else None


def _censored_rate(frame: pd.DataFrame, column: str = "censored") -> float:
    return float(frame[column].astype(bool).mean()) if len(frame) else 0.0


def _require_positive_grid(cfg: ExperimentConfig) -> None:
    if not cfg.grid or cfg.grid[0] <= 0:
        raise ConfigError(f"{cfg.experiment} needs a non-empty grid of positive values")


# --- Hitting times of the augmented process ---

def _hitting_trial(cfg: ExperimentConfig, trial: int, stop: StopCondition, x_max: int):
    trace, _ = augmented_growth(cfg.m, cfg.master_seed, stop, trial_index=trial)
    return hitting_times(trace, x_max)


def _first_column_trial(cfg: ExperimentConfig, trial: int, stop: StopCondition) -> Rows:
    hits = _hitting_trial(cfg, trial, stop, 0)
    return [{
        "trial": trial,
        "m": cfg.m,
        "seed": cfg.master_seed,
        "Y0": hits.Y[0],
        "T0": hits.T[0],
        "censored": hits.censored[0],
    }]


def simulate_frechet_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    return _first_column_trial(cfg, trial, StopCondition(t_max=cfg.t_max, target_column=0))


def summarize_frechet(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """
    Law of Y_0 / 2m against the Fréchet cdf e^{−1/u} and of e^{−2m/Y_0} against U(0,1).
    """
    thresholds = _thresholds(cfg)
    m = cfg.m
    summary: dict[str, Any] = {"trials": len(frame), "censored_rate": _censored_rate(frame)}
    if m == 0:
        summary["degenerate"] = True
        summary["Y0_max"] = int(frame["Y0"].max())
        return summary, []

    # 1. Эмпирическая функция распределения Y_0/2m с учётом цензурирования
    target_law = frechet_shape1()
    cdf_rows = []
    for u in cfg.grid:
        estimate = censored_proportion(
            at_most(y, c, 2 * m * u) for y, c in zip(frame["Y0"], frame["censored"].astype(bool))
        )
        target = float(target_law.cdf(u))
        cdf_rows.append({
            "u": u,
            **estimate.to_dict(),
            "target": target,
            "abs_error": abs(estimate.estimate - target),
            "standard_error": proportion_standard_error(estimate.estimate, estimate.total),
        })
    summary["cdf"] = cdf_rows

    # 2. e^{−2m/Y_0} должна быть равномерно распределена (цензурированное Y_0 даёт нижнюю границу)
    uniform_values = [math.exp(-2 * m / y) if y > 0 else 0.0 for y in frame["Y0"]]
    summary["uniform_ks"] = _ks_or_none(
        uniform_values, frame["censored"].astype(bool).tolist(), "uniform", bound="lower"
    )

    checks = [
        _check("frechet_cdf_abs", max((r["abs_error"] for r in cdf_rows), default=None),
               thresholds["frechet_cdf_abs"]),
        _check("uniform_ks", summary["uniform_ks"], thresholds["uniform_ks"]),
    ]
    return summary, checks


def simulate_points_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    hits = _hitting_trial(cfg, trial, StopCondition(t_max=cfg.t_max, target_column=0), cfg.x_max)
    return [
        {"trial": trial, "m": cfg.m, "x": x, "Y": hits.Y[x], "T": hits.T[x], "censored": hits.censored[x]}
        for x in range(cfg.x_max + 1)
    ]


def _known_column(frame: pd.DataFrame, x: int) -> pd.DataFrame:
    column = frame[frame["x"] == x]
    return column[~column["censored"].astype(bool)]


def _scaled_points(frame: pd.DataFrame, x: int, scale: Callable[[float], float], value: str) -> tuple[list, list]:
    """
    Points scale(v) of column x with their censored flags; a censored lower bound on v
    becomes an upper bound on the decreasing scale(v). Zero values have no point.
    """
    column = frame[(frame["x"] == x) & (frame[value] > 0)]
    points = [scale(v) for v in column[value]]
    return points, column["censored"].astype(bool).tolist()


def summarize_poisson_points(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """
    Points 2m/Y_0 < 2m/Y_1 < … against the partial sums of Exp(1): Erlang marginals,
    the survival of the first point at 1 and the correlation of the first two spacings.
    """
    thresholds = _thresholds(cfg)
    m = cfg.m
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique()), "censored_rate": _censored_rate(frame)}
    if m == 0:
        summary["degenerate"] = True
        return summary, []

    columns = []
    for x in range(cfg.x_max + 1):
        known = _known_column(frame, x)
        points, flags = _scaled_points(frame, x, lambda y: 2 * m / y, "Y")
        known_points = [p for p, c in zip(points, flags) if not c]
        columns.append({
            "x": x,
            "known": len(known),
            "ks_erlang": _ks_or_none(points, flags, erlang(x + 1).cdf),
            "mean": float(np.mean(known_points)) if known_points else None,
            "target_mean": float(x + 1),
        })
    summary["columns"] = columns

    first = frame[frame["x"] == 0]
    survival = censored_proportion(
        # 2m/Y_0 > 1 ⇔ Y_0 < 2m
        at_most(y, c, math.ceil(2 * m) - 1) for y, c in zip(first["Y"], first["censored"].astype(bool))
    )
    summary["first_point_survival_at_1"] = {**survival.to_dict(), "target": math.exp(-1)}

    if cfg.x_max >= 1:
        wide = frame[~frame["censored"].astype(bool)].pivot(index="trial", columns="x", values="Y")
        wide = wide.dropna()
        wide = wide[(wide[0] > 0) & (wide[1] > 0)]
        first_point = 2 * m / wide[0]
        spacing = 2 * m / wide[1] - first_point
        correlation = float(first_point.corr(spacing)) if len(wide) > 2 else None
        summary["spacing_correlation"] = correlation

    checks = [_check("exp_ks", columns[0]["ks_erlang"], thresholds["exp_ks"])]
    return summary, checks


def simulate_powerlaw_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    x_max = max(cfg.x_max, 1)
    hits = _hitting_trial(cfg, trial, StopCondition(t_max=cfg.t_max, target_column=0), x_max)
    return [
        {
            "trial": trial, "m": cfg.m, "x": x,
            "Y": hits.Y[x], "Y_next": hits.Y[x + 1],
            "censored": hits.censored[x], "censored_next": hits.censored[x + 1],
        }
        for x in range(x_max)
    ]


def _ratio_exceeds(y: int, y_next: int, censored: bool, censored_next: bool, u: float) -> Optional[bool]:
    """{Y_x / Y_{x+1} > u}, where censored values are lower bounds."""
    if censored_next:
        return None
    if y_next == 0:
        return y > 0 or censored
    if y / y_next > u:
        return True
    return None if censored else False


def summarize_powerlaw(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """Ratios Y_x / Y_{x+1} against the power law P(R_x > u) = u^{−(x+1)} at u = 2."""
    thresholds = _thresholds(cfg)
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique()), "censored_rate": _censored_rate(frame)}
    ratios = []
    checks = []
    for x in sorted(frame["x"].unique()):
        column = frame[frame["x"] == x]
        estimate = censored_proportion(
            _ratio_exceeds(y, yn, bool(c), bool(cn), 2.0)
            for y, yn, c, cn in zip(column["Y"], column["Y_next"], column["censored"], column["censored_next"])
        )
        target = 2.0 ** -(int(x) + 1)
        known = column[~column["censored"].astype(bool) & (column["Y_next"] > 0)]
        ratios.append({
            "x": int(x),
            **estimate.to_dict(),
            "target": target,
            "abs_error": abs(estimate.estimate - target),
            "min_ratio": float((known["Y"] / known["Y_next"]).min()) if len(known) else None,
        })
        if x <= 1:
            checks.append(_check(f"powerlaw_abs_x{int(x)}", ratios[-1]["abs_error"], thresholds["powerlaw_abs"]))
    summary["ratios"] = ratios
    return summary, checks


# --- Tail laws ---

def simulate_tail_y0_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    stop = StopCondition(t_max=cfg.t_max, target_column=0, row_cap=int(max(cfg.grid)))
    return _first_column_trial(cfg, trial, stop)


def simulate_tail_t0_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    stop = StopCondition(t_max=max(cfg.m, min(cfg.t_max, math.floor(max(cfg.grid)))), target_column=0)
    return _first_column_trial(cfg, trial, stop)


def _summarize_tail(cfg: ExperimentConfig, frame: pd.DataFrame, column: str) -> Summary:
    thresholds = _thresholds(cfg)
    m = cfg.m
    summary: dict[str, Any] = {"trials": len(frame), "censored_rate": _censored_rate(frame)}
    tails = []
    checks = []
    for level in cfg.grid:
        if column == "Y0":
            # y·P{Y_0 ≥ y} → 2m
            outcomes = (at_least(v, c, level) for v, c in zip(frame["Y0"], frame["censored"].astype(bool)))
            scale, target = level, 2.0 * m
        else:
            # √u·P{T_0 > u} → m
            outcomes = (at_least(v, c, math.floor(level) + 1)
                        for v, c in zip(frame["T0"], frame["censored"].astype(bool)))
            scale, target = math.sqrt(level), float(m)
        estimate = censored_proportion(outcomes)
        scaled = scale * estimate.estimate
        entry = {
            "level": level,
            **estimate.to_dict(),
            "scaled": scaled,
            "scaled_lower": scale * estimate.lower,
            "scaled_upper": scale * estimate.upper,
            "target": target,
        }
        if m == 0:
            entry["abs_error"] = abs(scaled)
            checks.append(_check(f"tail_zero_{level:g}", entry["abs_error"], 0.0))
        else:
            entry["rel_error"] = abs(scaled - target) / target
            checks.append(_check(f"tail_rel_{level:g}", entry["rel_error"], thresholds["tail_rel"]))
        checks.append(_check(f"tail_ambiguous_{level:g}", estimate.ambiguous_rate, thresholds["tail_ambiguous"]))
        tails.append(entry)
    summary["tails"] = tails
    return summary, checks


def summarize_tail_y0(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    return _summarize_tail(cfg, frame, "Y0")


def summarize_tail_t0(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    return _summarize_tail(cfg, frame, "T0")


# --- Growth rows of the Plancherel process ---

def _okounkov_window(cfg: ExperimentConfig) -> tuple[int, int]:
    return cfg.n, cfg.n + math.ceil(cfg.window_ratio * cfg.n)


def validate_okounkov(cfg: ExperimentConfig) -> None:
    if cfg.n < 1:
        raise ConfigError(f"okounkov-row needs n ≥ 1, got n={cfg.n}")


def simulate_okounkov_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    start, end = _okounkov_window(cfg)
    _, trace = plancherel_growth(end, cfg.master_seed, trace_rows=cfg.rows, window=(start, end), trial_index=trial)
    counts = trace.counts()
    weighted = trace.weighted_counts()
    return [
        {"trial": trial, "r": r, "count": counts[r], "weighted": weighted[r], "steps": len(trace.rows)}
        for r in range(cfg.rows + 1)
    ]


def summarize_okounkov(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """√t-weighted frequency of new boxes in row r over the window, target 1 for every r."""
    thresholds = _thresholds(cfg)
    start, end = _okounkov_window(cfg)
    summary: dict[str, Any] = {"processes": int(frame["trial"].nunique()), "window": [start, end]}
    rows = []
    for r, group in frame.groupby("r", sort=True):
        per_process = group["weighted"] / group["steps"]
        rows.append({
            "r": int(r),
            "scaled_frequency": float(group["weighted"].sum() / group["steps"].sum()),
            "frequency": float(group["count"].sum() / group["steps"].sum()),
            "standard_error": float(per_process.std(ddof=1) / math.sqrt(len(group))) if len(group) > 1 else None,
            "target": 1.0,
        })
    summary["rows"] = rows
    summary["frequency_total"] = math.fsum(r["frequency"] for r in rows)
    checks = [_check("okounkov_abs", abs(rows[0]["scaled_frequency"] - 1.0), thresholds["okounkov_abs"])]
    return summary, checks


# --- Distribution at a fixed time ---

def _row_regime_time(m: int, z: float) -> int:
    """t with (t − m)/√t = z: √t = (z + √(z² + 4m)) / 2."""
    return max(m, round(((z + math.sqrt(z * z + 4 * m)) / 2) ** 2))


def _column_regime(cfg: ExperimentConfig, z: float) -> tuple[int, int]:
    """(m_x, t) with m_x/√t ≈ z at the fixed time t = n."""
    return round(z * math.sqrt(cfg.n)), cfg.n


def validate_fixed_time(cfg: ExperimentConfig) -> None:
    if any(z < 0 for z in cfg.grid):
        raise ConfigError("fixed-time needs a grid of non-negative z values")
    for z in cfg.grid:
        m_x, t = _column_regime(cfg, z)
        if m_x > t:
            raise ConfigError(f"column regime at z={z} needs m={m_x} ≤ t={t}; increase n")


def simulate_fixed_time_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    rows = []
    # 1. Строковый режим: (t − m)/√t ≈ z, считаем y в момент t
    times = {z: _row_regime_time(cfg.m, z) for z in cfg.grid}
    _, snapshots = augmented_growth(
        cfg.m, cfg.master_seed, StopCondition(t_max=max(times.values())),
        t_checkpoints=list(times.values()), trial_index=trial, lane=0
    )
    by_time = {s.t: s.special for s in snapshots}
    for z, t in times.items():
        rows.append({"trial": trial, "regime": "row", "z": z, "t": t, "value": by_time[t][1]})

    # 2. Транспонированный режим: m/√t ≈ z, считаем x в момент t
    for lane, z in enumerate(cfg.grid, start=1):
        m_x, t = _column_regime(cfg, z)
        _, snapshots = augmented_growth(
            m_x, cfg.master_seed, StopCondition(t_max=t), t_checkpoints=[t], trial_index=trial, lane=lane
        )
        rows.append({"trial": trial, "regime": "column", "z": z, "t": t, "value": snapshots[-1].special[0]})
    return rows


def summarize_fixed_time(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """Empirical laws of y (row regime) and x (column regime) against Pois(z)."""
    thresholds = _thresholds(cfg)
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique())}
    checks = []
    for regime in ("row", "column"):
        entries = []
        for z in cfg.grid:
            group = frame[(frame["regime"] == regime) & (frame["z"] == z)]
            law = empirical_measure(group["value"].astype(int))
            distance = tv_distance(law, poisson(z))
            entries.append({
                "z": z,
                "t": int(group["t"].iloc[0]),
                "mean": float(group["value"].mean()),
                "tv_poisson": distance,
                "empirical": law.to_list(),
            })
            if regime == "row":
                checks.append(_check(f"fixed_time_tv_z{z:g}", distance, thresholds["fixed_time_tv"]))
        summary[regime] = entries
    return summary, checks


# --- Lazy parametrization ---

def summarize_lazy_poisson(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """
    m/√T_x against the partial sums of Exp(1) and the de-lazification ratio Y_0/√T_0 → 2.
    """
    thresholds = _thresholds(cfg)
    m = cfg.m
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique()), "censored_rate": _censored_rate(frame)}
    if m == 0:
        summary["degenerate"] = True
        return summary, []

    columns = []
    for x in range(cfg.x_max + 1):
        known = _known_column(frame, x)
        points, flags = _scaled_points(frame, x, lambda t: m / math.sqrt(t), "T")
        ratios = (known["Y"] / np.sqrt(known["T"].astype(float))).tolist()
        columns.append({
            "x": x,
            "known": len(known),
            "ks_erlang": _ks_or_none(points, flags, erlang(x + 1).cdf),
            "mean_ratio": float(np.mean(ratios)) if ratios else None,
        })
    summary["columns"] = columns
    summary["first_point_ks_exp"] = _ks_or_none(
        *_scaled_points(frame, 0, lambda t: m / math.sqrt(t), "T"), exponential().cdf
    )

    band = thresholds["delazy_band"]
    first = frame[frame["x"] == 0]
    outside = censored_proportion(
        None if c else abs(y / math.sqrt(t) - 2.0) > band
        for y, t, c in zip(first["Y"], first["T"], first["censored"].astype(bool))
    )
    summary["delazy_outside_band"] = {**outside.to_dict(), "decided": outside.decided, "band": band}
    # цензурированные испытания не участвуют: у них неизвестны ни Y_0, ни T_0
    checks = [_check("delazy_rate", outside.decided, thresholds["delazy_rate"])]
    return summary, checks


# --- Transition conjecture (exploratory) ---

def _y_range(cfg: ExperimentConfig) -> range:
    return range(int(cfg.grid[0]), int(cfg.grid[-1]) + 1)


def validate_transition(cfg: ExperimentConfig) -> None:
    if len(cfg.grid) < 2 or cfg.grid[0] < 1:
        raise ConfigError("transition-conjecture needs a grid [c, y_end] with c ≥ 1")


def simulate_transition_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    q = recording_tableau(SeededStream(cfg.master_seed, trial).take(cfg.n))
    rows = []
    for x in range(1, max(cfg.x_max, 1) + 1):
        for y in _y_range(cfg):
            current = q.get((x, y))
            if current is None:
                rows.append({"trial": trial, "x": x, "y": y, "event1": None, "event2": None})
                continue
            # клетка за пределами Q(ξ_1..ξ_n) заполняется позже, чем current
            left = q.get((x - 1, y + 1))
            event1 = left is not None and left < current
            event2 = None
            if x >= 2:
                far_left = q.get((x - 2, y + 1))
                event2 = far_left is not None and far_left < current
            rows.append({"trial": trial, "x": x, "y": y, "event1": event1, "event2": event2})
    return rows


def summarize_transition(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """
    Frequencies of 𝒯_{x−1,y+1} < 𝒯_{x,y} (compared with x/y) and 𝒯_{x−2,y+1} < 𝒯_{x,y},
    and the point sets {log(y/c)} of the first event.
    """
    c = int(cfg.grid[0])
    y_end = int(cfg.grid[-1])
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique()), "c": c, "y_end": y_end}
    per_column = []
    for x, group in frame.groupby("x", sort=True):
        known = group[group["event1"].notna()]
        by_y = []
        for y, cell in known.groupby("y", sort=True):
            first = float(cell["event1"].astype(bool).mean())
            second = float(cell["event2"].astype(bool).mean()) if x >= 2 else None
            by_y.append({"y": int(y), "p1": first, "scaled_p1": first * int(y), "p2": second})
        point_sets = [
            [math.log(y / c) for y, e in zip(trial_rows["y"], trial_rows["event1"]) if pd.notna(e) and bool(e)]
            for _, trial_rows in group.groupby("trial", sort=True)
        ]
        length = math.log((y_end + 1) / c)
        per_column.append({
            "x": int(x),
            "unknown_rate": float(group["event1"].isna().mean()),
            "by_y": by_y,
            "intensity": float(np.mean([len(p) for p in point_sets]) / length) if length > 0 else None,
            "target_intensity": float(x),
            "point_sets": point_sets,
        })
    summary["columns"] = per_column
    return summary, []


# --- Two-dimensional surface (exploratory) ---

def validate_surface(cfg: ExperimentConfig) -> None:
    if not cfg.grid or cfg.grid[0] < 0:
        raise ConfigError("surface-2d needs a non-empty grid of non-negative s values")
    if not cfg.t_grid or cfg.t_grid[0] <= 0:
        raise ConfigError("surface-2d needs a non-empty t grid of positive values")


def simulate_surface_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    m = cfg.m
    negative = SeededStream(cfg.master_seed, trial, lane=1).take(math.floor(m * max(cfg.grid)))
    rows = []
    for s in cfg.grid:
        before = math.floor(m * s)
        # ξ_{−⌊ms⌋}, …, ξ_{−1}, затем ∞, затем ξ_1, ξ_2, …
        prefix = negative[:before][::-1]
        times = {t: before + math.floor(m * m / (t * t)) for t in cfg.t_grid}
        stream = itertools.chain(prefix, SeededStream(cfg.master_seed, trial, lane=0))
        _, snapshots = simulate_route(
            stream, before, StopCondition(t_max=max(times.values())), t_checkpoints=list(times.values())
        )
        by_time = {snap.t: snap.special for snap in snapshots}
        for t, time in times.items():
            rows.append({"trial": trial, "s": s, "t": t, "x": by_time[time][0]})
    return rows


def summarize_surface(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """x_m(s, t) against the Poisson count with mean s·t on every grid cell."""
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique())}
    cells = []
    for (s, t), group in frame.groupby(["s", "t"], sort=True):
        law = empirical_measure(group["x"].astype(int))
        cells.append({
            "s": float(s),
            "t": float(t),
            "mean": float(group["x"].mean()),
            "target_mean": float(s * t),
            "tv_poisson": tv_distance(law, poisson(float(s * t))),
        })
    summary["cells"] = cells
    monotone = [
        bool(np.all(np.diff(g.sort_values("t")["x"].to_numpy()) >= 0))
        for _, g in frame.groupby(["trial", "s"], sort=True)
    ]
    summary["monotone_in_t_rate"] = float(np.mean(monotone))
    return summary, []


# --- Bumping trees and projective coordinates (exploratory) ---

def validate_tree(cfg: ExperimentConfig) -> None:
    if cfg.n < cfg.m:
        raise ConfigError(f"bumping-tree needs n ≥ m, got n={cfg.n}, m={cfg.m}")


def simulate_tree_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    w = SeededStream(cfg.master_seed, trial).take(cfg.n)
    rows = []
    for trace in bumping_tree(w, cfg.m):
        for t, (x, y) in trace.events:
            rows.append({
                "trial": trial, "m": trace.m, "t": t, "x": x, "y": y,
                "log_y": math.log(y) if y > 0 else None,
                "z": 2 * trace.m / y if y > 0 else None,
            })
    return rows


def summarize_tree(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """Non-crossing rate of the routes and the overlay curves x·y = 2m and x = z."""
    non_crossing = []
    for _, trial_rows in frame.groupby("trial", sort=True):
        traces = [
            RouteTrace(m=int(level), events=list(zip(g["t"], zip(g["x"], g["y"]))), steps=cfg.n, t_max=cfg.n)
            for level, g in trial_rows.groupby("m", sort=True)
        ]
        non_crossing.append(tree_non_crossing(traces))
    top_row = int(frame["y"].max())
    top_column = int(frame["x"].max())
    summary = {
        "trials": int(frame["trial"].nunique()),
        "routes": int(frame.groupby(["trial", "m"]).ngroups),
        "non_crossing_rate": float(np.mean(non_crossing)),
        "hyperbola": [[2 * cfg.m / y, y] for y in range(1, top_row + 1)],
        "diagonal": [[k, k] for k in range(top_column + 1)],
    }
    return summary, []


def simulate_projective_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    trace, _ = augmented_growth(cfg.m, cfg.master_seed, StopCondition(t_max=cfg.t_max, target_column=0),
                                trial_index=trial)
    return [
        {"trial": trial, "m": cfg.m, "z": sample.z, "x": sample.x, "known": sample.known}
        for sample in projective_route(trace, cfg.m, cfg.grid)
    ]


def summarize_projective(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """x^proj(z) against the Poisson counting process: mean z and law Pois(z)."""
    summary: dict[str, Any] = {"trials": int(frame["trial"].nunique())}
    points = []
    for z, group in frame.groupby("z", sort=True):
        known = group[group["known"].astype(bool)]
        entry = {"z": float(z), "known_rate": float(len(known) / len(group)), "target_mean": float(z)}
        if len(known):
            law = empirical_measure(known["x"].astype(int))
            entry["mean"] = float(known["x"].astype(float).mean())
            entry["tv_poisson"] = tv_distance(law, poisson(float(z)))
        points.append(entry)
    summary["points"] = points
    summary["diagonal"] = [[float(z), float(z)] for z in cfg.grid]
    return summary, []


# --- Binomial thinning of the column (exploratory) ---

def _thinning_end(cfg: ExperimentConfig) -> int:
    return math.ceil(cfg.n / (cfg.p * cfg.p))


def simulate_thinning_trial(cfg: ExperimentConfig, trial: int) -> Rows:
    end = _thinning_end(cfg)
    node = extended_growth(cfg.n, end, cfg.x_max, cfg.master_seed, trial_index=trial)
    return [{"trial": trial, "n": cfg.n, "n_end": end, "x_start": cfg.x_max, "x_end": node.x}]


def summarize_thinning(cfg: ExperimentConfig, frame: pd.DataFrame) -> Summary:
    """Law of the column at time n/p² against Binom(k, p)."""
    law = empirical_measure(frame["x_end"].astype(int))
    target = binomial(cfg.x_max, cfg.p)
    summary = {
        "trials": len(frame),
        "k": cfg.x_max,
        "p": cfg.p,
        "n_end": _thinning_end(cfg),
        "mean": float(frame["x_end"].mean()),
        "target_mean": cfg.x_max * cfg.p,
        "tv_binomial": tv_distance(law, target),
        "empirical": law.to_list(),
    }
    return summary, []


# --- Registry ---

HITTING_COLUMNS = ("trial", "m", "seed", "Y0", "T0", "censored")
POINT_COLUMNS = ("trial", "m", "x", "Y", "T", "censored")

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e for e in (
        Experiment(
            "frechet-cdf", HITTING_COLUMNS, simulate_frechet_trial, summarize_frechet,
            defaults=lambda cfg: {"grid": [0.5, 1.0, 2.0, 4.0]},
            description="Y_0/2m against the Fréchet law, e^{-2m/Y_0} against U(0,1)",
        ),
        Experiment(
            "poisson-points", POINT_COLUMNS, simulate_points_trial, summarize_poisson_points,
            description="2m/Y_x against the Poisson point process of unit intensity",
        ),
        Experiment(
            "powerlaw-ratios", ("trial", "m", "x", "Y", "Y_next", "censored", "censored_next"),
            simulate_powerlaw_trial, summarize_powerlaw,
            description="Y_x/Y_{x+1} against the power law u^{-(x+1)}",
        ),
        Experiment(
            "tail-y0", HITTING_COLUMNS, simulate_tail_y0_trial, summarize_tail_y0,
            defaults=lambda cfg: {"grid": [100.0]}, validate=_require_positive_grid,
            description="y·P{Y_0 ≥ y} against 2m",
        ),
        Experiment(
            "tail-t0", HITTING_COLUMNS, simulate_tail_t0_trial, summarize_tail_t0,
            defaults=lambda cfg: {"grid": [10_000.0]}, validate=_require_positive_grid,
            description="√u·P{T_0 > u} against m",
        ),
        Experiment(
            "okounkov-row", ("trial", "r", "count", "weighted", "steps"),
            simulate_okounkov_trial, summarize_okounkov,
            defaults=lambda cfg: {"n": 40_000}, validate=validate_okounkov,
            description="√t-scaled probability of a new box in row r",
        ),
        Experiment(
            "fixed-time", ("trial", "regime", "z", "t", "value"),
            simulate_fixed_time_trial, summarize_fixed_time,
            defaults=lambda cfg: {"grid": [1.0], "n": cfg.m}, validate=validate_fixed_time,
            description="y at (t−m)/√t ≈ z and x at m/√t ≈ z against Pois(z)",
        ),
        Experiment(
            "lazy-poisson", POINT_COLUMNS, simulate_points_trial, summarize_lazy_poisson,
            description="m/√T_x against Poisson partial sums, Y_0/√T_0 against 2",
        ),
        Experiment(
            "transition-conjecture", ("trial", "x", "y", "event1", "event2"),
            simulate_transition_trial, summarize_transition, exploratory=True,
            defaults=lambda cfg: {"grid": [10.0, 60.0], "n": 20_000}, validate=validate_transition,
            description="transition frequencies of the recording tableau between neighbouring rows",
        ),
        Experiment(
            "surface-2d", ("trial", "s", "t", "x"), simulate_surface_trial, summarize_surface, exploratory=True,
            defaults=lambda cfg: {"grid": [0.5, 1.0, 2.0], "t_grid": [0.5, 1.0, 2.0]}, validate=validate_surface,
            description="x_m(s, t) against the planar Poisson count N([0,s]×[0,t])",
        ),
        Experiment(
            "bumping-tree", ("trial", "m", "t", "x", "y", "log_y", "z"),
            simulate_tree_trial, summarize_tree, exploratory=True,
            defaults=lambda cfg: {"n": max(50, 2 * cfg.m)}, validate=validate_tree,
            description="lazy routes of all probes 0..m through one recording tableau",
        ),
        Experiment(
            "projective", ("trial", "m", "z", "x", "known"),
            simulate_projective_trial, summarize_projective, exploratory=True,
            defaults=lambda cfg: {"grid": [0.25, 0.5, 1.0, 2.0, 4.0]}, validate=_require_positive_grid,
            description="route in projective coordinates against the Poisson counting process",
        ),
        Experiment(
            "binomial-thinning", ("trial", "n", "n_end", "x_start", "x_end"),
            simulate_thinning_trial, summarize_thinning, exploratory=True,
            defaults=lambda cfg: {"n": 1_000},
            description="column of the extended process after time n/p² against Binom(k, p)",
        ),
    )
}


def get_experiment(name: str) -> Experiment:
    """
    Look up an experiment by name.

    Raises:
        ConfigError: If there is no such experiment.
    """
    try:
        return EXPERIMENTS[name]
    except KeyError as exc:
        raise ConfigError(f"unknown experiment {name!r}") from exc


def resolve_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """Fill in experiment defaults for the fields left empty and validate the result."""
    experiment = get_experiment(cfg.experiment)
    updates = {
        key: value for key, value in experiment.defaults(cfg).items()
        if getattr(cfg, key) in (None, [])
    }
    resolved = cfg.model_copy(update=updates)
    if experiment.validate is not None:
        experiment.validate(resolved)
    return resolved


def _jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if value is pd.NA:
        return None
    return value


def summarize_rows(cfg: ExperimentConfig, rows: Rows) -> tuple[dict[str, Any], list[CheckResult]]:
    """Summary and checks of an experiment as a pure function of its sample rows."""
    experiment = get_experiment(cfg.experiment)
    frame = pd.DataFrame(rows, columns=list(experiment.columns))
    summary, checks = experiment.summarize(cfg, frame)
    return _jsonable(summary), checks


def recompute_summary(report: ExperimentReport) -> dict[str, Any]:
    """Summary recomputed from the report's own echoed config and sample rows."""
    if report.samples is None:
        raise ConfigError("the report carries no sample rows")
    cfg = ExperimentConfig(**report.config)
    return summarize_rows(cfg, report.samples)[0]


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """
    Run all trials of an experiment and build its report.

    Args:
        cfg (ExperimentConfig): Validated configuration.

    Returns:
        ExperimentReport: Echoed config, summary, checks, verdict and sample rows.

    Raises:
        ConfigError: If the configuration does not suit the experiment.
    """
    cfg = resolve_config(cfg)
    experiment = get_experiment(cfg.experiment)
    logger.info("Эксперимент %s: m=%d, trials=%d, seed=%d, threads=%d",
                cfg.experiment, cfg.m, cfg.trials, cfg.master_seed, cfg.threads)

    # Результаты возвращаются в порядке номеров испытаний при любом числе процессов
    batches = Parallel(n_jobs=cfg.threads)(
        delayed(experiment.simulate_trial)(cfg, trial) for trial in range(cfg.trials)
    )
    rows = _jsonable([row for batch in batches for row in batch])
    summary, checks = summarize_rows(cfg, rows)

    censored_rate = summary.get("censored_rate")
    if censored_rate is not None and censored_rate > CENSORING_WARNING_RATE:
        logger.warning("%s: censored rate %.3f exceeds %.2f, consider a larger t_max",
                       cfg.experiment, censored_rate, CENSORING_WARNING_RATE)
    passed = None if experiment.exploratory or not checks else all(c.passed for c in checks)
    logger.info("Эксперимент %s завершён: passed=%s", cfg.experiment, passed)
    return ExperimentReport(
        schema_version=SCHEMA_VERSION,
        experiment=cfg.experiment,
        config=_jsonable(cfg.echo()),
        summary=summary,
        checks=checks,
        passed=passed,
        samples=rows,
    )


def report_to_json(report: ExperimentReport, include_samples: bool = True) -> str:
    payload = report.model_dump(exclude=None if include_samples else {"samples"})
    return json.dumps(_jsonable(payload), indent=2, ensure_ascii=False) + "\n"


def report_to_csv(report: ExperimentReport) -> str:
    experiment = get_experiment(report.experiment)
    frame = pd.DataFrame(report.samples or [], columns=list(experiment.columns))
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def write_report(report: ExperimentReport, fmt: str, out: Optional[str], include_samples: bool = True) -> Optional[str]:
    """
    Serialize a report.

    Args:
        report (ExperimentReport): The report.
        fmt (str): "json" or "csv".
        out (str | None): Output path; when None the text is returned instead of written.
        include_samples (bool): Include sample rows in JSON output.

    Returns:
        str | None: The serialized text when `out` is None.
    """
    if fmt == "json":
        text = report_to_json(report, include_samples)
    elif fmt == "csv":
        text = report_to_csv(report)
        if out is not None:
            with open(f"{out}.summary.json", "w", encoding="utf-8") as sidecar:
                sidecar.write(report_to_json(report, include_samples=False))
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    if out is None:
        return text
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(text)
    logger.info("Отчёт записан в %s", out)
    return None
