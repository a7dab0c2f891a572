"""
Reference distributions, the Poisson mixture ν_{k,p,h}, the compound binomial
operator C_p, total variation distance and empirical statistics.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats
from scipy.special import gammaln, logsumexp

from app.core.constants import (
    NU_MAX_SUPPORT,
    NU_SERIES_RELATIVE_EPS,
    POISSON_TAIL_CUTOFF,
    PROBABILITY_MASS_TOLERANCE,
)
from app.core.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass
class DiscreteMeasure:
    """
    Finitely supported (signed) measure on ℕ0.

    Attributes:
        weights (np.ndarray): weights[n] is the mass of the atom n.
        tail_bound (float): Upper bound on the mass cut off beyond the stored support.
    """
    weights: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if self.weights.ndim != 1:
            raise InvalidParameterError("weights must be one-dimensional")
        if self.weights.size == 0:
            self.weights = np.zeros(1)

    def __len__(self) -> int:
        return int(self.weights.size)

    def pmf(self, n: int) -> float:
        return float(self.weights[n]) if 0 <= n < self.weights.size else 0.0

    def total_mass(self) -> float:
        return math.fsum(self.weights.tolist())

    def is_probability(self, tol: float = PROBABILITY_MASS_TOLERANCE) -> bool:
        return bool(np.all(self.weights >= -tol)) and abs(self.total_mass() - 1.0) <= tol + self.tail_bound

    def mean(self) -> float:
        return float(np.dot(np.arange(self.weights.size), self.weights))

    def padded(self, size: int) -> np.ndarray:
        if size <= self.weights.size:
            return self.weights[:size]
        return np.concatenate([self.weights, np.zeros(size - self.weights.size)])

    def to_list(self) -> list[float]:
        return self.weights.tolist()


def dirac(n: int) -> DiscreteMeasure:
    weights = np.zeros(n + 1)
    weights[n] = 1.0
    return DiscreteMeasure(weights)


def poisson(z: float, cutoff: float = POISSON_TAIL_CUTOFF) -> DiscreteMeasure:
    """
    Pois(z) truncated where the remaining tail mass drops below `cutoff`.

    Raises:
        InvalidParameterError: If z is negative or not finite.
    """
    if not math.isfinite(z) or z < 0:
        raise InvalidParameterError(f"Poisson mean must be finite and non-negative, got {z}")
    if z == 0:
        return dirac(0)
    last = int(stats.poisson.isf(cutoff, z)) + 1
    support = np.arange(last + 1)
    return DiscreteMeasure(stats.poisson.pmf(support, z), float(stats.poisson.sf(last, z)))


def binomial(k: int, p: float) -> DiscreteMeasure:
    if k < 0 or not 0 <= p <= 1:
        raise InvalidParameterError(f"Binom({k}, {p}) is not defined")
    return DiscreteMeasure(stats.binom.pmf(np.arange(k + 1), k, p))


def erlang(shape: int):
    """Erlang(shape, 1): the sum of `shape` independent Exp(1) variables."""
    if shape < 1 or int(shape) != shape:
        raise InvalidParameterError(f"Erlang shape must be a positive integer, got {shape}")
    return stats.erlang(a=int(shape))


def frechet_shape1():
    """Fréchet law of shape 1: cdf e^{−1/u} for u > 0."""
    return stats.invweibull(c=1.0)


def exponential():
    return stats.expon()


def pareto_power(exponent: float):
    """Pareto law on [1, ∞) with survival function u^{−exponent}."""
    if not exponent > 0:
        raise InvalidParameterError(f"Pareto exponent must be positive, got {exponent}")
    return stats.pareto(b=exponent)


class _StirlingTable:
    """Growing table of Stirling numbers of the second kind, exact integers."""

    def __init__(self):
        self.rows: list[list[int]] = [[1]]

    def get(self, n: int, k: int) -> int:
        if k > n:
            return 0
        while len(self.rows) <= n:
            previous = self.rows[-1]
            size = len(previous)
            row = [0] * (size + 1)
            for j in range(1, size + 1):
                # S(n, j) = j·S(n−1, j) + S(n−1, j−1)
                row[j] = (j * previous[j] if j < size else 0) + previous[j - 1]
            self.rows.append(row)
        return self.rows[n][k]


_STIRLING = _StirlingTable()


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k)."""
    if n < 0 or k < 0:
        raise InvalidParameterError(f"S({n}, {k}) needs non-negative arguments")
    return _STIRLING.get(n, k)


def _check_nu_parameters(k: int, p: float, h: float) -> None:
    if k < 0 or int(k) != k:
        raise InvalidParameterError(f"k must be a non-negative integer, got {k}")
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    if not (math.isfinite(h) and h > 0):
        raise InvalidParameterError(f"h must be positive, got {h}")


def _log_nu_atom(n: int, k: int, p: float, h: float, log_prefactor: float) -> float:
    """log ν_{k,p,h}(n) from the positive series over r."""
    log_head = log_prefactor + n * math.log(p * h) - gammaln(n + 1)
    if p == 1:
        s = stirling2(n, k)
        return log_head + math.log(s) if s > 0 else -math.inf
    log_q = math.log((1 - p) * h)
    logs = []
    r = max(0, k - n)
    while True:
        term = log_head + math.log(stirling2(n + r, k)) + r * log_q - gammaln(r + 1)
        logs.append(term)
        # члены убывают после r ≈ (1−p)·h·k
        if r > (1 - p) * h * k and term - logsumexp(logs) < math.log(NU_SERIES_RELATIVE_EPS):
            break
        r += 1
    return float(logsumexp(logs))


def nu_measure(k: int, p: float, h: float, cutoff: float = POISSON_TAIL_CUTOFF) -> DiscreteMeasure:
    """
    The probability measure ν_{k,p,h} = (e^h − 1)^{−k} Σ_j (−1)^{k−j} C(k,j) e^{jh} Pois(pjh).

    Atoms are evaluated from the sign-free expansion
    ν(n) = (ph)^n/n! · k!/(e^h−1)^k · Σ_r ((1−p)h)^r/r! · S(n+r, k),
    summed in log space. The support is cut once the remaining mass is below
    `cutoff`; since the total mass is exactly 1 the cut mass is certified.

    Args:
        k (int): Number of points, k ≥ 0.
        p (float): Thinning probability in [0, 1].
        h (float): Positive step.

    Returns:
        DiscreteMeasure: ν_{k,p,h} with its tail bound.

    Raises:
        InvalidParameterError: For parameters outside their domains.
    """
    _check_nu_parameters(k, p, h)
    if k == 0 or p == 0:
        return dirac(0)
    log_prefactor = math.lgamma(k + 1) - k * math.log(math.expm1(h))
    weights = []
    cumulative = 0.0
    n = 0
    while n < NU_MAX_SUPPORT:
        weights.append(math.exp(_log_nu_atom(n, k, p, h, log_prefactor)))
        cumulative += weights[-1]
        n += 1
        if n > k and cumulative >= 1.0 - cutoff:
            break
    else:
        logger.warning("ν(%d, %s, %s) truncated at the support cap %d", k, p, h, NU_MAX_SUPPORT)
    return DiscreteMeasure(np.array(weights), max(0.0, 1.0 - math.fsum(weights)))


def nu_measure_closed_form(k: int, h: float, support: int) -> DiscreteMeasure:
    """ν_{k,1,h}(n) = h^n k! S(n,k) / ((e^h − 1)^k n!) for n < support."""
    _check_nu_parameters(k, 1.0, h)
    log_prefactor = math.lgamma(k + 1) - k * math.log(math.expm1(h))
    weights = [
        math.exp(log_prefactor + n * math.log(h) - math.lgamma(n + 1) + math.log(stirling2(n, k)))
        if stirling2(n, k) > 0 else 0.0
        for n in range(support)
    ]
    return DiscreteMeasure(np.array(weights), max(0.0, 1.0 - math.fsum(weights)))


def nu_measure_alternating(k: int, p: float, h: float, cutoff: float = POISSON_TAIL_CUTOFF) -> DiscreteMeasure:
    """
    ν_{k,p,h} from the alternating linear combination of Poisson laws.

    Terms of each atom are added by increasing magnitude. The cancellation
    between them grows as h → 0, so this form is only a cross-check for moderate h.
    """
    _check_nu_parameters(k, p, h)
    if k == 0 or p == 0:
        return dirac(0)
    last = int(stats.poisson.isf(cutoff, p * k * h)) + 1
    support = np.arange(last + 1)
    j = np.arange(k + 1)
    log_coefficients = gammaln(k + 1) - gammaln(j + 1) - gammaln(k - j + 1) + j * h - k * math.log(math.expm1(h))
    signs = np.where((k - j) % 2 == 0, 1.0, -1.0)
    # строки: j, столбцы: n
    pmfs = stats.poisson.pmf(support[None, :], p * j[:, None] * h)
    terms = signs[:, None] * np.exp(log_coefficients)[:, None] * pmfs
    weights = [
        math.fsum(sorted(terms[:, n].tolist(), key=abs))
        for n in range(support.size)
    ]
    return DiscreteMeasure(np.array(weights), float(stats.poisson.sf(last, p * k * h)))


def compound_binomial(measure: DiscreteMeasure, p: float) -> DiscreteMeasure:
    """
    C_p[μ](k) = Σ_{j ≥ k} μ(j) C(j,k) p^k (1−p)^{j−k}.

    Raises:
        InvalidParameterError: If p is outside [0, 1].
    """
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    size = len(measure)
    k = np.arange(size)[:, None]
    j = np.arange(size)[None, :]
    operator = stats.binom.pmf(k, j, p)
    return DiscreteMeasure(operator @ measure.weights, measure.tail_bound)


def tv_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Half the ℓ¹ distance between two measures on ℕ0."""
    size = max(len(mu), len(nu))
    return 0.5 * math.fsum(np.abs(mu.padded(size) - nu.padded(size)).tolist())


def tv_max_event(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """max over events X of |μ(X) − ν(X)|; equals tv_distance for probability measures."""
    size = max(len(mu), len(nu))
    diff = mu.padded(size) - nu.padded(size)
    positive = math.fsum(diff[diff > 0].tolist())
    negative = -math.fsum(diff[diff < 0].tolist())
    return max(positive, negative)


def tv_error_bound(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Largest change of the distance the truncated tails could cause."""
    return mu.tail_bound + nu.tail_bound


def _non_empty(samples: Iterable[float]) -> np.ndarray:
    values = np.asarray(list(samples), dtype=float)
    if values.size == 0:
        raise InvalidParameterError("no samples")
    return values


def ecdf(samples: Iterable[float]) -> Callable[[float], float]:
    """Empirical distribution function u ↦ #{samples ≤ u} / n."""
    result = stats.ecdf(_non_empty(samples))

    def evaluate(u):
        value = result.cdf.evaluate(u)
        return float(value) if np.ndim(value) == 0 else value
    return evaluate


def ks_statistic(samples: Iterable[float], cdf: Callable) -> float:
    """Kolmogorov–Smirnov distance between the samples and a continuous cdf."""
    return float(stats.kstest(_non_empty(samples), cdf).statistic)


def censored_ks_statistic(
    samples: Iterable[float], censored: Iterable[bool], cdf: Callable | str, bound: str = "upper"
) -> float:
    """
    Kolmogorov–Smirnov distance for samples whose censored entries are one-sided bounds.

    With bound="upper" a censored entry v only says that the value is ≤ v, with
    bound="lower" that it is ≥ v. The empirical cdfs consistent with such data form
    a band; the statistic is the largest distance by which the cdf leaves the band.
    Without censored entries it equals `ks_statistic`.

    Args:
        samples (Iterable[float]): Exact values and bounds.
        censored (Iterable[bool]): Flags marking the bounds.
        cdf (Callable | str): Continuous cdf, or the name of a scipy.stats distribution.
        bound (str): "upper" or "lower".

    Returns:
        float: The statistic in [0, 1].
    """
    if bound not in ("upper", "lower"):
        raise InvalidParameterError(f"bound must be 'upper' or 'lower', got {bound!r}")
    values = _non_empty(samples)
    flags = np.asarray(list(censored), dtype=bool)
    if flags.shape != values.shape:
        raise InvalidParameterError("samples and censored flags must have the same length")
    if isinstance(cdf, str):
        cdf = getattr(stats, cdf).cdf
    n = values.size
    exact = np.sort(values[~flags])
    bounds = np.sort(values[flags])
    points = np.unique(values)
    target = np.asarray(cdf(points), dtype=float)

    exact_at = np.searchsorted(exact, points, side="right")
    exact_before = np.searchsorted(exact, points, side="left")
    if bound == "upper":
        # значение ≤ v известно, как только граница ≤ v
        lowest_at = exact_at + np.searchsorted(bounds, points, side="right")
        highest_before = exact_before + bounds.size
    else:
        lowest_at = exact_at
        highest_before = exact_before + np.searchsorted(bounds, points, side="left")
    excess = np.max(lowest_at / n - target)
    deficit = np.max(target - highest_before / n)
    return float(max(excess, deficit, 0.0))


def counting_tally(point_sets: Sequence[Sequence[float]], grid: Sequence[float]) -> np.ndarray:
    """
    Counting-process values N(z) = #{points ≤ z} for each point set and grid value.

    Returns:
        np.ndarray: Integer array of shape (len(point_sets), len(grid)).
    """
    if not point_sets:
        raise InvalidParameterError("no point sets")
    grid_array = np.asarray(grid, dtype=float)
    counts = np.empty((len(point_sets), grid_array.size), dtype=np.int64)
    for i, points in enumerate(point_sets):
        ordered = np.sort(np.asarray(points, dtype=float))
        counts[i] = np.searchsorted(ordered, grid_array, side="right")
    return counts


def chi_square(counts: Sequence[int], pmf: Sequence[float]) -> float:
    """Pearson statistic of observed counts against a pmf on the same cells."""
    observed = _non_empty(counts)
    expected = np.asarray(pmf, dtype=float)
    if expected.shape != observed.shape:
        raise InvalidParameterError("counts and pmf must have the same length")
    expected = expected / expected.sum() * observed.sum()
    return float(stats.chisquare(observed, expected).statistic)


def empirical_measure(samples: Iterable[int]) -> DiscreteMeasure:
    values = _non_empty(samples)
    if np.any(values < 0) or np.any(values != np.floor(values)):
        raise InvalidParameterError("samples must be non-negative integers")
    return DiscreteMeasure(np.bincount(values.astype(np.int64)) / values.size)


@dataclass(frozen=True)
class CensoredEstimate:
    """
    Proportion of trials in an event when some trials are undecided because of censoring.

    Attributes:
        definite (int): Trials known to be in the event.
        ambiguous (int): Censored trials that may or may not be in the event.
        total (int): All trials.
    """
    definite: int
    ambiguous: int
    total: int

    @property
    def lower(self) -> float:
        return self.definite / self.total

    @property
    def upper(self) -> float:
        return (self.definite + self.ambiguous) / self.total

    @property
    def estimate(self) -> float:
        """Midpoint of the bracket."""
        return 0.5 * (self.lower + self.upper)

    @property
    def decided(self) -> float | None:
        """Frequency among the trials the censoring left decided."""
        known = self.total - self.ambiguous
        return self.definite / known if known else None

    @property
    def ambiguous_rate(self) -> float:
        return self.ambiguous / self.total

    def to_dict(self) -> dict[str, float]:
        return {
            "estimate": self.estimate,
            "lower": self.lower,
            "upper": self.upper,
            "ambiguous_rate": self.ambiguous_rate,
            "trials": self.total,
        }


def at_least(value: float, censored: bool, threshold: float) -> bool | None:
    """{V ≥ threshold} where a censored value is only a lower bound; None when undecided."""
    if value >= threshold:
        return True
    return None if censored else False


def at_most(value: float, censored: bool, threshold: float) -> bool | None:
    """{V ≤ threshold} where a censored value is only a lower bound; None when undecided."""
    if value > threshold:
        return False
    return None if censored else True


def censored_proportion(outcomes: Iterable[bool | None]) -> CensoredEstimate:
    """
    Bracket the frequency of an event from per-trial outcomes (True, False or None when undecided).

    Raises:
        InvalidParameterError: If there are no outcomes.
    """
    definite = ambiguous = total = 0
    for outcome in outcomes:
        total += 1
        if outcome is None:
            ambiguous += 1
        elif outcome:
            definite += 1
    if total == 0:
        raise InvalidParameterError("no outcomes")
    return CensoredEstimate(definite, ambiguous, total)


def proportion_standard_error(p: float, n: int) -> float:
    if n <= 0:
        raise InvalidParameterError(f"sample size must be positive, got {n}")
    return math.sqrt(max(p * (1 - p), 0.0) / n)
