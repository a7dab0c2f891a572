import math

import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError
from app.services.plancherel import SeededStream
from app.services.stats import (
    DiscreteMeasure,
    at_least,
    at_most,
    binomial,
    censored_ks_statistic,
    censored_proportion,
    chi_square,
    compound_binomial,
    counting_tally,
    dirac,
    ecdf,
    empirical_measure,
    erlang,
    exponential,
    frechet_shape1,
    ks_statistic,
    nu_measure,
    nu_measure_alternating,
    nu_measure_closed_form,
    pareto_power,
    poisson,
    proportion_standard_error,
    stirling2,
    tv_distance,
    tv_error_bound,
    tv_max_event,
)


def _max_abs_difference(mu, nu):
    size = max(len(mu), len(nu))
    return float(np.max(np.abs(mu.padded(size) - nu.padded(size))))


# --- Reference distributions ---

def test_poisson():
    law = poisson(1.5)
    assert law.pmf(0) == pytest.approx(math.exp(-1.5), rel=1e-12)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-11)
    assert law.tail_bound < 1e-11
    assert law.mean() == pytest.approx(1.5, rel=1e-9)
    assert poisson(0).to_list() == [1.0]
    with pytest.raises(InvalidParameterError):
        poisson(-1.0)
    with pytest.raises(InvalidParameterError):
        poisson(math.inf)


@pytest.mark.parametrize("u", [0.25, 0.5, 1.0, 2.0, 10.0])
def test_frechet_cdf(u):
    assert frechet_shape1().cdf(u) == pytest.approx(math.exp(-1 / u), rel=1e-12)


def test_pareto_and_erlang():
    assert pareto_power(1).sf(2) == pytest.approx(0.5)
    assert pareto_power(2).sf(2) == pytest.approx(0.25)
    assert erlang(2).cdf(1.0) == pytest.approx(1 - 2 * math.exp(-1.0))
    assert erlang(1).cdf(0.7) == pytest.approx(exponential().cdf(0.7))
    with pytest.raises(InvalidParameterError):
        erlang(0)
    with pytest.raises(InvalidParameterError):
        pareto_power(0)


def test_binomial():
    law = binomial(3, 0.5)
    assert law.to_list() == pytest.approx([0.125, 0.375, 0.375, 0.125])
    with pytest.raises(InvalidParameterError):
        binomial(3, 1.5)


def test_discrete_measure_accessors():
    law = DiscreteMeasure([0.25, 0.5, 0.25])
    assert law.pmf(5) == 0.0
    assert law.pmf(-1) == 0.0
    assert law.mean() == pytest.approx(1.0)
    assert law.is_probability()
    assert list(law.padded(5)) == [0.25, 0.5, 0.25, 0.0, 0.0]
    assert list(law.padded(2)) == [0.25, 0.5]
    assert not DiscreteMeasure([0.5, 0.6]).is_probability()
    assert dirac(2).to_list() == [0.0, 0.0, 1.0]


# --- Stirling numbers ---

@pytest.mark.parametrize("n, k, value", [
    (0, 0, 1), (5, 0, 0), (3, 2, 3), (4, 2, 7), (5, 3, 25), (10, 3, 9330), (2, 5, 0), (7, 7, 1),
])
def test_stirling_values(n, k, value):
    assert stirling2(n, k) == value


def test_stirling_row_sums_are_bell_numbers():
    bell = [1, 1, 2, 5, 15, 52, 203, 877]
    assert [sum(stirling2(n, k) for k in range(n + 1)) for n in range(8)] == bell
    with pytest.raises(InvalidParameterError):
        stirling2(-1, 0)


# --- ν_{k,p,h} ---

def test_nu_degenerate_cases():
    assert nu_measure(0, 0.3, 0.5).to_list() == [1.0]
    assert nu_measure(4, 0.0, 0.5).to_list() == [1.0]
    with pytest.raises(InvalidParameterError):
        nu_measure(-1, 0.5, 0.5)
    with pytest.raises(InvalidParameterError):
        nu_measure(2, 1.5, 0.5)
    with pytest.raises(InvalidParameterError):
        nu_measure(2, 0.5, 0.0)


def test_nu_atom_for_two_points():
    law = nu_measure(2, 1.0, 0.1)
    assert law.pmf(0) == 0.0
    assert law.pmf(1) == 0.0
    assert law.pmf(2) == pytest.approx((0.1 / math.expm1(0.1)) ** 2, rel=1e-12)
    assert abs(law.pmf(2) - 0.9041) < 1e-4


@pytest.mark.parametrize("k", [1, 2, 5, 8])
@pytest.mark.parametrize("p", [0.0, 0.3, 0.7, 1.0])
@pytest.mark.parametrize("h", [0.01, 0.1, 0.5, 1.0])
def test_nu_is_probability_measure(k, p, h):
    law = nu_measure(k, p, h)
    assert np.all(law.weights >= 0)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-9)
    assert law.tail_bound <= 1e-9


@pytest.mark.parametrize("k", [1, 3, 6])
@pytest.mark.parametrize("h", [0.05, 0.3, 1.0])
def test_nu_distance_to_dirac(k, h):
    distance = tv_distance(nu_measure(k, 1.0, h), dirac(k))
    assert distance == pytest.approx(1 - (h / math.expm1(h)) ** k, abs=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("p", [0.3, 0.7])
def test_nu_converges_to_binomial(k, p):
    distances = [tv_distance(nu_measure(k, p, h), binomial(k, p)) for h in (1.0, 0.5, 0.1, 0.02)]
    assert all(a > b for a, b in zip(distances, distances[1:]))
    assert distances[-1] < 0.05


@pytest.mark.parametrize("k, p, h", [(2, 0.5, 0.5), (3, 0.3, 1.0), (5, 0.7, 0.8), (4, 1.0, 0.5)])
def test_nu_alternating_form_agrees(k, p, h):
    assert _max_abs_difference(nu_measure(k, p, h), nu_measure_alternating(k, p, h)) < 1e-9


@pytest.mark.parametrize("k, h", [(1, 0.2), (3, 0.01), (6, 1.0)])
def test_nu_closed_form_agrees(k, h):
    law = nu_measure(k, 1.0, h)
    closed = nu_measure_closed_form(k, h, len(law))
    assert _max_abs_difference(law, closed) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("p", [0.3, 1.0])
@pytest.mark.parametrize("h", [0.5, 0.1, 0.02])
def test_nu_suite(k, p, h):
    law = nu_measure(k, p, h)
    assert law.weights.min() >= -1e-12
    assert abs(law.total_mass() - 1.0) <= 1e-10
    assert tv_distance(nu_measure(k, 1.0, h), dirac(k)) == pytest.approx(1 - (h / math.expm1(h)) ** k, abs=1e-9)
    assert _max_abs_difference(compound_binomial(nu_measure(k, 1.0, h), p), law) <= 1e-9
    if h == 0.02:
        assert tv_distance(law, binomial(k, p)) < 0.05


# --- Compound binomial ---

@pytest.mark.parametrize("lam, p", [(0.5, 0.3), (2.0, 0.5), (7.0, 0.9)])
def test_thinning_of_poisson(lam, p):
    assert _max_abs_difference(compound_binomial(poisson(lam), p), poisson(p * lam)) < 1e-10


def test_thinning_of_binomial():
    assert _max_abs_difference(compound_binomial(binomial(6, 0.4), 0.5), binomial(6, 0.2)) < 1e-12


@pytest.mark.parametrize("k, p, h", [(2, 0.5, 0.3), (4, 0.3, 1.0), (6, 0.8, 0.1)])
def test_thinning_of_nu(k, p, h):
    assert _max_abs_difference(compound_binomial(nu_measure(k, 1.0, h), p), nu_measure(k, p, h)) < 1e-10


def test_thinning_is_linear_and_keeps_probability():
    mu, nu = poisson(1.0), binomial(4, 0.3)
    size = max(len(mu), len(nu))
    mixture = DiscreteMeasure(0.25 * mu.padded(size) + 0.75 * nu.padded(size))
    left = compound_binomial(mixture, 0.4)
    right = DiscreteMeasure(
        0.25 * compound_binomial(mu, 0.4).padded(size) + 0.75 * compound_binomial(nu, 0.4).padded(size)
    )
    assert _max_abs_difference(left, right) < 1e-14
    assert left.is_probability(tol=1e-9)
    with pytest.raises(InvalidParameterError):
        compound_binomial(mu, -0.1)


# --- Total variation ---

def test_total_variation_examples():
    law = poisson(2.0)
    assert tv_distance(law, law) == 0.0
    assert tv_distance(dirac(0), dirac(1)) == 1.0
    assert tv_distance(binomial(1, 0.5), binomial(1, 0.25)) == pytest.approx(0.25)
    assert tv_max_event(binomial(1, 0.5), binomial(1, 0.25)) == pytest.approx(0.25)
    assert tv_error_bound(poisson(1.0), dirac(0)) == poisson(1.0).tail_bound


def test_total_variation_matches_max_event_for_probabilities():
    mu, nu = poisson(1.3), nu_measure(3, 0.5, 0.4)
    assert tv_max_event(mu, nu) == pytest.approx(tv_distance(mu, nu), abs=1e-9)


# --- Empirical statistics ---

def test_ecdf():
    cdf = ecdf([1, 2, 3])
    assert cdf(2) == pytest.approx(2 / 3)
    assert cdf(0.5) == 0.0
    assert cdf(3) == 1.0
    assert list(cdf(np.array([1.5, 2.5]))) == pytest.approx([1 / 3, 2 / 3])
    with pytest.raises(InvalidParameterError):
        ecdf([])


def test_ks_statistic_of_uniform_samples():
    samples = SeededStream(99).take(5000)
    assert ks_statistic(samples, "uniform") < 0.03
    assert ks_statistic([x * 0.5 for x in samples], "uniform") > 0.4


def test_censored_ks_without_censoring_is_plain_ks():
    samples = SeededStream(5).take(500)
    plain = ks_statistic(samples, "uniform")
    assert censored_ks_statistic(samples, [False] * 500, "uniform") == pytest.approx(plain, abs=1e-12)
    assert censored_ks_statistic(samples, [False] * 500, "uniform", bound="lower") == pytest.approx(plain, abs=1e-12)


def test_censored_ks_keeps_upper_bounds():
    # точки меньше 1/8 известны только сверху: значение ≤ 1/8
    values = np.random.default_rng(3).exponential(size=4000)
    censored = values < 0.125
    recorded = np.where(censored, 0.125, values)
    assert censored_ks_statistic(recorded, censored, exponential().cdf) < 0.04
    # если отбросить цензурированные испытания, эмпирическая функция сдвигается на их долю
    assert ks_statistic(values[~censored], exponential().cdf) > 0.08


def test_censored_ks_keeps_lower_bounds():
    values = np.asarray(SeededStream(11).take(5000))
    censored = values > 0.9
    recorded = np.where(censored, 0.9, values)
    assert censored_ks_statistic(recorded, censored, "uniform", bound="lower") < 0.04
    assert censored_ks_statistic(recorded, censored, "uniform", bound="upper") > 0.05


def test_censored_ks_arguments():
    with pytest.raises(InvalidParameterError):
        censored_ks_statistic([0.5], [False], "uniform", bound="both")
    with pytest.raises(InvalidParameterError):
        censored_ks_statistic([0.5, 0.6], [False], "uniform")
    with pytest.raises(InvalidParameterError):
        censored_ks_statistic([], [], "uniform")


def test_counting_tally():
    counts = counting_tally([[0.5, 1.5], [2.5]], [1, 2, 3])
    assert counts.tolist() == [[1, 2, 2], [0, 0, 1]]
    with pytest.raises(InvalidParameterError):
        counting_tally([], [1])


def test_counting_tally_of_a_poisson_process():
    rng = np.random.default_rng(0)
    point_sets = [np.cumsum(rng.exponential(size=12)) for _ in range(4000)]
    counts = counting_tally(point_sets, [1.0, 2.0])
    assert counts.mean(axis=0) == pytest.approx([1.0, 2.0], abs=0.08)
    law = empirical_measure(counts[:, 0])
    assert tv_distance(law, poisson(1.0)) < 0.03


def test_chi_square():
    assert chi_square([25, 50, 25], [0.25, 0.5, 0.25]) == pytest.approx(0.0)
    assert chi_square([50, 0, 50], [0.25, 0.5, 0.25]) > 50
    with pytest.raises(InvalidParameterError):
        chi_square([1, 2], [1.0])


def test_empirical_measure():
    assert empirical_measure([0, 0, 1, 3]).to_list() == [0.5, 0.25, 0.0, 0.25]
    with pytest.raises(InvalidParameterError):
        empirical_measure([-1, 2])
    with pytest.raises(InvalidParameterError):
        empirical_measure([0.5])


# --- Censored samples ---

def test_interval_logic():
    # цензурированное значение: только нижняя граница
    assert at_least(5, False, 3) is True
    assert at_least(2, False, 3) is False
    assert at_least(2, True, 3) is None
    assert at_least(5, True, 3) is True
    assert at_most(2, False, 3) is True
    assert at_most(4, False, 3) is False
    assert at_most(2, True, 3) is None
    assert at_most(4, True, 3) is False


def test_censored_proportion():
    estimate = censored_proportion([True, None, False, True])
    assert (estimate.definite, estimate.ambiguous, estimate.total) == (2, 1, 4)
    assert estimate.lower == 0.5
    assert estimate.upper == 0.75
    assert estimate.estimate == 0.625
    assert estimate.ambiguous_rate == 0.25
    assert estimate.decided == pytest.approx(2 / 3)
    assert censored_proportion([None, None]).decided is None
    assert estimate.to_dict()["trials"] == 4
    with pytest.raises(InvalidParameterError):
        censored_proportion([])


def test_proportion_standard_error():
    assert proportion_standard_error(0.5, 100) == pytest.approx(0.05)
    with pytest.raises(InvalidParameterError):
        proportion_standard_error(0.5, 0)
