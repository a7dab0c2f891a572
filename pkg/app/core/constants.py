"""
Numeric constants and defaults shared by the simulation services and the experiment drivers.
"""

# Вероятностные меры
PROBABILITY_MASS_TOLERANCE = 1e-10
POISSON_TAIL_CUTOFF = 1e-12
NU_SERIES_RELATIVE_EPS = 1e-18
NU_MAX_SUPPORT = 10_000

# Цензурирование траекторий
DEFAULT_T_MAX_SCALE = 64
DEFAULT_T_MAX_OFFSET = 1_000_000
CENSORING_WARNING_RATE = 0.05

# Размер блока случайных чисел, которые генерируются за один вызов numpy
STREAM_BLOCK_SIZE = 4096

# Формат отчётов
SCHEMA_VERSION = 1
CSV_FLOAT_FORMAT = "%.17g"

# Пороги приёмки по умолчанию (переопределяются через ExperimentConfig.thresholds)
DEFAULT_THRESHOLDS: dict[str, float] = {
    "frechet_cdf_abs": 0.03,
    "uniform_ks": 0.04,
    "powerlaw_abs": 0.03,
    "exp_ks": 0.04,
    "tail_rel": 0.2,
    "tail_ambiguous": 0.01,
    "okounkov_abs": 0.15,
    "fixed_time_tv": 0.05,
    "delazy_band": 0.25,
    "delazy_rate": 0.05,
}


def default_t_max(m: int) -> int:
    """Default censoring horizon 64·m² + 10⁶ for an augmented process initiated at time m."""
    return DEFAULT_T_MAX_SCALE * m * m + DEFAULT_T_MAX_OFFSET

# Имена экспериментов команды `bump`
EXPERIMENT_NAMES = (
    "frechet-cdf",
    "poisson-points",
    "powerlaw-ratios",
    "tail-y0",
    "tail-t0",
    "okounkov-row",
    "fixed-time",
    "lazy-poisson",
    "transition-conjecture",
    "surface-2d",
    "bumping-tree",
    "projective",
    "binomial-thinning",
)
