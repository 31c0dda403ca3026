"""
Replication simulator ("dance of the p-values") and its analytic oracles.

Every experiment draws from its own substream, seeded by mixing the run seed
with the experiment index, so a run is bit-identical whatever the number of
worker threads.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, field
from functools import partial
import io
import json
import math
import operator
import logging

import numpy as np
import pandas as pd

from .descriptive import Sample
from .effects import ComparisonConfig, VARIANCE_MODELS, compare_independent
from .exceptions import ConfigError, DomainError
from .specfun import norm_cdf, t_quantile

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# (glyph, operator, limit): first rule that holds wins, boundaries go upward.
SIGNIFICANCE_BANDS = [
    ('***', operator.lt, 0.001),
    ('**',  operator.lt, 0.01),
    ('*',   operator.lt, 0.05),
    ('?',   operator.lt, 0.10),
]
NOT_SIGNIFICANT = 'ns'
SIGNIFICANCE_CATEGORIES = tuple(glyph for glyph, _, _ in SIGNIFICANCE_BANDS) + (NOT_SIGNIFICANT,)

CSV_COLUMNS = ['index', 'diff', 'ci_low', 'ci_high', 'p_value', 'sig_category']


def significance_category(p_value: float) -> str:
    """
    Caption band of a p-value.

    Examples:
        >>> significance_category(0.05)
        '?'
        >>> significance_category(0.0004)
        '***'
    """
    for glyph, op, limit in SIGNIFICANCE_BANDS:
        if op(p_value, limit):
            return glyph
    return NOT_SIGNIFICANT


def splitmix64(state: int) -> int:
    """SplitMix64 output function applied to a 64-bit state."""
    z = state & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_seed(seed: int, index: int) -> int:
    """mix(seed, i) = splitmix64(seed + (i + 1)·0x9E3779B97F4A7C15 mod 2⁶⁴)."""
    return splitmix64((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


class PolarNormalStream:
    """
    Standard normal variates from a PCG64 bit generator via the polar method.

    Uniforms are built from raw 64-bit outputs as (raw >> 11)·2⁻⁵³, so the
    stream depends only on the PCG64 algorithm and the seed.
    """

    def __init__(self, seed: int):
        self._bits = np.random.PCG64(seed)

    def uniforms(self, count: int) -> np.ndarray:
        raw = self._bits.random_raw(count)
        return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)

    def normals(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.float64)
        filled = 0
        while filled < count:
            needed = count - filled
            pairs = int((needed // 2 + 1) * 1.3) + 4
            u = 2.0 * self.uniforms(2 * pairs) - 1.0
            v1, v2 = u[0::2], u[1::2]
            s = v1 * v1 + v2 * v2
            accepted = (s > 0.0) & (s < 1.0)
            v1, v2, s = v1[accepted], v2[accepted], s[accepted]
            factor = np.sqrt(-2.0 * np.log(s) / s)
            z = np.column_stack((v1 * factor, v2 * factor)).ravel()
            take = min(z.size, needed)
            out[filled:filled + take] = z[:take]
            filled += take
        return out


@dataclass(frozen=True)
class DanceConfig:
    """
    Replication experiment settings.

    Attributes:
        n_experiments (int): Number of replications. Defaults to 25.
        n_per_group (int): Size of each of the two samples. Defaults to 20.
        sigma (float): Common population SD. Defaults to 20.
        delta_mu (float): Difference of population means. Defaults to 10.
        alpha (float): Significance level used for the summary count.
        ci_level (float): Level of the per-experiment CI. Defaults to 0.95.
        seed (int): Required 64-bit unsigned seed; there is no time-based default.
        variance_model (str): 'pooled' (default) or 'welch'.
    """

    n_experiments: int = 25
    n_per_group: int = 20
    sigma: float = 20.0
    delta_mu: float = 10.0
    alpha: float = 0.05
    ci_level: float = 0.95
    seed: int | None = None
    variance_model: str = 'pooled'

    def __post_init__(self):
        if self.seed is None:
            raise ConfigError('an explicit seed is required for the replication simulator')
        if not (0 <= int(self.seed) <= MASK64) or int(self.seed) != self.seed:
            raise ConfigError(f'seed must be a 64-bit unsigned integer, got {self.seed!r}')
        if int(self.n_experiments) != self.n_experiments or self.n_experiments < 1:
            raise ConfigError(f'n_experiments must be a positive integer, got {self.n_experiments!r}')
        if int(self.n_per_group) != self.n_per_group or self.n_per_group < 2:
            raise ConfigError(f'n_per_group must be an integer >= 2, got {self.n_per_group!r}')
        if not (self.sigma > 0) or math.isinf(self.sigma):
            raise ConfigError(f'sigma must be positive, got {self.sigma!r}')
        if not math.isfinite(self.delta_mu):
            raise ConfigError(f'delta_mu must be finite, got {self.delta_mu!r}')
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError(f'alpha must lie in (0, 1), got {self.alpha!r}')
        if not (0.5 < self.ci_level < 1.0):
            raise ConfigError(f'ci_level must satisfy 0.5 < ci_level < 1, got {self.ci_level!r}')
        if self.variance_model not in VARIANCE_MODELS:
            raise ConfigError(f'variance_model must be one of {", ".join(VARIANCE_MODELS)}')

    @property
    def standardized_effect(self) -> float:
        return self.delta_mu / self.sigma

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DanceRecord:
    index: int
    diff: float
    ci_low: float
    ci_high: float
    p_value: float
    sig_category: str


@dataclass(frozen=True)
class DanceSummary:
    n_experiments: int
    count_significant: int
    ci_capture_count: int
    mean_diff_of_diffs: float
    category_counts: dict = field(default_factory=dict)

    @property
    def significant_fraction(self) -> float:
        return self.count_significant / self.n_experiments

    @property
    def capture_rate(self) -> float:
        return self.ci_capture_count / self.n_experiments

    def to_dict(self) -> dict:
        data = asdict(self)
        data['significant_fraction'] = self.significant_fraction
        data['capture_rate'] = self.capture_rate
        return data


@dataclass(frozen=True)
class DanceResult:
    config: DanceConfig
    records: tuple[DanceRecord, ...]
    summary: DanceSummary

    def __len__(self) -> int:
        return len(self.records)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.records], columns=CSV_COLUMNS)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index=False, lineterminator='\n')
        return buffer.getvalue()

    def to_json(self) -> str:
        payload = {
            'config': self.config.to_dict(),
            'summary': self.summary.to_dict(),
            'experiments': [asdict(r) for r in self.records],
        }
        return json.dumps(payload, indent=2) + '\n'


def _run_experiment(cfg: DanceConfig, comparison: ComparisonConfig, index: int) -> DanceRecord:
    n = cfg.n_per_group
    z = PolarNormalStream(substream_seed(cfg.seed, index)).normals(2 * n)
    control = Sample(cfg.sigma * z[:n], label='control')
    treated = Sample(cfg.delta_mu + cfg.sigma * z[n:], label='treated')
    result = compare_independent(control, treated, comparison, name=f'experiment {index + 1}')
    return DanceRecord(
        index=index + 1,
        diff=result.diff,
        ci_low=result.ci_low,
        ci_high=result.ci_high,
        p_value=result.p_value,
        sig_category=significance_category(result.p_value),
    )


def summarize_dance(records, cfg: DanceConfig) -> DanceSummary:
    counts = {glyph: 0 for glyph in SIGNIFICANCE_CATEGORIES}
    for record in records:
        counts[record.sig_category] += 1
    return DanceSummary(
        n_experiments=len(records),
        count_significant=sum(1 for r in records if r.p_value < cfg.alpha),
        ci_capture_count=sum(1 for r in records if r.ci_low <= cfg.delta_mu <= r.ci_high),
        mean_diff_of_diffs=math.fsum(r.diff for r in records) / len(records),
        category_counts=counts,
    )


def run_dance(cfg: DanceConfig, workers: int = 1) -> DanceResult:
    """
    Run cfg.n_experiments replications of the two-group experiment.

    Each replication draws N(0, σ) and N(Δμ, σ) samples of size n from its
    own substream, runs compare_independent and records the caption band of
    its p-value.

    Args:
        cfg (DanceConfig): Experiment settings (seed required).
        workers (int): Threads used to run experiments; the output does not
            depend on it.

    Returns:
        DanceResult: Per-experiment records in index order plus the summary.
    """
    if workers < 1:
        raise ConfigError(f'workers must be >= 1, got {workers!r}')
    comparison = ComparisonConfig(ci_level=cfg.ci_level, variance_model=cfg.variance_model)
    task = partial(_run_experiment, cfg, comparison)
    indices = range(cfg.n_experiments)

    if workers == 1:
        records = tuple(map(task, indices))
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = tuple(executor.map(task, indices))

    summary = summarize_dance(records, cfg)
    logger.info(
        f'Dance concluída: {summary.count_significant}/{summary.n_experiments} significativos, '
        f'captura do IC {summary.ci_capture_count}/{summary.n_experiments}'
    )
    return DanceResult(config=cfg, records=records, summary=summary)


def _check_probability(name: str, value: float, allow_one: bool = False) -> None:
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not (value > 0.0 and upper_ok):
        interval = '(0, 1]' if allow_one else '(0, 1)'
        raise DomainError(f'{name} must lie in {interval}, got {value!r}')


def theoretical_power(d: float, n_per_group: int, alpha: float = 0.05, method: str = 'corrected') -> float:
    """
    Normal approximation to the power of the two-sided two-sample t test.

    With ncp = d·√(n/2), df = 2n − 2 and t_crit = t_quantile(1 − α/2, df):

    - 'simple': (1 − Φ(t_crit − ncp)) + Φ(−t_crit − ncp)
    - 'corrected' (default): the same with t_crit·(1 − 1/(4df)) in place of
      t_crit and the argument divided by √(1 + t_crit²/(2df)); it tracks the
      exact noncentral t power to within 0.01 for d in [0, 1.5], n >= 10.

    Raises:
        DomainError: n_per_group < 2 or alpha outside (0, 1).
    """
    if int(n_per_group) != n_per_group or n_per_group < 2:
        raise DomainError(f'n_per_group must be an integer >= 2, got {n_per_group!r}')
    _check_probability('alpha', alpha)
    if not math.isfinite(d):
        raise DomainError(f'effect size must be finite, got {d!r}')

    df = 2 * n_per_group - 2
    ncp = d * math.sqrt(n_per_group / 2.0)
    t_crit = t_quantile(1.0 - alpha / 2.0, df)

    if method == 'simple':
        return (1.0 - norm_cdf(t_crit - ncp)) + norm_cdf(-t_crit - ncp)
    if method != 'corrected':
        raise ConfigError(f'unknown power method {method!r}')

    shifted = t_crit * (1.0 - 1.0 / (4.0 * df))
    scale = math.sqrt(1.0 + t_crit * t_crit / (2.0 * df))
    return norm_cdf((ncp - shifted) / scale) + norm_cdf((-ncp - shifted) / scale)


def monte_carlo_power(d: float, n_per_group: int, alpha: float = 0.05,
                      replicates: int = 10000, seed: int = 0, workers: int = 1) -> float:
    """Fraction of seeded replications with p < alpha (oracle for theoretical_power)."""
    cfg = DanceConfig(
        n_experiments=replicates, n_per_group=n_per_group, sigma=1.0,
        delta_mu=d, alpha=alpha, seed=seed,
    )
    return run_dance(cfg, workers=workers).summary.significant_fraction


def false_discovery_rate(prior_real_effect: float, alpha: float, power: float) -> float:
    """
    Share of "significant" findings that are false positives.

    FDR = α(1 − π₁) / (α(1 − π₁) + power·π₁), π₁ the prior share of real effects.

    Examples:
        >>> round(false_discovery_rate(0.1, 0.05, 0.8), 2)
        0.36
    """
    _check_probability('prior_real_effect', prior_real_effect, allow_one=True)
    _check_probability('alpha', alpha)
    _check_probability('power', power, allow_one=True)
    false_positives = alpha * (1.0 - prior_real_effect)
    return false_positives / (false_positives + power * prior_real_effect)
