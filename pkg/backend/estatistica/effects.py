from dataclasses import dataclass, asdict
import math
import logging

from .descriptive import (
    Sample, SampleSummary, summarize, require_size, log_transform, back_transform_pct,
)
from .exceptions import (
    ConfigError, DegenerateVarianceError, InfiniteEffectError, LengthMismatchError,
)
from .specfun import t_cdf, t_quantile, norm_quantile

logger = logging.getLogger(__name__)

VARIANCE_MODELS = ('welch', 'pooled')
STANDARDIZERS = ('baseline-sd', 'diff-sd')

ES_METHOD_NORMAL = 'normal-approximation'
ES_METHOD_STANDARDIZED_CI = 'standardized-ci'


@dataclass(frozen=True)
class ComparisonConfig:
    """
    Options shared by the two-group and paired comparisons.

    Attributes:
        ci_level (float): Confidence level, 0.5 < ci_level < 1. Defaults to 0.90.
        variance_model (str): 'welch' (default) or 'pooled'; independent groups only.
        use_log_scale (bool): Analyse natural logs and report percent effects.
        standardizer (str): Paired effect-size denominator, 'baseline-sd' (SD of
            the pre scores, default) or 'diff-sd' (SD of the differences).
        hedges_correction (bool): Apply the small-sample correction to d.
    """

    ci_level: float = 0.90
    variance_model: str = 'welch'
    use_log_scale: bool = False
    standardizer: str = 'baseline-sd'
    hedges_correction: bool = False

    def __post_init__(self):
        if not (0.5 < self.ci_level < 1.0):
            raise ConfigError(f'ci_level must satisfy 0.5 < ci_level < 1, got {self.ci_level!r}')
        if self.variance_model not in VARIANCE_MODELS:
            raise ConfigError(
                f'variance_model must be one of {", ".join(VARIANCE_MODELS)}, got {self.variance_model!r}'
            )
        if self.standardizer not in STANDARDIZERS:
            raise ConfigError(
                f'standardizer must be one of {", ".join(STANDARDIZERS)}, got {self.standardizer!r}'
            )

    @property
    def t_probability(self) -> float:
        return (1.0 + self.ci_level) / 2.0


@dataclass(frozen=True)
class EffectSize:
    effect: float
    ci_low: float
    ci_high: float
    standardizer: float
    se: float


@dataclass(frozen=True)
class ComparisonResult:
    """
    Everything one comparison reports: difference ± CI, p, %difference and
    standardized effect ± CI.

    Units of diff, ci bounds, se and standardizer are those of the analysed
    data (natural-log units when log_scale is set). Summaries are always of
    the raw data.
    """

    diff: float
    ci_low: float
    ci_high: float
    se: float
    t_stat: float | None
    df: float
    p_value: float
    effect_size: float | None
    es_ci_low: float | None
    es_ci_high: float | None
    standardizer: float
    standardizer_kind: str
    summary_a: SampleSummary
    summary_b: SampleSummary
    ci_level: float
    variance_model: str
    log_scale: bool = False
    paired: bool = False
    pct_diff: float | None = None
    pct_ci_low: float | None = None
    pct_ci_high: float | None = None
    es_method: str = ES_METHOD_NORMAL
    hedges_correction: bool = False
    name: str = ''

    @property
    def ci_halfwidth(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0

    @property
    def has_effect_size(self) -> bool:
        return self.effect_size is not None

    def to_dict(self) -> dict:
        data = asdict(self)
        data['summary_a'] = self.summary_a.to_dict()
        data['summary_b'] = self.summary_b.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'ComparisonResult':
        fields = dict(data)
        fields['summary_a'] = SampleSummary.from_dict(fields['summary_a'])
        fields['summary_b'] = SampleSummary.from_dict(fields['summary_b'])
        return cls(**fields)


def _two_tailed_p(t_stat: float, df: float) -> float:
    if t_stat == 0.0:
        return 1.0
    return min(1.0, 2.0 * t_cdf(-abs(t_stat), df))


def _pooled_variance(first: SampleSummary, second: SampleSummary) -> float:
    return (
        (first.n - 1) * first.sd ** 2 + (second.n - 1) * second.sd ** 2
    ) / (first.n + second.n - 2)


def welch_df(first: SampleSummary, second: SampleSummary) -> float:
    """Welch–Satterthwaite degrees of freedom; n₁+n₂−2 when both variances are zero."""
    va = first.sd ** 2 / first.n
    vb = second.sd ** 2 / second.n
    denominator = va ** 2 / (first.n - 1) + vb ** 2 / (second.n - 1)
    if denominator == 0.0:
        return float(first.n + second.n - 2)
    return (va + vb) ** 2 / denominator


def _hedges_factor(df: float) -> float:
    return 1.0 - 3.0 / (4.0 * df - 1.0)


def cohens_d(a: Sample, b: Sample, ci_level: float = 0.90, hedges_correction: bool = False) -> EffectSize:
    """
    Standardized mean difference (mean(b) − mean(a)) / pooled SD.

    The CI uses the normal-approximation standard error
    se_d = √((n₁+n₂)/(n₁n₂) + d²/(2(n₁+n₂))) with z = norm_quantile((1+level)/2).

    Args:
        a (Sample): Reference group.
        b (Sample): Comparison group.
        ci_level (float): Confidence level of the interval.
        hedges_correction (bool): Multiply d and se_d by J = 1 − 3/(4·df − 1).

    Returns:
        EffectSize: d, its CI, the pooled SD and se_d.

    Raises:
        InsufficientDataError: If either group has fewer than two values.
        InfiniteEffectError: If the pooled SD is zero while the means differ.
    """
    require_size(a)
    require_size(b)
    sa, sb = summarize(a), summarize(b)
    return _cohens_d(sa, sb, ci_level, hedges_correction)


def _cohens_d(sa: SampleSummary, sb: SampleSummary, ci_level: float, hedges_correction: bool) -> EffectSize:
    diff = sb.mean - sa.mean
    pooled_sd = math.sqrt(_pooled_variance(sa, sb))
    if pooled_sd == 0.0:
        if diff != 0.0:
            raise InfiniteEffectError(
                f'pooled SD is zero while the means differ by {diff!r}; the standardized effect is infinite'
            )
        d = 0.0
    else:
        d = diff / pooled_sd

    n1, n2 = sa.n, sb.n
    se_d = math.sqrt((n1 + n2) / (n1 * n2) + d * d / (2.0 * (n1 + n2)))
    if hedges_correction:
        factor = _hedges_factor(n1 + n2 - 2)
        d *= factor
        se_d *= factor

    z = norm_quantile((1.0 + ci_level) / 2.0)
    return EffectSize(effect=d, ci_low=d - z * se_d, ci_high=d + z * se_d,
                      standardizer=pooled_sd, se=se_d)


def _percent_fields(diff: float, ci_low: float, ci_high: float) -> dict:
    pct, pct_low, pct_high = back_transform_pct(diff, ci_low, ci_high)
    return {'pct_diff': pct, 'pct_ci_low': pct_low, 'pct_ci_high': pct_high}


def compare_independent(a: Sample, b: Sample, cfg: ComparisonConfig | None = None, name: str = '') -> ComparisonResult:
    """
    Two independent groups: diff = mean(b) − mean(a).

    Standard error and df follow cfg.variance_model (Welch–Satterthwaite or
    pooled with n₁+n₂−2). CI = diff ± t·se; p is two-tailed. When
    cfg.use_log_scale is set the analysis runs on natural logs and the
    percent fields are filled by back-transformation.

    Raises:
        InsufficientDataError: Fewer than two values in a group.
        NonPositiveValueError: Log scale requested on data with values <= 0.
        DegenerateVarianceError: Zero standard error with a nonzero difference.
    """
    cfg = cfg or ComparisonConfig()
    require_size(a)
    require_size(b)
    raw_a, raw_b = summarize(a), summarize(b)

    if cfg.use_log_scale:
        a, b = log_transform(a), log_transform(b)
        sa, sb = summarize(a), summarize(b)
    else:
        sa, sb = raw_a, raw_b

    diff = sb.mean - sa.mean
    if cfg.variance_model == 'pooled':
        df = float(sa.n + sb.n - 2)
        se = math.sqrt(_pooled_variance(sa, sb) * (1.0 / sa.n + 1.0 / sb.n))
    else:
        df = welch_df(sa, sb)
        se = math.sqrt(sa.sd ** 2 / sa.n + sb.sd ** 2 / sb.n)

    if se == 0.0:
        if diff != 0.0:
            raise DegenerateVarianceError(
                f'both groups have zero variance but their means differ by {diff!r}'
            )
        t_stat, p_value, half = 0.0, 1.0, 0.0
    else:
        t_stat = diff / se
        p_value = _two_tailed_p(t_stat, df)
        half = t_quantile(cfg.t_probability, df) * se

    effect = _cohens_d(sa, sb, cfg.ci_level, cfg.hedges_correction)

    extra = _percent_fields(diff, diff - half, diff + half) if cfg.use_log_scale else {}
    result = ComparisonResult(
        diff=diff, ci_low=diff - half, ci_high=diff + half, se=se, t_stat=t_stat, df=df,
        p_value=p_value, effect_size=effect.effect, es_ci_low=effect.ci_low,
        es_ci_high=effect.ci_high, standardizer=effect.standardizer,
        standardizer_kind='pooled-sd', summary_a=raw_a, summary_b=raw_b,
        ci_level=cfg.ci_level, variance_model=cfg.variance_model,
        log_scale=cfg.use_log_scale, hedges_correction=cfg.hedges_correction,
        name=name, **extra,
    )
    logger.info(
        f'Comparação independente "{name}": diff={diff:.6g}, df={df:.4g}, p={p_value:.4g}, d={effect.effect:.4g}'
    )
    return result


def compare_paired(pre: Sample, post: Sample, cfg: ComparisonConfig | None = None, name: str = '') -> ComparisonResult:
    """
    Paired (pre/post) comparison on element-wise differences post − pre.

    df = n − 1 and se = sd(differences)/√n. The effect size divides the
    difference by cfg.standardizer (SD of the pre scores by default) and
    its CI is the raw CI standardized by the same SD.

    When the differences have zero spread the CI collapses onto diff and
    p is 0 (1 when diff is 0). A zero standardizer leaves the effect-size
    fields as None.

    Raises:
        LengthMismatchError: Samples of different lengths.
        InsufficientDataError: Fewer than two pairs.
        NonPositiveValueError: Log scale requested on data with values <= 0.
    """
    cfg = cfg or ComparisonConfig()
    if pre.n != post.n:
        raise LengthMismatchError(
            f'paired samples differ in length: pre has {pre.n}, post has {post.n}'
        )
    require_size(pre)
    raw_pre, raw_post = summarize(pre), summarize(post)

    if cfg.use_log_scale:
        pre, post = log_transform(pre), log_transform(post)

    differences = Sample(post.values - pre.values, label=f'{name} differences')
    sd_summary = summarize(differences)
    diff = sd_summary.mean
    se = sd_summary.sem
    df = float(sd_summary.n - 1)

    if se == 0.0:
        t_stat = 0.0 if diff == 0.0 else None
        p_value = 1.0 if diff == 0.0 else 0.0
        half = 0.0
    else:
        t_stat = diff / se
        p_value = _two_tailed_p(t_stat, df)
        half = t_quantile(cfg.t_probability, df) * se
    ci_low, ci_high = diff - half, diff + half

    if cfg.standardizer == 'diff-sd':
        standardizer = sd_summary.sd
    else:
        standardizer = summarize(pre).sd

    if standardizer > 0.0:
        factor = _hedges_factor(df) if cfg.hedges_correction and df > 1 else 1.0
        effect_size = factor * diff / standardizer
        es_ci_low = factor * ci_low / standardizer
        es_ci_high = factor * ci_high / standardizer
    else:
        logger.warning(
            f'Comparação pareada "{name}": {cfg.standardizer} é zero, tamanho do efeito indefinido'
        )
        effect_size = es_ci_low = es_ci_high = None

    extra = _percent_fields(diff, ci_low, ci_high) if cfg.use_log_scale else {}
    result = ComparisonResult(
        diff=diff, ci_low=ci_low, ci_high=ci_high, se=se, t_stat=t_stat, df=df,
        p_value=p_value, effect_size=effect_size, es_ci_low=es_ci_low, es_ci_high=es_ci_high,
        standardizer=standardizer, standardizer_kind=cfg.standardizer,
        summary_a=raw_pre, summary_b=raw_post, ci_level=cfg.ci_level,
        variance_model='paired', log_scale=cfg.use_log_scale, paired=True,
        es_method=ES_METHOD_STANDARDIZED_CI, hedges_correction=cfg.hedges_correction,
        name=name, **extra,
    )
    logger.info(f'Comparação pareada "{name}": diff={diff:.6g}, df={df:g}, p={p_value:.4g}')
    return result
