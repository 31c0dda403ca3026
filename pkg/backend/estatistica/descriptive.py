"""Sample summaries and the log-scale machinery for heteroscedastic data."""
from dataclasses import dataclass
from typing import Iterable
import math
import logging

import numpy as np

from .exceptions import DomainError, InsufficientDataError, NonPositiveValueError
from .specfun import t_quantile

logger = logging.getLogger(__name__)

LOG_SUFFIX = ' (log)'


@dataclass(frozen=True, eq=False)
class Sample:
    """
    Ordered collection of real-valued observations.

    Attributes:
        values (np.ndarray): Finite observations, read-only copy of the input.
        label (str): Short name used in tables and plots.
        group (str | None): Optional group tag from long-format input.
    """

    values: np.ndarray
    label: str = ''
    group: str | None = None
    log_scale: bool = False

    def __post_init__(self):
        array = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(array)):
            bad = int(np.flatnonzero(~np.isfinite(array))[0])
            raise DomainError(
                f'sample "{self.label}" has a non-finite value at index {bad}'
            )
        array.setflags(write=False)
        object.__setattr__(self, 'values', array)

    @classmethod
    def from_values(cls, values: Iterable[float], label: str = '', group: str | None = None) -> 'Sample':
        return cls(np.fromiter((float(v) for v in values), dtype=float), label=label, group=group)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def n(self) -> int:
        return len(self)


@dataclass(frozen=True)
class SampleSummary:
    """Média ± DP of one sample, plus its standard error."""

    n: int
    mean: float
    sd: float
    sem: float

    def to_dict(self) -> dict:
        return {'n': self.n, 'mean': self.mean, 'sd': self.sd, 'sem': self.sem}

    @classmethod
    def from_dict(cls, data: dict) -> 'SampleSummary':
        return cls(n=int(data['n']), mean=float(data['mean']),
                   sd=float(data['sd']), sem=float(data['sem']))


def require_size(sample: Sample, minimum: int = 2) -> None:
    if sample.n < minimum:
        raise InsufficientDataError(
            f'sample "{sample.label}" has {sample.n} value(s); at least {minimum} required'
        )


def summarize(sample: Sample) -> SampleSummary:
    """
    Mean, sample standard deviation (n-1 denominator) and standard error.

    numpy's two-pass mean/deviation keeps large-mean data free of
    catastrophic cancellation.

    Raises:
        InsufficientDataError: If the sample has fewer than two values.

    Examples:
        >>> summarize(Sample.from_values([1, 2, 3]))
        SampleSummary(n=3, mean=2.0, sd=1.0, sem=0.5773502691896258)
    """
    require_size(sample)
    values = sample.values
    n = sample.n
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    return SampleSummary(n=n, mean=mean, sd=sd, sem=sd / math.sqrt(n))


def mean_ci(summary: SampleSummary, ci_level: float) -> tuple[float, float]:
    """Confidence interval of the mean with n-1 degrees of freedom."""
    if not (0.0 < ci_level < 1.0):
        raise DomainError(f'ci_level must lie in (0, 1), got {ci_level!r}')
    if summary.n < 2 or summary.sem == 0.0:
        return summary.mean, summary.mean
    half = t_quantile((1.0 + ci_level) / 2.0, summary.n - 1) * summary.sem
    return summary.mean - half, summary.mean + half


def log_transform(sample: Sample) -> Sample:
    """
    Element-wise natural logarithm.

    Zero or negative values abort the log pathway; no offset is applied.

    Raises:
        NonPositiveValueError: Names the index of the first offending value.
    """
    nonpositive = np.flatnonzero(sample.values <= 0)
    if nonpositive.size:
        index = int(nonpositive[0])
        raise NonPositiveValueError(index, float(sample.values[index]), sample.label)

    label = sample.label if sample.label.endswith(LOG_SUFFIX) else f'{sample.label}{LOG_SUFFIX}'
    return Sample(np.log(sample.values), label=label, group=sample.group, log_scale=True)


def to_percent(log_value: float) -> float:
    return 100.0 * math.expm1(log_value)


def back_transform_pct(log_effect: float, log_ci_low: float, log_ci_high: float) -> tuple[float, float, float]:
    """
    Map log-scale effect and bounds to percent effects, 100·(exp(x) − 1).

    Order is preserved; the bounds come back asymmetric about the effect.

    Examples:
        >>> back_transform_pct(0.0, 0.0, 0.0)
        (0.0, 0.0, 0.0)
    """
    for value in (log_effect, log_ci_low, log_ci_high):
        if not math.isfinite(value):
            raise DomainError(f'back_transform_pct needs finite values, got {value!r}')
    return to_percent(log_effect), to_percent(log_ci_low), to_percent(log_ci_high)


def pct_halfwidth(log_ci_low: float, log_ci_high: float) -> float:
    """The "±%" of a log-scale interval: 100·(exp(half-width) − 1)."""
    return to_percent((log_ci_high - log_ci_low) / 2.0)
