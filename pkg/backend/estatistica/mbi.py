"""
Magnitude-based inference.

Classifies standardized effects into magnitude bands and turns a comparison
into the chances that the true effect is negative, trivial or positive
relative to the smallest worthwhile change (SWC), with the qualitative
descriptor readers see in tables and plots.
"""
from dataclasses import dataclass, field, asdict
from typing import NamedTuple
import bisect
import math
import logging

from .effects import ComparisonResult
from .exceptions import ConfigError, DegenerateVarianceError, DomainError
from .specfun import t_cdf

logger = logging.getLogger(__name__)

NEGATIVE = 'negative'
TRIVIAL = 'trivial'
POSITIVE = 'positive'
UNCLEAR = 'unclear'
DIRECTIONS = (NEGATIVE, TRIVIAL, POSITIVE, UNCLEAR)

LOCALES = ('en', 'pt')
INFERENCE_MODES = ('mechanistic', 'clinical')

DIRECTION_WORDS = {
    'en': {NEGATIVE: 'negative', TRIVIAL: 'trivial', POSITIVE: 'positive', UNCLEAR: 'unclear'},
    'pt': {NEGATIVE: 'Negativo', TRIVIAL: 'Trivial', POSITIVE: 'Positivo', UNCLEAR: 'inconclusivo'},
}

# Clinical harm verdict when harm is not the most likely outcome.
CLINICAL_HARM_WORDS = {'en': 'possibly harmful', 'pt': 'possivelmente prejudicial'}


def _check_locale(locale: str) -> str:
    if locale not in LOCALES:
        raise ConfigError(f'locale must be one of {", ".join(LOCALES)}, got {locale!r}')
    return locale


@dataclass(frozen=True)
class MagnitudeScale:
    """
    Ordered |d| thresholds and the label of each band.

    Bands are lower-inclusive: with the defaults |d| < 0.2 is trivial and
    0.2 <= |d| < 0.6 is small.
    """

    thresholds: tuple[float, ...] = (0.2, 0.6, 1.2, 2.0)
    labels: tuple[str, ...] = ('trivial', 'small', 'moderate', 'large', 'very large')
    labels_pt: tuple[str, ...] = ('trivial', 'pequeno', 'moderado', 'grande', 'muito grande')

    def __post_init__(self):
        thresholds = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, 'thresholds', thresholds)
        object.__setattr__(self, 'labels', tuple(self.labels))
        object.__setattr__(self, 'labels_pt', tuple(self.labels_pt))

        if not thresholds:
            raise ConfigError('magnitude scale needs at least one threshold')
        if any(not (t > 0) or math.isinf(t) for t in thresholds):
            raise ConfigError(f'magnitude thresholds must be positive and finite, got {thresholds}')
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ConfigError(f'magnitude thresholds must be strictly increasing, got {thresholds}')
        for name in ('labels', 'labels_pt'):
            if len(getattr(self, name)) != len(thresholds) + 1:
                raise ConfigError(
                    f'magnitude scale needs {len(thresholds) + 1} {name}, got {len(getattr(self, name))}'
                )

    def label(self, index: int, locale: str = 'en') -> str:
        return (self.labels_pt if locale == 'pt' else self.labels)[index]

    def to_dict(self) -> dict:
        return {k: list(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> 'MagnitudeScale':
        return cls(**{k: tuple(v) for k, v in data.items()})


def classify_magnitude(d: float, scale: MagnitudeScale | None = None, locale: str = 'en') -> str:
    """
    Label of the band containing |d|.

    Examples:
        >>> classify_magnitude(1.2)
        'large'
        >>> classify_magnitude(-0.7)
        'moderate'
    """
    if not math.isfinite(d):
        raise DomainError(f'classify_magnitude needs a finite effect, got {d!r}')
    scale = scale or MagnitudeScale()
    return scale.label(bisect.bisect_right(scale.thresholds, abs(d)), locale)


@dataclass(frozen=True)
class Swc:
    """Smallest worthwhile change, in standardized units."""

    value: float = 0.20

    def __post_init__(self):
        if not (self.value > 0) or math.isinf(self.value):
            raise ConfigError(f'SWC must be positive, got {self.value!r}')

    @classmethod
    def from_raw(cls, raw: float, standardizer: float) -> 'Swc':
        if not (standardizer > 0):
            raise DegenerateVarianceError(
                f'cannot convert a raw SWC with standardizer {standardizer!r}'
            )
        return cls(raw / standardizer)

    def to_raw(self, standardizer: float) -> float:
        return self.value * standardizer


class ChanceTriplet(NamedTuple):
    p_negative: float
    p_trivial: float
    p_positive: float

    def chance_of(self, direction: str) -> float:
        return {NEGATIVE: self.p_negative, TRIVIAL: self.p_trivial, POSITIVE: self.p_positive}[direction]


def _check_triplet(chances) -> ChanceTriplet:
    chances = ChanceTriplet(*map(float, chances))
    if any(not (0.0 <= p <= 1.0) for p in chances):
        raise DomainError(f'chances must lie in [0, 1], got {tuple(chances)}')
    total = math.fsum(chances)
    if abs(total - 1.0) > 1e-9:
        raise DomainError(f'chances must sum to 1, got {total!r}')
    return chances


def normalize_chances(chances) -> ChanceTriplet:
    """Rescale a rounded triplet (e.g. 0.01 %, 1 %, 99 %) so it sums to 1."""
    values = [float(p) for p in chances]
    total = math.fsum(values)
    if not (total > 0):
        raise DomainError(f'cannot normalize chances summing to {total!r}')
    p_negative, p_positive = values[0] / total, values[2] / total
    return ChanceTriplet(p_negative, 1.0 - (p_negative + p_positive), p_positive)


def mbi_chances(effect: float, se: float, df: float, swc: 'Swc | float' = 0.2) -> ChanceTriplet:
    """
    Chances that the true effect is below −SWC, within ±SWC, or above +SWC.

    p_positive = 1 − T((swc − effect)/se), p_negative = T((−swc − effect)/se),
    p_trivial takes the remainder. effect, se and swc share units.

    Args:
        effect (float): Observed effect.
        se (float): Its standard error, > 0.
        df (float): Degrees of freedom of the t distribution.
        swc (Swc | float): Smallest worthwhile change.

    Raises:
        DomainError: If se <= 0.

    Examples:
        >>> [round(p, 3) for p in mbi_chances(0.5, 0.2, 38, 0.2)]
        [0.001, 0.071, 0.929]
    """
    swc_value = swc.value if isinstance(swc, Swc) else float(swc)
    if not (se > 0) or math.isinf(se):
        raise DomainError(f'standard error must be positive, got {se!r}')
    if not (swc_value > 0):
        raise DomainError(f'SWC must be positive, got {swc_value!r}')

    # T(x) for 1 - T(-x) keeps the upper tail precise.
    p_positive = min(1.0, max(0.0, t_cdf((effect - swc_value) / se, df)))
    p_negative = min(1.0, max(0.0, t_cdf((-swc_value - effect) / se, df)))
    p_trivial = min(1.0, max(0.0, 1.0 - (p_positive + p_negative)))
    return ChanceTriplet(p_negative, p_trivial, p_positive)


@dataclass(frozen=True)
class DescriptorLadder:
    """
    Words describing a chance, one per rung.

    A chance belongs to the rung whose lower bound it reaches (lower-inclusive).
    Chances are rounded to the reported precision (percent, two significant
    figures) before the lookup so the words always match the printed numbers.
    """

    thresholds: tuple[float, ...] = (0.01, 0.05, 0.25, 0.75, 0.95, 0.99)
    words: tuple[str, ...] = (
        'almost certainly not', 'very unlikely', 'unlikely', 'possibly',
        'likely', 'very likely', 'almost certainly',
    )
    words_pt: tuple[str, ...] = (
        'quase certamente não', 'muito improvavelmente', 'improvavelmente', 'possivelmente',
        'provavelmente', 'muito provavelmente', 'quase certamente',
    )
    name: str = 'figure'

    def __post_init__(self):
        thresholds = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, 'thresholds', thresholds)
        object.__setattr__(self, 'words', tuple(self.words))
        object.__setattr__(self, 'words_pt', tuple(self.words_pt))
        if any(not (0.0 < t < 1.0) for t in thresholds):
            raise ConfigError(f'ladder thresholds must lie in (0, 1), got {thresholds}')
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ConfigError(f'ladder thresholds must be strictly increasing, got {thresholds}')
        for name in ('words', 'words_pt'):
            if len(getattr(self, name)) != len(thresholds) + 1:
                raise ConfigError(
                    f'ladder needs {len(thresholds) + 1} {name}, got {len(getattr(self, name))}'
                )

    @classmethod
    def figure(cls) -> 'DescriptorLadder':
        return cls()

    @classmethod
    def progressive(cls) -> 'DescriptorLadder':
        return cls(
            thresholds=(0.005, 0.05, 0.25, 0.75, 0.95, 0.995),
            words=('most unlikely', 'very unlikely', 'unlikely', 'possibly',
                   'likely', 'very likely', 'almost certainly'),
            words_pt=('muitíssimo improvavelmente', 'muito improvavelmente', 'improvavelmente',
                      'possivelmente', 'provavelmente', 'muito provavelmente', 'quase certamente'),
            name='progressive',
        )

    @classmethod
    def preset(cls, name: str) -> 'DescriptorLadder':
        presets = {'figure': cls.figure, 'progressive': cls.progressive}
        if name not in presets:
            raise ConfigError(f'unknown ladder preset {name!r}; choose one of {", ".join(presets)}')
        return presets[name]()

    def word(self, chance: float, locale: str = 'en') -> str:
        rung = bisect.bisect_right(self.thresholds, round_chance(chance))
        return (self.words_pt if locale == 'pt' else self.words)[rung]

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ('thresholds', 'words', 'words_pt'):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'DescriptorLadder':
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})


def round_chance(chance: float, significant: int = 2) -> float:
    """Round a probability to `significant` figures of its percentage."""
    percent = chance * 100.0
    if percent <= 0.0:
        return 0.0
    digits = significant - 1 - math.floor(math.log10(percent))
    return round(percent, digits) / 100.0


def _dominant(chances: ChanceTriplet) -> str:
    # Ties resolve towards trivial, then positive.
    ordered = ((chances.p_trivial, TRIVIAL), (chances.p_positive, POSITIVE), (chances.p_negative, NEGATIVE))
    best_value, best_direction = ordered[0]
    for value, direction in ordered[1:]:
        if value > best_value:
            best_value, best_direction = value, direction
    return best_direction


def mechanistic_inference(chances, unclear_thresholds: tuple[float, float] = (0.05, 0.05)) -> str:
    """
    Clear/unclear verdict: unclear when both the positive and the negative
    chance exceed their thresholds, otherwise the dominant direction.

    Args:
        chances: (p_negative, p_trivial, p_positive).
        unclear_thresholds (tuple[float, float]): (positive, negative) limits.
    """
    chances = _check_triplet(chances)
    positive_limit, negative_limit = unclear_thresholds
    if chances.p_positive > positive_limit and chances.p_negative > negative_limit:
        return UNCLEAR
    return _dominant(chances)


def clinical_inference(chances, benefit_threshold: float = 0.25, harm_threshold: float = 0.005) -> str:
    """
    Clinical verdict: unclear when benefit is possible (> 25 %) while harm is
    not most unlikely (> 0.5 %); otherwise beneficial (positive) when benefit
    is possible, harmful (negative) when harm is not most unlikely, else trivial.
    """
    chances = _check_triplet(chances)
    if chances.p_positive > benefit_threshold and chances.p_negative > harm_threshold:
        return UNCLEAR
    if chances.p_positive > benefit_threshold:
        return POSITIVE
    if chances.p_negative > harm_threshold:
        return NEGATIVE
    return TRIVIAL


@dataclass(frozen=True)
class MbiConfig:
    """
    Inference options echoed into every report.

    Attributes:
        swc (float): Smallest worthwhile change in standardized units.
        swc_raw (float | None): Smallest worthwhile change in raw units. When set it
            replaces swc and is standardized per comparison.
        mode (str): 'mechanistic' (default) or 'clinical'.
        unclear_thresholds (tuple): (positive, negative) limits of the mechanistic rule.
        benefit_threshold (float): Clinical benefit limit.
        harm_threshold (float): Clinical harm limit.
        locale (str): 'en' or 'pt' descriptors.
    """

    swc: float = 0.20
    swc_raw: float | None = None
    scale: MagnitudeScale = field(default_factory=MagnitudeScale)
    ladder: DescriptorLadder = field(default_factory=DescriptorLadder)
    mode: str = 'mechanistic'
    unclear_thresholds: tuple[float, float] = (0.05, 0.05)
    benefit_threshold: float = 0.25
    harm_threshold: float = 0.005
    locale: str = 'en'

    def __post_init__(self):
        Swc(self.swc)
        if self.swc_raw is not None and (not (self.swc_raw > 0) or math.isinf(self.swc_raw)):
            raise ConfigError(f'raw SWC must be positive, got {self.swc_raw!r}')
        _check_locale(self.locale)
        if self.mode not in INFERENCE_MODES:
            raise ConfigError(f'mode must be one of {", ".join(INFERENCE_MODES)}, got {self.mode!r}')
        limits = tuple(float(v) for v in self.unclear_thresholds)
        if len(limits) != 2 or any(not (0.0 < v < 1.0) for v in limits):
            raise ConfigError(f'unclear thresholds must be two probabilities in (0, 1), got {self.unclear_thresholds}')
        object.__setattr__(self, 'unclear_thresholds', limits)
        for name in ('benefit_threshold', 'harm_threshold'):
            if not (0.0 < getattr(self, name) < 1.0):
                raise ConfigError(f'{name} must lie in (0, 1), got {getattr(self, name)!r}')

    def to_dict(self) -> dict:
        return {
            'swc': self.swc,
            'swc_raw': self.swc_raw,
            'scale': self.scale.to_dict(),
            'ladder': self.ladder.to_dict(),
            'mode': self.mode,
            'unclear_thresholds': list(self.unclear_thresholds),
            'benefit_threshold': self.benefit_threshold,
            'harm_threshold': self.harm_threshold,
            'locale': self.locale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'MbiConfig':
        fields = dict(data)
        fields['scale'] = MagnitudeScale.from_dict(fields['scale'])
        fields['ladder'] = DescriptorLadder.from_dict(fields['ladder'])
        fields['unclear_thresholds'] = tuple(fields['unclear_thresholds'])
        return cls(**fields)


def qualitative_label(
    chances,
    ladder: DescriptorLadder | None = None,
    unclear_thresholds: tuple[float, float] = (0.05, 0.05),
    locale: str = 'en',
    mode: str = 'mechanistic',
    benefit_threshold: float = 0.25,
    harm_threshold: float = 0.005,
) -> tuple[str, str]:
    """
    Descriptor and direction of a chance triplet.

    Returns:
        tuple[str, str]: (descriptor, direction), e.g.
            ("almost certainly positive", "positive") or ("unclear", "unclear").

    Examples:
        >>> qualitative_label((0.0001, 0.01, 0.9899))
        ('almost certainly positive', 'positive')
        >>> qualitative_label((0.02, 0.33, 0.65))
        ('possibly positive', 'positive')
    """
    ladder = ladder or DescriptorLadder()
    _check_locale(locale)
    chances = _check_triplet(chances)

    if mode == 'clinical':
        direction = clinical_inference(chances, benefit_threshold, harm_threshold)
    else:
        direction = mechanistic_inference(chances, unclear_thresholds)

    words = DIRECTION_WORDS[locale]
    if direction == UNCLEAR:
        return words[UNCLEAR], UNCLEAR
    # Harm above its limit decides the clinical verdict even when it is a
    # small chance; the ladder word of that chance would contradict it.
    if mode == 'clinical' and direction == NEGATIVE and _dominant(chances) != NEGATIVE:
        return CLINICAL_HARM_WORDS[locale], direction
    return f'{ladder.word(chances.chance_of(direction), locale)} {words[direction]}', direction


@dataclass(frozen=True)
class MbiInference:
    p_negative: float
    p_trivial: float
    p_positive: float
    descriptor: str
    direction: str
    magnitude_label: str
    swc: float
    swc_raw: float

    @property
    def chances(self) -> ChanceTriplet:
        return ChanceTriplet(self.p_negative, self.p_trivial, self.p_positive)

    @property
    def is_clear(self) -> bool:
        return self.direction != UNCLEAR

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'MbiInference':
        return cls(**data)


def infer(result: ComparisonResult, cfg: MbiConfig | None = None) -> MbiInference:
    """
    Magnitude-based inference for one comparison.

    The standardized SWC is converted explicitly to the comparison's units
    through its standardizer, or a raw SWC is standardized the same way;
    chances use the comparison's diff, se and df.

    Raises:
        DegenerateVarianceError: Undefined effect size or zero standard error.
    """
    cfg = cfg or MbiConfig()
    if not result.has_effect_size or not (result.standardizer > 0):
        raise DegenerateVarianceError(
            f'comparison "{result.name}" has no standardized effect (standardizer is zero)'
        )
    if not (result.se > 0):
        raise DegenerateVarianceError(
            f'comparison "{result.name}" has zero standard error; chances are undefined'
        )

    if cfg.swc_raw is not None:
        swc, swc_raw = Swc.from_raw(cfg.swc_raw, result.standardizer), cfg.swc_raw
    else:
        swc = Swc(cfg.swc)
        swc_raw = swc.to_raw(result.standardizer)
    chances = mbi_chances(result.diff, result.se, result.df, swc_raw)
    descriptor, direction = qualitative_label(
        chances, cfg.ladder, cfg.unclear_thresholds, cfg.locale, cfg.mode,
        cfg.benefit_threshold, cfg.harm_threshold,
    )
    magnitude = classify_magnitude(result.effect_size, cfg.scale, cfg.locale)
    logger.info(
        f'MBI "{result.name}": {chances.p_negative:.4f}/{chances.p_trivial:.4f}/'
        f'{chances.p_positive:.4f} -> {descriptor} ({magnitude})'
    )
    return MbiInference(
        p_negative=chances.p_negative, p_trivial=chances.p_trivial, p_positive=chances.p_positive,
        descriptor=descriptor, direction=direction, magnitude_label=magnitude,
        swc=swc.value, swc_raw=swc_raw,
    )
