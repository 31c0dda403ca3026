import math

import numpy as np
import pytest
from scipy import integrate

from estatistica.descriptive import Sample
from estatistica.effects import ComparisonConfig, compare_independent, compare_paired
from estatistica.exceptions import ConfigError, DegenerateVarianceError, DomainError
from estatistica.mbi import (
    DescriptorLadder, MagnitudeScale, MbiConfig, MbiInference, Swc,
    classify_magnitude, clinical_inference, infer, mbi_chances, mechanistic_inference,
    normalize_chances, qualitative_label, round_chance,
)
from estatistica.specfun import ln_gamma


def t_density(t, df):
    log_norm = ln_gamma((df + 1) / 2) - ln_gamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(log_norm - (df + 1) / 2 * math.log1p(t * t / df))


@pytest.mark.parametrize('d, label', [
    (0.0, 'trivial'), (0.2, 'small'), (0.6, 'moderate'),
    (1.2, 'large'), (2.0, 'very large'), (2.5, 'very large'),
    (-0.7, 'moderate'), (0.1999, 'trivial'),
])
def test_magnitude_bands(d, label):
    assert classify_magnitude(d) == label


def test_magnitude_is_even_and_total():
    rng = np.random.default_rng(31)
    scale = MagnitudeScale()
    for d in rng.normal(0, 2, 1000):
        assert classify_magnitude(d, scale) == classify_magnitude(-d, scale)
        assert classify_magnitude(d, scale) in scale.labels


def test_magnitude_portuguese_and_validation():
    assert classify_magnitude(1.5, locale='pt') == 'grande'
    with pytest.raises(ConfigError):
        MagnitudeScale(thresholds=(0.6, 0.2, 1.2, 2.0))
    with pytest.raises(ConfigError):
        MagnitudeScale(thresholds=(0.2, 0.6), labels=('a', 'b'))


def test_chances_against_quadrature():
    chances = mbi_chances(0.5, 0.2, 38, 0.2)
    upper, _ = integrate.quad(t_density, (0.2 - 0.5) / 0.2, np.inf, args=(38,))
    lower, _ = integrate.quad(t_density, -np.inf, (-0.2 - 0.5) / 0.2, args=(38,))
    assert chances.p_positive == pytest.approx(upper, abs=1e-3)
    assert chances.p_negative == pytest.approx(lower, abs=1e-3)
    assert chances.p_positive == pytest.approx(0.929, abs=1e-3)
    assert chances.p_negative == pytest.approx(0.0006, abs=1e-3)
    assert chances.p_trivial == pytest.approx(0.071, abs=1e-3)


def test_chances_symmetric_at_zero():
    chances = mbi_chances(0.0, 0.37, 12, 0.2)
    assert chances.p_positive == chances.p_negative


def test_large_effect_is_almost_certain():
    chances = mbi_chances(2.0, 0.1, 38, 0.2)
    assert chances.p_positive > 0.9999
    assert chances.p_negative < 1e-12


def test_chances_reject_bad_se():
    with pytest.raises(DomainError):
        mbi_chances(0.5, 0.0, 10, 0.2)


def test_swc_conversions():
    assert Swc.from_raw(1.0, 5.0).value == pytest.approx(0.2)
    assert Swc(0.2).to_raw(5.0) == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        Swc(0.0)
    with pytest.raises(DegenerateVarianceError):
        Swc.from_raw(1.0, 0.0)


def test_chance_identities():
    rng = np.random.default_rng(32)
    for _ in range(1000):
        effect, se = rng.normal(0, 1), rng.uniform(0.01, 2)
        df, swc = rng.uniform(1, 200), rng.uniform(0.05, 1)
        chances = mbi_chances(effect, se, df, swc)
        assert math.fsum(chances) == pytest.approx(1.0, abs=1e-12)
        mirrored = mbi_chances(-effect, se, df, swc)
        assert mirrored.p_positive == chances.p_negative
        assert mirrored.p_negative == chances.p_positive
        bigger = mbi_chances(effect + rng.uniform(0, 1), se, df, swc)
        assert bigger.p_positive >= chances.p_positive
        assert bigger.p_negative <= chances.p_negative


def test_shrinking_se_makes_dominant_chance_certain():
    previous = 0.0
    for se in (0.5, 0.2, 0.1, 0.05, 0.01):
        current = mbi_chances(0.45, se, 30, 0.2).p_positive
        assert current > previous
        previous = current
    assert previous > 0.999999


def test_label_is_scale_free():
    rng = np.random.default_rng(33)
    for _ in range(1000):
        effect, se, swc, c = rng.normal(0, 0.6), rng.uniform(0.05, 0.5), 0.2, rng.uniform(0.1, 10)
        base = mbi_chances(effect, se, 20, swc)
        scaled = mbi_chances(effect * c, se * c, 20, swc * c)
        np.testing.assert_allclose(scaled, base, atol=1e-12)
        assert qualitative_label(scaled) == qualitative_label(base)


@pytest.mark.parametrize('chances, expected', [
    ((0.0001, 0.01, 0.9899), ('almost certainly positive', 'positive')),
    ((0.02, 0.33, 0.65), ('possibly positive', 'positive')),
    ((1 / 3, 1 / 3, 1 / 3), ('unclear', 'unclear')),
])
def test_qualitative_examples(chances, expected):
    assert qualitative_label(chances) == expected


def test_qualitative_portuguese():
    descriptor, direction = qualitative_label((0.0001, 0.01, 0.9899), locale='pt')
    assert descriptor == 'quase certamente Positivo'
    assert direction == 'positive'
    assert qualitative_label((0.3, 0.4, 0.3), locale='pt')[0] == 'inconclusivo'


def test_progressive_ladder_needs_more_certainty():
    ladder = DescriptorLadder.progressive()
    assert qualitative_label((0.0001, 0.01, 0.9899), ladder)[0] == 'very likely positive'
    assert qualitative_label((0.0001, 0.004, 0.9959), ladder)[0] == 'almost certainly positive'


def test_ladder_rounds_before_lookup():
    ladder = DescriptorLadder()
    assert round_chance(0.98951) == pytest.approx(0.99)
    assert ladder.word(0.98951) == 'almost certainly'
    assert ladder.word(0.9849) == 'very likely'
    assert ladder.word(0.25) == 'possibly'


def test_ladder_validation_and_presets():
    with pytest.raises(ConfigError):
        DescriptorLadder(thresholds=(0.5, 0.2))
    with pytest.raises(ConfigError):
        DescriptorLadder.preset('generous')
    ladder = DescriptorLadder.preset('progressive')
    assert DescriptorLadder.from_dict(ladder.to_dict()) == ladder


@pytest.mark.parametrize('chances, expected', [
    ((0.30, 0.40, 0.30), 'unclear'),
    ((0.001, 0.049, 0.95), 'positive'),
    ((0.0001, 0.01, 0.9899), 'positive'),
    ((0.03, 0.90, 0.07), 'trivial'),
    ((0.8, 0.19, 0.01), 'negative'),
])
def test_mechanistic_inference(chances, expected):
    assert mechanistic_inference(chances) == expected


@pytest.mark.parametrize('chances, expected', [
    ((0.01, 0.50, 0.49), 'unclear'),
    ((0.001, 0.60, 0.399), 'positive'),
    ((0.004, 0.90, 0.096), 'trivial'),
    ((0.30, 0.60, 0.10), 'negative'),
])
def test_clinical_inference(chances, expected):
    assert clinical_inference(chances) == expected


def test_clinical_small_harm_is_worded_as_harm():
    assert qualitative_label((0.006, 0.894, 0.10), mode='clinical') == ('possibly harmful', 'negative')
    assert qualitative_label((0.006, 0.894, 0.10), locale='pt', mode='clinical') == (
        'possivelmente prejudicial', 'negative'
    )
    assert qualitative_label((0.60, 0.35, 0.05), mode='clinical') == ('possibly negative', 'negative')


@pytest.mark.parametrize('ladder', [DescriptorLadder.figure(), DescriptorLadder.progressive()])
@pytest.mark.parametrize('locale', ['en', 'pt'])
def test_clinical_descriptor_agrees_with_direction(ladder, locale):
    denials = ('not', 'unlikely', 'não', 'improvavelmente')
    rng = np.random.default_rng(11)
    seen = set()
    for raw in rng.dirichlet((0.3, 1.0, 0.6), size=2000):
        chances = normalize_chances(tuple(raw))
        descriptor, direction = qualitative_label(chances, ladder, locale=locale, mode='clinical')
        assert direction == clinical_inference(chances)
        seen.add(direction)
        if direction == 'unclear':
            continue
        assert not any(word in descriptor for word in denials), (chances, descriptor)
    assert seen == {'negative', 'trivial', 'positive', 'unclear'}


def test_triplet_must_sum_to_one():
    with pytest.raises(DomainError):
        mechanistic_inference((0.5, 0.5, 0.5))
    normalized = normalize_chances((0.0001, 0.01, 0.99))
    assert math.fsum(normalized) == pytest.approx(1.0, abs=1e-12)


def test_infer_uses_comparison_units():
    a = Sample.from_values([10.1, 11.4, 9.8, 10.9, 11.0, 10.4])
    b = Sample.from_values([11.9, 12.6, 11.2, 12.8, 12.1, 11.7])
    result = compare_independent(a, b)
    inference = infer(result)
    assert inference.swc_raw == pytest.approx(0.2 * result.standardizer)
    expected = mbi_chances(result.diff, result.se, result.df, inference.swc_raw)
    assert inference.chances == expected
    assert inference.magnitude_label == classify_magnitude(result.effect_size)
    assert inference.is_clear
    assert MbiInference.from_dict(inference.to_dict()) == inference


def test_infer_with_raw_swc():
    a = Sample.from_values([10.1, 11.4, 9.8, 10.9, 11.0, 10.4])
    b = Sample.from_values([11.9, 12.6, 11.2, 12.8, 12.1, 11.7])
    result = compare_independent(a, b)
    inference = infer(result, MbiConfig(swc_raw=0.3))
    assert inference.swc_raw == 0.3
    assert inference.swc == pytest.approx(0.3 / result.standardizer)
    assert inference.chances == mbi_chances(result.diff, result.se, result.df, 0.3)
    with pytest.raises(ConfigError):
        MbiConfig(swc_raw=-0.3)


def test_infer_clinical_and_portuguese():
    a = Sample.from_values([10.1, 11.4, 9.8, 10.9])
    b = Sample.from_values([10.3, 11.9, 10.0, 11.5])
    cfg = MbiConfig(mode='clinical', locale='pt')
    inference = infer(compare_independent(a, b), cfg)
    assert inference.direction in ('positive', 'negative', 'trivial', 'unclear')
    assert MbiConfig.from_dict(cfg.to_dict()) == cfg


def test_infer_needs_a_standardized_effect():
    result = compare_paired(Sample.from_values([100, 100]), Sample.from_values([110, 110]),
                            ComparisonConfig(use_log_scale=True))
    with pytest.raises(DegenerateVarianceError):
        infer(result)


def test_config_validation():
    with pytest.raises(ConfigError):
        MbiConfig(mode='bayesian')
    with pytest.raises(ConfigError):
        MbiConfig(locale='fr')
    with pytest.raises(ConfigError):
        MbiConfig(unclear_thresholds=(0.05,))
