import json
import math
import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from estatistica.descriptive import Sample
from estatistica.effects import ComparisonConfig, compare_independent, compare_paired
from estatistica.exceptions import DomainError
from estatistica.mbi import DescriptorLadder, MagnitudeScale, MbiConfig, MbiInference, infer
from estatistica.simulate import DanceConfig, run_dance
from relatorio.report import (
    TABLE_HEADERS, LinearScale, ReportBundle, ReportEntry, build_bundle, bundle_from_json,
    bundle_to_json, format_chance, format_number, format_table, parse_csv_table,
    render_dance_svg, render_forest_svg, render_individuals_svg, render_table, table_rows,
)

SVG = '{http://www.w3.org/2000/svg}'


def by_class(root, tag, css_class):
    return [el for el in root.iter(SVG + tag) if el.get('class') == css_class]


def parse_svg(document):
    root = ET.fromstring(document.encode('utf-8'))
    width, height = (float(v) for v in root.get('viewBox').split()[2:])
    return root, width, height


def assert_inside(root, width, height):
    for element in root.iter():
        for attribute in ('x', 'x1', 'x2', 'cx'):
            if element.get(attribute) is not None:
                assert 0.0 <= float(element.get(attribute)) <= width, (element.tag, attribute)
        for attribute in ('y', 'y1', 'y2', 'cy'):
            if element.get(attribute) is not None:
                assert 0.0 <= float(element.get(attribute)) <= height, (element.tag, attribute)
    for text in root.iter(SVG + 'text'):
        baseline = float(text.get('y'))
        for span in text.iter(SVG + 'tspan'):
            baseline += float(span.get('dy', 0))
            assert baseline <= height
    for path in root.iter(SVG + 'path'):
        for px, py in re.findall(r'(-?[\d.]+),(-?[\d.]+)', path.get('d')):
            assert 0.0 <= float(px) <= width
            assert 0.0 <= float(py) <= height


def text_fits(element, width, font_size=12):
    # Rough sans-serif advance of 0.6 em per character.
    return float(element.get('x')) + 0.6 * font_size * len(element.text or '') <= width


def entry(name, a, b, cfg=None, mbi_cfg=None):
    result = compare_independent(Sample.from_values(a), Sample.from_values(b), cfg, name=name)
    return ReportEntry(name=name, result=result, inference=infer(result, mbi_cfg))


@pytest.fixture
def bundle():
    entries = [
        entry('Força', [10.1, 11.4, 9.8, 10.9, 11.0], [11.9, 12.6, 11.2, 12.8, 12.1]),
        entry('Salto', [30.2, 31.5, 29.9, 30.8, 31.1], [30.4, 31.2, 30.1, 31.0, 30.9]),
        entry('Sprint', [4.52, 4.61, 4.48, 4.57, 4.55], [4.49, 4.63, 4.41, 4.52, 4.50]),
    ]
    return build_bundle(entries, MbiConfig())


def test_bundle_names_are_unique():
    first = entry('Força', [1, 2, 3], [2, 3, 4])
    with pytest.raises(DomainError):
        ReportBundle(entries=(first, first))


def test_metadata_echoes_options(bundle):
    for key in ('ci_level', 'swc', 'variance_model', 'scale', 'ladder'):
        assert key in bundle.metadata
    assert bundle.metadata['ci_level'] == 0.90
    assert bundle.metadata['scale'] == [0.2, 0.6, 1.2, 2.0]


def test_table1_row_passes_through_verbatim():
    row = ('Força', '2.9±0.5', '3.9±1.2', '1.0; ±0.8', '', '1.2 (0.6 to 2)')
    text = format_table([row], 'markdown', TABLE_HEADERS['en'])
    lines = text.split('\n')
    assert lines[0] == ('| Variable | Group A / Pre (mean±sd) | Group B / Post (mean±sd) | '
                        'Difference; ±CI | % Difference; ±%CI | Effect size (CI) |')
    assert lines[1] == '|---|---|---|---|---|---|'
    assert lines[2] == '| Força | 2.9±0.5 | 3.9±1.2 | 1.0; ±0.8 |  | 1.2 (0.6 to 2) |'
    assert text.endswith('\n')
    assert format_table([row], 'markdown', TABLE_HEADERS['en']) == text


def test_zero_difference_row():
    data = [3.1, 4.7, 2.2, 5.0]
    single = build_bundle([entry('Zero', data, data)])
    (row,) = table_rows(single)
    assert row[3].startswith('0.00; ±')
    assert row[4] == ''
    assert row[5].startswith('0.00 (')


def test_markdown_table_layout(bundle):
    text = render_table(bundle, 'markdown')
    lines = text.strip().split('\n')
    assert len(lines) == 2 + 3
    assert all(line.count(' | ') == 5 for line in lines if not line.startswith('|---'))


def test_csv_round_trip(bundle):
    text = render_table(bundle, 'csv')
    assert '\r' not in text
    assert len(text.strip().split('\n')) == 4
    assert parse_csv_table(text) == table_rows(bundle)


def test_csv_agrees_with_json(bundle):
    restored = bundle_from_json(bundle_to_json(bundle))
    cells = parse_csv_table(render_table(bundle, 'csv'))
    for cell_row, item in zip(cells, restored.entries):
        result = item.result
        assert cell_row[0] == item.name
        assert cell_row[3].split(';')[0] == format_number(result.diff)
        assert cell_row[5].split(' ')[0] == format_number(result.effect_size)


def test_log_scale_fills_percent_column():
    cfg = ComparisonConfig(use_log_scale=True)
    logged = build_bundle([entry('Massa', [70.1, 72.4, 69.8, 71.0], [71.9, 73.6, 71.2, 72.8], cfg)])
    (row,) = table_rows(logged)
    assert row[4] != ''
    assert '; ±' in row[4]


def test_portuguese_table():
    pt = build_bundle([entry('Força', [1, 2, 3], [2, 3, 4])], MbiConfig(locale='pt'))
    text = render_table(pt, 'markdown')
    assert 'Variável' in text
    assert ' a ' in table_rows(pt)[0][5]


def test_chance_columns(bundle):
    rows = table_rows(bundle, with_chances=True)
    assert len(rows[0]) == 8
    assert rows[0][6].count('/') == 2


def test_empty_bundle_is_rejected():
    empty = ReportBundle(entries=())
    with pytest.raises(DomainError):
        render_table(empty)
    with pytest.raises(DomainError):
        render_forest_svg(empty)


def test_bundle_json_round_trip(bundle):
    text = bundle_to_json(bundle)
    restored = bundle_from_json(text)
    assert restored.entries == bundle.entries
    assert bundle_to_json(restored) == text
    with pytest.raises(DomainError):
        bundle_from_json('{"comparisons": [{"name": "x"}]}')


def test_non_finite_values_become_null():
    result = compare_independent(Sample.from_values([1, 2, 3]), Sample.from_values([2, 3, 5]), name='x')
    inference = infer(result)
    odd = ReportBundle(entries=(ReportEntry('x', result, inference),), metadata={'note': math.inf})
    assert json.loads(bundle_to_json(odd))['metadata']['note'] is None


@pytest.mark.parametrize('chance, text', [
    (0.9899, '99'), (0.0006, '0.06'), (0.071, '7.1'), (1.0, '100'), (0.0, '0'), (0.25, '25'),
])
def test_format_chance(chance, text):
    assert format_chance(chance) == text


def test_format_number_drops_negative_zero():
    assert format_number(-0.0001) == '0.00'
    assert format_number(None) == 'n/a'


def test_linear_scale_is_affine_and_ordered():
    scale = LinearScale((-3.0, 3.0), (150.0, 630.0))
    rng = np.random.default_rng(51)
    for a, b in rng.uniform(-3, 3, (1000, 2)):
        if a < b:
            assert scale(a) < scale(b)
        mid = scale((a + b) / 2)
        assert mid == pytest.approx((scale(a) + scale(b)) / 2)
    with pytest.raises(DomainError):
        LinearScale((1.0, 1.0), (0.0, 1.0))


def test_forest_element_counts(bundle):
    root, width, height = parse_svg(render_forest_svg(bundle))
    assert (width, height) == (900.0, 60.0 * 3 + 120.0)
    assert len(by_class(root, 'circle', 'marker')) == 3
    assert len(by_class(root, 'line', 'ci-bar')) == 3
    assert len(by_class(root, 'line', 'band-boundary')) == 8
    metadata = root.find(SVG + 'metadata')
    assert json.loads(metadata.text)['swc'] == 0.2


def test_forest_geometry_inside_viewbox(bundle):
    root, width, height = parse_svg(render_forest_svg(bundle))
    assert_inside(root, width, height)


def test_forest_markers_follow_effect_order(bundle):
    root, _, _ = parse_svg(render_forest_svg(bundle))
    markers = [float(m.get('cx')) for m in by_class(root, 'circle', 'marker')]
    effects = [e.result.effect_size for e in bundle.entries]
    assert np.argsort(markers).tolist() == np.argsort(effects).tolist()


def test_trivial_marker_sits_in_trivial_band():
    result = compare_independent(Sample.from_values([1.0, 2.0, 3.0] * 200),
                                 Sample.from_values([1.0, 2.0, 3.0] * 200), name='nulo')
    inference = infer(result)
    single = build_bundle([ReportEntry('nulo', result, inference)])
    root, _, _ = parse_svg(render_forest_svg(single))
    (marker,) = by_class(root, 'circle', 'marker')
    boundaries = sorted(float(b.get('x1')) for b in by_class(root, 'line', 'band-boundary'))
    assert boundaries[3] < float(marker.get('cx')) < boundaries[4]
    assert inference.direction == 'trivial'


def test_almost_certain_annotation():
    inference = MbiInference(p_negative=0.0001, p_trivial=0.01, p_positive=0.9899,
                             descriptor='almost certainly positive', direction='positive',
                             magnitude_label='large', swc=0.2, swc_raw=0.2)
    result = compare_independent(Sample.from_values([1, 2, 3, 4]), Sample.from_values([5, 6, 7, 8]), name='x')
    single = build_bundle([ReportEntry('x', result, inference)])
    root, _, _ = parse_svg(render_forest_svg(single))
    (chances,) = by_class(root, 'tspan', 'annotation-chances')
    (descriptor,) = by_class(root, 'tspan', 'annotation-descriptor')
    assert descriptor.text == 'almost certainly positive'
    assert chances.text.startswith('0.01/1/99; ')
    assert 'p=' in chances.text or 'p<' in chances.text
    assert all(text_fits(span, 900.0) for span in (chances, descriptor))


def test_forest_is_byte_stable(bundle):
    assert render_forest_svg(bundle) == render_forest_svg(bundle_from_json(bundle_to_json(bundle)))


def test_dance_svg_counts():
    result = run_dance(DanceConfig(seed=3))
    root, _, _ = parse_svg(render_dance_svg(result))
    assert len(by_class(root, 'line', 'ci-bar')) == 25
    (reference,) = by_class(root, 'line', 'reference')
    assert reference.get('data-value') == '10'
    glyphs = [g.text for g in by_class(root, 'text', 'sig')]
    counts = result.summary.category_counts
    for glyph in ('***', '**', '*', '?'):
        assert glyphs.count(glyph) == counts[glyph]
    assert len(glyphs) == 25 - counts['ns']
    assert len(by_class(root, 'path', 'sampling-curve')) == 1


def test_dance_svg_without_significance():
    result = run_dance(DanceConfig(n_experiments=1, delta_mu=0.0, seed=8))
    root, _, _ = parse_svg(render_dance_svg(result))
    if result.records[0].sig_category == 'ns':
        assert by_class(root, 'text', 'sig') == []
    assert render_dance_svg(result) == render_dance_svg(run_dance(DanceConfig(n_experiments=1, delta_mu=0.0, seed=8)))


def test_individuals_counts_and_order():
    samples = [Sample.from_values([1, 2, 3], group='A'), Sample.from_values([2, 3, 4], group='B')]
    root, _, _ = parse_svg(render_individuals_svg(samples))
    assert len(by_class(root, 'circle', 'individual')) == 6
    whiskers = by_class(root, 'line', 'whisker')
    assert len(whiskers) == 2
    assert float(whiskers[1].get('x1')) > float(whiskers[0].get('x1'))


def test_individuals_constant_group():
    root, _, _ = parse_svg(render_individuals_svg([Sample.from_values([5, 5, 5], group='A')]))
    points = by_class(root, 'circle', 'individual')
    assert len({p.get('cy') for p in points}) == 1
    (whisker,) = by_class(root, 'line', 'whisker')
    assert whisker.get('y1') == whisker.get('y2')


def test_individuals_need_input():
    with pytest.raises(DomainError):
        render_individuals_svg([])


def test_paired_bundle_renders():
    result = compare_paired(Sample.from_values([10, 12, 14, 13]), Sample.from_values([12, 15, 16, 14]), name='pré/pós')
    single = build_bundle([ReportEntry('pré/pós', result, infer(result))])
    assert 'pré/pós' in render_forest_svg(single)
    assert single.metadata['standardizer'] == 'baseline-sd'


def random_bundle(rng):
    thresholds = tuple(np.cumsum(rng.uniform(0.1, 0.8, 4)).round(3).tolist())
    mbi_cfg = MbiConfig(
        scale=MagnitudeScale(thresholds=thresholds),
        ladder=DescriptorLadder.preset(str(rng.choice(['figure', 'progressive']))),
        mode=str(rng.choice(['mechanistic', 'clinical'])),
        locale=str(rng.choice(['en', 'pt'])),
    )
    cfg = ComparisonConfig(ci_level=float(rng.choice([0.90, 0.95, 0.99])),
                           variance_model=str(rng.choice(['welch', 'pooled'])))
    entries = []
    for i in range(int(rng.integers(1, 6))):
        sd = float(rng.lognormal(0.0, 1.0))
        a = rng.normal(0.0, sd, int(rng.integers(3, 25)))
        b = rng.normal(rng.uniform(-2.0, 2.0) * sd, sd, int(rng.integers(3, 25)))
        entries.append(entry(f'v{i}', a.tolist(), b.tolist(), cfg, mbi_cfg))
    return build_bundle(entries, mbi_cfg)


def test_random_forests_are_well_formed():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        bundle = random_bundle(rng)
        root, width, height = parse_svg(render_forest_svg(bundle))
        rows = len(bundle)
        assert height == 60.0 * rows + 120.0
        assert len(by_class(root, 'circle', 'marker')) == rows
        assert len(by_class(root, 'line', 'ci-bar')) == rows
        assert len(by_class(root, 'text', 'row-label')) == rows
        assert len(by_class(root, 'text', 'annotation')) == rows
        assert len(by_class(root, 'rect', 'band')) == 2 * len(bundle.scale.thresholds) + 1
        assert len(by_class(root, 'line', 'band-boundary')) == 2 * len(bundle.scale.thresholds)
        assert_inside(root, width, height)
        for css_class in ('annotation-chances', 'annotation-descriptor'):
            for span in by_class(root, 'tspan', css_class):
                assert text_fits(span, width), span.text
        descriptors = [span.text for span in by_class(root, 'tspan', 'annotation-descriptor')]
        assert descriptors == [e.inference.descriptor for e in bundle.entries]


def test_random_dances_are_well_formed():
    rng = np.random.default_rng(2025)
    for _ in range(1000):
        cfg = DanceConfig(
            n_experiments=int(rng.integers(1, 9)),
            n_per_group=int(rng.integers(2, 16)),
            sigma=float(rng.uniform(1.0, 30.0)),
            delta_mu=float(rng.uniform(-20.0, 20.0)),
            ci_level=float(rng.choice([0.90, 0.95, 0.99])),
            seed=int(rng.integers(0, 2 ** 63)),
            variance_model=str(rng.choice(['pooled', 'welch'])),
        )
        result = run_dance(cfg)
        root, width, height = parse_svg(render_dance_svg(result))
        assert len(by_class(root, 'line', 'ci-bar')) == cfg.n_experiments
        assert len(by_class(root, 'circle', 'marker')) == cfg.n_experiments
        assert len(by_class(root, 'text', 'row-label')) == cfg.n_experiments
        assert len(by_class(root, 'text', 'sig')) == cfg.n_experiments - result.summary.category_counts['ns']
        assert len(by_class(root, 'path', 'sampling-curve')) == 1
        assert_inside(root, width, height)


def test_random_individuals_are_well_formed():
    rng = np.random.default_rng(2026)
    for _ in range(1000):
        samples = [
            Sample.from_values(rng.normal(rng.uniform(-50, 50), rng.lognormal(0.0, 1.5), int(rng.integers(2, 30))),
                               group=f'g{i}')
            for i in range(int(rng.integers(1, 6)))
        ]
        root, width, height = parse_svg(render_individuals_svg(samples, ci_level=float(rng.choice([0.90, 0.95]))))
        assert len(by_class(root, 'circle', 'individual')) == sum(s.n for s in samples)
        assert len(by_class(root, 'circle', 'group-mean')) == len(samples)
        whiskers = [float(w.get('x1')) for w in by_class(root, 'line', 'whisker')]
        assert len(whiskers) == len(samples)
        assert whiskers == sorted(whiskers)
        assert [label.text for label in by_class(root, 'text', 'group-label')] == [s.group for s in samples]
        assert_inside(root, width, height)
