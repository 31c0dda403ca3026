"""
Tables, SVG figures and JSON bundles for comparison results.

Numbers are formatted here, once; the SVG templates under
templates/relatorio/ only place the strings they receive.
"""
from dataclasses import dataclass, field, replace
import io
import json
import math
import logging

import pandas as pd
from django.template.loader import render_to_string

from estatistica.descriptive import Sample, SampleSummary, mean_ci, pct_halfwidth, summarize
from estatistica.effects import ComparisonResult
from estatistica.exceptions import DomainError
from estatistica.mbi import (
    DescriptorLadder, MagnitudeScale, MbiConfig, MbiInference, classify_magnitude, qualitative_label,
)
from estatistica.simulate import NOT_SIGNIFICANT, DanceConfig, DanceResult
from estatistica.specfun import norm_pdf, norm_quantile

logger = logging.getLogger(__name__)

TABLE_FORMATS = ('markdown', 'csv')

TABLE_HEADERS = {
    'en': ('Variable', 'Group A / Pre (mean±sd)', 'Group B / Post (mean±sd)',
           'Difference; ±CI', '% Difference; ±%CI', 'Effect size (CI)'),
    'pt': ('Variável', 'Grupo A / Pré (média±dp)', 'Grupo B / Pós (média±dp)',
           'Diferença; ±IC', '% Diferença; ±%IC', 'Tamanho do efeito (IC)'),
}
CHANCE_HEADERS = {
    'en': ('Chances −/trivial/+ (%)', 'Inference'),
    'pt': ('Chances −/trivial/+ (%)', 'Inferência'),
}
RANGE_WORD = {'en': 'to', 'pt': 'a'}
MISSING = 'n/a'

# Band fills, trivial first.
BAND_FILLS = ('#f2f2f2', '#dde6f0', '#c3d3e6', '#a6bfdb', '#8aaacf')


@dataclass(frozen=True)
class ReportEntry:
    name: str
    result: ComparisonResult
    inference: MbiInference

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'result': self.result.to_dict(),
            'inference': self.inference.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ReportEntry':
        return cls(
            name=data['name'],
            result=ComparisonResult.from_dict(data['result']),
            inference=MbiInference.from_dict(data['inference']),
        )


@dataclass(frozen=True)
class ReportBundle:
    """
    Rows of a report plus the options that produced them.

    Attributes:
        entries (tuple[ReportEntry]): Comparisons in insertion order, unique names.
        scale (MagnitudeScale): Bands drawn behind the forest plot.
        ladder (DescriptorLadder): Ladder the descriptors were worded with.
        metadata (dict): Options echo (ci_level, swc, variance_model, scale, ladder, ...).
    """

    entries: tuple[ReportEntry, ...]
    scale: MagnitudeScale = field(default_factory=MagnitudeScale)
    ladder: DescriptorLadder = field(default_factory=DescriptorLadder)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, 'entries', entries)
        seen = set()
        for entry in entries:
            if entry.name in seen:
                raise DomainError(f'duplicate comparison name "{entry.name}" in report')
            seen.add(entry.name)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def locale(self) -> str:
        return self.metadata.get('locale', 'en')

    def require_entries(self) -> None:
        if not self.entries:
            raise DomainError('report bundle is empty')


def build_bundle(entries, mbi_cfg: MbiConfig | None = None, metadata: dict | None = None) -> ReportBundle:
    """
    Assemble a bundle and record the options actually used.

    The echo always carries ci_level, variance_model and standardizer of
    the first comparison plus the inference options of mbi_cfg (swc, raw
    swc, scale, ladder, mode and its thresholds, locale); extra keys in
    `metadata` are kept as given.
    """
    mbi_cfg = mbi_cfg or MbiConfig()
    entries = tuple(entries)
    echo = dict(metadata or {})
    if entries:
        first = entries[0].result
        echo.setdefault('ci_level', first.ci_level)
        echo.setdefault('variance_model', first.variance_model)
        echo.setdefault('standardizer', first.standardizer_kind)
        echo.setdefault('log_scale', first.log_scale)
    echo.update({
        'swc': mbi_cfg.swc,
        'swc_raw': mbi_cfg.swc_raw,
        'scale': list(mbi_cfg.scale.thresholds),
        'ladder': mbi_cfg.ladder.name,
        'ladder_thresholds': list(mbi_cfg.ladder.thresholds),
        'mode': mbi_cfg.mode,
        'unclear_thresholds': list(mbi_cfg.unclear_thresholds),
        'benefit_threshold': mbi_cfg.benefit_threshold,
        'harm_threshold': mbi_cfg.harm_threshold,
        'locale': mbi_cfg.locale,
    })
    return ReportBundle(entries=entries, scale=mbi_cfg.scale, ladder=mbi_cfg.ladder, metadata=echo)


def _finite_or_none(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(v) for v in value]
    return value


def bundle_to_dict(bundle: ReportBundle) -> dict:
    return _finite_or_none({
        'metadata': bundle.metadata,
        'scale': bundle.scale.to_dict(),
        'ladder': bundle.ladder.to_dict(),
        'comparisons': [entry.to_dict() for entry in bundle.entries],
    })


def bundle_to_json(bundle: ReportBundle) -> str:
    """JSON mirroring the bundle's field names; non-finite numbers become null."""
    return json.dumps(bundle_to_dict(bundle), indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def bundle_from_json(text: str) -> ReportBundle:
    try:
        data = json.loads(text)
        return ReportBundle(
            entries=tuple(ReportEntry.from_dict(item) for item in data['comparisons']),
            scale=MagnitudeScale.from_dict(data['scale']),
            ladder=DescriptorLadder.from_dict(data['ladder']),
            metadata=data.get('metadata', {}),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise DomainError(f'not a report bundle: {e}') from e


def relabel_bundle(bundle: ReportBundle, locale: str) -> ReportBundle:
    """Same bundle with descriptors and magnitude labels reworded in `locale`."""
    meta = bundle.metadata
    entries = []
    for entry in bundle.entries:
        descriptor, _ = qualitative_label(
            entry.inference.chances, bundle.ladder,
            tuple(meta.get('unclear_thresholds', (0.05, 0.05))), locale,
            meta.get('mode', 'mechanistic'),
            meta.get('benefit_threshold', 0.25), meta.get('harm_threshold', 0.005),
        )
        magnitude = classify_magnitude(entry.result.effect_size, bundle.scale, locale)
        inference = replace(entry.inference, descriptor=descriptor, magnitude_label=magnitude)
        entries.append(replace(entry, inference=inference))
    metadata = dict(meta, locale=locale)
    if isinstance(meta.get('run_config'), dict):
        metadata['run_config'] = dict(meta['run_config'], locale=locale)
    return replace(bundle, entries=tuple(entries), metadata=metadata)


# ---------------------------------------------------------------------------
# Number formatting
# ---------------------------------------------------------------------------

def format_number(value: float | None, decimals: int = 2) -> str:
    """Fixed decimals with '.' separator; negative zero prints as zero."""
    if value is None or not math.isfinite(value):
        return MISSING
    text = f'{value:.{decimals}f}'
    if text.startswith('-') and float(text) == 0.0:
        text = text[1:]
    return text


def format_chance(chance: float) -> str:
    """
    A probability as a percentage with two significant figures.

    Examples:
        >>> format_chance(0.9899)
        '99'
        >>> format_chance(0.0006)
        '0.06'
    """
    percent = chance * 100.0
    if percent <= 0.0:
        return '0'
    rounded = float(f'{percent:.2g}')
    if rounded < 1e-4:
        return '<0.0001'
    return f'{rounded:.10f}'.rstrip('0').rstrip('.')


def format_chances(inference: MbiInference) -> str:
    return '/'.join(format_chance(p) for p in inference.chances)


def format_p(p_value: float) -> str:
    if p_value < 0.001:
        return 'p<0.001'
    return f'p={p_value:.3f}'


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def table_header(locale: str = 'en', with_chances: bool = False) -> tuple[str, ...]:
    header = TABLE_HEADERS[locale]
    return header + CHANCE_HEADERS[locale] if with_chances else header


def _mean_sd(summary: SampleSummary, decimals: int) -> str:
    return f'{format_number(summary.mean, decimals)}±{format_number(summary.sd, decimals)}'


def table_rows(bundle: ReportBundle, decimals: int = 2, locale: str | None = None,
               with_chances: bool = False) -> list[tuple[str, ...]]:
    """
    One tuple of formatted cells per comparison, in insertion order.

    The percent column is blank unless the comparison ran on the log scale.
    """
    bundle.require_entries()
    locale = locale or bundle.locale
    rows = []
    for entry in bundle.entries:
        result = entry.result
        diff_cell = f'{format_number(result.diff, decimals)}; ±{format_number(result.ci_halfwidth, decimals)}'
        if result.log_scale and result.pct_diff is not None:
            pct_cell = (f'{format_number(result.pct_diff, decimals)}; '
                        f'±{format_number(pct_halfwidth(result.ci_low, result.ci_high), decimals)}')
        else:
            pct_cell = ''
        if result.has_effect_size:
            es_cell = (f'{format_number(result.effect_size, decimals)} '
                       f'({format_number(result.es_ci_low, decimals)} {RANGE_WORD[locale]} '
                       f'{format_number(result.es_ci_high, decimals)})')
        else:
            es_cell = MISSING
        row = (entry.name, _mean_sd(result.summary_a, decimals), _mean_sd(result.summary_b, decimals),
               diff_cell, pct_cell, es_cell)
        if with_chances:
            row += (format_chances(entry.inference), entry.inference.descriptor)
        rows.append(row)
    return rows


def _markdown_cell(cell: str) -> str:
    return str(cell).replace('|', '\\|')


def format_table(rows, fmt: str = 'markdown', header=None) -> str:
    """
    Lay out pre-formatted cells as a Markdown pipe table or CSV.

    Cells pass through verbatim, so published rows can be reproduced
    exactly. CSV uses ',' delimiters, a header row and LF line endings.
    """
    if fmt == 'md':
        fmt = 'markdown'
    if fmt not in TABLE_FORMATS:
        raise DomainError(f'table format must be one of {", ".join(TABLE_FORMATS)}, got {fmt!r}')
    rows = [tuple(str(c) for c in row) for row in rows]
    if not rows:
        raise DomainError('table has no rows')
    header = tuple(header) if header is not None else TABLE_HEADERS['en'][:len(rows[0])]
    if any(len(row) != len(header) for row in rows):
        raise DomainError(f'every row must have {len(header)} cells')

    if fmt == 'csv':
        buffer = io.StringIO()
        pd.DataFrame(rows, columns=list(header)).to_csv(buffer, index=False, lineterminator='\n')
        return buffer.getvalue()

    lines = ['| ' + ' | '.join(_markdown_cell(c) for c in header) + ' |',
             '|' + '|'.join('---' for _ in header) + '|']
    lines += ['| ' + ' | '.join(_markdown_cell(c) for c in row) + ' |' for row in rows]
    return '\n'.join(lines) + '\n'


def parse_csv_table(text: str) -> list[tuple[str, ...]]:
    """Read back a CSV table as strings (header excluded)."""
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    return [tuple(row) for row in frame.itertuples(index=False, name=None)]


def render_table(bundle: ReportBundle, fmt: str = 'markdown', decimals: int = 2,
                 locale: str | None = None, with_chances: bool = False) -> str:
    locale = locale or bundle.locale
    rows = table_rows(bundle, decimals, locale, with_chances)
    return format_table(rows, fmt, table_header(locale, with_chances))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SvgOptions:
    """Canvas geometry: width × (row_height·rows + margin) pixels."""

    width: int = 900
    row_height: int = 60
    margin: int = 120
    font_size: int = 12
    label_width: int = 150
    annotation_width: int = 270

    def __post_init__(self):
        for name in ('width', 'row_height', 'margin', 'font_size'):
            if getattr(self, name) <= 0:
                raise DomainError(f'{name} must be positive, got {getattr(self, name)!r}')
        if self.label_width + self.annotation_width >= self.width - 100:
            raise DomainError('label and annotation columns leave no room for the plot')

    def height(self, rows: int) -> int:
        return self.row_height * rows + self.margin

    @property
    def plot_left(self) -> int:
        return self.label_width

    @property
    def plot_right(self) -> int:
        return self.width - self.annotation_width


class LinearScale:
    """
    Affine map from a data interval onto a pixel interval.

    Examples:
        >>> LinearScale((-1.0, 1.0), (100.0, 300.0))(0.0)
        200.0
    """

    def __init__(self, domain: tuple[float, float], pixels: tuple[float, float]):
        low, high = domain
        if not (high > low):
            raise DomainError(f'scale domain must be increasing, got {domain}')
        self.domain = (float(low), float(high))
        self.pixels = (float(pixels[0]), float(pixels[1]))

    def __call__(self, value: float) -> float:
        low, high = self.domain
        start, end = self.pixels
        return start + (value - low) * (end - start) / (high - low)

    def ticks(self, step: float) -> list[float]:
        low, high = self.domain
        first = math.ceil(low / step)
        last = math.floor(high / step)
        return [k * step for k in range(first, last + 1)]


def _px(value: float) -> str:
    return format_number(value, 2)


def _tick_label(value: float) -> str:
    return format_number(value, 0) if float(value).is_integer() else f'{value:g}'


def _metadata(payload: dict) -> str:
    return json.dumps(_finite_or_none(payload), sort_keys=True, ensure_ascii=False)


def _symmetric_extent(values, floor: float) -> float:
    extent = max([floor] + [abs(v) for v in values if v is not None and math.isfinite(v)])
    return math.ceil(extent * 1.1 * 2.0) / 2.0


def render_forest_svg(bundle: ReportBundle, options: SvgOptions | None = None) -> str:
    """
    Standardized effects with their CIs over shaded magnitude bands.

    One row per comparison: a marker at the effect size, a bar across its
    CI, and a two-line right-margin annotation: chances and p, then the
    descriptor.
    Band boundaries sit at ±each scale threshold.
    """
    bundle.require_entries()
    options = options or SvgOptions()
    locale = bundle.locale
    rows = len(bundle)
    height = options.height(rows)
    top = options.margin // 2
    bottom = top + options.row_height * rows

    thresholds = bundle.scale.thresholds
    effects = []
    for entry in bundle.entries:
        effects += [entry.result.effect_size, entry.result.es_ci_low, entry.result.es_ci_high]
    extent = _symmetric_extent(effects, thresholds[-1] * 1.2)
    x = LinearScale((-extent, extent), (options.plot_left, options.plot_right))

    edges = [-extent] + [-t for t in reversed(thresholds)] + list(thresholds) + [extent]
    bands, band_labels = [], []
    for i, (low, high) in enumerate(zip(edges, edges[1:])):
        middle = (low + high) / 2.0
        index = min(len(BAND_FILLS) - 1, sum(1 for t in thresholds if abs(middle) >= t))
        bands.append({'x': _px(x(low)), 'width': _px(x(high) - x(low)), 'fill': BAND_FILLS[index]})
        band_labels.append({
            'x': _px(x(middle)),
            'y': _px(top - 8 - (i % 2) * (options.font_size + 2)),
            'text': classify_magnitude(middle, bundle.scale, locale),
        })
    boundaries = [{'x': _px(x(t))} for t in [-t for t in reversed(thresholds)] + list(thresholds)]

    step = 0.5 if extent <= 2.0 else 1.0
    ticks = [{'x': _px(x(v)), 'label': _tick_label(v)} for v in x.ticks(step)]

    items = []
    for i, entry in enumerate(bundle.entries):
        result, inference = entry.result, entry.inference
        y = top + options.row_height * (i + 0.5)
        item = {'name': entry.name, 'y': _px(y), 'text_y': _px(y + options.font_size / 3.0),
                'annotation_y': _px(y - options.font_size / 3.0),
                'chances': f'{format_chances(inference)}; {format_p(result.p_value)}',
                'descriptor': inference.descriptor, 'has_effect': result.has_effect_size}
        if result.has_effect_size:
            item.update({
                'cx': _px(x(result.effect_size)),
                'x1': _px(x(result.es_ci_low)),
                'x2': _px(x(result.es_ci_high)),
            })
        items.append(item)

    axis_title = 'Tamanho do efeito padronizado' if locale == 'pt' else 'Standardized effect size'
    context = {
        'width': options.width,
        'height': height,
        'font_size': options.font_size,
        'metadata': _metadata(bundle.metadata),
        'title': axis_title,
        'top': top,
        'bottom': bottom,
        'plot_height': options.row_height * rows,
        'plot_left': options.plot_left,
        'plot_right': options.plot_right,
        'annotation_x': options.plot_right + 10,
        'line_gap': options.font_size + 2,
        'label_x': options.plot_left - 10,
        'bands': bands,
        'band_labels': band_labels,
        'boundaries': boundaries,
        'ticks': ticks,
        'tick_y': bottom + 6,
        'tick_label_y': bottom + 8 + options.font_size,
        'axis_title_x': _px((options.plot_left + options.plot_right) / 2.0),
        'axis_title_y': bottom + 12 + 2 * options.font_size,
        'zero_x': _px(x(0.0)),
        'items': items,
    }
    return render_to_string('relatorio/forest.svg', context)


def render_dance_svg(result: DanceResult, cfg: DanceConfig | None = None,
                     options: SvgOptions | None = None) -> str:
    """
    One numbered row per replication: CI bar, point estimate and the
    significance glyph of its p-value (blank when not significant), under
    the sampling distribution of the mean difference.
    """
    if not len(result):
        raise DomainError('dance result is empty')
    cfg = cfg or result.config
    options = options or SvgOptions(label_width=60, annotation_width=60)
    rows = len(result)
    curve_height = options.margin
    top = curve_height + options.margin // 2
    height = options.height(rows) + curve_height
    bottom = top + options.row_height * rows

    sd_diff = cfg.sigma * math.sqrt(2.0 / cfg.n_per_group)
    spread = 4.0 * sd_diff
    values = [0.0, cfg.delta_mu - spread, cfg.delta_mu + spread]
    for record in result.records:
        values += [record.ci_low, record.ci_high]
    span = max(values) - min(values)
    x = LinearScale((min(values) - 0.05 * span, max(values) + 0.05 * span),
                    (options.plot_left, options.plot_right))

    peak = norm_pdf(0.0) / sd_diff
    curve_base = curve_height - 10
    y_curve = LinearScale((0.0, peak), (curve_base, 20.0))
    points = []
    for k in range(101):
        v = cfg.delta_mu - spread + 2.0 * spread * k / 100.0
        density = norm_pdf((v - cfg.delta_mu) / sd_diff) / sd_diff
        points.append(f'{_px(x(v))},{_px(y_curve(density))}')
    z = norm_quantile((1.0 + cfg.ci_level) / 2.0)

    items = []
    for i, record in enumerate(result.records):
        y = top + options.row_height * (i + 0.5)
        items.append({
            'index': record.index,
            'y': _px(y),
            'text_y': _px(y + options.font_size / 3.0),
            'x1': _px(x(record.ci_low)),
            'x2': _px(x(record.ci_high)),
            'cx': _px(x(record.diff)),
            'glyph': '' if record.sig_category == NOT_SIGNIFICANT else record.sig_category,
        })

    step = 10.0 ** math.floor(math.log10(span)) if span > 0 else 1.0
    if len(x.ticks(step)) < 4:
        step /= 2.0
    context = {
        'width': options.width,
        'height': height,
        'font_size': options.font_size,
        'metadata': _metadata({'config': cfg.to_dict(), 'summary': result.summary.to_dict()}),
        'title': f'{result.summary.count_significant}/{result.summary.n_experiments} p < {cfg.alpha:g}',
        'top': top,
        'bottom': bottom,
        'curve_path': 'M ' + ' L '.join(points),
        'curve_base': curve_base,
        'interval_x1': _px(x(cfg.delta_mu - z * sd_diff)),
        'interval_x2': _px(x(cfg.delta_mu + z * sd_diff)),
        'reference_x': _px(x(cfg.delta_mu)),
        'reference_value': f'{cfg.delta_mu:g}',
        'zero_x': _px(x(0.0)),
        'label_x': options.plot_left - 10,
        'glyph_x': options.plot_right + 10,
        'plot_left': options.plot_left,
        'plot_right': options.plot_right,
        'ticks': [{'x': _px(x(v)), 'label': _tick_label(v)} for v in x.ticks(step)],
        'tick_y': bottom + 6,
        'tick_label_y': bottom + 8 + options.font_size,
        'items': items,
    }
    return render_to_string('relatorio/dance.svg', context)


def _whisker_summary(sample: Sample) -> SampleSummary:
    if sample.n >= 2:
        return summarize(sample)
    return SampleSummary(n=sample.n, mean=float(sample.values[0]), sd=0.0, sem=0.0)


def _jitter(index: int, width: float) -> float:
    # Golden-ratio sequence spreads markers evenly without randomness.
    return ((index * 0.6180339887498949) % 1.0 - 0.5) * width


def render_individuals_svg(samples, summaries=None, ci_level: float = 0.90,
                           options: SvgOptions | None = None, metadata: dict | None = None) -> str:
    """
    Individual observations of each group beside the group mean ± CI.

    Args:
        samples (list[Sample]): One column per sample, left to right.
        summaries (list[SampleSummary] | None): Precomputed summaries; computed when omitted.
        ci_level (float): Level of the whiskers.
    """
    samples = list(samples)
    if not samples:
        raise DomainError('no samples to plot')
    if any(s.n < 1 for s in samples):
        raise DomainError('every sample needs at least one value')
    summaries = list(summaries) if summaries is not None else [_whisker_summary(s) for s in samples]
    options = options or SvgOptions(label_width=60, annotation_width=20)

    height = options.height(4)
    top, bottom = options.margin // 2, options.margin // 2 + options.row_height * 4
    intervals = [mean_ci(summary, ci_level) for summary in summaries]
    values = [v for s in samples for v in s.values.tolist()] + [v for pair in intervals for v in pair]
    low, high = min(values), max(values)
    pad = 0.1 * (high - low) if high > low else 1.0
    y = LinearScale((low - pad, high + pad), (bottom, top))

    column = (options.plot_right - options.plot_left) / len(samples)
    groups = []
    for i, (sample, summary, (ci_low, ci_high)) in enumerate(zip(samples, summaries, intervals)):
        centre = options.plot_left + column * (i + 0.5)
        points = [{'cx': _px(centre - column * 0.15 + _jitter(k, column * 0.2)), 'cy': _px(y(v))}
                  for k, v in enumerate(sample.values.tolist())]
        groups.append({
            'label': sample.group or sample.label or f'#{i + 1}',
            'points': points,
            'whisker_x': _px(centre + column * 0.15),
            'mean_y': _px(y(summary.mean)),
            'y1': _px(y(ci_low)),
            'y2': _px(y(ci_high)),
            'label_x': _px(centre),
        })

    context = {
        'width': options.width,
        'height': height,
        'font_size': options.font_size,
        'metadata': _metadata(dict(metadata or {}, ci_level=ci_level)),
        'top': top,
        'bottom': bottom,
        'plot_left': options.plot_left,
        'plot_right': options.plot_right,
        'label_y': bottom + 8 + options.font_size,
        'groups': groups,
        'ticks': [{'y': _px(y(v)), 'label': f'{v:g}'} for v in y.ticks(_nice_step(high - low + 2 * pad))],
        'tick_x': options.plot_left - 6,
    }
    return render_to_string('relatorio/individuals.svg', context)


def _nice_step(span: float) -> float:
    step = 10.0 ** math.floor(math.log10(span))
    return step / 2.0 if span / step < 4 else step
