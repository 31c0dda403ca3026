"""
Shared plumbing of the management commands.

Every command resolves its RunConfig, echoes it to stderr, writes the same
payload bytes to stdout and to --output, and maps engine errors to exit
codes: 2 input/usage, 3 statistical degeneracy, 4 numeric failure.
"""
from pathlib import Path
import logging

from django.core.management.base import BaseCommand, CommandError

from estatistica.configs import ConfigManager, RunConfig
from estatistica.exceptions import (
    ConvergenceError, DegenerateVarianceError, InferenceError,
    InsufficientDataError, NonPositiveValueError,
)
from estatistica.mbi import infer

from .report import (
    ReportBundle, ReportEntry, build_bundle, bundle_to_json,
    render_forest_svg, render_individuals_svg, render_table,
)

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_NUMERIC = 4

# First matching class wins.
EXIT_CODES = [
    (ConvergenceError, EXIT_NUMERIC),
    (InsufficientDataError, EXIT_DEGENERATE),
    (DegenerateVarianceError, EXIT_DEGENERATE),
    (NonPositiveValueError, EXIT_DEGENERATE),
    (InferenceError, EXIT_USAGE),
    (OSError, EXIT_USAGE),
]

OUTPUT_FORMATS = ('md', 'csv', 'json', 'svg')


def exit_code_for(error: Exception) -> int:
    for error_class, code in EXIT_CODES:
        if isinstance(error, error_class):
            return code
    raise error


def write_file(path, payload: str) -> None:
    with open(Path(path), 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(payload)
    logger.info(f'Arquivo gravado: {path}')


def render_bundle(bundle: ReportBundle, fmt: str, decimals: int = 2, with_chances: bool = False) -> str:
    if fmt == 'json':
        return bundle_to_json(bundle)
    if fmt == 'svg':
        return render_forest_svg(bundle)
    table = 'csv' if fmt == 'csv' else 'markdown'
    return render_table(bundle, table, decimals=decimals, with_chances=with_chances)


def _one_line(error: Exception) -> str:
    return ' '.join(str(error).split())


class AnalysisCommand(BaseCommand):
    """
    Base of the analysis commands.

    Subclasses implement run(**options) and use the helpers below; handle()
    turns engine exceptions into CommandError with the matching returncode.
    """

    requires_system_checks = []
    output_formats = OUTPUT_FORMATS
    default_format = 'md'

    def add_output_arguments(self, parser):
        parser.add_argument('--format', '--out', dest='format', default=None,
                            help=f'Payload on stdout: {"|".join(self.output_formats)}')
        parser.add_argument('--output', default=None, help='Write the stdout payload to this file too')
        parser.add_argument('--config', default=None, help='KEY=value options file')
        parser.add_argument('--quiet', action='store_true', help='Do not print the payload on stdout')

    def add_analysis_arguments(self, parser):
        parser.add_argument('--ci', type=float, default=None, help='Confidence level (default 0.90)')
        parser.add_argument('--swc', type=float, default=None, help='Smallest worthwhile change, standardized')
        parser.add_argument('--swc-raw', dest='swc_raw', type=float, default=None,
                            help='Smallest worthwhile change in the data units; replaces --swc')
        parser.add_argument('--variance', default=None, help='welch|pooled')
        parser.add_argument('--log', action='store_true', default=None, help='Analyse natural logs')
        parser.add_argument('--hedges', action='store_true', default=None, help='Hedges small-sample correction')
        parser.add_argument('--scale', default=None, help='Magnitude thresholds, e.g. 0.2,0.6,1.2,2.0')
        parser.add_argument('--ladder', default=None, help='figure|progressive')
        parser.add_argument('--mode', default=None, help='mechanistic|clinical')
        parser.add_argument('--locale', default=None, help='en|pt')
        parser.add_argument('--decimals', type=int, default=2)
        parser.add_argument('--chances', action='store_true', help='Add chance and inference columns to tables')
        parser.add_argument('--svg', default=None, help='Forest plot SVG path')
        parser.add_argument('--csv-out', dest='csv_out', default=None, help='CSV table path')
        parser.add_argument('--json', default=None, help='JSON bundle path')
        parser.add_argument('--md', default=None, help='Markdown table path')
        parser.add_argument('--individuals', default=None, help='Individual-data SVG path')

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except CommandError:
            raise
        except (InferenceError, OSError) as e:
            code = exit_code_for(e)
            logger.error(f'{type(e).__name__}: {e}')
            raise CommandError(_one_line(e), returncode=code) from e

    def run(self, **options):
        raise NotImplementedError

    def check_format(self, fmt: str | None) -> str:
        fmt = fmt or self.default_format
        if fmt == 'markdown':
            fmt = 'md'
        if fmt not in self.output_formats:
            raise CommandError(
                f'--format must be one of {", ".join(self.output_formats)}, got {fmt!r}',
                returncode=EXIT_USAGE,
            )
        return fmt

    def resolve_config(self, options: dict, **extra) -> RunConfig:
        flags = {
            'ci_level': options.get('ci'),
            'swc': options.get('swc'),
            'swc_raw': options.get('swc_raw'),
            'variance_model': options.get('variance'),
            'log_scale': options.get('log'),
            'hedges_correction': options.get('hedges'),
            'scale_thresholds': options.get('scale'),
            'ladder': options.get('ladder'),
            'mode': options.get('mode'),
            'locale': options.get('locale'),
        }
        flags.update(extra)
        config = ConfigManager.resolve(options.get('config'), flags)
        self.echo_config(config.to_json())
        return config

    def echo_config(self, config_json: str) -> None:
        self.stderr.write(f'run-config: {config_json}')

    def emit(self, payload: str, options: dict) -> None:
        """Same bytes to stdout and to --output."""
        if options.get('output'):
            write_file(options['output'], payload)
        if not options.get('quiet'):
            self.stdout.write(payload, ending='')

    def analyse(self, pairs, run_config: RunConfig, compare, individuals=None, options=None) -> ReportBundle:
        """
        Run `compare` on each (name, first, second) and build the report.

        Args:
            pairs: Iterable of (name, first Sample, second Sample).
            run_config (RunConfig): Resolved options.
            compare: compare_independent or compare_paired.
            individuals (list[Sample] | None): Samples for the individual-data plot.
        """
        options = options or {}
        fmt = self.check_format(options.get('format'))
        comparison_cfg = run_config.comparison_config()
        mbi_cfg = run_config.mbi_config()
        entries = []
        for name, first, second in pairs:
            result = compare(first, second, comparison_cfg, name=name)
            entries.append(ReportEntry(name=name, result=result, inference=infer(result, mbi_cfg)))
        bundle = build_bundle(entries, mbi_cfg, {'run_config': run_config.to_dict()})

        decimals = options.get('decimals', 2)
        with_chances = bool(options.get('chances'))
        artifacts = (('svg', 'svg'), ('csv_out', 'csv'), ('json', 'json'), ('md', 'md'))
        for option, artifact_fmt in artifacts:
            if options.get(option):
                write_file(options[option], render_bundle(bundle, artifact_fmt, decimals, with_chances))
        if options.get('individuals') and individuals:
            write_file(options['individuals'], render_individuals_svg(
                individuals, ci_level=run_config.ci_level, metadata={'run_config': run_config.to_dict()},
            ))

        self.emit(render_bundle(bundle, fmt, decimals, with_chances), options)
        return bundle
