import json

from estatistica.configs import ConfigManager
from estatistica.simulate import run_dance

from relatorio.cli import AnalysisCommand, write_file
from relatorio.report import render_dance_svg

# Below the environment and the config file; the analysis defaults are 0.90/welch.
DANCE_DEFAULTS = {'ci_level': 0.95, 'variance_model': 'pooled'}


class Command(AnalysisCommand):
    help = 'Simula replicações do mesmo experimento ("dança dos valores de p").'

    output_formats = ('csv', 'json', 'svg')
    default_format = 'csv'

    def add_arguments(self, parser):
        parser.add_argument('--experiments', type=int, default=None, help='Replications (default 25)')
        parser.add_argument('--n', type=int, default=None, help='Sample size per group (default 20)')
        parser.add_argument('--sigma', type=float, default=None, help='Population SD (default 20)')
        parser.add_argument('--delta', type=float, default=None, help='Difference of population means (default 10)')
        parser.add_argument('--alpha', type=float, default=None, help='Significance level (default 0.05)')
        parser.add_argument('--ci', type=float, default=None, help='Per-experiment CI level (default 0.95)')
        parser.add_argument('--variance', default=None, help='pooled|welch (default pooled)')
        parser.add_argument('--seed', type=int, default=None, help='Required, 64-bit unsigned')
        parser.add_argument('--workers', type=int, default=None)
        parser.add_argument('--summary', action='store_true', help='Print the summary instead of the records')
        parser.add_argument('--svg', default=None)
        parser.add_argument('--csv', default=None)
        parser.add_argument('--json', default=None)
        self.add_output_arguments(parser)

    def run(self, **options):
        fmt = self.check_format(options['format'])
        run_config = ConfigManager.resolve(options['config'], {
            'n_experiments': options['experiments'],
            'n_per_group': options['n'],
            'sigma': options['sigma'],
            'delta_mu': options['delta'],
            'alpha': options['alpha'],
            'ci_level': options['ci'],
            'variance_model': options['variance'],
            'seed': options['seed'],
            'workers': options['workers'],
        }, defaults=DANCE_DEFAULTS)
        cfg = run_config.dance_config()
        self.echo_config(json.dumps(dict(cfg.to_dict(), workers=run_config.workers), sort_keys=True))

        result = run_dance(cfg, workers=run_config.workers)
        if options['svg']:
            write_file(options['svg'], render_dance_svg(result, cfg))
        if options['csv']:
            write_file(options['csv'], result.to_csv())
        if options['json']:
            write_file(options['json'], result.to_json())

        if options['summary']:
            self.emit(self.summary_text(result), options)
            return
        payloads = {'csv': result.to_csv, 'json': result.to_json, 'svg': lambda: render_dance_svg(result, cfg)}
        self.emit(payloads[fmt](), options)

    @staticmethod
    def summary_text(result) -> str:
        summary = result.summary
        lines = [
            f'experiments: {summary.n_experiments}',
            f'count_significant: {summary.count_significant}',
            f'significant_fraction: {summary.significant_fraction:.4f}',
            f'ci_capture_count: {summary.ci_capture_count}',
            f'capture_rate: {summary.capture_rate:.4f}',
            f'mean_diff_of_diffs: {summary.mean_diff_of_diffs:.4f}',
        ]
        lines += [f'category {glyph}: {count}' for glyph, count in summary.category_counts.items()]
        return '\n'.join(lines) + '\n'
