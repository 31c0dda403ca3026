from estatistica.descriptive import Sample
from estatistica.effects import compare_independent
from estatistica.exceptions import InputFormatError

from relatorio.cli import AnalysisCommand
from relatorio.ingest import read_long, read_single_column


class Command(AnalysisCommand):
    help = 'Compara dois grupos independentes: diferença ± IC, p, tamanho do efeito e MBI.'

    def add_arguments(self, parser):
        parser.add_argument('--a', default=None, help='Single-column CSV of group A')
        parser.add_argument('--b', default=None, help='Single-column CSV of group B')
        parser.add_argument('--name', default=None, help='Variable name for two-file input')
        parser.add_argument('--csv', default=None, help='Long CSV: [variable,]group,value')
        parser.add_argument('--groups', nargs='+', default=None,
                            help='Groups to compare, control first (default: order of appearance)')
        self.add_analysis_arguments(parser)
        self.add_output_arguments(parser)

    def run(self, **options):
        two_files = options['a'] or options['b']
        if two_files and options['csv']:
            raise InputFormatError('use either --a/--b or --csv, not both')
        if two_files and not (options['a'] and options['b']):
            raise InputFormatError('--a and --b must be given together')
        if not two_files and not options['csv']:
            raise InputFormatError('no input: give --a and --b, or --csv')

        run_config = self.resolve_config(options)
        if two_files:
            name = options['name'] or 'value'
            a = read_single_column(options['a'], label='A')
            b = read_single_column(options['b'], label='B')
            pairs = [(name, a, b)]
            individuals = [a, b]
        else:
            pairs, individuals = self.long_pairs(options['csv'], options['groups'])
        self.analyse(pairs, run_config, compare_independent, individuals, options)

    @staticmethod
    def long_pairs(path, selected):
        """
        Comparisons from a long file: each later group against the first one,
        for every variable.
        """
        datasets = read_long(path)
        pairs, individuals = [], []
        for data in datasets:
            samples = data.select(selected) if selected else data.samples
            if len(samples) < 2:
                raise InputFormatError(
                    f'"{data.variable}" has {len(samples)} group(s); two are needed'
                )
            control = samples[0]
            for other in samples[1:]:
                name = data.variable if len(samples) == 2 else f'{data.variable}: {other.group} vs {control.group}'
                pairs.append((name, control, other))
            for sample in samples:
                label = sample.group if len(datasets) == 1 else f'{data.variable} {sample.group}'
                individuals.append(Sample(sample.values, label=label, group=label))
        return pairs, individuals
