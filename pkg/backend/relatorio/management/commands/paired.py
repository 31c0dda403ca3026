from estatistica.effects import compare_paired
from estatistica.exceptions import InputFormatError

from relatorio.cli import AnalysisCommand
from relatorio.ingest import read_paired


class Command(AnalysisCommand):
    help = 'Compara medidas pareadas (pré/pós): diferença ± IC, p, tamanho do efeito e MBI.'

    def add_arguments(self, parser):
        parser.add_argument('--csv', default=None, help='Paired CSV: [variable,]pre,post')
        parser.add_argument('--standardizer', default=None, help='baseline-sd|diff-sd')
        self.add_analysis_arguments(parser)
        self.add_output_arguments(parser)

    def run(self, **options):
        if not options['csv']:
            raise InputFormatError('no input: give --csv with pre,post columns')
        run_config = self.resolve_config(options, standardizer=options['standardizer'])
        datasets = read_paired(options['csv'])

        pairs = [(data.variable, data.pre, data.post) for data in datasets]
        individuals = []
        if len(datasets) == 1:
            individuals = [datasets[0].pre, datasets[0].post]
        self.analyse(pairs, run_config, compare_paired, individuals, options)
