from pathlib import Path
import json

from estatistica.exceptions import InputFormatError

from relatorio.cli import AnalysisCommand, render_bundle
from relatorio.report import bundle_from_json, relabel_bundle


class Command(AnalysisCommand):
    help = 'Renderiza de novo um relatório salvo em JSON (tabela, CSV, JSON ou SVG).'

    def add_arguments(self, parser):
        parser.add_argument('bundle', help='JSON bundle written by compare/paired --json')
        parser.add_argument('--decimals', type=int, default=2)
        parser.add_argument('--chances', action='store_true')
        parser.add_argument('--locale', default=None, help='en|pt; rewords the stored report')
        self.add_output_arguments(parser)

    def run(self, **options):
        fmt = self.check_format(options['format'])
        path = Path(options['bundle'])
        if not path.exists():
            raise InputFormatError(f'cannot read {path}: file not found')
        bundle = bundle_from_json(path.read_text(encoding='utf-8'))
        if options['locale']:
            bundle = relabel_bundle(bundle, options['locale'])
        self.echo_config(self.stored_config(bundle))
        self.emit(render_bundle(bundle, fmt, options['decimals'], options['chances']), options)

    @staticmethod
    def stored_config(bundle) -> str:
        return json.dumps(bundle.metadata.get('run_config', bundle.metadata), sort_keys=True)
