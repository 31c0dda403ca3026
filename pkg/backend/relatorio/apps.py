from django.apps import AppConfig


class RelatorioConfig(AppConfig):
    """Tabelas, SVG e os comandos compare, paired, dance e plot."""

    name = 'relatorio'
    verbose_name = 'Relatórios de magnitude'
