#!/usr/bin/env python
"""
Ponto de entrada dos comandos de análise.

    python backend/manage.py compare --csv dados.csv
    python backend/manage.py paired --csv pareado.csv
    python backend/manage.py dance --seed 42
    python backend/manage.py plot relatorio.json --format svg
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'magnitudes.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django não encontrado. Ative o ambiente virtual e rode "
            "'pip install -r requirements.txt'."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
