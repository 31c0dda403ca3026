import os
import sys
import django
from pathlib import Path

# Raiz do backend no path, como nos scripts de teste do projeto
BASE_DIR = Path(__file__).resolve().parent
sys.path.append(str(BASE_DIR))

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "magnitudes.settings")
django.setup()
