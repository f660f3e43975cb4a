"""``python -m pointflux``."""
import sys

from .cli import main

sys.exit(main())
