"""Run the "halfhop" command line interface with "python -m halfhop"."""
import sys

from halfhop.cli import main

sys.exit(main())
