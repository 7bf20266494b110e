import sys

from dsmopt.cli import main

sys.exit(main())
