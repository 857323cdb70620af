import sys

from dommove.cli import main

sys.exit(main())
