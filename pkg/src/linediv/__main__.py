import sys

from linediv.cli import main

sys.exit(main())
