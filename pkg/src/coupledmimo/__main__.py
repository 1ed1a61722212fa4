import sys

from coupledmimo.cli import main

sys.exit(main())
