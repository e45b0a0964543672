import sys

from hyperbolic_eisenstein.cli import main

sys.exit(main())
