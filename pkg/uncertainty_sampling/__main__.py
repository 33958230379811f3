import sys

from uncertainty_sampling.cli import main

sys.exit(main())
