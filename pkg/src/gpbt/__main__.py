import sys

from gpbt.harness.cli import main

sys.exit(main())
