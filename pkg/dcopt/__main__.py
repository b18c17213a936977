import sys

from dcopt.harness.cli import main

sys.exit(main())
