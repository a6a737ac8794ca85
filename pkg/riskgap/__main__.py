import sys

from riskgap.cli import main

sys.exit(main())
