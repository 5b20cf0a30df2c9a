import sys

from btcgp.cli import main

sys.exit(main())
