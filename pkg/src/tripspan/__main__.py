import sys

from tripspan.cli import main

sys.exit(main())
