import sys

from facloc.cli import main

sys.exit(main())
