import sys

from epochma.cli import main

sys.exit(main())
