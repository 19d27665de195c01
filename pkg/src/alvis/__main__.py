import sys

from alvis.cli import main

sys.exit(main())
