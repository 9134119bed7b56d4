import sys

from svagen.cli import main

sys.exit(main())
