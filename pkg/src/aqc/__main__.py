import sys

from aqc.cli import main

sys.exit(main())
