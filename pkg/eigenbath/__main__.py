import sys

from eigenbath.cli import main

sys.exit(main())
