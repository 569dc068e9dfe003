import sys

from gcdsum.cli import main

sys.exit(main())
