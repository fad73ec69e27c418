import sys

from binmatroid.cli import main

sys.exit(main())
