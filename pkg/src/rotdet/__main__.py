import sys

from rotdet.cli import main

sys.exit(main())
