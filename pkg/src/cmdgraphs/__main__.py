import sys

from cmdgraphs.cli import main

sys.exit(main())
