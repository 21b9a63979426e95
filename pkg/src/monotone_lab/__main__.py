import sys

from monotone_lab.cli import main

sys.exit(main())
