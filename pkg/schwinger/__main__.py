import sys

from schwinger.cli import main

sys.exit(main())
