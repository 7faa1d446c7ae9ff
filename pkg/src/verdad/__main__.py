import sys

from verdad.cli import main

sys.exit(main())
