"""Allow ``python -m qpt`` as an alias for the ``qpt`` console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
