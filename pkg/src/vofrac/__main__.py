"""Allow ``python -m vofrac`` to invoke the CLI."""

import sys

from .audit_cli import main

if __name__ == "__main__":
    sys.exit(main())
