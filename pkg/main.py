"""Entry point for uniprov."""

from __future__ import annotations

import sys

import cli


def main() -> None:
    """Run the uniprov command line and exit with its status."""
    sys.exit(cli.main())


if __name__ == "__main__":
    main()
