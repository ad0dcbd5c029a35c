"""Entry point for the eulertrie command line interface."""
from __future__ import annotations

from eulertrie.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
