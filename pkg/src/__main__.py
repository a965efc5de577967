"""Main entry point for CLI."""

from src.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
