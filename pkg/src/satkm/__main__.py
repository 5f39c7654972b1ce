"""Module entry point: python -m satkm."""

from .cli import entry

if __name__ == "__main__":
    entry()
