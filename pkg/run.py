#!/usr/bin/env python3
"""
Entry point for the simulator CLI.
"""
import sys

from polcipher.cli import main

if __name__ == "__main__":
    sys.exit(main())
