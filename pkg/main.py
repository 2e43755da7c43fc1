#!/usr/bin/env python3
"""
Wave asymptotics toolkit
Command-line entry point for the ODE, singulant, recurrence and amplitude computations
"""

import sys
import os

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from harness.cli import main

if __name__ == "__main__":
    sys.exit(main())
