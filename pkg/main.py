"""
Main script for chartforge.
Runs the command-line interface: chart checks, moves, enumeration, verification and rendering.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from cli.runner import run


if __name__ == '__main__':
    sys.exit(run(sys.argv[1:]))
