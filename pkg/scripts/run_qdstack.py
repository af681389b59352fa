#!/usr/bin/env python
"""
qdstack Runner - CLI Entry Point

This script provides command-line access to qdstack without installing the
package. It accepts exactly the same subcommands as the ``qdstack`` console
script.

Usage:
    # Validate the published 9-dot transition table
    python scripts/run_qdstack.py validate --fixture table1 --tsw-ps 10

    # Design a 3-dot stack and keep the JSON report
    python scripts/run_qdstack.py design --n-dots 3 --json-out design.json

    # Pulsed controlled-NOT fidelities on the default stack
    python scripts/run_qdstack.py gate --mode pulsed

    # List subcommands
    python scripts/run_qdstack.py --help
"""

import codecs
import sys
from pathlib import Path

# Fix Windows console encoding for UTF-8 output (ħ, Ω in help texts)
if sys.platform == "win32":
    if hasattr(sys.stdout, "buffer"):
        sys.stdout = codecs.getwriter("utf-8")(sys.stdout.buffer, "replace")
    if hasattr(sys.stderr, "buffer"):
        sys.stderr = codecs.getwriter("utf-8")(sys.stderr.buffer, "replace")

# Add project root to path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from qdstack.orchestration.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
