import sys
from pathlib import Path

# src holds the packages, the root holds evaluation/
sys.path.insert(0, str(Path(__file__).parent / "src"))
sys.path.insert(0, str(Path(__file__).parent))

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main())
