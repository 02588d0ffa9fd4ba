"""
Launcher script for the S/I/Q epidemic toolkit.
"""
import sys
from pathlib import Path


def main():
    # Make the package importable without installation
    project_root = Path(__file__).resolve().parent
    if str(project_root) not in sys.path:
        sys.path.insert(0, str(project_root))

    from app.main import main as cli_main
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
