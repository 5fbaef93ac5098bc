import sys
from onebit_mimo.cli import main

if __name__ == "__main__":
    sys.exit(main())
