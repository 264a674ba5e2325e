import sys
from pathlib import Path

# run the tests against the source tree without requiring an install
SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))
