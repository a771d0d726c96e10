import os
from dotenv import load_dotenv
# Load environment variables from .env file at the very start
load_dotenv()

class Config:
    # Second-order quantifiers enumerate 2^(n^k) relations; n^k above this cap is refused
    SO_CAP = int(os.environ.get("SRTM_SO_CAP", 24))

    # Defaults for the command line when flags are omitted
    DEFAULT_SEMIRING = os.environ.get("SRTM_DEFAULT_SEMIRING", "nat")
    DEFAULT_BUDGET = int(os.environ.get("SRTM_DEFAULT_BUDGET", 1000))

    # Memo table for branch configurations in machine_value
    MEMOIZE = os.environ.get("SRTM_MEMOIZE", "1") not in ("0", "false", "False", "no")

    LOG_LEVEL = os.environ.get("SRTM_LOG_LEVEL", "WARNING").upper()

    # Seed for randomized suites and selftest
    SEED = int(os.environ.get("SRTM_SEED", 20240601))

    # Shipped corpus of machines, structures and formulas
    CORPUS_DIR = os.environ.get(
        "SRTM_CORPUS_DIR",
        os.path.join(os.path.dirname(os.path.abspath(__file__)), "corpus"),
    )
