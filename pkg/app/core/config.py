import os
from dotenv import load_dotenv

load_dotenv()


def _env_flag(name: str, default: str = "0") -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


BUMP_THREADS = int(os.getenv("BUMP_THREADS", "1"))
BUMP_LOG_LEVEL = os.getenv("BUMP_LOG_LEVEL", "INFO")
BUMP_MAX_API_TRIALS = int(os.getenv("BUMP_MAX_API_TRIALS", "2000"))
BUMP_CHECK_INVARIANTS = _env_flag("BUMP_CHECK_INVARIANTS")
