import os
import sys

from dotenv import load_dotenv

load_dotenv()


_VALID_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR"}
_VALID_PHI3_SIGNS = {"minus", "plus"}
_VALID_OUTPUTS = {"json", "text"}


def _parse_choice(name: str, raw: str, allowed: set[str], default: str) -> str:
    """Normalize `raw` against `allowed` (case-insensitive).

    Blank -> default. Unknown values warn on stderr and fall back to default.
    """
    value = raw.strip()
    if not value:
        return default
    folded = value.upper() if default.isupper() else value.lower()
    if folded not in allowed:
        print(f"Warning: {name}={raw!r} is not one of {sorted(allowed)}, using {default!r}", file=sys.stderr)
        return default
    return folded


def _int_env(name: str, default: int, minimum: int = 0) -> int:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw.replace("_", ""))
    except ValueError:
        print(f"Warning: {name}={raw!r} is not a valid integer, using default ({default})", file=sys.stderr)
        return default
    if value < minimum:
        print(f"Warning: {name}={value} is below {minimum}, using default ({default})", file=sys.stderr)
        return default
    return value


# Budget of single rewrite steps per normal-form computation.
STEP_LIMIT: int = _int_env("NCRW_STEP_LIMIT", 1_000_000, minimum=1)
# Knuth-Bendix gives up once the rule set grows past this.
MAX_RULES: int = _int_env("NCRW_MAX_RULES", 500, minimum=1)
# Worker processes for overlap resolution; 1 runs inline.
PARALLEL: int = _int_env("NCRW_PARALLEL", 1, minimum=1)

LOG_LEVEL: str = _parse_choice("NCRW_LOG_LEVEL", os.environ.get("NCRW_LOG_LEVEL", ""), _VALID_LOG_LEVELS, "INFO")
PHI3_SIGN: str = _parse_choice("NCRW_PHI3_SIGN", os.environ.get("NCRW_PHI3_SIGN", ""), _VALID_PHI3_SIGNS, "minus")
OUTPUT_FORMAT: str = _parse_choice("NCRW_OUTPUT", os.environ.get("NCRW_OUTPUT", ""), _VALID_OUTPUTS, "json")
