"""
Configuration file for the Misiurewicz / Newton polygon toolkit

Every setting can be overridden from the environment (or a .env file).
"""

import os

# Load environment variables from .env.local if available
try:
    from dotenv import load_dotenv
    load_dotenv('.env.local')
    load_dotenv()  # Also try regular .env
except ImportError:
    pass  # python-dotenv not installed, rely on environment variables


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return default
    return int(value)


# Arithmetic Settings
DEFAULT_PRECISION = _env_int("MISIUREWICZ_PRECISION", 20)  # p-adic lifting precision
SIZE_CAP = _env_int("MISIUREWICZ_SIZE_CAP", 10**9)  # max degree x max coefficient bits

# Lemma enumeration caps (nondecreasing k-tuples grow exponentially in k)
POWER_BOUND_MAX_K = _env_int("MISIUREWICZ_POWER_BOUND_MAX_K", 5)
POWER_BOUND_MAX_DEGREE = _env_int("MISIUREWICZ_POWER_BOUND_MAX_DEGREE", 12)

# The literal (s_m^d - sigma_m^d) / (s_m - sigma_m) route is a cross-check only
LITERAL_DIVISION_MAX_DEGREE = _env_int("MISIUREWICZ_LITERAL_MAX_DEGREE", 400)

# Certificate Settings
AUX_PRIME_COUNT = _env_int("MISIUREWICZ_AUX_PRIMES", 8)
AUX_PRIME_SEARCH_LIMIT = _env_int("MISIUREWICZ_AUX_PRIME_LIMIT", 64)

# Orbit cache (empty = in-memory only)
CACHE_PATH = os.environ.get("MISIUREWICZ_CACHE_PATH", "")

# Verify Settings
DEFAULT_JOBS = _env_int("MISIUREWICZ_JOBS", 1)

# Logging
LOG_LEVEL = os.environ.get("MISIUREWICZ_LOG_LEVEL", "WARNING")

# JSON API Configuration
API_HOST = os.environ.get("MISIUREWICZ_API_HOST", "127.0.0.1")
API_PORT = _env_int("MISIUREWICZ_API_PORT", 5000)

# Export Settings
EXPORT_FORMATS = ["json", "csv", "pretty"]
