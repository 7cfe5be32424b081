"""Runtime settings for orthomat.

Uses pydantic-settings (https://docs.pydantic.dev/latest/concepts/pydantic_settings/) so
every limit can be overridden from the environment or a local .env file, e.g.
``SEARCH_MAX_N=7 python -m orthomat search-rep --tract F3 fano.txt``.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Limits and knobs with environment variable support."""

    # Ground set. Masks must fit one machine word.
    MAX_N: int = 16

    # Representation search is exhaustive, keep it at desk scale unless asked otherwise
    SEARCH_MAX_N: int = 6

    # Null preservation of homomorphisms is checked on all unit multisets up to this length
    HOM_CHECK_LENGTH: int = 6

    # Length used when validating custom tracts and the T4 property of built-in ones
    TRACT_CHECK_LENGTH: int = 8

    # Materialised vector families refuse to enumerate more than |F|^(2n) vectors
    MAX_ENUMERATION: int = 10**8

    # Worker count for pair-partitioned checks (1 = inline)
    WORKERS: int = 1

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_JSON: bool = False

    # Randomised acceptance checks
    PERTURBATION_TRIALS: int = 200
    SEED: int = 0

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True
    )


# Global settings instance
settings = Settings()
