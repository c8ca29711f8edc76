"""Settings for FastAPI service and local script"""


from functools import lru_cache
from typing import Any

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Loads settings from .env file"""
    model_config = SettingsConfigDict(extra='allow', env_file='.env')

    # Numerics
    TOLERANCE: float = 1e-9
    POWER_ITER_MAX: int = 10 ** 6
    DIRECT_SOLVE_MAX_STATES: int = 1024
    LARGE_N_REFINE_PASSES: int = 0
    SEED: int = 0

    # Compression
    STATE_BUDGET: int = 1 << 16
    BLOCK_SIZE: int = 1 << 20
    DEFAULT_CODEC: str = "huffman"
    DEFAULT_STATES: int = 2

    # Should be defined in a .env file
    MAX_FILE_SIZE_MB: int = 0
    ENVIRONMENT: str = "local"
    CUSTOM_PATH: str = ""
    LOG_LEVEL: str = "INFO"

    def cli_defaults(self) -> dict[str, Any]:
        """Defaults for aeds_compress.cli.main"""
        return {
            'codec': self.DEFAULT_CODEC,
            'states': self.DEFAULT_STATES,
            'seed': self.SEED,
            'tolerance': self.TOLERANCE,
            'block_size': self.BLOCK_SIZE,
            'state_budget': self.STATE_BUDGET,
            'direct_max_states': self.DIRECT_SOLVE_MAX_STATES,
            'power_iter_max': self.POWER_ITER_MAX,
            'refine_passes': self.LARGE_N_REFINE_PASSES,
        }


settings = Settings()


@lru_cache()
def get_settings() -> Settings:
    return settings
