"""Test that settings are loaded correctly"""

from src.settings import Settings


def test_config():
    """Test that settings are loaded correctly"""
    settings = Settings(_env_file='.env.example')
    assert settings.TOLERANCE == 1e-9
    assert settings.POWER_ITER_MAX == 1000000
    assert settings.DIRECT_SOLVE_MAX_STATES == 1024
    assert settings.LARGE_N_REFINE_PASSES == 0
    assert settings.SEED == 7
    assert settings.STATE_BUDGET == 65536
    assert settings.BLOCK_SIZE == 1048576
    assert settings.DEFAULT_CODEC == "type2"
    assert settings.DEFAULT_STATES == 4
    assert settings.MAX_FILE_SIZE_MB == 123
    assert settings.ENVIRONMENT == "local"
    assert settings.CUSTOM_PATH == ""
    assert settings.LOG_LEVEL == "INFO"


def test_cli_defaults():
    defaults = Settings(_env_file='.env.example').cli_defaults()
    assert defaults['codec'] == "type2"
    assert defaults['states'] == 4
    assert defaults['seed'] == 7
    assert defaults['block_size'] == 1 << 20
