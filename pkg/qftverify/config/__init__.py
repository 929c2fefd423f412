from .experiment import config_hash, load_config, parse_config, with_seed
from .settings import Settings, configure_logging, get_settings, reset_settings
